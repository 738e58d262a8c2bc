/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cbb/bounds.hpp"
#include "oracles.hpp"

using namespace cbb;

namespace {

double tol(double e) { return 1e-6 * (1.0 + std::abs(e)); }

LowerBoundParams level(std::size_t n_t, bool cuts = false)
{
  LowerBoundParams p;
  p.n_t = n_t;
  p.cuts = cuts;
  return p;
}

const SpinModel kTriangle(3, {{0, 1, -1.0}, {0, 2, -1.0}, {1, 2, -1.0}}, {});

}  // namespace

TEST_CASE("lower bounds on small models")
{
  const SpinModel f(2, {{0, 1, 1.0}}, {});
  CHECK(std::abs(compute_bounds(f).lower + 1.0) <= tol(1));
  CHECK(std::abs(compute_bounds(kTriangle, RelaxationMode::chordal, level(7)).lower + 1.0) <= tol(1));
  CHECK(compute_bounds(kTriangle, RelaxationMode::chordal, level(1)).lower ==
        doctest::Approx(-1.5).epsilon(1e-7));
  const auto sq = compute_bounds(gen_square(3, 0, 1));
  CHECK(std::abs(sq.lower + 12.0) <= tol(12));
  CHECK(sq.upper == -12.0);
}

TEST_CASE("sign extraction")
{
  CHECK(extract_configuration(std::vector<double>{0.9, -0.3}) == SpinConfiguration{1, -1});
  CHECK(extract_configuration(std::vector<double>{0.0, 0.0, 0.0}) == SpinConfiguration{1, 1, 1});
  const std::vector<double> y{0.2, -0.7, 0.0, 1e-9};
  std::vector<double> scaled;
  for (double v : y) scaled.push_back(3.5 * v);
  CHECK(extract_configuration(y) == extract_configuration(scaled));
}

TEST_CASE("upper bounds")
{
  const SpinModel f(2, {{0, 1, 1.0}}, {});
  const auto b = compute_bounds(f);
  CHECK(b.upper == -1.0);
  CHECK(energy(f, b.config) == b.upper);
  const SpinModel one(1, {}, {{0, 0.5}});
  const auto c = compute_bounds(one);
  CHECK(c.upper == -0.5);
  CHECK(c.config == SpinConfiguration{-1});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SpinModel m = gen_random(12, 0.3, seed);
    const double eg = oracle::gray_code_ground(m);
    const auto r = compute_bounds(m);
    CHECK(r.upper >= eg - tol(eg));
    CHECK(r.lower <= eg + tol(eg));
    CHECK(energy(m, r.config) == r.upper);
  }
}

TEST_CASE("rounding on a 3x3 lattice is close to the ground state")
{
  const SpinModel m = gen_square(3, 1.5, 1);
  const double eg = oracle::gray_code_ground(m);
  const auto r = compute_bounds(m);
  CHECK(r.lower <= eg + tol(eg));
  CHECK(r.upper >= eg - tol(eg));
  CHECK(r.upper - eg <= 0.5 * std::abs(eg));
}

TEST_CASE("empty model")
{
  const SpinModel m(0, {}, {}, 2.5);
  const auto r = compute_bounds(m);
  CHECK(r.lower == 2.5);
  CHECK(r.upper == 2.5);
  CHECK(r.config.empty());
}

TEST_CASE("hierarchy and cuts are monotone")
{
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const SpinModel m = gen_random(10, 0.5, seed);
    const double eg = oracle::gray_code_ground(m);
    const auto d = chordal_extension(dependency_graph(m));
    const double l1 = lower_bound(m, d, level(1)).bound;
    const double hy = lower_bound(m, d, level(7)).bound;
    const double l2 = lower_bound(m, d, level(64)).bound;
    const auto cut = lower_bound(m, d, level(1, true));
    CHECK(l1 <= hy + tol(eg));
    CHECK(hy <= l2 + tol(eg));
    CHECK(l2 <= eg + tol(eg));
    CHECK(cut.bound >= l1 - tol(eg));
    CHECK(cut.bound <= eg + tol(eg));
  }
}

TEST_CASE("cut loop on the frustrated triangle")
{
  const auto d = chordal_extension(dependency_graph(kTriangle));
  const auto r = lower_bound(kTriangle, d, level(1, true));
  CHECK(r.cut_rounds >= 1);
  CHECK(r.cuts_added >= 1);
  CHECK(std::abs(r.bound + 1.0) <= tol(1));
}

TEST_CASE("Cholesky vectors reproduce the one-body signs")
{
  // Factor each block as V V^T and compare sign(v_0 . v_j) with sign(<s_j>).
  const SpinModel m = gen_square(4, 1.5, 3);
  const auto d = chordal_extension(dependency_graph(m));
  const auto lb = lower_bound(m, d, level(7));
  const auto signs = extract_configuration(lb.problem, lb.solution);
  for (std::size_t l = 0; l < lb.problem.blocks.size(); ++l) {
    const auto& block = lb.problem.blocks[l];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lb.solution.block_matrices[l]);
    const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd V = eig.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    for (std::size_t k = 0; k < block.basis.clique.size(); ++k) {
      const double dot = V.row(0).dot(V.row(1 + k));
      if (std::abs(dot) < 1e-8) continue;
      CHECK((dot >= 0 ? 1 : -1) == signs[block.basis.clique[k]]);
    }
  }
}

TEST_CASE("dense mode bounds")
{
  const SpinModel m = gen_square(3, 1.5, 2);
  const double eg = oracle::gray_code_ground(m);
  const auto r = compute_bounds(m, RelaxationMode::dense);
  CHECK(r.max_block_size == 10);
  CHECK(r.lower <= eg + tol(eg));
}
