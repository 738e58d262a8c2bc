/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <doctest.h>

#include <cmath>

#include "cbb/error.hpp"
#include "cbb/sdp_solver.hpp"
#include "oracles.hpp"

using namespace cbb;

namespace {

SDPSolution solve_model(const SpinModel& m, std::size_t n_t, bool dense = false)
{
  const auto g = dependency_graph(m);
  return solve(assemble(m, dense ? dense_decomposition(g) : chordal_extension(g), n_t));
}

const SpinModel kTriangle(3, {{0, 1, -1.0}, {0, 2, -1.0}, {1, 2, -1.0}}, {});

}  // namespace

TEST_CASE("frustrated triangle: level 1 versus level 2")
{
  const auto l1 = solve_model(kTriangle, 1);
  CHECK(l1.status == SdpStatus::optimal);
  CHECK(l1.dual_bound == doctest::Approx(-1.5).epsilon(1e-7));
  CHECK(l1.primal_objective == doctest::Approx(-1.5).epsilon(1e-7));
  const auto l2 = solve_model(kTriangle, 7);
  CHECK(l2.status == SdpStatus::optimal);
  CHECK(std::abs(l2.dual_bound + 1.0) <= 1e-6);
}

TEST_CASE("two-spin ferromagnet is tight at level 1")
{
  const auto s = solve_model(SpinModel(2, {{0, 1, 1.0}}, {}), 1);
  CHECK(s.status == SdpStatus::optimal);
  CHECK(std::abs(s.dual_bound + 1.0) <= 1e-6);
  CHECK(s.y[0] == 1.0);
}

TEST_CASE("zero-field square lattice is tight at the root")
{
  const auto s = solve_model(gen_square(3, 0, 1), 7);
  CHECK(std::abs(s.dual_bound + 12.0) <= 1e-6 * 13);
}

TEST_CASE("bounds are valid and the primal point is feasible")
{
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const SpinModel m = gen_random(9, 0.5, seed);
    const double eg = oracle::gray_code_ground(m);
    for (std::size_t n_t : {1, 7, 20}) {
      const auto g = dependency_graph(m);
      const auto p = assemble(m, chordal_extension(g), n_t);
      const auto s = solve(p);
      CHECK(s.status == SdpStatus::optimal);
      CHECK(s.dual_bound <= eg + 1e-6);
      CHECK(s.dual_bound <= s.primal_objective);
      CHECK(s.primal_objective - s.dual_bound <= 1e-6 * (1 + std::abs(eg)));
      const auto f = feasibility_check(p, s.y);
      CHECK(f.min_eigenvalue > -1e-9);
      CHECK(f.objective == doctest::Approx(s.primal_objective).epsilon(1e-12));
      CHECK(s.block_matrices.size() == p.blocks.size());
    }
  }
}

TEST_CASE("chordal and dense level-1 relaxations agree")
{
  // positive semidefinite completion: the clique-wise problem has the same value
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SpinModel m = gen_square(3, 1.5, seed);
    const auto a = solve_model(m, 1, false);
    const auto b = solve_model(m, 1, true);
    CHECK(a.primal_objective == doctest::Approx(b.primal_objective).epsilon(1e-6));
  }
}

TEST_CASE("scale equivariance")
{
  const SpinModel m = gen_random(8, 0.6, 11);
  const auto a = solve_model(m, 7);
  const auto b = solve_model(m.scaled(1000.0), 7);
  CHECK(b.primal_objective == doctest::Approx(1000.0 * a.primal_objective).epsilon(1e-6));
  const auto c = solve_model(m.scaled(1e-3), 7);
  CHECK(c.primal_objective == doctest::Approx(1e-3 * a.primal_objective).epsilon(1e-6));
}

TEST_CASE("cuts close the triangle gap at level 1")
{
  auto p = assemble(kTriangle, chordal_extension(dependency_graph(kTriangle)), 1);
  const auto s = solve(p);
  const auto cuts = find_violated_triangles(p, s.y, 10);
  REQUIRE(!cuts.empty());
  const auto s2 = solve(with_cuts(p, cuts));
  CHECK(s2.status == SdpStatus::optimal);
  CHECK(std::abs(s2.dual_bound + 1.0) <= 1e-6);
}

TEST_CASE("problem without couplings")
{
  const SpinModel m(3, {}, {{0, 1.0}, {2, -2.0}});
  const auto s = solve_model(m, 7);
  CHECK(std::abs(s.dual_bound + 3.0) <= 1e-6);
}

TEST_CASE("malformed problems are rejected")
{
  auto p = assemble(kTriangle, chordal_extension(dependency_graph(kTriangle)), 1);
  auto bad = p;
  bad.blocks[0].index[0] = 1;
  CHECK_THROWS_AS(solve(bad), ContractViolation);
  bad = p;
  bad.blocks[0].index[1] = 2;  // breaks symmetry
  CHECK_THROWS_AS(solve(bad), ContractViolation);
  RelaxationProblem empty;
  CHECK_THROWS_AS(solve(empty), ContractViolation);
  CHECK_THROWS_AS(feasibility_check(p, std::vector<double>(2, 0.0)), ContractViolation);
}

TEST_CASE("status names")
{
  CHECK(to_string(SdpStatus::optimal) == "optimal");
  CHECK(to_string(SdpStatus::numerical_trouble) == "numerical_trouble");
}
