/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cbb/chordal.hpp"
#include "cbb/model.hpp"

namespace cbb {

/// Product of distinct spins; the empty monomial is the constant 1.
/// Indices are sorted and duplicate-free since s_i^2 = 1.
struct Monomial {
  std::vector<SpinIndex> indices;

  Monomial() = default;
  Monomial(std::initializer_list<SpinIndex> idx);
  explicit Monomial(std::vector<SpinIndex> idx);

  std::size_t degree() const noexcept { return indices.size(); }
  bool is_constant() const noexcept { return indices.empty(); }

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// a * b under s_i^2 = 1: the symmetric difference of the index sets.
Monomial canonical_product(const Monomial& a, const Monomial& b);

/// Monomials indexing the rows of one moment block: the constant, then the
/// clique's spins ascending, then (level 2) all pairs in lexicographic order.
struct MomentBasis {
  std::vector<Vertex> clique;
  int level = 1;
  std::vector<Monomial> monomials;
};

MomentBasis build_basis(const std::vector<Vertex>& clique, int level);

inline constexpr std::size_t kConstantVariable = 0;
inline constexpr std::size_t kNoVariable = std::numeric_limits<std::size_t>::max();

/// One clique's moment matrix: entry (r, c) is the variable of
/// basis[r] * basis[c].
struct MomentBlock {
  MomentBasis basis;
  std::size_t size = 0;
  std::vector<std::size_t> index;  // row-major size x size

  std::size_t at(std::size_t r, std::size_t c) const { return index[r * size + c]; }
};

/// sum_k coefficients[k].second * y[coefficients[k].first] >= lower.
/// Triangle cuts record the spin triple and which of the four sign patterns
/// (0: +++, 1: +--, 2: -+-, 3: --+ on y_ij, y_ik, y_jk) they encode.
struct LinearCut {
  std::vector<std::pair<std::size_t, double>> coefficients;
  double lower = -1.0;
  std::array<SpinIndex, 3> triple{};
  int pattern = 0;
};

struct ObjectiveTerm {
  std::size_t variable;
  double coefficient;
};

/// Clique-wise moment relaxation of an Ising model.
///
/// One global variable per distinct monomial; variable 0 is the constant
/// monomial pinned to 1.  A monomial shared between blocks is a single
/// variable, which is what ties overlapping cliques together.  Diagonal block
/// entries are always the constant.  The relaxation value of a moment vector y
/// is constant + sum objective[k].coefficient * y[objective[k].variable].
struct RelaxationProblem {
  std::size_t num_spins = 0;
  std::vector<Monomial> monomials;  // variable -> monomial
  std::map<Monomial, std::size_t> variables;
  std::vector<MomentBlock> blocks;
  std::vector<ObjectiveTerm> objective;
  double constant = 0.0;
  std::vector<LinearCut> cuts;
  std::vector<std::size_t> singleton;  // spin -> variable of its one-body monomial

  std::size_t num_variables() const noexcept { return monomials.size(); }
  std::size_t variable(const Monomial& m) const;  // kNoVariable if absent
  std::size_t pair_variable(SpinIndex i, SpinIndex j) const;
  std::size_t max_block_size() const;
  double objective_value(std::span<const double> y) const;
};

/// Build the relaxation: cliques with fewer than `n_t` spins get level 2,
/// the others level 1.
RelaxationProblem assemble(const SpinModel& model, const CliqueDecomposition& decomp,
                           std::size_t n_t);

/// Copy of `problem` with `cuts` appended.
RelaxationProblem with_cuts(RelaxationProblem problem, const std::vector<LinearCut>& cuts);

/// Scan the triples of every block's clique whose three pair moments are
/// variables and return up to `max_new` violated triangle inequalities
/// (violation above `tolerance`), most violated first.  Cuts already present
/// in the problem are skipped.  With `level1_only` only level-1 blocks are
/// scanned (level-2 blocks imply every triangle inequality on their spins).
std::vector<LinearCut> find_violated_triangles(const RelaxationProblem& problem,
                                               std::span<const double> y, std::size_t max_new,
                                               double tolerance = 1e-6, bool level1_only = false);

/// Amount by which y violates the cut (<= 0 when satisfied).
double cut_violation(const LinearCut& cut, std::span<const double> y);

/// The moment vector of a deterministic configuration: y_m = prod_{i in m} s_i.
std::vector<double> configuration_moments(const RelaxationProblem& problem,
                                          std::span<const std::int8_t> config);

/// Sparse text export: variable count and monomials, block index maps,
/// objective triplets and cuts.
std::string describe(const RelaxationProblem& problem);

}  // namespace cbb
