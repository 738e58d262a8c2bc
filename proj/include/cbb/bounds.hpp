/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cbb/chordal.hpp"
#include "cbb/model.hpp"
#include "cbb/relaxation.hpp"
#include "cbb/sdp_solver.hpp"

namespace cbb {

struct LowerBoundParams {
  std::size_t n_t = 7;              ///< cliques smaller than this get level 2
  bool cuts = false;                ///< triangle-cut loop
  std::size_t max_cut_rounds = 10;
  std::size_t cuts_per_round = 50;
  double cut_tolerance = 1e-6;      ///< minimum violation for a cut to be added
  SdpTolerances sdp;
};

struct LowerBound {
  double bound = 0.0;               ///< certified, best over all cut rounds
  RelaxationProblem problem;        ///< last problem solved (with its cuts)
  SDPSolution solution;             ///< solution of `problem`
  std::size_t cut_rounds = 0;
  std::size_t cuts_added = 0;
};

/// Solve the relaxation of `model` over `decomp`, then optionally add violated
/// triangle inequalities from level-1 blocks and re-solve until the bound
/// improves by less than 1e-6 (1 + |bound|), nothing is violated, or the round
/// budget is spent.  A solver failure ends the loop; the bound is then the
/// best safe value seen so far.
LowerBound lower_bound(const SpinModel& model, const CliqueDecomposition& decomp,
                       const LowerBoundParams& params = {});

/// One-body moments <s_i> of the solution, indexed by spin.
std::vector<double> one_body_moments(const RelaxationProblem& problem, const SDPSolution& solution);

/// s_i = +1 if <s_i> >= 0 else -1.
SpinConfiguration extract_configuration(std::span<const double> one_body);
SpinConfiguration extract_configuration(const RelaxationProblem& problem,
                                        const SDPSolution& solution);

struct UpperBound {
  double energy = 0.0;
  SpinConfiguration config;
};

UpperBound upper_bound(const SpinModel& model, const RelaxationProblem& problem,
                       const SDPSolution& solution);

enum class RelaxationMode {
  chordal,  ///< minimum-degree chordal extension, one block per maximal clique
  dense,    ///< one block over all spins
};

struct BoundResult {
  double lower = 0.0;
  double upper = 0.0;
  SpinConfiguration config;          ///< energy(model, config) == upper
  std::vector<double> one_body;      ///< <s_i>, empty when the model has no spins
  SdpStatus status = SdpStatus::optimal;
  std::size_t cut_rounds = 0;
  std::size_t cuts_added = 0;
  std::size_t max_block_size = 0;
  std::size_t sdp_iterations = 0;
};

/// Decompose, solve and round.  A model without spins has lower = upper =
/// offset.  The lower bound is clamped to the upper bound.
BoundResult compute_bounds(const SpinModel& model, RelaxationMode mode = RelaxationMode::chordal,
                           const LowerBoundParams& params = {});

}  // namespace cbb
