/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cbb/relaxation.hpp"

namespace cbb {

struct SdpTolerances {
  double feasibility = 1e-9;    ///< dual infeasibility, relative to 1 + max|c|
  double relative_gap = 1e-8;   ///< (primal - dual) / max(1, mean |objective|)
  std::size_t max_iterations = 200;
  bool verbose = false;         ///< per-iteration log lines on stderr
};

enum class SdpStatus { optimal, max_iterations, numerical_trouble };

std::string to_string(SdpStatus status);

struct SdpResiduals {
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;  ///< max_k |c_k - <F_k, Y>|
  double relative_gap = 0.0;
  double dual_correction = 0.0;     ///< sum_k |c_k - <F_k, Y>| subtracted from the dual value
};

struct SDPSolution {
  std::vector<double> y;  ///< moment values, y[0] = 1
  std::vector<Eigen::MatrixXd> block_matrices;
  double primal_objective = 0.0;
  double dual_bound = 0.0;  ///< certified lower bound on the relaxation optimum
  SdpStatus status = SdpStatus::numerical_trouble;
  SdpResiduals residuals;
  std::size_t iterations = 0;
};

/// Primal-dual interior-point solve of
///
///   minimize   constant + c^T y
///   subject to every moment block M_l(y) >= 0 (PSD), every cut a^T y >= lower,
///
/// with y[0] pinned to 1.  Iterates stay primal feasible (they start at y = 0
/// where every block is the identity) and use the HKM direction with a
/// Mehrotra predictor-corrector step.  The Schur complement is assembled
/// sparsely, since two variables interact only when they share a block or a
/// cut.
///
/// `dual_bound` is the best over all iterates of
///
///   constant - <C, Y> - sum_k |c_k - <F_k, Y>|
///
/// where Y >= 0 is the dual iterate.  Every moment variable is an off-diagonal
/// entry of some block with unit diagonal, so |y_k| <= 1 on the feasible set
/// and the sum term bounds the effect of the residual dual infeasibility;
/// the value is a valid lower bound whatever the solver status.
///
/// Throws ContractViolation for malformed problems (non-unit diagonals,
/// asymmetric index maps, unknown variables).
SDPSolution solve(const RelaxationProblem& problem, const SdpTolerances& tolerances = {});

struct FeasibilityReport {
  std::vector<double> block_min_eigenvalues;
  double min_eigenvalue = 0.0;      ///< over all blocks (+inf without blocks)
  double max_cut_violation = 0.0;   ///< max(0, lower - a^T y) over cuts
  double objective = 0.0;
};

FeasibilityReport feasibility_check(const RelaxationProblem& problem, std::span<const double> y);

/// Numeric moment matrix of one block.
Eigen::MatrixXd block_matrix(const MomentBlock& block, std::span<const double> y);

}  // namespace cbb
