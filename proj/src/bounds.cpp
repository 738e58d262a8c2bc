/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cbb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbb/error.hpp"

namespace cbb {

LowerBound lower_bound(const SpinModel& model, const CliqueDecomposition& decomp,
                       const LowerBoundParams& params)
{
  LowerBound out;
  out.problem = assemble(model, decomp, params.n_t);
  out.solution = solve(out.problem, params.sdp);
  out.bound = out.solution.dual_bound;
  if (!params.cuts) return out;

  for (std::size_t round = 0; round < params.max_cut_rounds; ++round) {
    if (out.solution.status == SdpStatus::numerical_trouble) break;
    auto cuts = find_violated_triangles(out.problem, out.solution.y, params.cuts_per_round,
                                        params.cut_tolerance, true);
    if (cuts.empty()) break;
    RelaxationProblem next = with_cuts(out.problem, cuts);
    SDPSolution sol = solve(next, params.sdp);
    const double previous = out.bound;
    ++out.cut_rounds;
    out.cuts_added += cuts.size();
    out.problem = std::move(next);
    out.solution = std::move(sol);
    out.bound = std::max(out.bound, out.solution.dual_bound);
    if (out.bound - previous < 1e-6 * (1.0 + std::abs(out.bound))) break;
  }
  return out;
}

std::vector<double> one_body_moments(const RelaxationProblem& problem, const SDPSolution& solution)
{
  if (solution.y.size() != problem.num_variables())
    throw ContractViolation("solution does not match the relaxation");
  std::vector<double> m(problem.num_spins);
  for (SpinIndex i = 0; i < problem.num_spins; ++i) {
    if (problem.singleton[i] == kNoVariable)
      throw ContractViolation("spin " + std::to_string(i) + " has no one-body moment");
    m[i] = solution.y[problem.singleton[i]];
  }
  return m;
}

SpinConfiguration extract_configuration(std::span<const double> one_body)
{
  SpinConfiguration config(one_body.size());
  for (std::size_t i = 0; i < one_body.size(); ++i) config[i] = one_body[i] >= 0.0 ? 1 : -1;
  return config;
}

SpinConfiguration extract_configuration(const RelaxationProblem& problem,
                                        const SDPSolution& solution)
{
  return extract_configuration(one_body_moments(problem, solution));
}

UpperBound upper_bound(const SpinModel& model, const RelaxationProblem& problem,
                       const SDPSolution& solution)
{
  UpperBound out;
  out.config = extract_configuration(problem, solution);
  out.energy = energy(model, out.config);
  return out;
}

BoundResult compute_bounds(const SpinModel& model, RelaxationMode mode,
                           const LowerBoundParams& params)
{
  BoundResult r;
  if (model.num_spins() == 0) {
    r.lower = r.upper = model.offset();
    return r;
  }
  const DependencyGraph g = dependency_graph(model);
  const CliqueDecomposition decomp =
    mode == RelaxationMode::dense ? dense_decomposition(g) : chordal_extension(g);
  LowerBound lb = lower_bound(model, decomp, params);
  const UpperBound ub = upper_bound(model, lb.problem, lb.solution);
  r.upper = ub.energy;
  r.config = ub.config;
  r.lower = std::min(lb.bound, r.upper);
  r.one_body = one_body_moments(lb.problem, lb.solution);
  r.status = lb.solution.status;
  r.cut_rounds = lb.cut_rounds;
  r.cuts_added = lb.cuts_added;
  r.max_block_size = lb.problem.max_block_size();
  r.sdp_iterations = lb.solution.iterations;
  return r;
}

}  // namespace cbb
