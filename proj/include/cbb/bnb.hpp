/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbb/bounds.hpp"
#include "cbb/model.hpp"

namespace cbb {

enum class BranchRule {
  easy_first,  ///< most polarized spin, max |<s_i>|
  hard_first,  ///< least polarized spin, min |<s_i>|
};

std::string to_string(BranchRule rule);
std::string to_string(RelaxationMode mode);
BranchRule parse_branch_rule(const std::string& s);
RelaxationMode parse_relaxation_mode(const std::string& s);

struct RunParams {
  LowerBoundParams bounds;
  RelaxationMode mode = RelaxationMode::chordal;
  BranchRule branch_rule = BranchRule::easy_first;
  double gap_tolerance = 1e-6;  ///< converged when upper - lower <= gap_tolerance (1 + |upper|)
  std::size_t max_nodes = 10000;  ///< evaluated nodes, root included
  double time_limit = 0.0;        ///< seconds, 0 = none
  std::size_t oracle_leaf = 16;   ///< nodes with at most this many free spins are enumerated; 0 = never
  std::uint64_t seed = 0;         ///< echoed only; the search is deterministic
  bool trace = false;             ///< serialize the per-node trace
  std::size_t threads = 1;        ///< >1 evaluates sibling nodes concurrently

  /// Throws ContractViolation when a value is out of range.
  void validate() const;
};

/// Parameters as a JSON object with the keys of the certificate's `params`.
std::string params_to_json(const RunParams& params);
/// `base` with the keys of a JSON object applied.  Unknown keys, wrongly
/// typed or out-of-range values throw ContractViolation.
RunParams params_update_json(const RunParams& base, const std::string& json_object);
/// `base` with one key set from its text form ("true", "0.5", "hard_first").
RunParams params_with(const RunParams& base, const std::string& key, const std::string& value);

/// argmax (easy_first) or argmin (hard_first) of |one_body[i]| over `unfixed`,
/// ties to the smallest index.
SpinIndex select_branch_spin(std::span<const double> one_body, std::span<const SpinIndex> unfixed,
                             BranchRule rule);

struct TraceEntry {
  std::size_t node = 0;       ///< evaluation order, root = 0
  std::size_t depth = 0;
  double lower = 0.0;         ///< node bound
  double upper = 0.0;         ///< node rounding energy
  std::size_t branchings = 0; ///< branchings performed when the node was evaluated
};

/// Global bounds after the root (step 0) and after every branching.
struct BoundStep {
  std::size_t step = 0;
  double lower = 0.0;
  double upper = 0.0;
};

struct Certificate {
  std::string instance_digest;
  double lower = 0.0;
  double upper = 0.0;
  double gap = 0.0;
  SpinConfiguration config;
  bool converged = false;
  std::size_t nodes_explored = 0;
  std::size_t branchings = 0;
  std::size_t max_block_size = 0;
  std::size_t sdp_solves = 0;
  double wall_time = 0.0;  ///< seconds
  RunParams params;
  std::vector<TraceEntry> trace;     ///< always collected; serialized when params.trace
  std::vector<BoundStep> history;    ///< always collected; serialized with the trace
};

/// Best-first branch and bound.  Each node is bounded on its reduced model
/// with a fresh decomposition; children fix the selected spin to -1 and +1.
/// Nodes whose bound reaches the incumbent within the gap tolerance are
/// discarded.  The reported lower bound is the minimum over open and
/// discarded node bounds, clamped to the incumbent.
Certificate solve_cbb(const SpinModel& model, const RunParams& params = {});

/// Single JSON document; `include_trace` defaults to params.trace.
std::string certificate_to_json(const Certificate& cert, std::optional<bool> include_trace = {});
/// Throws ParseError on malformed input.
Certificate certificate_from_json(const std::string& text);

struct VerificationReport {
  std::string instance_digest;
  double external_energy = 0.0;
  double certified_lower = 0.0;
  double certified_upper = 0.0;
  double gap_to_upper = 0.0;  ///< external - certified upper
  double gap_to_lower = 0.0;  ///< external - certified lower
  std::size_t hamming_distance = 0;
  bool certificate_converged = false;
  SpinConfiguration certified_config;
};

/// Compare an external configuration with a certificate, solving the model
/// first if none is given.  Throws VerificationRefused when the certificate's
/// digest does not match the model, ContractViolation on a bad configuration.
VerificationReport verify_external(const SpinModel& model, std::span<const std::int8_t> config,
                                   const Certificate* certificate = nullptr,
                                   const RunParams& params = {});

std::string report_to_json(const VerificationReport& report);

}  // namespace cbb
