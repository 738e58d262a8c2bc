/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cbb/bnb.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <queue>

#include "cbb/error.hpp"

namespace cbb {

using nlohmann::json;

std::string to_string(BranchRule rule)
{
  return rule == BranchRule::easy_first ? "easy_first" : "hard_first";
}

std::string to_string(RelaxationMode mode)
{
  return mode == RelaxationMode::chordal ? "chordal" : "dense";
}

BranchRule parse_branch_rule(const std::string& s)
{
  if (s == "easy_first") return BranchRule::easy_first;
  if (s == "hard_first") return BranchRule::hard_first;
  throw ContractViolation("unknown branch rule '" + s + "'");
}

RelaxationMode parse_relaxation_mode(const std::string& s)
{
  if (s == "chordal") return RelaxationMode::chordal;
  if (s == "dense") return RelaxationMode::dense;
  throw ContractViolation("unknown relaxation mode '" + s + "'");
}

void RunParams::validate() const
{
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ContractViolation(what);
  };
  require(bounds.n_t >= 1 && bounds.n_t <= 64, "n_t must be in [1, 64]");
  require(bounds.max_cut_rounds <= 1000, "max_cut_rounds must be at most 1000");
  require(bounds.cuts_per_round >= 1, "cuts_per_round must be positive");
  require(std::isfinite(bounds.cut_tolerance) && bounds.cut_tolerance >= 0, "cut_tolerance must be >= 0");
  require(bounds.sdp.feasibility > 0 && bounds.sdp.feasibility < 1, "sdp feasibility must be in (0, 1)");
  require(bounds.sdp.relative_gap > 0 && bounds.sdp.relative_gap < 1, "sdp relative gap must be in (0, 1)");
  require(bounds.sdp.max_iterations >= 1 && bounds.sdp.max_iterations <= 10000,
          "sdp max iterations must be in [1, 10000]");
  require(gap_tolerance > 0 && gap_tolerance < 1, "gap tolerance must be in (0, 1)");
  require(max_nodes >= 1, "max_nodes must be positive");
  require(std::isfinite(time_limit) && time_limit >= 0, "time limit must be >= 0");
  require(oracle_leaf <= 20, "oracle_leaf must be at most 20");
  require(threads >= 1 && threads <= 64, "threads must be in [1, 64]");
}

SpinIndex select_branch_spin(std::span<const double> one_body, std::span<const SpinIndex> unfixed,
                             BranchRule rule)
{
  if (unfixed.empty()) throw ContractViolation("no unfixed spin to branch on");
  SpinIndex best = unfixed[0];
  for (SpinIndex i : unfixed) {
    if (i >= one_body.size()) throw ContractViolation("branch candidate out of range");
    const double a = std::abs(one_body[i]);
    const double b = std::abs(one_body[best]);
    const bool better = rule == BranchRule::easy_first ? a > b : a < b;
    if (better || (a == b && i < best)) best = i;
  }
  return best;
}

namespace {

struct Node {
  std::size_t id = 0;
  std::size_t depth = 0;
  SpinModel reduced;
  std::vector<SpinIndex> kept;  // reduced spin -> root spin
  SpinConfiguration fixed;      // root-indexed, 0 = free
  double lower = 0.0;
  std::vector<double> one_body;
  bool exact = false;
};

struct Evaluation {
  double lower = -std::numeric_limits<double>::infinity();
  SpinConfiguration reduced_config;
  std::vector<double> one_body;
  bool exact = false;
  std::size_t max_block_size = 0;
  std::size_t sdp_solves = 0;
};

Evaluation evaluate(const SpinModel& reduced, const RunParams& params)
{
  Evaluation e;
  const std::size_t n = reduced.num_spins();
  if (n == 0) {
    e.lower = reduced.offset();
    e.exact = true;
    return e;
  }
  if (n <= params.oracle_leaf) {
    auto o = brute_force_ground(reduced, false, params.oracle_leaf);
    e.lower = o.energy;
    e.reduced_config = std::move(o.configurations.front());
    e.exact = true;
    return e;
  }
  BoundResult b = compute_bounds(reduced, params.mode, params.bounds);
  e.sdp_solves = 1 + b.cut_rounds;
  if (b.status != SdpStatus::optimal) {
    // one retry with tighter tolerances; keep the better safe bound
    LowerBoundParams tight = params.bounds;
    tight.sdp.feasibility *= 0.1;
    tight.sdp.relative_gap *= 0.1;
    tight.sdp.max_iterations *= 2;
    BoundResult r = compute_bounds(reduced, params.mode, tight);
    e.sdp_solves += 1 + r.cut_rounds;
    if (r.upper < b.upper) {
      b.upper = r.upper;
      b.config = r.config;
      b.one_body = r.one_body;
    }
    b.lower = std::max(b.lower, r.lower);
  }
  e.lower = b.lower;
  e.reduced_config = std::move(b.config);
  e.one_body = std::move(b.one_body);
  e.max_block_size = b.max_block_size;
  return e;
}

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const
  {
    if (a.lower != b.lower) return a.lower > b.lower;
    return a.id > b.id;
  }
};

SpinConfiguration full_configuration(const Node& node, const SpinConfiguration& reduced_config)
{
  SpinConfiguration c = node.fixed;
  for (std::size_t k = 0; k < node.kept.size(); ++k) c[node.kept[k]] = reduced_config[k];
  return c;
}

}  // namespace

Certificate solve_cbb(const SpinModel& model, const RunParams& params)
{
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  Certificate cert;
  cert.params = params;
  cert.instance_digest = instance_digest(model);

  double incumbent = std::numeric_limits<double>::infinity();
  SpinConfiguration best;
  double closed_min = std::numeric_limits<double>::infinity();
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::size_t next_id = 0;

  auto tolerance = [&] { return params.gap_tolerance * (1.0 + std::abs(incumbent)); };

  // Fold an evaluated node into the search state; returns it if still open.
  auto absorb = [&](Node node, Evaluation e, double parent_lower) -> std::optional<Node> {
    ++cert.nodes_explored;
    cert.sdp_solves += e.sdp_solves;
    cert.max_block_size = std::max(cert.max_block_size, e.max_block_size);
    node.lower = std::max(e.lower, parent_lower);
    node.one_body = std::move(e.one_body);
    node.exact = e.exact;
    const SpinConfiguration config = full_configuration(node, e.reduced_config);
    const double upper = energy(model, config);
    if (upper < incumbent) {
      incumbent = upper;
      best = config;
    }
    if (node.exact) node.lower = std::max(node.lower, upper);
    cert.trace.push_back({node.id, node.depth, node.lower, upper, cert.branchings});
    if (node.exact || node.lower >= incumbent - tolerance()) {
      closed_min = std::min(closed_min, node.lower);
      return std::nullopt;
    }
    return node;
  };

  auto global_lower = [&] {
    double lo = closed_min;
    if (!open.empty()) lo = std::min(lo, open.top().lower);
    return std::min(lo, incumbent);
  };

  {
    Node root;
    root.id = next_id++;
    root.reduced = model;
    root.fixed.assign(model.num_spins(), 0);
    for (SpinIndex i = 0; i < model.num_spins(); ++i) root.kept.push_back(i);
    Evaluation e = evaluate(root.reduced, params);
    if (auto n = absorb(std::move(root), std::move(e), -std::numeric_limits<double>::infinity()))
      open.push(std::move(*n));
  }
  cert.history.push_back({0, global_lower(), incumbent});

  while (true) {
    // lazily discard nodes overtaken by the incumbent
    while (!open.empty() && open.top().lower >= incumbent - tolerance()) {
      closed_min = std::min(closed_min, open.top().lower);
      open.pop();
    }
    if (open.empty()) break;
    if (cert.nodes_explored + 2 > params.max_nodes) break;
    if (params.time_limit > 0 && elapsed() >= params.time_limit) break;

    Node node = open.top();
    open.pop();
    std::vector<SpinIndex> unfixed(node.reduced.num_spins());
    for (SpinIndex k = 0; k < unfixed.size(); ++k) unfixed[k] = k;
    const SpinIndex spin = select_branch_spin(node.one_body, unfixed, params.branch_rule);
    ++cert.branchings;

    std::vector<Node> children;
    for (int s : {-1, 1}) {
      FixedSpinModel f = fix_spin(node.reduced, spin, s);
      Node child;
      child.id = next_id++;
      child.depth = node.depth + 1;
      child.reduced = std::move(f.model);
      child.fixed = node.fixed;
      child.fixed[node.kept[spin]] = static_cast<std::int8_t>(s);
      for (SpinIndex k : f.kept) child.kept.push_back(node.kept[k]);
      children.push_back(std::move(child));
    }

    std::vector<Evaluation> evals(children.size());
    if (params.threads > 1) {
      std::vector<std::future<Evaluation>> futures;
      for (const auto& c : children)
        futures.push_back(std::async(std::launch::async,
                                     [&params, &c] { return evaluate(c.reduced, params); }));
      for (std::size_t k = 0; k < children.size(); ++k) evals[k] = futures[k].get();
    } else {
      for (std::size_t k = 0; k < children.size(); ++k) evals[k] = evaluate(children[k].reduced, params);
    }
    for (std::size_t k = 0; k < children.size(); ++k)
      if (auto n = absorb(std::move(children[k]), std::move(evals[k]), node.lower))
        open.push(std::move(*n));
    cert.history.push_back({cert.branchings, global_lower(), incumbent});
  }

  cert.upper = incumbent;
  cert.config = best;
  cert.lower = global_lower();
  cert.gap = cert.upper - cert.lower;
  cert.converged = cert.gap <= params.gap_tolerance * (1.0 + std::abs(cert.upper));
  if (cert.history.back().lower != cert.lower || cert.history.back().upper != cert.upper)
    cert.history.push_back({cert.branchings, cert.lower, cert.upper});
  cert.wall_time = elapsed();
  return cert;
}

namespace {

json params_json(const RunParams& p)
{
  return json{{"n_t", p.bounds.n_t},
              {"relaxation", to_string(p.mode)},
              {"branch_rule", to_string(p.branch_rule)},
              {"gap_tolerance", p.gap_tolerance},
              {"max_nodes", p.max_nodes},
              {"time_limit", p.time_limit},
              {"oracle_leaf", p.oracle_leaf},
              {"cuts", p.bounds.cuts},
              {"max_cut_rounds", p.bounds.max_cut_rounds},
              {"cuts_per_round", p.bounds.cuts_per_round},
              {"cut_tolerance", p.bounds.cut_tolerance},
              {"sdp_feasibility", p.bounds.sdp.feasibility},
              {"sdp_relative_gap", p.bounds.sdp.relative_gap},
              {"sdp_max_iterations", p.bounds.sdp.max_iterations},
              {"seed", p.seed},
              {"trace", p.trace},
              {"threads", p.threads}};
}

RunParams params_from_json(const json& j)
{
  RunParams p;
  p.bounds.n_t = j.at("n_t").get<std::size_t>();
  p.mode = parse_relaxation_mode(j.at("relaxation").get<std::string>());
  p.branch_rule = parse_branch_rule(j.at("branch_rule").get<std::string>());
  p.gap_tolerance = j.at("gap_tolerance").get<double>();
  p.max_nodes = j.at("max_nodes").get<std::size_t>();
  p.time_limit = j.at("time_limit").get<double>();
  p.oracle_leaf = j.at("oracle_leaf").get<std::size_t>();
  p.bounds.cuts = j.at("cuts").get<bool>();
  p.bounds.max_cut_rounds = j.at("max_cut_rounds").get<std::size_t>();
  p.bounds.cuts_per_round = j.at("cuts_per_round").get<std::size_t>();
  p.bounds.cut_tolerance = j.at("cut_tolerance").get<double>();
  p.bounds.sdp.feasibility = j.at("sdp_feasibility").get<double>();
  p.bounds.sdp.relative_gap = j.at("sdp_relative_gap").get<double>();
  p.bounds.sdp.max_iterations = j.at("sdp_max_iterations").get<std::size_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.trace = j.at("trace").get<bool>();
  p.threads = j.at("threads").get<std::size_t>();
  return p;
}

// JSON has no infinities; unbounded values are written as null.
json number(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

double number_from(const json& j, double if_null)
{
  return j.is_null() ? if_null : j.get<double>();
}

}  // namespace

std::string params_to_json(const RunParams& params)
{
  return params_json(params).dump(2) + "\n";
}

RunParams params_update_json(const RunParams& base, const std::string& json_object)
{
  json patch;
  try {
    patch = json::parse(json_object);
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("parameters: ") + e.what());
  }
  if (!patch.is_object()) throw ContractViolation("parameters must be a JSON object");
  json j = params_json(base);
  for (const auto& [key, value] : patch.items()) {
    if (!j.contains(key)) throw ContractViolation("unknown parameter '" + key + "'");
    const json& current = j[key];
    const bool ok = current.is_boolean()          ? value.is_boolean()
                    : current.is_number_unsigned() ? value.is_number_unsigned() ||
                                                       (value.is_number_integer() && value.get<long long>() >= 0)
                    : current.is_number()          ? value.is_number()
                                                   : value.is_string();
    if (!ok) throw ContractViolation("parameter '" + key + "' has the wrong type");
    j[key] = value;
  }
  RunParams p;
  try {
    p = params_from_json(j);
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("parameters: ") + e.what());
  }
  p.validate();
  return p;
}

RunParams params_with(const RunParams& base, const std::string& key, const std::string& value)
{
  const json j = params_json(base);
  if (!j.contains(key)) throw ContractViolation("unknown parameter '" + key + "'");
  const json& current = j[key];
  json v;
  if (current.is_boolean()) {
    if (value == "true" || value == "1")
      v = true;
    else if (value == "false" || value == "0")
      v = false;
    else
      throw ContractViolation("parameter '" + key + "' expects true or false");
  } else if (current.is_number()) {
    try {
      v = json::parse(value);
    } catch (const json::exception&) {
      throw ContractViolation("parameter '" + key + "' expects a number, got '" + value + "'");
    }
    if (!v.is_number())
      throw ContractViolation("parameter '" + key + "' expects a number, got '" + value + "'");
  } else {
    v = value;
  }
  return params_update_json(base, json{{key, v}}.dump());
}

std::string certificate_to_json(const Certificate& cert, std::optional<bool> include_trace)
{
  json j;
  j["instance_digest"] = cert.instance_digest;
  j["lower"] = number(cert.lower);
  j["upper"] = number(cert.upper);
  j["gap"] = number(cert.gap);
  j["config"] = cert.config;
  j["converged"] = cert.converged;
  j["nodes_explored"] = cert.nodes_explored;
  j["branchings"] = cert.branchings;
  j["max_block_size"] = cert.max_block_size;
  j["sdp_solves"] = cert.sdp_solves;
  j["wall_time"] = cert.wall_time;
  j["params"] = params_json(cert.params);
  if (include_trace.value_or(cert.params.trace)) {
    json trace = json::array();
    for (const auto& t : cert.trace)
      trace.push_back({{"node", t.node},
                       {"depth", t.depth},
                       {"lower", number(t.lower)},
                       {"upper", number(t.upper)},
                       {"branchings", t.branchings}});
    j["trace"] = std::move(trace);
    json history = json::array();
    for (const auto& h : cert.history)
      history.push_back({{"step", h.step}, {"lower", number(h.lower)}, {"upper", number(h.upper)}});
    j["history"] = std::move(history);
  }
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  try {
    const json j = json::parse(text);
    Certificate c;
    c.instance_digest = j.at("instance_digest").get<std::string>();
    c.lower = number_from(j.at("lower"), -inf);
    c.upper = number_from(j.at("upper"), inf);
    c.gap = number_from(j.at("gap"), inf);
    c.config = j.at("config").get<SpinConfiguration>();
    c.converged = j.at("converged").get<bool>();
    c.nodes_explored = j.at("nodes_explored").get<std::size_t>();
    c.branchings = j.at("branchings").get<std::size_t>();
    c.max_block_size = j.at("max_block_size").get<std::size_t>();
    c.sdp_solves = j.value("sdp_solves", std::size_t{0});
    c.wall_time = j.at("wall_time").get<double>();
    c.params = params_from_json(j.at("params"));
    if (j.contains("trace"))
      for (const auto& t : j["trace"])
        c.trace.push_back({t.at("node").get<std::size_t>(), t.at("depth").get<std::size_t>(),
                           number_from(t.at("lower"), -inf), number_from(t.at("upper"), inf),
                           t.at("branchings").get<std::size_t>()});
    if (j.contains("history"))
      for (const auto& h : j["history"])
        c.history.push_back({h.at("step").get<std::size_t>(), number_from(h.at("lower"), -inf),
                             number_from(h.at("upper"), inf)});
    validate_configuration(c.config);
    return c;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("certificate: ") + e.what());
  } catch (const ContractViolation& e) {
    throw ParseError(0, std::string("certificate: ") + e.what());
  }
}

VerificationReport verify_external(const SpinModel& model, std::span<const std::int8_t> config,
                                   const Certificate* certificate, const RunParams& params)
{
  if (config.size() != model.num_spins())
    throw ContractViolation("configuration has " + std::to_string(config.size()) +
                            " spins, instance has " + std::to_string(model.num_spins()));
  validate_configuration(config);
  VerificationReport r;
  r.instance_digest = instance_digest(model);
  Certificate solved;
  if (certificate) {
    if (certificate->instance_digest != r.instance_digest)
      throw VerificationRefused("certificate digest " + certificate->instance_digest +
                                " does not match instance digest " + r.instance_digest);
    if (certificate->config.size() != model.num_spins())
      throw VerificationRefused("certificate configuration has the wrong length");
  } else {
    solved = solve_cbb(model, params);
    certificate = &solved;
  }
  r.external_energy = energy(model, config);
  r.certified_lower = certificate->lower;
  r.certified_upper = certificate->upper;
  r.gap_to_upper = r.external_energy - r.certified_upper;
  r.gap_to_lower = r.external_energy - r.certified_lower;
  r.certificate_converged = certificate->converged;
  r.certified_config = certificate->config;
  for (std::size_t i = 0; i < config.size(); ++i)
    r.hamming_distance += config[i] != certificate->config[i];
  return r;
}

std::string report_to_json(const VerificationReport& r)
{
  json j{{"instance_digest", r.instance_digest},
         {"external_energy", r.external_energy},
         {"certified_lower", number(r.certified_lower)},
         {"certified_upper", number(r.certified_upper)},
         {"gap_to_upper", number(r.gap_to_upper)},
         {"gap_to_lower", number(r.gap_to_lower)},
         {"hamming_distance", r.hamming_distance},
         {"certificate_converged", r.certificate_converged},
         {"certified_config", r.certified_config}};
  return j.dump(2) + "\n";
}

}  // namespace cbb
