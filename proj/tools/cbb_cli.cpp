/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

// Command-line frontend.  Talks to the solver only through the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <cbb/cbb.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNotConverged = 3;

struct CliError {
  std::string message;
};

using ModelPtr = std::unique_ptr<cbb_model, decltype(&cbb_model_free)>;
using ParamsPtr = std::unique_ptr<cbb_params, decltype(&cbb_params_free)>;
using CertPtr = std::unique_ptr<cbb_certificate, decltype(&cbb_certificate_free)>;

void check(cbb_status status)
{
  if (status != CBB_OK) throw CliError{cbb_last_error()};
}

std::string take(char* s)
{
  std::string out(s ? s : "");
  cbb_string_free(s);
  return out;
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{"cannot open '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw CliError{"cannot write '" + path + "'"};
}

ModelPtr load_model(const std::string& path)
{
  cbb_model* m = nullptr;
  check(cbb_model_read_file(path.c_str(), &m));
  return ModelPtr(m, cbb_model_free);
}

ModelPtr generate(const std::string& family, std::size_t size, std::size_t cols, double sigma,
                  double p, std::uint64_t seed)
{
  cbb_model* m = nullptr;
  if (family == "square")
    check(cbb_model_gen_square(size, sigma, seed, &m));
  else if (family == "triangular")
    check(cbb_model_gen_triangular(size, cols ? cols : size, sigma, seed, &m));
  else if (family == "chimera")
    check(cbb_model_gen_chimera(size, sigma, seed, &m));
  else if (family == "random")
    check(cbb_model_gen_random(size, p, seed, &m));
  else
    throw CliError{"unknown family '" + family + "'"};
  return ModelPtr(m, cbb_model_free);
}

std::string fmt(double v)
{
  if (!std::isfinite(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Run-parameter flags shared by solve, verify and bench.  Values are kept as
// text and handed to cbb_params_set, which validates them.
struct ParamFlags {
  std::string params_file;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::vector<std::string> storage;
  bool trace = false;
  bool cuts = false;
  CLI::Option* trace_opt = nullptr;
  CLI::Option* cuts_opt = nullptr;

  void attach(CLI::App* app)
  {
    static const std::pair<const char*, const char*> kFlags[] = {
      {"--n-t", "n_t"},
      {"--relaxation", "relaxation"},
      {"--branch-rule", "branch_rule"},
      {"--gap-tolerance", "gap_tolerance"},
      {"--max-nodes", "max_nodes"},
      {"--time-limit", "time_limit"},
      {"--oracle-leaf", "oracle_leaf"},
      {"--max-cut-rounds", "max_cut_rounds"},
      {"--cuts-per-round", "cuts_per_round"},
      {"--cut-tolerance", "cut_tolerance"},
      {"--sdp-feasibility", "sdp_feasibility"},
      {"--sdp-relative-gap", "sdp_relative_gap"},
      {"--sdp-max-iterations", "sdp_max_iterations"},
      {"--threads", "threads"},
    };
    storage.resize(std::size(kFlags));
    for (std::size_t k = 0; k < std::size(kFlags); ++k)
      options.emplace_back(kFlags[k].second,
                           app->add_option(kFlags[k].first, storage[k], std::string("run parameter ") + kFlags[k].second));
    app->add_option("--params", params_file, "JSON object of run parameters");
    cuts_opt = app->add_flag("--cuts", cuts, "enable the triangle-cut loop");
    trace_opt = app->add_flag("--trace", trace, "include the node trace in the certificate");
  }

  ParamsPtr build(std::optional<std::uint64_t> seed) const
  {
    cbb_params* p = nullptr;
    check(cbb_params_create(&p));
    ParamsPtr params(p, cbb_params_free);
    if (!params_file.empty()) check(cbb_params_update_json(p, read_file(params_file).c_str()));
    for (std::size_t k = 0; k < options.size(); ++k)
      if (options[k].second->count()) check(cbb_params_set(p, options[k].first.c_str(), storage[k].c_str()));
    if (cuts_opt->count()) check(cbb_params_set(p, "cuts", "true"));
    if (trace_opt->count()) check(cbb_params_set(p, "trace", "true"));
    if (seed) check(cbb_params_set(p, "seed", std::to_string(*seed).c_str()));
    return params;
  }
};

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string family;
  std::size_t L = 0, rows = 0, cols = 0, n = 0;
  double sigma = 0.0, p = 0.5;
  std::uint64_t seed = 1;
  std::string out;
};

int run_gen(const GenArgs& a)
{
  std::size_t size = 0, cols = 0;
  if (a.family == "square" || a.family == "chimera") {
    if (!a.L) throw CliError{a.family + " needs --L"};
    size = a.L;
  } else if (a.family == "triangular") {
    size = a.rows ? a.rows : a.L;
    cols = a.cols ? a.cols : a.L;
    if (!size || !cols) throw CliError{"triangular needs --L or --rows and --cols"};
  } else if (a.family == "random") {
    if (!a.n) throw CliError{"random needs --n"};
    size = a.n;
  }
  ModelPtr m = generate(a.family, size, cols, a.sigma, a.p, a.seed);
  char* text = nullptr;
  check(cbb_model_serialize(m.get(), &text));
  char* digest = nullptr;
  check(cbb_model_digest(m.get(), &digest));
  write_output(a.out, take(text));
  std::ostream& info = a.out.empty() || a.out == "-" ? std::cerr : std::cout;
  info << "n " << cbb_model_num_spins(m.get()) << "\nedges " << cbb_model_num_couplings(m.get())
       << "\ndigest " << take(digest) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string instance;
  std::string out;
  std::string plot_data;
  std::optional<std::uint64_t> seed;
  ParamFlags flags;
};

int run_solve(const SolveArgs& a)
{
  ModelPtr m = load_model(a.instance);
  ParamsPtr params = a.flags.build(a.seed);
  cbb_certificate* c = nullptr;
  check(cbb_solve(m.get(), params.get(), &c));
  CertPtr cert(c, cbb_certificate_free);
  char* json = nullptr;
  check(cbb_certificate_to_json(cert.get(), -1, &json));
  write_output(a.out, take(json));
  if (!a.plot_data.empty()) {
    char* csv = nullptr;
    check(cbb_certificate_history_csv(cert.get(), &csv));
    write_output(a.plot_data, take(csv));
  }
  return cbb_certificate_converged(cert.get()) ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------- brute

int run_brute(const std::string& instance, const std::string& out)
{
  ModelPtr m = load_model(instance);
  const std::size_t n = cbb_model_num_spins(m.get());
  std::vector<int8_t> config(n);
  double e = 0.0;
  check(cbb_brute_force(m.get(), &e, config.data()));
  char* digest = nullptr;
  check(cbb_model_digest(m.get(), &digest));
  nlohmann::json j{{"instance_digest", take(digest)}, {"n", n}, {"energy", e}, {"config", config}};
  write_output(out, j.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string instance;
  std::string spins;
  std::string spins_file;
  std::string certificate;
  std::string out;
  std::optional<std::uint64_t> seed;
  ParamFlags flags;
};

int run_verify(const VerifyArgs& a)
{
  ModelPtr m = load_model(a.instance);
  if (a.spins.empty() == a.spins_file.empty())
    throw CliError{"give exactly one of --spins and --spins-file"};
  const std::string text = a.spins.empty() ? read_file(a.spins_file) : a.spins;
  int8_t* config = nullptr;
  std::size_t n = 0;
  check(cbb_config_parse(text.c_str(), &config, &n));
  std::unique_ptr<int8_t, decltype(&cbb_config_free)> guard(config, cbb_config_free);

  CertPtr cert(nullptr, cbb_certificate_free);
  if (!a.certificate.empty()) {
    cbb_certificate* c = nullptr;
    check(cbb_certificate_from_json(read_file(a.certificate).c_str(), &c));
    cert.reset(c);
  }
  ParamsPtr params = a.flags.build(a.seed);
  char* report = nullptr;
  check(cbb_verify(m.get(), config, n, cert.get(), params.get(), &report));
  write_output(a.out, take(report));
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct Sweep {
  std::string family = "square";
  std::vector<std::size_t> sizes;
  double sigma = 1.5;
  double p = 0.5;
  std::size_t seeds = 5;
  std::uint64_t first_seed = 1;
  std::string mode = "cbb";
  std::size_t max_dense_spins = 64;
  std::size_t max_spins = 4096;
  std::string params_json;  // extra run parameters
};

struct BenchRow {
  std::string family;
  std::size_t size = 0, n = 0;
  std::uint64_t seed = 0;
  std::string mode;
  std::size_t nodes = 0, branchings = 0;
  double wall_time = 0.0;
  bool converged = false;
  double lower = 0.0, upper = 0.0;
  std::string status;
};

std::size_t spins_of(const Sweep& s, std::size_t size)
{
  if (s.family == "square" || s.family == "triangular") return size * size;
  if (s.family == "chimera") return 8 * size * size;
  return size;
}

BenchRow bench_one(const Sweep& s, const ParamFlags& flags, std::size_t size, std::uint64_t seed)
{
  BenchRow r;
  r.family = s.family;
  r.size = size;
  r.seed = seed;
  r.mode = s.mode;
  r.n = spins_of(s, size);
  const std::size_t cap = s.mode == "nonchordal" ? s.max_dense_spins : s.max_spins;
  if (r.n > cap) {
    r.status = "refused";
    return r;
  }
  try {
    ModelPtr m = generate(s.family, size, 0, s.sigma, s.p, seed);
    ParamsPtr params = flags.build(seed);
    if (!s.params_json.empty()) check(cbb_params_update_json(params.get(), s.params_json.c_str()));
    check(cbb_params_set(params.get(), "relaxation", s.mode == "nonchordal" ? "dense" : "chordal"));
    cbb_certificate* c = nullptr;
    check(cbb_solve(m.get(), params.get(), &c));
    CertPtr cert(c, cbb_certificate_free);
    r.nodes = cbb_certificate_nodes(c);
    r.branchings = cbb_certificate_branchings(c);
    r.wall_time = cbb_certificate_wall_time(c);
    r.converged = cbb_certificate_converged(c);
    r.lower = cbb_certificate_lower(c);
    r.upper = cbb_certificate_upper(c);
    r.status = r.converged ? "ok" : "not_converged";
  } catch (const CliError& e) {
    r.status = "error";
    std::cerr << "bench " << s.family << " " << size << " seed " << seed << ": " << e.message << "\n";
  }
  return r;
}

struct BenchArgs {
  std::string config;
  std::string family;
  std::vector<std::size_t> sizes;
  double sigma = 1.5;
  double p = 0.5;
  std::size_t seeds = 5;
  std::uint64_t first_seed = 1;
  std::string mode = "cbb";
  std::size_t max_dense_spins = 64;
  std::size_t jobs = 1;
  std::string out;
  ParamFlags flags;
};

int run_bench(const BenchArgs& a)
{
  Sweep s;
  if (!a.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(a.config));
      s.family = j.value("family", s.family);
      s.sizes = j.value("sizes", std::vector<std::size_t>{});
      s.sigma = j.value("sigma", s.sigma);
      s.p = j.value("p", s.p);
      s.seeds = j.value("seeds", s.seeds);
      s.first_seed = j.value("first_seed", s.first_seed);
      s.mode = j.value("mode", s.mode);
      s.max_dense_spins = j.value("max_dense_spins", s.max_dense_spins);
      if (j.contains("params")) s.params_json = j["params"].dump();
    } catch (const nlohmann::json::exception& e) {
      throw CliError{"sweep config: " + std::string(e.what())};
    }
  } else {
    if (a.family.empty()) throw CliError{"bench needs --family or --config"};
    s.family = a.family;
    s.sizes = a.sizes;
    s.sigma = a.sigma;
    s.p = a.p;
    s.seeds = a.seeds;
    s.first_seed = a.first_seed;
    s.mode = a.mode;
    s.max_dense_spins = a.max_dense_spins;
  }
  if (s.mode != "cbb" && s.mode != "nonchordal") throw CliError{"mode must be cbb or nonchordal"};
  if (s.family != "square" && s.family != "triangular" && s.family != "chimera" && s.family != "random")
    throw CliError{"unknown family '" + s.family + "'"};

  struct Task {
    std::size_t size;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t size : s.sizes)
    for (std::size_t k = 0; k < s.seeds; ++k) tasks.push_back({size, s.first_seed + k});
  std::vector<BenchRow> rows(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < tasks.size();)
      rows[k] = bench_one(s, a.flags, tasks[k].size, tasks[k].seed);
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < std::max<std::size_t>(a.jobs, 1); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string csv = "family,size,n,seed,mode,nodes,branchings,wall_time,converged,lower,upper,status\n";
  for (const auto& r : rows) {
    csv += r.family + "," + std::to_string(r.size) + "," + std::to_string(r.n) + "," +
           std::to_string(r.seed) + "," + r.mode + "," + std::to_string(r.nodes) + "," +
           std::to_string(r.branchings) + "," + fmt(r.wall_time) + "," + (r.converged ? "1" : "0") +
           "," + fmt(r.lower) + "," + fmt(r.upper) + "," + r.status + "\n";
  }
  write_output(a.out, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Certified ground states of Ising models by chordal branch and bound"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cbb_version()));

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a benchmark instance");
  g->add_option("family", gen.family, "square, triangular, chimera or random")
    ->required()
    ->check(CLI::IsMember({"square", "triangular", "chimera", "random"}));
  g->add_option("--L", gen.L, "lattice or Chimera size");
  g->add_option("--rows", gen.rows, "triangular rows");
  g->add_option("--cols", gen.cols, "triangular columns");
  g->add_option("--n", gen.n, "random: number of spins");
  g->add_option("--p", gen.p, "random: edge probability");
  g->add_option("--sigma", gen.sigma, "field standard deviation");
  g->add_option("--seed", gen.seed, "generator seed");
  g->add_option("--out", gen.out, "instance path (default stdout)");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "certify the ground-state energy of an instance");
  s->add_option("instance", solve.instance, "instance file")->required();
  s->add_option("--out", solve.out, "certificate path (default stdout)");
  s->add_option("--plot-data", solve.plot_data, "write step,lower,upper CSV here");
  s->add_option("--seed", solve.seed, "echoed into the certificate");
  solve.flags.attach(s);

  std::string brute_instance, brute_out;
  auto* b = app.add_subcommand("brute", "exhaustive ground state (at most 24 spins)");
  b->add_option("instance", brute_instance, "instance file")->required();
  b->add_option("--out", brute_out, "output path (default stdout)");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "compare an external configuration with a certificate");
  v->add_option("instance", verify.instance, "instance file")->required();
  v->add_option("--spins", verify.spins, "configuration, e.g. \"+-+-\" or \"1 -1 1 -1\"");
  v->add_option("--spins-file", verify.spins_file, "file holding the configuration");
  v->add_option("--certificate", verify.certificate, "certificate JSON (solved afresh if absent)");
  v->add_option("--out", verify.out, "report path (default stdout)");
  v->add_option("--seed", verify.seed, "echoed into a fresh certificate");
  verify.flags.attach(v);

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "run a size sweep and print a CSV table");
  be->add_option("--config", bench.config, "JSON sweep description");
  be->add_option("--family", bench.family, "instance family");
  be->add_option("--sizes", bench.sizes, "sizes, e.g. --sizes 4 5 6")->delimiter(',');
  be->add_option("--sigma", bench.sigma, "field standard deviation");
  be->add_option("--p", bench.p, "random: edge probability");
  be->add_option("--seeds", bench.seeds, "seeds per size");
  be->add_option("--first-seed", bench.first_seed, "first seed");
  be->add_option("--mode", bench.mode, "cbb or nonchordal");
  be->add_option("--max-dense-spins", bench.max_dense_spins, "nonchordal rows above this are refused");
  be->add_option("--jobs", bench.jobs, "instances solved concurrently");
  be->add_option("--out", bench.out, "CSV path (default stdout)");
  bench.flags.attach(be);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*g) return run_gen(gen);
    if (*s) return run_solve(solve);
    if (*b) return run_brute(brute_instance, brute_out);
    if (*v) return run_verify(verify);
    if (*be) return run_bench(bench);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitInput;
  }
  return kExitInput;
}
