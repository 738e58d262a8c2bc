/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

// End-to-end acceptance checks.  Each criterion prints one PASS/FAIL line.
//
//   cbb_acceptance [--cli PATH] [--only N]...
//
// Criteria 5 and 9 drive the command-line tool and need --cli.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "../oracles.hpp"
#include "cbb/bnb.hpp"
#include "cbb/bounds.hpp"
#include "cbb/chordal.hpp"
#include "cbb/model.hpp"
#include "cbb/relaxation.hpp"

namespace fs = std::filesystem;
using namespace cbb;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Named {
  std::string name;
  SpinModel model;
};

std::string fmt(const char* f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const double kSigmas[] = {0.0, 0.5, 1.5, 3.0};

// Shared by criteria 1 and 2: 212 oracle-checkable instances.
std::vector<Named> oracle_suite()
{
  std::vector<Named> out;
  auto add = [&](std::string name, SpinModel m) { out.push_back({std::move(name), std::move(m)}); };
  for (std::size_t L : {2, 3, 4})
    for (double s : kSigmas)
      for (std::uint64_t seed = 1; seed <= 5; ++seed)
        add("square L=" + std::to_string(L) + " sigma=" + fmt("%g", s) + " seed=" + std::to_string(seed),
            gen_square(L, s, seed));
  const std::pair<std::size_t, std::size_t> tri[] = {{2, 2}, {2, 3}, {3, 3}, {3, 4}, {4, 4}};
  for (auto [r, c] : tri)
    for (double s : kSigmas)
      for (std::uint64_t seed = 1; seed <= 3; ++seed)
        add("triangular " + std::to_string(r) + "x" + std::to_string(c) + " sigma=" + fmt("%g", s) +
              " seed=" + std::to_string(seed),
            gen_triangular(r, c, s, seed));
  for (double s : kSigmas)
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      add("chimera L=1 sigma=" + fmt("%g", s) + " seed=" + std::to_string(seed), gen_chimera(1, s, seed));
  for (std::size_t n = 8; n <= 16; ++n)
    for (double p : {0.3, 0.6})
      for (std::uint64_t seed = 1; seed <= 4; ++seed)
        add("random n=" + std::to_string(n) + " p=" + fmt("%g", p) + " seed=" + std::to_string(seed),
            gen_random(n, p, seed));
  return out;
}

double tol(double eg) { return 1e-6 * (1.0 + std::abs(eg)); }

Outcome criterion1()
{
  const auto suite = oracle_suite();
  RunParams params;
  params.oracle_leaf = 0;  // exercise the relaxation path even on small instances
  std::size_t failures = 0;
  double worst = 0.0;
  std::string first;
  for (const auto& [name, m] : suite) {
    const double eg = oracle::gray_code_ground(m);
    const auto cert = solve_cbb(m, params);
    const double err = std::abs(cert.upper - eg);
    worst = std::max(worst, err / (1.0 + std::abs(eg)));
    const bool ok = cert.converged && err <= tol(eg) && cert.lower <= eg + tol(eg) &&
                    energy(m, cert.config) == cert.upper;
    if (!ok && failures++ == 0) first = name;
  }
  Outcome o;
  o.pass = failures == 0 && suite.size() >= 200;
  o.detail = std::to_string(suite.size()) + " instances, " + std::to_string(failures) +
             " failures, max relative error " + fmt("%.2e", worst);
  if (!first.empty()) o.detail += ", first failure: " + first;
  return o;
}

double relaxation_bound(const SpinModel& m, std::size_t n_t)
{
  LowerBoundParams p;
  p.n_t = n_t;
  return lower_bound(m, chordal_extension(dependency_graph(m)), p).bound;
}

Outcome criterion2()
{
  const auto suite = oracle_suite();
  std::size_t failures = 0;
  std::string first;
  for (const auto& [name, m] : suite) {
    const double eg = oracle::gray_code_ground(m);
    const double l1 = relaxation_bound(m, 1);
    const double hy = relaxation_bound(m, 7);
    if (!(l1 <= hy + 1e-6 && hy <= eg + 1e-6) && failures++ == 0) first = name;
  }
  // antiferromagnetic triangle: H = s0 s1 + s0 s2 + s1 s2, ground energy -1
  const SpinModel tri(3, {{0, 1, -1.0}, {0, 2, -1.0}, {1, 2, -1.0}}, {});
  const double tri_eg = oracle::gray_code_ground(tri);
  const double tri_l1 = relaxation_bound(tri, 1);
  const double tri_l2 = relaxation_bound(tri, 4);
  const bool tri_ok = std::abs(tri_eg + 1.0) <= 1e-12 && std::abs(tri_l1 + 1.5) <= 1e-6 &&
                      std::abs(tri_l2 + 1.0) <= 1e-6;
  Outcome o;
  o.pass = failures == 0 && tri_ok;
  o.detail = std::to_string(suite.size()) + " instances, " + std::to_string(failures) +
             " ordering violations; triangle level-1 " + fmt("%.9f", tri_l1) + ", level-2 " +
             fmt("%.9f", tri_l2) + ", exact " + fmt("%g", tri_eg);
  if (!first.empty()) o.detail += ", first violation: " + first;
  return o;
}

Outcome criterion3()
{
  std::vector<std::string> problems;
  const SpinModel clique(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}, {});
  const auto pc = assemble(clique, chordal_extension(dependency_graph(clique)), 4);
  if (pc.blocks.size() != 1 || pc.blocks[0].size != 7 || pc.blocks[0].basis.level != 2)
    problems.push_back("single clique is not one 7x7 block");

  const SpinModel chain(3, {{0, 1, 1.0}, {1, 2, 1.0}}, {});
  const auto ch = assemble(chain, chordal_extension(dependency_graph(chain)), 7);
  if (ch.blocks.size() != 2 || ch.blocks[0].size != 4 || ch.blocks[1].size != 4) {
    problems.push_back("chain is not two 4x4 blocks");
  } else {
    // variable of <s_1> in each block: row 0 against the basis entry for spin 1
    std::set<std::size_t> shared;
    for (const auto& b : ch.blocks) {
      const auto& mons = b.basis.monomials;
      const auto it = std::find(mons.begin(), mons.end(), Monomial{1});
      if (it == mons.end()) {
        problems.push_back("a chain block lacks spin 1");
        continue;
      }
      shared.insert(b.at(0, static_cast<std::size_t>(it - mons.begin())));
    }
    if (shared.size() != 1 || *shared.begin() != ch.singleton[1])
      problems.push_back("<s_1> is not a single shared variable");
    if (ch.num_variables() != 6) problems.push_back("chain has " + std::to_string(ch.num_variables()) + " variables, expected 6");
  }
  Outcome o;
  o.pass = problems.empty();
  o.detail = problems.empty() ? "7x7 clique block; two 4x4 chain blocks sharing <s_1>; 6 chain variables"
                              : problems.front();
  return o;
}

Outcome criterion4()
{
  RunParams params;
  params.bounds.cuts = true;
  std::vector<std::size_t> branchings;
  bool all_converged = true;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto cert = solve_cbb(gen_square(15, 1.5, seed), params);
    all_converged = all_converged && cert.converged;
    branchings.push_back(cert.branchings);
    per_seed += (seed > 1 ? "," : "") + std::to_string(cert.branchings);
  }
  auto sorted = branchings;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * static_cast<double>(sorted[4] + sorted[5]);
  Outcome o;
  o.pass = all_converged && sorted.back() <= 40;
  o.detail = "square L=15 sigma=1.5 seeds 1-10 with triangle cuts: branchings " + per_seed + ", median " +
             fmt("%g", median) + ", max " + std::to_string(sorted.back()) +
             (all_converged ? ", all converged" : ", NOT all converged");
  return o;
}

int run_command(const std::string& cmd)
{
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct CsvRow {
  std::size_t size = 0;
  std::size_t n = 0;
  double wall_time = 0.0;
  std::string status;
};

std::vector<CsvRow> read_bench(const fs::path& p)
{
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);  // header
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() < 12) continue;
    rows.push_back({std::stoul(f[1]), std::stoul(f[2]), std::stod(f[7]), f[11]});
  }
  return rows;
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

Outcome criterion5(const std::string& cli, const fs::path& dir)
{
  const std::string common = " --family square --sizes 4,5,6,7,8,9,10 --sigma 1.5 --seeds 5 --oracle-leaf 0";
  const auto cbb_csv = dir / "bench_cbb.csv";
  const auto dense_csv = dir / "bench_nonchordal.csv";
  if (run_command(cli + " bench" + common + " --mode cbb --out " + cbb_csv.string()) != 0 ||
      run_command(cli + " bench" + common + " --mode nonchordal --max-dense-spins 36 --out " +
                  dense_csv.string()) != 0)
    return {false, "bench command failed"};

  std::map<std::size_t, std::vector<double>> cbb_t, dense_t;
  std::map<std::size_t, std::size_t> spins;
  bool all_ok = true;
  for (const auto& r : read_bench(cbb_csv)) {
    all_ok = all_ok && r.status == "ok";
    cbb_t[r.size].push_back(r.wall_time);
    spins[r.size] = r.n;
  }
  for (const auto& r : read_bench(dense_csv)) {
    if (r.status == "refused") continue;
    all_ok = all_ok && r.status == "ok";
    dense_t[r.size].push_back(r.wall_time);
  }
  if (cbb_t.size() != 7) return {false, "bench produced " + std::to_string(cbb_t.size()) + " sizes"};

  // least-squares slope of log(median time) against log(N)
  std::vector<double> xs, ys;
  std::string medians;
  for (const auto& [L, t] : cbb_t) {
    xs.push_back(std::log(static_cast<double>(spins[L])));
    ys.push_back(std::log(median(t)));
    medians += (medians.empty() ? "" : ",") + fmt("%.3g", median(t));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  const double slope = sxy / sxx;

  bool faster = !dense_t.empty();
  std::string compare;
  for (const auto& [L, t] : dense_t) {
    const double c = median(cbb_t[L]), d = median(t);
    faster = faster && c < d;
    compare += " L=" + std::to_string(L) + " " + fmt("%.3g", c) + "<" + fmt("%.3g", d);
  }
  Outcome o;
  o.pass = all_ok && slope >= 2.0 && slope <= 4.0 && faster;
  o.detail = "median cbb seconds L=4..10 [" + medians + "], slope " + fmt("%.2f", slope) +
             "; cbb vs nonchordal:" + compare + (all_ok ? "" : "; some runs did not converge");
  return o;
}

Outcome criterion6()
{
  std::vector<Named> fams;
  for (std::size_t L = 2; L <= 15; ++L) fams.push_back({"square L=" + std::to_string(L), gen_square(L, 1.5, L)});
  for (std::size_t r = 2; r <= 10; ++r)
    for (std::size_t c = r; c <= r + 1; ++c)
      fams.push_back({"triangular " + std::to_string(r) + "x" + std::to_string(c), gen_triangular(r, c, 1.5, r)});
  for (std::size_t L = 1; L <= 4; ++L) fams.push_back({"chimera L=" + std::to_string(L), gen_chimera(L, 1.5, L)});
  for (std::size_t n : {8, 12, 16, 24, 32, 48})
    for (double p : {0.1, 0.3, 0.6})
      fams.push_back({"random n=" + std::to_string(n) + " p=" + fmt("%g", p), gen_random(n, p, n)});

  std::size_t failures = 0;
  std::string first;
  for (const auto& [name, m] : fams) {
    const auto g = dependency_graph(m);
    const auto d = chordal_extension(g);
    const auto ext = extended_graph(g, d);
    bool ok = is_chordal(ext).chordal && oracle::chordal_by_simplicial_deletion(ext);
    for (const auto& c : m.couplings()) {
      const bool covered = std::any_of(d.cliques.begin(), d.cliques.end(), [&](const auto& cl) {
        return std::binary_search(cl.begin(), cl.end(), c.i) && std::binary_search(cl.begin(), cl.end(), c.j);
      });
      ok = ok && covered;
    }
    if (!ok && failures++ == 0) first = name;
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = std::to_string(fams.size()) + " instances across square, triangular, chimera and random, " +
             std::to_string(failures) + " failures";
  if (!first.empty()) o.detail += ", first failure: " + first;
  return o;
}

Outcome criterion7()
{
  struct Setting {
    std::string name;
    bool dense;
    std::size_t n_t;
    bool cuts;
    std::size_t max_iterations;
  };
  const std::vector<Setting> settings = {
    {"chordal n_t=1", false, 1, false, 200},  {"chordal n_t=7", false, 7, false, 200},
    {"chordal n_t=13", false, 13, false, 200}, {"chordal n_t=1 cuts", false, 1, true, 200},
    {"dense n_t=1", true, 1, false, 200},      {"dense n_t=13", true, 13, false, 200},
    {"chordal n_t=7 truncated", false, 7, false, 4}, {"dense n_t=1 truncated", true, 1, false, 4},
  };
  std::size_t instances = 0, checks = 0, failures = 0;
  double worst = -1e300;
  std::string first;
  for (std::uint64_t seed = 1; instances < 100; ++seed) {
    const std::size_t n = 3 + seed % 10;
    const double p = (seed % 3 == 0) ? 0.3 : (seed % 3 == 1 ? 0.5 : 0.8);
    const auto m = gen_random(n, p, 1000 + seed);
    ++instances;
    const double eg = oracle::gray_code_ground(m);
    const auto g = dependency_graph(m);
    for (const auto& s : settings) {
      LowerBoundParams lp;
      lp.n_t = s.n_t;
      lp.cuts = s.cuts;
      lp.sdp.max_iterations = s.max_iterations;
      const auto lb = lower_bound(m, s.dense ? dense_decomposition(g) : chordal_extension(g), lp);
      for (double v : {lb.bound, lb.solution.dual_bound}) {
        ++checks;
        worst = std::max(worst, v - eg);
        if (v > eg + 1e-6 && failures++ == 0)
          first = s.name + " n=" + std::to_string(n) + " seed=" + std::to_string(1000 + seed);
      }
    }
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = std::to_string(instances) + " random instances x " + std::to_string(settings.size()) +
             " settings, " + std::to_string(checks) + " bounds, max (bound - E_g) " + fmt("%.2e", worst);
  if (!first.empty()) o.detail += ", first violation: " + first;
  return o;
}

Outcome criterion8()
{
  RunParams params;
  std::size_t failures = 0;
  std::string first;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto m = gen_triangular(4, 4, 1.5, seed);
    SpinConfiguration ground;
    const double eg = oracle::gray_code_ground(m, &ground);
    // flip the first spin (from a seed-dependent start) whose flip costs energy
    SpinConfiguration excited = ground;
    for (std::size_t k = 0; k < m.num_spins(); ++k) {
      const std::size_t i = (seed + k) % m.num_spins();
      auto trial = ground;
      trial[i] = static_cast<std::int8_t>(-trial[i]);
      if (energy(m, trial) > eg + 1e-9) {
        excited = trial;
        break;
      }
    }
    const double ex = energy(m, excited);

    Certificate cert;
    const Certificate* given = nullptr;
    if (seed % 2) {
      cert = solve_cbb(m, params);
      given = &cert;
    }
    const auto r = verify_external(m, excited, given, params);
    std::size_t dist = 0;
    for (std::size_t i = 0; i < excited.size(); ++i) dist += excited[i] != r.certified_config[i];
    const bool ok = r.certificate_converged && ex > eg && r.external_energy == ex &&
                    std::abs(r.gap_to_upper - (ex - eg)) <= tol(eg) && r.gap_to_upper > 0.0 &&
                    r.gap_to_lower >= r.gap_to_upper && r.hamming_distance == dist &&
                    std::abs(energy(m, r.certified_config) - eg) <= tol(eg);
    if (!ok && failures++ == 0) first = "seed " + std::to_string(seed);
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = "20 triangular 4x4 instances with a single-flip excitation, " + std::to_string(failures) + " failures";
  if (!first.empty()) o.detail += ", first failure: " + first;
  return o;
}

std::string without_wall_time(const std::string& text)
{
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line))
    if (line.find("\"wall_time\"") == std::string::npos) out += line + '\n';
  return out;
}

Outcome criterion9(const std::string& cli, const fs::path& dir)
{
  const auto inst = dir / "det_instance.txt";
  if (run_command(cli + " gen square --L 7 --sigma 1.5 --seed 3 --out " + inst.string() + " >/dev/null 2>&1") != 0)
    return {false, "gen failed"};
  std::string detail;
  for (const char* extra : {"", " --threads 2"}) {
    std::string outs[2];
    for (int k = 0; k < 2; ++k) {
      const auto path = dir / ("det_" + std::to_string(k) + ".json");
      const int rc = run_command(cli + " solve " + inst.string() + " --oracle-leaf 0 --trace" + extra +
                                 " --out " + path.string());
      if (rc != 0) return {false, "solve exited with " + std::to_string(rc)};
      outs[k] = slurp(path);
    }
    const auto doc = nlohmann::json::parse(outs[0]);
    if (doc.at("branchings").get<int>() == 0) return {false, "test instance does not branch"};
    if (without_wall_time(outs[0]) != without_wall_time(outs[1]))
      return {false, std::string("certificates differ") + extra};
    detail += std::string(detail.empty() ? "" : "; ") + (*extra ? "threads=2" : "threads=1") + " identical (" +
              std::to_string(outs[0].size()) + " bytes, " + std::to_string(doc.at("branchings").get<int>()) +
              " branchings)";
  }
  return {true, detail};
}

}  // namespace

int main(int argc, char** argv)
{
  std::string cli;
  std::set<int> only;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--cli" && k + 1 < argc) {
      cli = argv[++k];
    } else if (a == "--only" && k + 1 < argc) {
      only.insert(std::atoi(argv[++k]));
    } else {
      std::fprintf(stderr, "usage: cbb_acceptance [--cli PATH] [--only N]...\n");
      return 2;
    }
  }

  const fs::path dir = fs::temp_directory_path() / ("cbb_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
    {"oracle equivalence", criterion1},
    {"hierarchy ordering", criterion2},
    {"moment block shapes", criterion3},
    {"square L=15 branching", criterion4},
    {"runtime scaling", [&] { return criterion5(cli, dir); }},
    {"chordality and cover", criterion6},
    {"safe dual bound", criterion7},
    {"external verification", criterion8},
    {"determinism", [&] { return criterion9(cli, dir); }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    if ((id == 5 || id == 9) && cli.empty()) {
      o = {false, "needs --cli"};
    } else {
      try {
        o = criteria[k].second();
      } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d (%s): %s: %s [%.1fs]\n", id, criteria[k].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return failed ? 1 : 0;
}
