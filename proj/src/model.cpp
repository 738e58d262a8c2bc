/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cbb/model.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "cbb/error.hpp"
#include "cbb/rng.hpp"

namespace cbb {

SpinModel::SpinModel(std::size_t n, std::vector<Coupling> couplings, std::vector<Field> fields,
                     double offset)
  : n_(n), offset_(offset)
{
  if (!std::isfinite(offset)) throw ContractViolation("model offset is not finite");

  couplings_.reserve(couplings.size());
  for (auto c : couplings) {
    if (c.i >= n || c.j >= n)
      throw ContractViolation("coupling index out of range (" + std::to_string(c.i) + ", " +
                              std::to_string(c.j) + ") for " + std::to_string(n) + " spins");
    if (c.i == c.j) throw ContractViolation("self-coupling on spin " + std::to_string(c.i));
    if (!std::isfinite(c.J)) throw ContractViolation("non-finite coupling");
    if (c.i > c.j) std::swap(c.i, c.j);
    if (c.J != 0.0) couplings_.push_back(c);
  }
  std::sort(couplings_.begin(), couplings_.end(), [](const Coupling& a, const Coupling& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < couplings_.size(); ++k)
    if (couplings_[k].i == couplings_[k - 1].i && couplings_[k].j == couplings_[k - 1].j)
      throw ContractViolation("duplicate coupling (" + std::to_string(couplings_[k].i) + ", " +
                              std::to_string(couplings_[k].j) + ")");

  fields_.reserve(fields.size());
  for (const auto& f : fields) {
    if (f.i >= n) throw ContractViolation("field index " + std::to_string(f.i) + " out of range");
    if (!std::isfinite(f.h)) throw ContractViolation("non-finite field");
    if (f.h != 0.0) fields_.push_back(f);
  }
  std::sort(fields_.begin(), fields_.end(),
            [](const Field& a, const Field& b) { return a.i < b.i; });
  for (std::size_t k = 1; k < fields_.size(); ++k)
    if (fields_[k].i == fields_[k - 1].i)
      throw ContractViolation("duplicate field on spin " + std::to_string(fields_[k].i));
}

double SpinModel::field(SpinIndex i) const
{
  auto it = std::lower_bound(fields_.begin(), fields_.end(), i,
                             [](const Field& f, SpinIndex k) { return f.i < k; });
  return (it != fields_.end() && it->i == i) ? it->h : 0.0;
}

SpinModel SpinModel::scaled(double factor) const
{
  auto c = couplings_;
  auto f = fields_;
  for (auto& x : c) x.J *= factor;
  for (auto& x : f) x.h *= factor;
  return SpinModel(n_, std::move(c), std::move(f), offset_ * factor);
}

void validate_configuration(std::span<const std::int8_t> config)
{
  for (std::size_t k = 0; k < config.size(); ++k)
    if (config[k] != 1 && config[k] != -1)
      throw ContractViolation("spin " + std::to_string(k) + " is not +1 or -1");
}

SpinConfiguration parse_configuration(std::string_view text)
{
  SpinConfiguration config;
  std::size_t line = 1;
  bool comment = false;
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char ch = text[k];
    if (ch == '\n') {
      ++line;
      comment = false;
      continue;
    }
    if (comment || ch == ' ' || ch == '\t' || ch == '\r' || ch == ',') continue;
    if (ch == '#') {
      comment = true;
      continue;
    }
    if (ch == '-' && k + 1 < text.size() && text[k + 1] == '1') {
      config.push_back(-1);
      ++k;
    } else if (ch == '+' && k + 1 < text.size() && text[k + 1] == '1') {
      config.push_back(1);
      ++k;
    } else if (ch == '1') {
      config.push_back(1);
    } else if (ch == '-') {
      config.push_back(-1);
    } else if (ch == '+') {
      config.push_back(1);
    } else {
      throw ParseError(line, std::string("unexpected character '") + ch + "' in configuration");
    }
  }
  return config;
}

std::string format_configuration(std::span<const std::int8_t> config)
{
  std::string out;
  for (std::size_t k = 0; k < config.size(); ++k) {
    if (k) out += ' ';
    out += config[k] < 0 ? "-1" : "1";
  }
  return out;
}

double energy(const SpinModel& model, std::span<const std::int8_t> config)
{
  if (config.size() != model.num_spins())
    throw ContractViolation("configuration has " + std::to_string(config.size()) +
                            " spins, model has " + std::to_string(model.num_spins()));
  double e = model.offset();
  for (const auto& c : model.couplings()) e -= c.J * (config[c.i] * config[c.j]);
  for (const auto& f : model.fields()) e += f.h * config[f.i];
  return e;
}

OracleResult brute_force_ground(const SpinModel& model, bool all_minimizers,
                                std::size_t max_spins)
{
  const std::size_t n = model.num_spins();
  if (n > max_spins)
    throw SizeError("brute force refused: " + std::to_string(n) + " spins exceeds cap of " +
                    std::to_string(max_spins));

  OracleResult result;
  result.energy = std::numeric_limits<double>::infinity();
  SpinConfiguration config(n, -1);
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<std::pair<double, std::uint64_t>> near;
  for (std::uint64_t k = 0; k < count; ++k) {
    for (std::size_t i = 0; i < n; ++i) config[i] = ((k >> (n - 1 - i)) & 1U) ? 1 : -1;
    const double e = energy(model, config);
    if (e < result.energy) {
      result.energy = e;
      result.configurations.assign(1, config);
    }
    if (all_minimizers) {
      const double tol = 1e-12 * (1.0 + std::abs(e));
      if (e <= result.energy + tol) near.emplace_back(e, k);
    }
  }
  if (all_minimizers) {
    result.configurations.clear();
    const double tol = 1e-12 * (1.0 + std::abs(result.energy));
    for (const auto& [e, k] : near) {
      if (e > result.energy + tol) continue;
      for (std::size_t i = 0; i < n; ++i) config[i] = ((k >> (n - 1 - i)) & 1U) ? 1 : -1;
      result.configurations.push_back(config);
    }
  }
  return result;
}

FixedSpinModel fix_spin(const SpinModel& model, SpinIndex i, int s)
{
  const std::size_t n = model.num_spins();
  if (i >= n) throw ContractViolation("fix_spin: index " + std::to_string(i) + " out of range");
  if (s != 1 && s != -1) throw ContractViolation("fix_spin: value must be +1 or -1");

  FixedSpinModel out;
  std::vector<std::size_t> remap(n, 0);
  for (std::size_t k = 0, r = 0; k < n; ++k) {
    if (k == i) continue;
    remap[k] = r++;
    out.kept.push_back(k);
  }

  std::vector<double> h(n, 0.0);
  for (const auto& f : model.fields()) h[f.i] = f.h;

  std::vector<Coupling> couplings;
  for (const auto& c : model.couplings()) {
    if (c.i == i)
      h[c.j] -= c.J * s;
    else if (c.j == i)
      h[c.i] -= c.J * s;
    else
      couplings.push_back({remap[c.i], remap[c.j], c.J});
  }
  std::vector<Field> fields;
  for (std::size_t k = 0; k < n; ++k)
    if (k != i && h[k] != 0.0) fields.push_back({remap[k], h[k]});

  out.model = SpinModel(n - 1, std::move(couplings), std::move(fields),
                        model.offset() + model.field(i) * s);
  return out;
}

namespace {

std::vector<Field> gaussian_fields(std::size_t n, double sigma, SplitMix64& rng)
{
  std::vector<Field> fields;
  fields.reserve(n);
  for (std::size_t k = 0; k < n; ++k) fields.push_back({k, sigma * rng.normal()});
  return fields;
}

void require(bool ok, const char* what)
{
  if (!ok) throw ContractViolation(what);
}

}  // namespace

SpinModel gen_square(std::size_t L, double sigma, std::uint64_t seed)
{
  require(L >= 1, "gen_square: L must be >= 1");
  require(std::isfinite(sigma) && sigma >= 0, "gen_square: sigma must be >= 0");
  std::vector<Coupling> couplings;
  for (std::size_t r = 0; r < L; ++r)
    for (std::size_t c = 0; c < L; ++c) {
      const std::size_t v = r * L + c;
      if (c + 1 < L) couplings.push_back({v, v + 1, 1.0});
      if (r + 1 < L) couplings.push_back({v, v + L, 1.0});
    }
  SplitMix64 root(seed);
  SplitMix64 field_rng = root.split();
  return SpinModel(L * L, std::move(couplings), gaussian_fields(L * L, sigma, field_rng));
}

SpinModel gen_triangular(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed)
{
  require(rows >= 1 && cols >= 1, "gen_triangular: rows and cols must be >= 1");
  require(std::isfinite(sigma) && sigma >= 0, "gen_triangular: sigma must be >= 0");
  std::vector<Coupling> couplings;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      if (c + 1 < cols) couplings.push_back({v, v + 1, 1.0});
      if (r + 1 < rows) couplings.push_back({v, v + cols, 1.0});
      if (r + 1 < rows && c + 1 < cols) couplings.push_back({v, v + cols + 1, 1.0});
    }
  SplitMix64 root(seed);
  SplitMix64 field_rng = root.split();
  return SpinModel(rows * cols, std::move(couplings),
                   gaussian_fields(rows * cols, sigma, field_rng));
}

SpinModel gen_chimera(std::size_t L, double sigma, std::uint64_t seed)
{
  require(L >= 1, "gen_chimera: L must be >= 1");
  require(std::isfinite(sigma) && sigma >= 0, "gen_chimera: sigma must be >= 0");
  auto base = [L](std::size_t r, std::size_t c) { return 8 * (r * L + c); };
  std::vector<Coupling> couplings;
  for (std::size_t r = 0; r < L; ++r)
    for (std::size_t c = 0; c < L; ++c) {
      const std::size_t b = base(r, c);
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t k = 0; k < 4; ++k) couplings.push_back({b + a, b + 4 + k, 1.0});
      for (std::size_t k = 0; k < 4; ++k) {
        if (r + 1 < L) couplings.push_back({b + k, base(r + 1, c) + k, 1.0});
        if (c + 1 < L) couplings.push_back({b + 4 + k, base(r, c + 1) + 4 + k, 1.0});
      }
    }
  SplitMix64 root(seed);
  SplitMix64 field_rng = root.split();
  const std::size_t n = 8 * L * L;
  return SpinModel(n, std::move(couplings), gaussian_fields(n, sigma, field_rng));
}

SpinModel gen_random(std::size_t n, double p, std::uint64_t seed)
{
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "gen_random: p must lie in [0, 1]");
  SplitMix64 root(seed);
  SplitMix64 graph_rng = root.split();
  SplitMix64 field_rng = root.split();
  std::vector<Coupling> couplings;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double u = graph_rng.uniform();
      const double J = graph_rng.normal();
      if (u < p) couplings.push_back({i, j, J});
    }
  return SpinModel(n, std::move(couplings), gaussian_fields(n, 1.0, field_rng));
}

std::string format_number(double value)
{
  if (!std::isfinite(value)) throw ContractViolation("cannot format non-finite number");
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (res.ec != std::errc()) throw ContractViolation("number formatting failed");
  return std::string(buf, res.ptr);
}

std::string serialize_instance(const SpinModel& model)
{
  std::string out;
  out += std::to_string(model.num_spins()) + " " + std::to_string(model.couplings().size()) + "\n";
  for (const auto& c : model.couplings())
    out += std::to_string(c.i) + " " + std::to_string(c.j) + " " + format_number(c.J) + "\n";
  out += std::to_string(model.fields().size()) + "\n";
  for (const auto& f : model.fields())
    out += std::to_string(f.i) + " " + format_number(f.h) + "\n";
  return out;
}

namespace {

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  // Next non-comment, non-blank line split into tokens; false at end of input.
  bool next(std::vector<std::string_view>& tokens)
  {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string_view::npos || line[first] == '#') continue;
      tokens.clear();
      std::size_t k = 0;
      while (k < line.size()) {
        while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
        std::size_t s = k;
        while (k < line.size() && line[k] != ' ' && line[k] != '\t') ++k;
        if (k > s) tokens.push_back(line.substr(s, k - s));
      }
      return true;
    }
    return false;
  }
};

std::size_t parse_count(std::string_view tok, std::size_t line, const char* what)
{
  std::size_t v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
  return v;
}

double parse_real(std::string_view tok, std::size_t line)
{
  double v = 0;
  const char* b = tok.data();
  if (!tok.empty() && tok.front() == '+') ++b;
  auto res = std::from_chars(b, tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError(line, "invalid number '" + std::string(tok) + "'");
  return v;
}

}  // namespace

SpinModel parse_instance(std::string_view text)
{
  LineReader reader{text};
  std::vector<std::string_view> tok;

  if (!reader.next(tok)) throw ParseError(0, "empty instance");
  if (tok.size() != 2) throw ParseError(reader.line_no, "expected 'N M' header");
  const std::size_t n = parse_count(tok[0], reader.line_no, "spin count");
  const std::size_t m = parse_count(tok[1], reader.line_no, "coupling count");

  auto check_index = [&](std::size_t idx) {
    if (idx >= n) throw ParseError(reader.line_no, "index " + std::to_string(idx) + " out of range");
  };

  std::vector<Coupling> couplings;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t k = 0; k < m; ++k) {
    if (!reader.next(tok)) throw ParseError(reader.line_no, "unexpected end of input in couplings");
    if (tok.size() != 3) throw ParseError(reader.line_no, "expected 'i j J'");
    const std::size_t i = parse_count(tok[0], reader.line_no, "index");
    const std::size_t j = parse_count(tok[1], reader.line_no, "index");
    check_index(i);
    check_index(j);
    if (i >= j) throw ParseError(reader.line_no, "coupling requires i < j");
    const double J = parse_real(tok[2], reader.line_no);
    if (!seen.emplace(i, j).second)
      throw ParseError(reader.line_no, "duplicate edge (" + std::to_string(i) + ", " +
                                             std::to_string(j) + ")");
    couplings.push_back({i, j, J});
  }

  if (!reader.next(tok)) throw ParseError(reader.line_no, "missing field count");
  if (tok.size() != 1) throw ParseError(reader.line_no, "expected field count 'F'");
  const std::size_t f = parse_count(tok[0], reader.line_no, "field count");
  std::vector<Field> fields;
  std::vector<bool> has_field(n, false);
  for (std::size_t k = 0; k < f; ++k) {
    if (!reader.next(tok)) throw ParseError(reader.line_no, "unexpected end of input in fields");
    if (tok.size() != 2) throw ParseError(reader.line_no, "expected 'i h'");
    const std::size_t i = parse_count(tok[0], reader.line_no, "index");
    check_index(i);
    if (has_field[i]) throw ParseError(reader.line_no, "duplicate field on spin " + std::to_string(i));
    has_field[i] = true;
    fields.push_back({i, parse_real(tok[1], reader.line_no)});
  }
  if (reader.next(tok)) throw ParseError(reader.line_no, "trailing content after fields");

  return SpinModel(n, std::move(couplings), std::move(fields));
}

std::string instance_digest(const SpinModel& model)
{
  const std::string text = serialize_instance(model);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 0xF];
  }
  return out;
}

}  // namespace cbb
