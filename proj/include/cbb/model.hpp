/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cbb {

using SpinIndex = std::size_t;

struct Coupling {
  SpinIndex i;
  SpinIndex j;
  double J;

  friend bool operator==(const Coupling&, const Coupling&) = default;
};

struct Field {
  SpinIndex i;
  double h;

  friend bool operator==(const Field&, const Field&) = default;
};

/// Classical Ising instance
///
///   H(s) = offset - sum_{i<j} J_ij s_i s_j + sum_i h_i s_i,   s_i in {-1, +1}.
///
/// Couplings are kept sorted by (i, j) with i < j and fields sorted by i; zero
/// coefficients are never stored.  The constructor validates and canonicalizes
/// its input and throws ContractViolation on out-of-range indices, duplicates,
/// self-couplings or non-finite values.
class SpinModel {
 public:
  SpinModel() = default;
  SpinModel(std::size_t n, std::vector<Coupling> couplings, std::vector<Field> fields,
            double offset = 0.0);

  std::size_t num_spins() const noexcept { return n_; }
  const std::vector<Coupling>& couplings() const noexcept { return couplings_; }
  const std::vector<Field>& fields() const noexcept { return fields_; }
  double offset() const noexcept { return offset_; }

  /// h_i, 0 when no field is stored for spin i.
  double field(SpinIndex i) const;

  /// Multiply every coefficient (J, h and offset) by `factor`.
  SpinModel scaled(double factor) const;

  friend bool operator==(const SpinModel&, const SpinModel&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Coupling> couplings_;
  std::vector<Field> fields_;
  double offset_ = 0.0;
};

/// Spins are stored as -1/+1 bytes.
using SpinConfiguration = std::vector<std::int8_t>;

/// Throws ContractViolation unless every entry is exactly -1 or +1.
void validate_configuration(std::span<const std::int8_t> config);

/// Either a compact string of '+' and '-' characters, or -1/1/+1 tokens
/// separated by whitespace or commas.  '#' starts a comment line.
SpinConfiguration parse_configuration(std::string_view text);

/// Space-separated -1/1 tokens.
std::string format_configuration(std::span<const std::int8_t> config);

/// Evaluate H(config).  The summation order is fixed (offset, couplings in
/// canonical order, fields in canonical order), so equal inputs give
/// bit-identical results.
double energy(const SpinModel& model, std::span<const std::int8_t> config);

struct OracleResult {
  double energy = 0.0;
  std::vector<SpinConfiguration> configurations;
};

inline constexpr std::size_t kBruteForceMaxSpins = 24;

/// Exhaustive minimization over all 2^n configurations.
///
/// Configurations are visited in lexicographic order (spin 0 most significant,
/// -1 before +1), so the first returned configuration is the lexicographically
/// smallest minimizer.  With `all_minimizers` every configuration whose energy
/// equals the minimum within 1e-12 (1 + |E|) is returned.
OracleResult brute_force_ground(const SpinModel& model, bool all_minimizers = false,
                                std::size_t max_spins = kBruteForceMaxSpins);

/// A model with one spin clamped.  `kept[k]` is the index in the parent model
/// of reduced spin k.
struct FixedSpinModel {
  SpinModel model;
  std::vector<SpinIndex> kept;
};

/// Clamp spin i to s and drop it.  Neighbor fields absorb -J_ij s and the
/// offset absorbs h_i s, so energies of reduced configurations equal parent
/// energies with spin i = s.
FixedSpinModel fix_spin(const SpinModel& model, SpinIndex i, int s);

// Benchmark families.  Lattices have open boundaries, J = 1 on every edge and
// fields h_i = sigma * N(0, 1) drawn in spin order.

/// L x L square grid, spin (r, c) -> r * L + c.
SpinModel gen_square(std::size_t L, double sigma, std::uint64_t seed);

/// rows x cols square grid plus the (r, c)-(r+1, c+1) diagonal of every cell.
SpinModel gen_triangular(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed);

/// L x L grid of K_{4,4} cells (8 L^2 spins).  Cell (r, c) owns spins
/// base = 8 (r L + c); part A is base + 0..3 and part B is base + 4..7.
/// A_k couples to A_k of the cell below (r+1, c), B_k to B_k of the cell to
/// the right (r, c+1).
SpinModel gen_chimera(std::size_t L, double sigma, std::uint64_t seed);

/// Erdos-Renyi graph with edge probability p; J and h are standard normal.
SpinModel gen_random(std::size_t n, double p, std::uint64_t seed);

/// Parse the canonical text format (see README).  Throws ParseError carrying
/// the 1-based line number.  Coupling lines with J = 0 are accepted and dropped.
SpinModel parse_instance(std::string_view text);

/// Canonical text form.  The offset is not written.
std::string serialize_instance(const SpinModel& model);

/// Lower-case hex SHA-256 of serialize_instance(model).
std::string instance_digest(const SpinModel& model);

/// Shortest round-trip fixed-notation decimal for a finite double.
std::string format_number(double value);

}  // namespace cbb
