/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>

namespace cbb {

/// SplitMix64 (Steele, Lea, Flood 2014).  The state advances by the golden
/// gamma 0x9e3779b97f4a7c15 and each output is the standard mix13 finalizer,
/// so streams are bit-identical on every platform.
///
/// `split()` derives an independent child stream seeded from the next output
/// of this one.  Gaussian samples use the Marsaglia polar method: pairs of
/// uniforms in (-1, 1) are drawn until they fall inside the unit disc, and the
/// second deviate of each accepted pair is cached for the following call.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal deviate.
  double normal();

  SplitMix64 split();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cbb
