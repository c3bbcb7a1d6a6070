// Copyright 2026 The PacPriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PACPRIV_MATHUTIL_HPP_
#define PACPRIV_MATHUTIL_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pacpriv {

// log(sum_i exp(x[i])), max-shifted. Returns -inf for an empty span or when
// every entry is -inf.
double log_sum_exp(std::span<const double> x);

// Compensated (Kahan) accumulator. Summing k identical power-of-two terms
// stays exact for k < 2^53.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile. Acklam's rational approximation refined with one
// Halley step against erfc; absolute error well below 1e-9 on
// p in [1e-12, 1 - 1e-12].
double normal_quantile(double p);

// Deterministic standard-normal stream (Marsaglia polar over mt19937_64).
// The sequence depends only on the seed, not on platform RNG library
// internals.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  double next();

  // Uniform in [0, 1).
  double next_uniform();

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Unbiased uniform draw from {0, ..., n-1} by rejection; deterministic given
// the generator state.
std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n);

// Derives an independent child seed from (seed, index). SplitMix64-style
// finalizer, so per-step noise streams are decorrelated.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// FNV-1a over bytes; used for config/universe fingerprints.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64(const std::string& s);

// Gauss-Hermite rule for integrals against the standard normal density:
// integral f(x) phi(x) dx ~= sum_k weights[k] * f(nodes[k]).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int n);

// Kolmogorov-Smirnov distance between a sample and the standard normal.
// Sorts a copy of the sample.
double ks_distance_to_normal(std::vector<double> samples);

}  // namespace pacpriv

#endif  // PACPRIV_MATHUTIL_HPP_
