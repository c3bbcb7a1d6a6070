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

#ifndef PACPRIV_NOISE_HPP_
#define PACPRIV_NOISE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pacpriv/core_types.hpp"

namespace pacpriv {

// One query's deterministic mechanism restricted to the secret space:
// row j holds the output the curator would release if subset j were the
// secret.
struct MechanismMatrix {
  Eigen::MatrixXd outputs;  // m x d
  std::string query_id;

  int num_subsets() const { return static_cast<int>(outputs.rows()); }
  int output_dim() const { return static_cast<int>(outputs.cols()); }
};

// Gaussian mechanism calibrated to one (belief, mechanism, budget) triple.
// Columns of `basis` are the eigenvectors of the belief-weighted output
// covariance; `variances` holds the per-direction noise. Directions whose
// output eigenvalue falls below the rank floor carry exactly zero noise.
struct NoiseSpec {
  Eigen::MatrixXd basis;      // d x d orthonormal
  Eigen::VectorXd variances;  // length d, >= 0
  Eigen::VectorXd eigenvalues;  // length d, >= 0, floored values set to 0
  double budget = 0.0;

  int dim() const { return static_cast<int>(variances.size()); }
  int noise_rank() const;
  bool is_zero() const { return variances.isZero(0.0); }

  std::string to_json() const;

  // Convenience constructor for a full-rank diagonal spec in the standard
  // basis (tests and filter oracles).
  static NoiseSpec isotropic(int d, double variance);
};

// Eigenvalues at or below max(kRankFloorRel * lambda_max, kRankFloorAbs)
// are treated as exact zeros so that roundoff in the decomposition cannot
// fabricate noisy directions.
inline constexpr double kRankFloorRel = 1e-12;
inline constexpr double kRankFloorAbs = 1e-15;

// In zero-noise directions a response is only compatible with a subset if
// it matches that subset's output to within this tolerance.
inline constexpr double kZeroDirectionTol = 1e-9;

// Computes the noise covariance that keeps the mutual information between
// the secret and the released response at or below `budget`, under the
// given belief. Works on the weighted, centered m x d matrix directly: the
// d x d covariance is never materialized.
NoiseSpec calibrate(const MechanismMatrix& mech, const BeliefState& belief,
                    double budget);

// Draws basis * (z .* sqrt(variances)) with z standard normal; zero-variance
// directions contribute exactly 0. Deterministic in the seed.
Eigen::VectorXd sample_noise(const NoiseSpec& spec, std::uint64_t seed);

// Per-subset Gaussian log-likelihoods of `response`, up to one shared
// additive constant, evaluated by projection onto the calibration basis
// (no matrix ever inverted). A mismatch beyond kZeroDirectionTol in a
// zero-variance direction excludes the subset outright (-inf).
std::vector<double> log_likelihoods(const NoiseSpec& spec,
                                    const MechanismMatrix& mech,
                                    const Eigen::VectorXd& response);

// Test oracle: Gauss-Hermite estimate of I(S; M(S) + Z) under `belief` for
// the noise in `spec`. Supported for noise rank <= 3; throws
// UnsupportedInstanceError above that.
double verify_mi_bound(const MechanismMatrix& mech, const BeliefState& belief,
                       const NoiseSpec& spec);

}  // namespace pacpriv

#endif  // PACPRIV_NOISE_HPP_
