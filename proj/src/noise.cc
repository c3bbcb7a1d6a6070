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

#include "pacpriv/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "pacpriv/errors.hpp"

namespace pacpriv {

int NoiseSpec::noise_rank() const {
  int rank = 0;
  for (int i = 0; i < dim(); ++i) {
    if (variances(i) > 0.0) ++rank;
  }
  return rank;
}

NoiseSpec NoiseSpec::isotropic(int d, double variance) {
  NoiseSpec spec;
  spec.basis = Eigen::MatrixXd::Identity(d, d);
  spec.variances = Eigen::VectorXd::Constant(d, variance);
  spec.eigenvalues = Eigen::VectorXd::Constant(d, variance);
  spec.budget = std::numeric_limits<double>::quiet_NaN();
  return spec;
}

std::string NoiseSpec::to_json() const {
  nlohmann::json j;
  j["budget"] = budget;
  j["eigenvalues"] = std::vector<double>(
      eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  j["variances"] = std::vector<double>(variances.data(),
                                       variances.data() + variances.size());
  std::vector<std::vector<double>> basis_rows;
  for (int r = 0; r < basis.rows(); ++r) {
    basis_rows.emplace_back(basis.row(r).begin(), basis.row(r).end());
  }
  j["basis"] = basis_rows;
  return j.dump();
}

NoiseSpec calibrate(const MechanismMatrix& mech, const BeliefState& belief,
                    double budget) {
  if (!(budget > 0.0)) {
    throw InvalidParameterError("calibrate: budget must be positive");
  }
  if (mech.num_subsets() != belief.size()) {
    throw DataError("calibrate: mechanism rows != belief size");
  }
  if (!mech.outputs.allFinite()) {
    throw DataError("calibrate: non-finite mechanism output");
  }
  const int m = mech.num_subsets();
  const int d = mech.output_dim();

  Eigen::VectorXd weights(m);
  for (int s = 0; s < m; ++s) weights(s) = belief.probability(s);

  const Eigen::VectorXd mean = mech.outputs.transpose() * weights;

  // Rows sqrt(P(s)) * (M(s) - mean); the output covariance under the belief
  // is centered^T * centered, and its eigensystem comes straight from the
  // singular values / right singular vectors.
  Eigen::MatrixXd centered = mech.outputs.rowwise() - mean.transpose();
  for (int s = 0; s < m; ++s) centered.row(s) *= std::sqrt(weights(s));

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);

  NoiseSpec spec;
  spec.budget = budget;
  spec.basis = svd.matrixV();
  spec.eigenvalues = Eigen::VectorXd::Zero(d);
  const int sv_count = static_cast<int>(svd.singularValues().size());
  for (int i = 0; i < std::min(sv_count, d); ++i) {
    const double sv = svd.singularValues()(i);
    spec.eigenvalues(i) = sv * sv;
  }

  const double lambda_max = spec.eigenvalues.size() > 0 ? spec.eigenvalues(0) : 0.0;
  const double floor = std::max(kRankFloorRel * lambda_max, kRankFloorAbs);
  double sqrt_sum = 0.0;
  for (int i = 0; i < d; ++i) {
    if (spec.eigenvalues(i) <= floor) {
      spec.eigenvalues(i) = 0.0;
    } else {
      sqrt_sum += std::sqrt(spec.eigenvalues(i));
    }
  }

  spec.variances = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    if (spec.eigenvalues(i) > 0.0) {
      spec.variances(i) =
          std::sqrt(spec.eigenvalues(i)) * sqrt_sum / (2.0 * budget);
    }
  }
  return spec;
}

Eigen::VectorXd sample_noise(const NoiseSpec& spec, std::uint64_t seed) {
  const int d = spec.dim();
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(d);
  if (spec.is_zero()) return noise;
  NormalSampler sampler(seed);
  for (int i = 0; i < d; ++i) {
    if (spec.variances(i) > 0.0) {
      noise += spec.basis.col(i) *
               (std::sqrt(spec.variances(i)) * sampler.next());
    }
  }
  return noise;
}

std::vector<double> log_likelihoods(const NoiseSpec& spec,
                                    const MechanismMatrix& mech,
                                    const Eigen::VectorXd& response) {
  const int m = mech.num_subsets();
  const int d = mech.output_dim();
  if (spec.dim() != d || response.size() != d) {
    throw DataError("log_likelihoods: dimension mismatch");
  }
  // Projections of (response - M(s)) onto every basis direction: m x d.
  const Eigen::MatrixXd proj =
      ((-mech.outputs).rowwise() + response.transpose()) * spec.basis;

  std::vector<double> logliks(m, 0.0);
  for (int s = 0; s < m; ++s) {
    double quad = 0.0;
    bool excluded = false;
    for (int i = 0; i < d; ++i) {
      const double p = proj(s, i);
      if (spec.variances(i) > 0.0) {
        quad += p * p / spec.variances(i);
      } else if (std::abs(p) > kZeroDirectionTol) {
        excluded = true;
        break;
      }
    }
    logliks[s] =
        excluded ? -std::numeric_limits<double>::infinity() : -0.5 * quad;
  }
  return logliks;
}

double verify_mi_bound(const MechanismMatrix& mech, const BeliefState& belief,
                       const NoiseSpec& spec) {
  if (mech.num_subsets() != belief.size() ||
      spec.dim() != mech.output_dim()) {
    throw DataError("verify_mi_bound: dimension mismatch");
  }
  const int m = mech.num_subsets();
  const int d = mech.output_dim();

  // Noisy directions carry the Gaussian channel; a noiseless direction is
  // only information-free if every subset that is live under the audited
  // belief agrees there. Disagreement in a noiseless direction reveals the
  // subset outright, so the leakage is unbounded.
  std::vector<int> active;
  std::vector<int> inactive;
  for (int i = 0; i < d; ++i) {
    (spec.variances(i) > 0.0 ? active : inactive).push_back(i);
  }
  const int rank = static_cast<int>(active.size());
  if (rank > 3) {
    throw UnsupportedInstanceError(
        "verify_mi_bound: quadrature supported up to noise rank 3");
  }

  std::vector<double> probs;
  std::vector<Eigen::VectorXd> centers;  // standardized coordinates
  std::vector<int> live_subsets;
  for (int s = 0; s < m; ++s) {
    const double p = belief.probability(s);
    if (p <= 0.0) continue;
    Eigen::VectorXd c(rank);
    for (int k = 0; k < rank; ++k) {
      c(k) = spec.basis.col(active[k]).dot(mech.outputs.row(s)) /
             std::sqrt(spec.variances(active[k]));
    }
    probs.push_back(p);
    centers.push_back(std::move(c));
    live_subsets.push_back(s);
  }
  const int live = static_cast<int>(probs.size());
  if (live <= 1) return 0.0;
  for (int i : inactive) {
    const double ref = spec.basis.col(i).dot(mech.outputs.row(live_subsets[0]));
    for (int t = 1; t < live; ++t) {
      const double val =
          spec.basis.col(i).dot(mech.outputs.row(live_subsets[t]));
      if (std::abs(val - ref) > kZeroDirectionTol) {
        return std::numeric_limits<double>::infinity();
      }
    }
  }
  if (rank == 0) return 0.0;

  const int nodes_per_dim = rank == 1 ? 128 : (rank == 2 ? 64 : 40);
  const GaussHermiteRule rule = gauss_hermite(nodes_per_dim);

  // I = sum_s P(s) E_{y~N(c_s, I)} [ -log sum_s' P(s') exp(l_s' - l_s) ]
  // with l_s = -|y - c_s|^2 / 2; the shared Gaussian constant cancels.
  double mi = 0.0;
  std::vector<int> idx(rank, 0);
  for (int s = 0; s < live; ++s) {
    double component = 0.0;
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      double weight = 1.0;
      Eigen::VectorXd y(rank);
      for (int k = 0; k < rank; ++k) {
        weight *= rule.weights[idx[k]];
        y(k) = centers[s](k) + rule.nodes[idx[k]];
      }
      const double l_s = -0.5 * (y - centers[s]).squaredNorm();
      double max_shift = -std::numeric_limits<double>::infinity();
      for (int t = 0; t < live; ++t) {
        max_shift =
            std::max(max_shift, -0.5 * (y - centers[t]).squaredNorm() +
                                    std::log(probs[t]));
      }
      double mix = 0.0;
      for (int t = 0; t < live; ++t) {
        mix += std::exp(-0.5 * (y - centers[t]).squaredNorm() +
                        std::log(probs[t]) - max_shift);
      }
      const double log_mix = max_shift + std::log(mix);
      component += weight * (l_s - log_mix);
      int k = 0;
      while (k < rank && ++idx[k] == nodes_per_dim) idx[k++] = 0;
      if (k == rank) break;
    }
    mi += probs[s] * component;
  }
  return mi;
}

}  // namespace pacpriv
