// Copyright 2026 The LogVeil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "logveil/accountant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logveil/error.hpp"

namespace logveil {
namespace {

constexpr double kMaxNoiseMultiplier = 1e6;
constexpr double kCalibrationTolerance = 1e-3;

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_sum_exp(const std::vector<double>& terms) {
  const double max_term = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(max_term)) return max_term;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum);
}

// Log-moment A(alpha) = (alpha - 1) * epsilon(alpha) of one subsampled
// Gaussian step at integer order alpha >= 2:
//   A = log sum_{j=0..alpha} C(alpha,j) (1-q)^(alpha-j) q^j e^{j(j-1)/(2 Phi^2)}
double integer_log_moment(int alpha, double q, double phi) {
  std::vector<double> terms;
  terms.reserve(alpha + 1);
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double gauss = 1.0 / (2.0 * phi * phi);
  for (int j = 0; j <= alpha; ++j) {
    double t = log_binomial(alpha, j) + j * log_q + j * (j - 1.0) * gauss;
    if (j < alpha) t += (alpha - j) * log_1mq;
    terms.push_back(t);
  }
  return log_sum_exp(terms);
}

// A(alpha) for any order > 1. A(1) = 0 exactly, and A is convex in alpha,
// so linear interpolation between integers stays an upper bound.
double log_moment(double alpha, double q, double phi) {
  const double floor_a = std::floor(alpha);
  if (floor_a == alpha) {
    return integer_log_moment(static_cast<int>(alpha), q, phi);
  }
  const double lo = (floor_a < 2.0) ? 0.0
                                    : integer_log_moment(static_cast<int>(floor_a), q, phi);
  const double hi = integer_log_moment(static_cast<int>(floor_a) + 1, q, phi);
  const double frac = alpha - floor_a;
  return lo + frac * (hi - lo);
}

}  // namespace

void PrivacySpec::validate() const {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (!(delta > 0.0) || !(delta < 1.0)) throw InputError("delta must be in (0, 1)");
}

const std::vector<double>& default_rdp_orders() {
  static const std::vector<double> orders = [] {
    std::vector<double> o = {1.5, 1.75};
    for (int a = 2; a <= 256; ++a) o.push_back(a);
    // Sparse tail for very tight targets: the conversion term
    // ln(1/delta)/(alpha-1) alone exceeds epsilon targets below
    // ln(1/delta)/255 unless higher orders are available.
    for (int a : {512, 1024, 2048, 4096, 8192}) o.push_back(a);
    return o;
  }();
  return orders;
}

RdpCurve rdp_subsampled_gaussian(double sampling_rate, double noise_multiplier,
                                 const std::vector<double>& orders) {
  if (noise_multiplier == 0.0) {
    throw InputError("non-private: noise multiplier zero");
  }
  if (!(noise_multiplier > 0.0)) {
    throw InputError("noise multiplier must be non-negative");
  }
  if (!(sampling_rate > 0.0) || sampling_rate > 1.0) {
    throw InputError("sampling_rate must be in (0, 1]");
  }

  RdpCurve curve;
  curve.points.reserve(orders.size());
  double previous_order = 1.0;
  for (double alpha : orders) {
    if (!(alpha > 1.0)) throw InputError("RDP orders must be greater than 1");
    if (!(alpha > previous_order)) {
      throw InputError("RDP orders must be strictly increasing");
    }
    previous_order = alpha;

    double eps;
    if (sampling_rate == 1.0) {
      eps = alpha / (2.0 * noise_multiplier * noise_multiplier);
    } else {
      eps = log_moment(alpha, sampling_rate, noise_multiplier) / (alpha - 1.0);
    }
    if (std::isfinite(eps) && eps >= 0.0) {
      curve.points.push_back({alpha, eps});
    }
  }
  return curve;
}

RdpCurve compose_rdp(RdpCurve curve, std::size_t steps) {
  for (RdpPoint& point : curve.points) {
    point.epsilon *= static_cast<double>(steps);
  }
  return curve;
}

DpConversion rdp_to_dp(const RdpCurve& curve, double delta) {
  if (curve.points.empty()) throw InputError("empty RDP curve");
  if (!(delta > 0.0) || !(delta < 1.0)) throw InputError("delta must be in (0, 1)");

  const double log_inv_delta = std::log(1.0 / delta);
  DpConversion best{std::numeric_limits<double>::infinity(), 0.0};
  for (const RdpPoint& point : curve.points) {
    const double eps = point.epsilon + log_inv_delta / (point.order - 1.0);
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.order = point.order;
    }
  }
  return best;
}

PrivacySpec compose_dp(const std::vector<PrivacySpec>& specs, CompositionMode mode) {
  if (specs.empty()) throw InputError("no privacy specs to compose");
  PrivacySpec result{0.0, 0.0};
  if (mode == CompositionMode::sequential) {
    for (const PrivacySpec& s : specs) {
      result.epsilon += s.epsilon;
      result.delta += s.delta;
    }
    if (result.delta >= 1.0) throw Error("budget exhausted");
  } else {
    for (const PrivacySpec& s : specs) {
      result.epsilon = std::max(result.epsilon, s.epsilon);
      result.delta = std::max(result.delta, s.delta);
    }
  }
  return result;
}

NoiseCalibration calibrate_noise(const PrivacySpec& target, double sampling_rate,
                                 std::size_t iterations,
                                 const std::vector<double>& orders) {
  target.validate();

  auto achieved = [&](double phi) {
    return rdp_to_dp(
        compose_rdp(rdp_subsampled_gaussian(sampling_rate, phi, orders), iterations),
        target.delta);
  };

  double hi = 0.5;
  DpConversion at_hi = achieved(hi);
  while (at_hi.epsilon > target.epsilon) {
    hi *= 2.0;
    if (hi > kMaxNoiseMultiplier) throw InfeasibleError("infeasible target");
    at_hi = achieved(hi);
  }
  double lo = 0.0;  // conceptually failing; never evaluated
  while (hi - lo > kCalibrationTolerance) {
    const double mid = 0.5 * (lo + hi);
    const DpConversion at_mid = achieved(mid);
    if (at_mid.epsilon <= target.epsilon) {
      hi = mid;
      at_hi = at_mid;
    } else {
      lo = mid;
    }
  }
  return {hi, at_hi.epsilon, at_hi.order};
}

AccountantState::AccountantState(double sampling_rate, double noise_multiplier,
                                 std::vector<double> orders)
    : sampling_rate_(sampling_rate),
      noise_multiplier_(noise_multiplier),
      orders_(std::move(orders)) {}

PrivacySpec AccountantState::spec_for_delta(double delta) const {
  const RdpCurve curve =
      compose_rdp(rdp_subsampled_gaussian(sampling_rate_, noise_multiplier_, orders_),
                  steps_);
  const DpConversion conversion = rdp_to_dp(curve, delta);
  return {conversion.epsilon, delta};
}

}  // namespace logveil
