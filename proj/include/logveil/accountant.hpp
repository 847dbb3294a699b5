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

#ifndef LOGVEIL_ACCOUNTANT_HPP_
#define LOGVEIL_ACCOUNTANT_HPP_

#include <cstddef>
#include <vector>

namespace logveil {

struct PrivacySpec {
  double epsilon = 0.0;
  double delta = 0.0;

  void validate() const;  // epsilon > 0, 0 < delta < 1
};

struct RdpPoint {
  double order;    // alpha > 1
  double epsilon;  // Renyi-DP epsilon at that order
};

// epsilon(alpha) samples over strictly increasing orders; orders where the
// bound diverges are dropped.
struct RdpCurve {
  std::vector<RdpPoint> points;
};

// Integers 2..256 plus {1.5, 1.75}.
const std::vector<double>& default_rdp_orders();

// Per-step RDP of the Poisson-subsampled Gaussian mechanism. q = 1 uses the
// Gaussian closed form alpha / (2 Phi^2). q < 1 uses the binomial-expansion
// upper bound at integer orders (evaluated in the log domain); fractional
// orders interpolate the log-moment (alpha-1) * epsilon(alpha) linearly
// between neighboring integers, which preserves the upper-bound property.
RdpCurve rdp_subsampled_gaussian(double sampling_rate, double noise_multiplier,
                                 const std::vector<double>& orders = default_rdp_orders());

// Additive composition: every epsilon(alpha) multiplied by `steps`.
RdpCurve compose_rdp(RdpCurve curve, std::size_t steps);

struct DpConversion {
  double epsilon;
  double order;  // the alpha achieving the minimum
};

// min over curve points of epsilon(alpha) + ln(1/delta) / (alpha - 1).
DpConversion rdp_to_dp(const RdpCurve& curve, double delta);

enum class CompositionMode { sequential, parallel };

// sequential: (sum eps_i, sum delta_i); parallel: (max eps_i, max delta_i).
PrivacySpec compose_dp(const std::vector<PrivacySpec>& specs, CompositionMode mode);

struct NoiseCalibration {
  double noise_multiplier;
  double achieved_epsilon;
  double order;
};

// Smallest noise multiplier (bisection grid, tolerance 1e-3) whose composed
// and converted epsilon stays within the target. Throws InfeasibleError when
// no multiplier up to 1e6 suffices.
NoiseCalibration calibrate_noise(const PrivacySpec& target, double sampling_rate,
                                 std::size_t iterations,
                                 const std::vector<double>& orders = default_rdp_orders());

// Step counter bound to one (q, Phi) mechanism; skipped (empty) Poisson
// batches are recorded too, so the accounting stays conservative.
class AccountantState {
 public:
  AccountantState(double sampling_rate, double noise_multiplier,
                  std::vector<double> orders = default_rdp_orders());

  void record_steps(std::size_t n) { steps_ += n; }
  std::size_t steps() const { return steps_; }
  double sampling_rate() const { return sampling_rate_; }
  double noise_multiplier() const { return noise_multiplier_; }

  PrivacySpec spec_for_delta(double delta) const;

 private:
  double sampling_rate_;
  double noise_multiplier_;
  std::vector<double> orders_;
  std::size_t steps_ = 0;
};

}  // namespace logveil

#endif  // LOGVEIL_ACCOUNTANT_HPP_
