// Copyright 2026 The donorsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "donorsim/device_params.hpp"
#include "donorsim/spectroscopy.hpp"

namespace donorsim {

// Quasi-static (constant within a shot) Gaussian noise plus readout errors.
struct NoiseModel {
  double sigma_b = 0.0;        // T
  double sigma_fq = 0.0;       // Hz, jitter of the quadrupole splitting
  double readout_flip = 1e-3;  // nuclear flip probability per readout shot
  double t1_electron = 2.44;   // s
  std::uint64_t seed = 0;

  void validate() const;
};

// d f / d B0 (Hz/T) and d f / d fq (dimensionless) of a labeled transition,
// central differences on exact diagonalization. fq is fq_plus for ionised
// transitions and fq_neutral otherwise.
struct TransitionSensitivity {
  double df_db0 = 0.0;
  double df_dfq = 0.0;
};
TransitionSensitivity transition_sensitivity(const Transition& t, const DeviceParams& p);

// Exact-diagonalization frequency of the transition's labels at `p`.
double transition_frequency(const Transition& t, const DeviceParams& p);

struct DephasingEstimate {
  double sigma_f = 0.0;  // Hz
  double t2_star = 0.0;  // s, infinite when sigma_f == 0
};
DephasingEstimate dephasing_rate(const Transition& t, const NoiseModel& noise, const DeviceParams& p);
// sqrt(2) / (2 pi sigma_f)
double t2_star_from_sigma(double sigma_f);

// sigma_fq that makes T2*(slow) / T2*(fast) = ratio for the given sigma_b.
// Throws std::invalid_argument when no non-negative solution exists.
double calibrate_sigma_fq(const Transition& fast, const Transition& slow, const DeviceParams& p,
                          double sigma_b, double ratio);

enum class DecaySequence { Ramsey, Hahn };

struct DecayCurve {
  std::vector<double> tau;          // s
  std::vector<double> probability;  // upper-level population
  std::vector<double> std_error;
};

// Ideal instantaneous pulses, Monte-Carlo over `draws` quasi-static noise
// draws. Ramsey: X/2 - tau - X/2 in a frame detuned by `detuning` from the
// transition. Hahn: X/2 - tau - X - tau - X/2, tau being one arm.
// Requires draws >= 100.
DecayCurve simulate_decay(DecaySequence kind, const Transition& t, const NoiseModel& noise,
                          const DeviceParams& p, const std::vector<double>& tau, int draws,
                          std::uint64_t seed, double detuning = 0.0);

void write_decay_csv(std::ostream& out, const DecayCurve& c);

enum class DecayModel { Gaussian, StretchedExp };
enum class FitStatus { Ok, NotDecaying, NoConvergence };
const char* to_string(FitStatus s);

// y = amplitude * exp(-(tau/T2)^beta) + offset, beta = 2 for Gaussian.
struct DecayFit {
  double t2 = 0.0;
  double beta = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double residual_norm = 0.0;
  FitStatus status = FitStatus::NoConvergence;
  bool ok() const { return status == FitStatus::Ok; }
};

// Levenberg-Marquardt least squares. Throws std::invalid_argument for fewer
// than 8 points or mismatched sizes; a curve without a decay is reported
// through `status`.
DecayFit fit_decay(const std::vector<double>& tau, const std::vector<double>& y, DecayModel model);
DecayFit fit_decay(const DecayCurve& c, DecayModel model);

double decay_model(double tau, double t2, double beta, double amplitude, double offset);

// y = amplitude * cos(2 pi f x + phase) + offset; periodogram seed, then LM.
struct SinusoidFit {
  double frequency = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  double residual_norm = 0.0;
  FitStatus status = FitStatus::NoConvergence;
  bool ok() const { return status == FitStatus::Ok; }
};
SinusoidFit fit_sinusoid(const std::vector<double>& x, const std::vector<double>& y);

// Readout of a nuclear ladder with an ionisation shock. Before each shot
// is recorded the nuclear label is, with probability flip_prob, knocked to a
// uniformly chosen neighbour (m_I +- 1; the single neighbour at a ladder
// edge). Independent mode re-prepares the state from `probabilities` every
// shot; persistent mode prepares once and lets the label walk.
struct ShockReadout {
  std::vector<long> counts;  // per label index, Iz ordering (+I first)
  long flips = 0;
  bool survived = true;      // no flip during the whole run
};
ShockReadout readout_with_shock(const std::vector<double>& probabilities, int shots, double flip_prob,
                                std::uint64_t seed, bool persistent = false);

// exp(-t / T1)
double t1_survival(double t, double t1);

}  // namespace donorsim
