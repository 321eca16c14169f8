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

#include "donorsim/sequence.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "donorsim/dynamics.hpp"
#include "parallel.hpp"

namespace donorsim {

using std::numbers::pi;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void PulseSequence::validate() const {
  for (const auto& s : segments) {
    if (const auto* d = std::get_if<DriveSpec>(&s)) d->validate();
    if (const auto* f = std::get_if<FreeEvolution>(&s))
      if (!(f->duration > 0)) throw std::invalid_argument("free evolution needs a positive duration");
    if (const auto* r = std::get_if<InstantRotation>(&s))
      if (!std::isfinite(r->angle) || !std::isfinite(r->phase))
        throw std::invalid_argument("rotation angle and phase must be finite");
  }
}

double SequenceResult::upper_fraction(std::size_t k) const {
  const auto& r = readouts.at(k);
  const long n = r.lower + r.upper + r.leaked;
  return n ? static_cast<double>(r.upper) / static_cast<double>(n) : 0.0;
}

namespace {

using Vec2 = Eigen::Vector2cd;

Eigen::Matrix2cd frame_shift(double delta, double t) {
  // exp(i pi delta t sz)
  Eigen::Matrix2cd z = Eigen::Matrix2cd::Zero();
  z(0, 0) = std::polar(1.0, pi * delta * t);
  z(1, 1) = std::polar(1.0, -pi * delta * t);
  return z;
}

// Rectangular drive at f_d applied to a state kept in the f_ref frame.
Vec2 apply_drive(const Vec2& psi, double t0, double duration, double f_d, double axis, double f_rabi,
                 double f_qubit, double f_ref) {
  const double delta = f_d - f_ref;
  Vec2 v = frame_shift(-delta, t0) * psi;
  v = rwa_unitary(f_d - f_qubit, f_rabi, axis, duration) * v;
  return frame_shift(delta, t0 + duration) * v;
}

enum : std::int8_t { kLower = 0, kUpper = 1, kLeaked = 2 };

struct DriveInfo {
  double f_rabi = 0.0;
};

BasisLabel shocked(const BasisLabel& l, HalfInt spin, std::mt19937_64& rng) {
  std::vector<HalfInt> nb;
  if (l.m_i - 1 >= -spin) nb.push_back(l.m_i - 1);
  if (l.m_i + 1 <= spin) nb.push_back(l.m_i + 1);
  BasisLabel out = l;
  if (nb.empty()) return out;
  std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
  out.m_i = nb[pick(rng)];
  return out;
}

}  // namespace

SequenceResult run_sequence(const PulseSequence& seq, const Transition& target, const DeviceParams& p,
                            const NoiseModel& noise, int shots, std::uint64_t seed,
                            const SequenceOptions& options) {
  seq.validate();
  noise.validate();
  if (shots < 1) throw std::invalid_argument("run_sequence needs at least one shot");

  TransitionSensitivity sens;
  if (noise.sigma_b > 0 || noise.sigma_fq > 0) sens = transition_sensitivity(target, p);

  std::vector<DriveInfo> drive_info;
  std::optional<double> first_drive;
  std::size_t n_readouts = 0;
  for (const auto& s : seq.segments) {
    if (const auto* d = std::get_if<DriveSpec>(&s)) {
      drive_info.push_back({rabi_rate(target, *d, p)});
      if (!first_drive) first_drive = d->frequency;
    }
    if (std::holds_alternative<Readout>(s)) ++n_readouts;
  }
  const double f_ref = options.frame_frequency.value_or(first_drive.value_or(target.frequency));
  const BasisLabel lower = target.lower_level();
  const BasisLabel upper = target.upper_level();
  const HalfInt spin = p.nuclear_spin;

  std::vector<std::int8_t> outcome(static_cast<std::size_t>(shots) * n_readouts, kLower);
  std::vector<double> pop(static_cast<std::size_t>(shots) * n_readouts, 0.0);

  detail::parallel_for(static_cast<std::size_t>(shots), options.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t shot = b; shot < e; ++shot) {
      std::mt19937_64 rng(mix_seed(seed, shot));
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      const double db = noise.sigma_b * gauss(rng);
      const double dq = noise.sigma_fq * gauss(rng);
      const double f_q = target.frequency + sens.df_db0 * db + sens.df_dfq * dq;

      Vec2 psi(1.0, 0.0);
      bool in_pair = true;
      BasisLabel where = lower;
      double t = 0.0;
      std::size_t drive_k = 0, read_k = 0;

      auto settle = [&](const BasisLabel& l) {
        where = l;
        in_pair = l == lower || l == upper;
        if (in_pair) psi = l == lower ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0);
      };
      auto collapse = [&] {
        if (!in_pair) return;
        settle(uni(rng) < std::norm(psi(1)) ? upper : lower);
      };
      auto shock = [&] {
        if (noise.readout_flip > 0 && uni(rng) < noise.readout_flip) {
          collapse();
          settle(shocked(where, spin, rng));
        }
      };

      for (const auto& s : seq.segments) {
        if (const auto* d = std::get_if<DriveSpec>(&s)) {
          const double fr = drive_info[drive_k++].f_rabi;
          if (in_pair) {
            if (const auto* c = std::get_if<AdiabaticChirp>(&d->envelope)) {
              const int n = std::max(1, options.chirp_steps);
              const double dt = d->duration / n;
              double axis = d->phase, f_prev = d->frequency - c->depth + 0.5 * c->rate * dt;
              for (int k = 0; k < n; ++k) {
                const double tk = t + k * dt;
                const double fk = d->frequency - c->depth + c->rate * (k + 0.5) * dt;
                // keep the lab waveform continuous across piece boundaries
                if (k > 0) axis += 2.0 * pi * (fk - f_prev) * tk;
                psi = apply_drive(psi, tk, dt, fk, axis, fr, f_q, f_ref);
                f_prev = fk;
              }
            } else {
              psi = apply_drive(psi, t, d->duration, d->frequency, d->phase, fr, f_q, f_ref);
            }
          }
          t += d->duration;
        } else if (const auto* r = std::get_if<InstantRotation>(&s)) {
          if (in_pair) psi = rwa_unitary(0.0, 1.0, r->phase, r->angle / (2.0 * pi)) * psi;
        } else if (const auto* f = std::get_if<FreeEvolution>(&s)) {
          if (in_pair) psi = rwa_unitary(f_ref - f_q, 0.0, 0.0, f->duration) * psi;
          t += f->duration;
        } else if (std::holds_alternative<Readout>(s)) {
          const std::size_t idx = shot * n_readouts + read_k++;
          pop[idx] = in_pair ? std::norm(psi(1)) : 0.0;
          collapse();
          if (noise.readout_flip > 0 && uni(rng) < noise.readout_flip) settle(shocked(where, spin, rng));
          outcome[idx] = !in_pair ? kLeaked : (where == upper ? kUpper : kLower);
        } else if (std::holds_alternative<ChargeEvent>(s)) {
          shock();
        }
      }
    }
  });

  SequenceResult res;
  res.readouts.resize(n_readouts);
  for (std::size_t k = 0; k < n_readouts; ++k) {
    auto& r = res.readouts[k];
    double mean = 0.0, m2 = 0.0;
    for (int shot = 0; shot < shots; ++shot) {
      const std::size_t idx = static_cast<std::size_t>(shot) * n_readouts + k;
      if (outcome[idx] == kLower) ++r.lower;
      if (outcome[idx] == kUpper) ++r.upper;
      if (outcome[idx] == kLeaked) ++r.leaked;
      // Welford, in shot order
      const double d = pop[idx] - mean;
      mean += d / (shot + 1);
      m2 += d * (pop[idx] - mean);
    }
    r.p_upper_mean = mean;
    r.p_upper_std_error = shots > 1 ? std::sqrt(m2 / (shots - 1) / shots) : 0.0;
  }
  return res;
}

}  // namespace donorsim
