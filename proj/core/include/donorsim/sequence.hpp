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
#include <optional>
#include <variant>
#include <vector>

#include "donorsim/coherence.hpp"
#include "donorsim/device_params.hpp"
#include "donorsim/hamiltonians.hpp"
#include "donorsim/spectroscopy.hpp"

namespace donorsim {

// Ideal instantaneous rotation about cos(phase) x + sin(phase) y.
struct InstantRotation {
  double angle = 0.0;  // rad
  double phase = 0.0;  // rad
};

struct FreeEvolution {
  double duration = 0.0;  // s
};

// Projective readout of the target pair in the labeled eigenbasis.
struct Readout {};

// Electron load / ionisation. Carries the nuclear shock (same flip
// probability as a readout shot); the rotating frame is unchanged.
struct ChargeEvent {
  enum class Kind { LoadElectron, Ionise };
  Kind kind = Kind::LoadElectron;
};

using Segment = std::variant<DriveSpec, InstantRotation, FreeEvolution, Readout, ChargeEvent>;

struct PulseSequence {
  std::vector<Segment> segments;

  PulseSequence& add(Segment s) {
    segments.push_back(std::move(s));
    return *this;
  }
  // Throws std::invalid_argument on a non-positive duration or amplitude.
  void validate() const;
};

struct ReadoutCounts {
  long lower = 0;   // found in the lower level of the pair
  long upper = 0;   // found in the upper level
  long leaked = 0;  // shocked out of the pair
  double p_upper_mean = 0.0;       // shot-averaged population before sampling
  double p_upper_std_error = 0.0;
};

struct SequenceResult {
  std::vector<ReadoutCounts> readouts;
  double upper_fraction(std::size_t k) const;
};

struct SequenceOptions {
  // Frame of the instantaneous rotations and free evolution. Defaults to
  // the first drive frequency, else the noiseless transition frequency.
  std::optional<double> frame_frequency;
  // Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Steps per chirped drive.
  int chirp_steps = 400;
};

// Two-level Monte-Carlo of `seq` on the target transition, starting in the
// lower level. Each shot draws its own quasi-static B0 and fq offsets, from
// a sub-seed derived from (seed, shot index), so results do not depend on
// the thread count.
SequenceResult run_sequence(const PulseSequence& seq, const Transition& target, const DeviceParams& p,
                            const NoiseModel& noise, int shots, std::uint64_t seed,
                            const SequenceOptions& options = {});

// splitmix64 finalizer, used to derive per-shot sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace donorsim
