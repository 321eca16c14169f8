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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "donorsim/coherence.hpp"
#include "donorsim/device_params.hpp"
#include "donorsim/navigator.hpp"

namespace donorsim::cli {

// Bad flags or inputs; the tool exits with status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Echo = std::vector<std::pair<std::string, std::string>>;

// Device parameters plus the run keys a config file may set.
struct Session {
  DeviceParams params;
  DriveStrengths drives;
  PlanOptions plan;
  NoiseModel noise;
  Echo config;  // every effective key, in a fixed order
};

// Built-in defaults overlaid with `path` when it is non-empty. Unknown keys
// raise UsageError.
Session load_session(const std::string& path);

// Mechanism and charge state from "nmr+", "nmr0", "ner1+", "ner2+", "esr", "edsr".
struct MechanismChoice {
  Mechanism mechanism = Mechanism::NMR;
  ChargeState charge = ChargeState::Ionised;
};
MechanismChoice parse_mechanism_choice(const std::string& s);

struct SpectrumArgs {
  std::string mechanism;
  std::string branch = "both";
  double linewidth = 2e3;  // Hz
  int points = 2001;
  std::string curve_path;
};
std::string cmd_spectrum(const Session& s, const SpectrumArgs& a);
// The sampled curve for --curve, with the same header.
std::string cmd_spectrum_curve(const Session& s, const SpectrumArgs& a);

struct RabiArgs {
  std::string mechanism;
  std::optional<double> amplitude;
};
std::string cmd_rabi(const Session& s, const RabiArgs& a);

struct StarkScanArgs {
  std::string mechanism;
  double vmax = 0.5;
  int points = 11;
  std::string preset = "config";
};
std::string cmd_stark_scan(const Session& s, const StarkScanArgs& a);

struct DecayArgs {
  std::string transition;
  std::optional<double> sigma_b;
  std::optional<double> sigma_fq;
  double detuning = 0.0;
  std::optional<double> tau_max;
  int points = 41;
  int draws = 2000;
  std::uint64_t seed = 0;
};
std::string cmd_ramsey(const Session& s, const DecayArgs& a);
std::string cmd_hahn(const Session& s, const DecayArgs& a);

struct StarkEchoArgs {
  std::string pulse = "unipolar";
  double voltage = 0.04;
  double tau_max = 20e-6;
  int points = 41;
  std::string preset = "config";
};
std::string cmd_stark_echo(const Session& s, const StarkEchoArgs& a);

struct PlanArgs {
  std::string target;
  std::string current;
  std::optional<int> repetitions;
  std::optional<double> depth;
  std::optional<double> duration;
  std::string source = "identity";
  bool verify = false;
};
std::string cmd_plan_init(const Session& s, const PlanArgs& a);

struct RouteArgs {
  std::string from;
  std::string to;
  std::string mechanisms = "nmr,ner1,ner2,esr,edsr";
  std::string cost = "hops";
};
std::string cmd_route(const Session& s, const RouteArgs& a);

struct GstArgs {
  double over_rotation_x = 0.0;
  double over_rotation_y = 0.0;
  double detuning = 0.0;
  int max_depth = 8;
  long shots = 0;
  int bootstrap = 40;
  double rabi = 1e3;
  std::uint64_t seed = 0;
};
std::string cmd_gst(const Session& s, const GstArgs& a);

// Transition tables written by `spectrum`, one or more files.
struct ExtractArgs {
  std::vector<std::string> inputs;
};
std::string cmd_extract(const Session& s, const ExtractArgs& a);

}  // namespace donorsim::cli
