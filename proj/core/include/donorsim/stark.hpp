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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "donorsim/device_params.hpp"
#include "donorsim/spectroscopy.hpp"

namespace donorsim {

struct VoltageParams {
  DeviceParams params;
  bool outside_window = false;  // |dV| beyond the linear window
};

// Shifts A, gamma_e B0 (through gamma_e, B0 held fixed), fq_plus and
// fq_neutral linearly in dV. A nonzero eta2 adds A eta2 E^2 to A with
// E = field_per_volt dV; eta1 is descriptive only, the linear hyperfine
// slope being dA_dV.
VoltageParams params_at_voltage(const DeviceParams& p, const StarkModel& s, double dv);

// Which family of lines a fan-out follows.
enum class FanoutKind { ESR, NMRNeutral, NMRIonised };
const char* to_string(FanoutKind k);
FanoutKind parse_fanout_kind(const std::string& s);

struct FanoutLine {
  std::string label;  // transition id at dV = 0
  Transition transition;
  std::vector<double> frequencies;  // Hz, one per voltage
};

struct FanoutScan {
  FanoutKind kind = FanoutKind::ESR;
  std::vector<double> voltages;
  std::vector<FanoutLine> lines;
};

// Exact-diagonalization line frequencies per grid voltage. The neutral NMR
// family follows the electron-down branch. Throws std::invalid_argument on
// an empty grid or non-finite voltage; std::runtime_error if the line set
// changes across the grid.
FanoutScan fanout_scan(const DeviceParams& p, const StarkModel& s, FanoutKind kind,
                       const std::vector<double>& voltages);
std::vector<double> voltage_grid(double v_max, int points);

void write_fanout_csv(std::ostream& out, const FanoutScan& scan);

// Least-squares slope of every line, Hz/V. Throws std::invalid_argument
// with fewer than two distinct voltages.
std::vector<double> line_slopes(const FanoutScan& scan);

// Slopes identifiable from the given scans. ESR fixes dA_dV and
// dGammaEB0_dV, neutral NMR dA_dV and dfq0_dV, ionised NMR dfq_plus_dV.
// Line slopes are combined through their sensitivities to A, gamma_e B0 and
// fq, from exact diagonalization at dV = 0, pairing lines at opposite m_I.
struct StarkSlopes {
  std::optional<double> dA_dV;
  std::optional<double> dGammaEB0_dV;
  std::optional<double> dfq_plus_dV;
  std::optional<double> dfq0_dV;
};
StarkSlopes extract_stark_slopes(const std::vector<FanoutScan>& scans, const DeviceParams& p);
StarkSlopes extract_stark_slopes(const FanoutScan& scan, const DeviceParams& p);

// Voltage pulse inside the first echo arm: unipolar holds +V_DC for the
// whole arm, bipolar holds +V_DC then -V_DC for half the arm each.
enum class StarkPulse { None, Unipolar, Bipolar };
const char* to_string(StarkPulse k);
StarkPulse parse_stark_pulse(const std::string& s);

struct StarkEchoResult {
  Transition target;             // neutral dn m-7/2 <-> dn m-5/2
  double fringe_frequency = 0.0;  // Hz, arm-averaged frequency shift
  std::vector<double> tau;        // s, arm length
  std::vector<double> probability;  // return probability
};

// Ideal-pulse Hahn echo X/2 - tau - X - tau - X/2 with the shift taken
// from exact diagonalization at the pulsed voltages.
StarkEchoResult stark_echo(const DeviceParams& p, const StarkModel& s, StarkPulse pulse, double v_dc,
                           const std::vector<double>& tau);

}  // namespace donorsim
