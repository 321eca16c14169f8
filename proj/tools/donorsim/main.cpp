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

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace donorsim::cli;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin simulator for a high-spin donor nucleus in silicon."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output_path;
  app.add_option("--config", config_path, "key = value device/run file (default: $DONORSIM_CONFIG)");
  app.add_option("-o,--output", output_path, "output file (default: stdout)");

  std::function<std::string(const Session&)> run;
  std::string curve_path;
  std::string curve_text;

  SpectrumArgs spectrum_args;
  auto* spectrum = app.add_subcommand("spectrum", "transition table of one mechanism (CSV)");
  spectrum->add_option("--mechanism", spectrum_args.mechanism, "nmr+, nmr0, ner1+, ner2+, esr, edsr")->required();
  spectrum->add_option("--branch", spectrum_args.branch, "nmr0 electron manifold: both, down, up")->capture_default_str();
  spectrum->add_option("--linewidth", spectrum_args.linewidth, "Lorentzian FWHM of the curve, Hz")->capture_default_str();
  spectrum->add_option("--points", spectrum_args.points, "curve samples")->capture_default_str();
  spectrum->add_option("--curve", curve_path, "also write the sampled curve (CSV) here");
  spectrum->callback([&] {
    run = [&](const Session& s) {
      if (!curve_path.empty()) curve_text = cmd_spectrum_curve(s, spectrum_args);
      return cmd_spectrum(s, spectrum_args);
    };
  });

  RabiArgs rabi_args;
  auto* rabi = app.add_subcommand("rabi", "Rabi rate and pi time of every candidate line (CSV)");
  rabi->add_option("--mechanism", rabi_args.mechanism, "nmr+, nmr0, ner1+, ner2+, esr, edsr")->required();
  rabi->add_option("--amplitude", rabi_args.amplitude, "B1 in T (nmr, esr), dQ in Hz (ner), dA in Hz (edsr)");
  rabi->callback([&] { run = [&](const Session& s) { return cmd_rabi(s, rabi_args); }; });

  StarkScanArgs scan_args;
  auto* scan = app.add_subcommand("stark-scan", "line frequencies against gate voltage (CSV)");
  scan->add_option("--mechanism", scan_args.mechanism, "esr, nmr0, nmr+")->required();
  scan->add_option("--vmax", scan_args.vmax, "voltage range -vmax..vmax, V")->capture_default_str();
  scan->add_option("--points", scan_args.points, "voltages")->capture_default_str();
  scan->add_option("--preset", scan_args.preset, "stark slopes: config, esr, nmr")->capture_default_str();
  scan->callback([&] { run = [&](const Session& s) { return cmd_stark_scan(s, scan_args); }; });

  DecayArgs decay_args;
  auto add_decay = [&](const char* name, const char* help, bool ramsey) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--transition", decay_args.transition, "line id, e.g. m-7/2:m-5/2")->required();
    sub->add_option("--sigma-b", decay_args.sigma_b, "quasi-static field noise, T (default: config)");
    sub->add_option("--sigma-fq", decay_args.sigma_fq, "quadrupole noise, Hz (default: config)");
    sub->add_option("--detuning", decay_args.detuning, "frame detuning, Hz")->capture_default_str();
    sub->add_option("--tau-max", decay_args.tau_max, "longest delay, s (default: 3 T2*)");
    sub->add_option("--points", decay_args.points, "delays")->capture_default_str();
    sub->add_option("--draws", decay_args.draws, "noise draws per delay")->capture_default_str();
    sub->add_option("--seed", decay_args.seed, "random seed")->required();
    sub->callback([&, ramsey] {
      run = [&, ramsey](const Session& s) { return ramsey ? cmd_ramsey(s, decay_args) : cmd_hahn(s, decay_args); };
    });
  };
  add_decay("ramsey", "Ramsey decay under quasi-static noise (CSV)", true);
  add_decay("hahn", "Hahn-echo decay under quasi-static noise (CSV)", false);

  StarkEchoArgs echo_args;
  auto* echo = app.add_subcommand("stark-echo", "Hahn echo with a gate-voltage pulse (CSV)");
  echo->add_option("--pulse", echo_args.pulse, "none, unipolar, bipolar")->capture_default_str();
  echo->add_option("--voltage", echo_args.voltage, "pulse amplitude, V")->capture_default_str();
  echo->add_option("--tau-max", echo_args.tau_max, "longest arm, s")->capture_default_str();
  echo->add_option("--points", echo_args.points, "arm lengths")->capture_default_str();
  echo->add_option("--preset", echo_args.preset, "stark slopes: config, esr, nmr")->capture_default_str();
  echo->callback([&] { run = [&](const Session& s) { return cmd_stark_echo(s, echo_args); }; });

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan-init", "adiabatic initialization schedule (JSON)");
  plan->add_option("--target", plan_args.target, "target m_I, e.g. m-7/2 or -7/2")->required();
  plan->add_option("--current", plan_args.current, "known starting m_I (default: unknown)");
  plan->add_option("--repetitions", plan_args.repetitions, "sweeps for an unknown start (default: config)");
  plan->add_option("--depth", plan_args.depth, "modulation depth, Hz (default: config)");
  plan->add_option("--duration", plan_args.duration, "adiabatic pulse length, s (default: config)");
  plan->add_option("--source", plan_args.source, "IQ offsets: identity, oracle")->capture_default_str();
  plan->add_flag("--verify", plan_args.verify, "run the schedule on the level populations");
  plan->callback([&] { run = [&](const Session& s) { return cmd_plan_init(s, plan_args); }; });

  RouteArgs route_args;
  auto* route = app.add_subcommand("route", "shortest transition path between two states (JSON)");
  route->add_option("--from", route_args.from, "start label, e.g. m-7/2 or dn_m-7/2")->required();
  route->add_option("--to", route_args.to, "end label")->required();
  route->add_option("--mechanisms", route_args.mechanisms, "comma list of nmr, ner1, ner2, esr, edsr")->capture_default_str();
  route->add_option("--cost", route_args.cost, "hops or time")->capture_default_str();
  route->callback([&] { run = [&](const Session& s) { return cmd_route(s, route_args); }; });

  GstArgs gst_args;
  auto* gst = app.add_subcommand("gst", "linear-inversion gate set tomography (JSON)");
  gst->add_option("--over-rotation-x", gst_args.over_rotation_x, "rad added to X pi/2")->capture_default_str();
  gst->add_option("--over-rotation-y", gst_args.over_rotation_y, "rad added to Y pi/2")->capture_default_str();
  gst->add_option("--detuning", gst_args.detuning, "static qubit detuning, Hz")->capture_default_str();
  gst->add_option("--max-depth", gst_args.max_depth, "largest germ power")->capture_default_str();
  gst->add_option("--shots", gst_args.shots, "shots per circuit, 0 for exact probabilities")->capture_default_str();
  gst->add_option("--bootstrap", gst_args.bootstrap, "resamples for the error bars")->capture_default_str();
  gst->add_option("--rabi", gst_args.rabi, "Rabi frequency, Hz")->capture_default_str();
  gst->add_option("--seed", gst_args.seed, "random seed")->required();
  gst->callback([&] { run = [&](const Session& s) { return cmd_gst(s, gst_args); }; });

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract", "fit constants to a spectrum table (CSV)");
  extract->add_option("--input", extract_args.inputs, "transitions CSVs from `spectrum`")->required();
  extract->callback([&] { run = [&](const Session& s) { return cmd_extract(s, extract_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (config_path.empty())
      if (const char* env = std::getenv("DONORSIM_CONFIG")) config_path = env;
    const Session session = load_session(config_path);
    const std::string text = run(session);
    if (!curve_path.empty()) write_file(curve_path, curve_text);
    if (output_path.empty())
      std::cout << text;
    else
      write_file(output_path, text);
  } catch (const std::invalid_argument& e) {
    std::cerr << "donorsim: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "donorsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
