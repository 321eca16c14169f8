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

#include "donorsim/params_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace donorsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct Field {
  const char* key;
  std::function<double&(DeviceParams&)> ref;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"gamma_n", [](DeviceParams& p) -> double& { return p.gamma_n; }},
      {"gamma_e", [](DeviceParams& p) -> double& { return p.gamma_e; }},
      {"b0", [](DeviceParams& p) -> double& { return p.b0; }},
      {"a", [](DeviceParams& p) -> double& { return p.a; }},
      {"fq_plus", [](DeviceParams& p) -> double& { return p.fq_plus; }},
      {"fq_neutral", [](DeviceParams& p) -> double& { return p.fq_neutral; }},
      {"stark.dA_dV", [](DeviceParams& p) -> double& { return p.stark.dA_dV; }},
      {"stark.dGammaEB0_dV", [](DeviceParams& p) -> double& { return p.stark.dGammaEB0_dV; }},
      {"stark.dfq_plus_dV", [](DeviceParams& p) -> double& { return p.stark.dfq_plus_dV; }},
      {"stark.dfq0_dV", [](DeviceParams& p) -> double& { return p.stark.dfq0_dV; }},
      {"stark.eta1", [](DeviceParams& p) -> double& { return p.stark.eta1; }},
      {"stark.eta2", [](DeviceParams& p) -> double& { return p.stark.eta2; }},
      {"stark.field_per_volt", [](DeviceParams& p) -> double& { return p.stark.field_per_volt; }},
      {"stark.linear_window", [](DeviceParams& p) -> double& { return p.stark.linear_window; }},
      {"coherence.t2star_nmr_plus",
       [](DeviceParams& p) -> double& { return p.coherence.t2star_nmr_plus; }},
      {"coherence.t2star_ner_plus",
       [](DeviceParams& p) -> double& { return p.coherence.t2star_ner_plus; }},
      {"coherence.middle_enhancement",
       [](DeviceParams& p) -> double& { return p.coherence.middle_enhancement; }},
      {"coherence.t2star_phosphorus",
       [](DeviceParams& p) -> double& { return p.coherence.t2star_phosphorus; }},
      {"coherence.t2star_electron",
       [](DeviceParams& p) -> double& { return p.coherence.t2star_electron; }},
      {"coherence.t2hahn_electron",
       [](DeviceParams& p) -> double& { return p.coherence.t2hahn_electron; }},
      {"coherence.beta_hahn_electron",
       [](DeviceParams& p) -> double& { return p.coherence.beta_hahn_electron; }},
      {"coherence.t2hahn_nmr0", [](DeviceParams& p) -> double& { return p.coherence.t2hahn_nmr0; }},
      {"coherence.t1_electron", [](DeviceParams& p) -> double& { return p.coherence.t1_electron; }},
  };
  return f;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  return parse_key_values(f);
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0;
  const char* b = value.data();
  const char* e = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || value.empty())
    throw std::invalid_argument("config key '" + key + "': not a number: '" + value + "'");
  if (!std::isfinite(v))
    throw std::invalid_argument("config key '" + key + "': value must be finite");
  return v;
}

std::string format_double(double v) {
  char buf[64];
  if (v == std::trunc(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v == 0.0 ? 0.0 : v);
    return buf;
  }
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (back == v) break;
  }
  return buf;
}

bool is_device_key(const std::string& key) {
  if (key == "nuclear_spin") return true;
  for (const auto& f : fields())
    if (key == f.key) return true;
  return false;
}

DeviceParams device_params_from(const KeyValues& kv, DeviceParams base) {
  if (auto it = kv.find("nuclear_spin"); it != kv.end())
    base.nuclear_spin = HalfInt::parse(it->second);
  for (const auto& f : fields())
    if (auto it = kv.find(f.key); it != kv.end()) f.ref(base) = parse_double(f.key, it->second);
  base.validate();
  return base;
}

std::vector<std::pair<std::string, std::string>> device_params_entries(const DeviceParams& p) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string spin = p.nuclear_spin.str();
  if (!spin.empty() && spin.front() == '+') spin.erase(0, 1);
  out.emplace_back("nuclear_spin", spin);
  DeviceParams copy = p;
  for (const auto& f : fields()) out.emplace_back(f.key, format_double(f.ref(copy)));
  return out;
}

void write_device_params(std::ostream& out, const DeviceParams& p) {
  for (const auto& [k, v] : device_params_entries(p)) out << k << " = " << v << '\n';
}

}  // namespace donorsim
