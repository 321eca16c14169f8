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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "donorsim/device_params.hpp"

namespace donorsim {

// Flat "key = value" configuration. '#' starts a comment, blank lines are
// skipped, later keys override earlier ones.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
// Throws std::runtime_error if the file cannot be opened.
KeyValues load_key_values(const std::string& path);

// Overlays every recognised device key on `base`. Keys outside the device
// namespace are ignored; malformed numbers throw std::invalid_argument.
DeviceParams device_params_from(const KeyValues& kv, DeviceParams base = {});

// Ordered (key, value) pairs covering every device key, values printed so
// that parsing them back reproduces the parameters bit for bit.
std::vector<std::pair<std::string, std::string>> device_params_entries(const DeviceParams& p);
void write_device_params(std::ostream& out, const DeviceParams& p);

// True for keys consumed by device_params_from.
bool is_device_key(const std::string& key);

double parse_double(const std::string& key, const std::string& value);
// Shortest "%.17g"-style text that round-trips. Integral values below 1e15
// print in plain decimal, with -0 as 0.
std::string format_double(double v);

}  // namespace donorsim
