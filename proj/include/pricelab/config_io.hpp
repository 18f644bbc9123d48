// Copyright 2026 The pricelab Authors.
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

#ifndef PRICELAB_CONFIG_IO_HPP
#define PRICELAB_CONFIG_IO_HPP

#include <stdexcept>
#include <string>

#include "pricelab/experiments.hpp"

namespace pricelab {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON experiment config. Also accepts a manifest written by
/// manifest_json, in which case its "config" member is used. Unknown keys
/// and malformed values raise ConfigError.
ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config_file(const std::string &path);

/// Canonical JSON of a config; parse_config inverts it exactly.
std::string config_to_json(const ExperimentConfig &cfg);

/// Config plus software version, build state and the derived episode seeds.
std::string manifest_json(const ExperimentConfig &cfg);

/// m, n, A (row-major), alpha, B (row-major), c0, T, sigma, box.
std::string instance_to_json(const PricingInstance<double> &inst);

std::string software_version();

} // namespace pricelab

#endif // PRICELAB_CONFIG_IO_HPP
