// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mamimo/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mamimo {

using nlohmann::json;

double SystemConfig::noise_for_snr(double snr_db) const {
  return snr_gain_reference() * tx_power / std::pow(10.0, snr_db / 10.0);
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidParameter(msg); };
  if (!is_power_of_two(tx_antennas)) fail("tx_antennas must be a power of 2");
  if (!is_power_of_two(rx_antennas)) fail("rx_antennas must be a power of 2");
  if (!is_power_of_two(modulation_order)) fail("modulation_order must be a power of 2");
  if (!(wavelength > 0.0)) fail("wavelength must be positive");
  if (!(min_spacing > 0.0)) fail("min_spacing must be positive");
  if (!(tx_region >= (tx_antennas - 1) * min_spacing)) fail("tx_region cannot hold tx_antennas at min_spacing");
  if (!(rx_region >= (rx_antennas - 1) * min_spacing)) fail("rx_region cannot hold rx_antennas at min_spacing");
  if (!(tx_power > 0.0)) fail("tx_power must be positive");
  if (!(noise_power > 0.0)) fail("noise_power must be positive");
  if (!(distance > 0.0)) fail("distance must be positive");
  if (!(reference_gain > 0.0)) fail("reference_gain must be positive");
  if (paths < 1) fail("paths must be at least 1");
}

namespace {

struct Reader {
  const json& obj;
  std::string section;
  std::set<std::string> seen;

  std::string field(const std::string& key) const { return section + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(field(key) + ": " + msg);
  }

  const json* get(const std::string& key) {
    seen.insert(key);
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  double number(const json& v, const std::string& key) const {
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  void real(const std::string& key, double& out) {
    if (const json* v = get(key)) out = number(*v, key);
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<int>();
    }
  }

  void integer(const std::string& key, long long& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<long long>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  std::optional<std::string> text(const std::string& key) {
    if (const json* v = get(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      return v->get<std::string>();
    }
    return std::nullopt;
  }

  // number in meters, or {"value": x, "unit": "m" | "lambda"}
  void length(const std::string& key, double& out, double wavelength) {
    const json* v = get(key);
    if (!v) return;
    if (v->is_number()) {
      out = v->get<double>();
      return;
    }
    const auto [value, unit] = tagged(*v, key);
    if (unit == "m") out = value;
    else if (unit == "lambda") out = value * wavelength;
    else fail(key, "unit must be \"m\" or \"lambda\"");
  }

  // number in linear units, or {"value": x, "unit": "linear" | "dB" | "dBm"}
  void gain(const std::string& key, double& out) {
    const json* v = get(key);
    if (!v) return;
    if (v->is_number()) {
      out = v->get<double>();
      return;
    }
    const auto [value, unit] = tagged(*v, key);
    if (unit == "linear") out = value;
    else if (unit == "dB") out = std::pow(10.0, value / 10.0);
    else if (unit == "dBm") out = std::pow(10.0, (value - 30.0) / 10.0);
    else fail(key, "unit must be \"linear\", \"dB\" or \"dBm\"");
  }

  std::pair<double, std::string> tagged(const json& v, const std::string& key) const {
    if (!v.is_object() || !v.contains("value") || !v.contains("unit") || v.size() != 2) {
      fail(key, "expected a number or {\"value\": x, \"unit\": u}");
    }
    if (!v["unit"].is_string()) fail(key, "unit must be a string");
    return {number(v["value"], key), v["unit"].get<std::string>()};
  }

  template <class T>
  void list(const std::string& key, std::vector<T>& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_array()) fail(key, "expected a list");
    out.clear();
    for (const auto& e : *v) {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!e.is_string()) fail(key, "expected a list of strings");
      } else if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer()) fail(key, "expected a list of integers");
      } else {
        if (!e.is_number()) fail(key, "expected a list of numbers");
      }
      out.push_back(e.get<T>());
    }
  }

  void finish() const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!seen.count(it.key())) fail(it.key(), "unknown key");
    }
  }
};

void read_system(const json& j, SystemConfig& s) {
  Reader r{j, "system", {}};
  r.integer("tx_antennas", s.tx_antennas);
  r.integer("rx_antennas", s.rx_antennas);
  r.integer("modulation_order", s.modulation_order);
  if (auto c = r.text("constellation")) {
    if (*c == "psk") s.constellation = Constellation::psk;
    else if (*c == "qam") s.constellation = Constellation::qam;
    else r.fail("constellation", "expected \"psk\" or \"qam\"");
  }
  r.real("wavelength", s.wavelength);
  if (!(s.wavelength > 0.0)) r.fail("wavelength", "must be positive");
  s.min_spacing = s.wavelength / 2.0;
  s.tx_region = s.rx_region = 8.0 * s.wavelength;
  r.length("min_spacing", s.min_spacing, s.wavelength);
  r.length("tx_region", s.tx_region, s.wavelength);
  r.length("rx_region", s.rx_region, s.wavelength);
  r.gain("tx_power", s.tx_power);
  r.real("distance", s.distance);
  r.gain("reference_gain", s.reference_gain);
  r.real("pathloss_exponent", s.pathloss_exponent);
  r.integer("paths", s.paths);
  if (auto ref = r.text("snr_reference")) {
    if (*ref == "receive") s.snr_reference = SnrReference::receive;
    else if (*ref == "transmit") s.snr_reference = SnrReference::transmit;
    else r.fail("snr_reference", "expected \"receive\" or \"transmit\"");
  }
  double snr_db = 10.0;
  r.real("snr_db", snr_db);
  s.noise_power = s.noise_for_snr(snr_db);
  r.gain("noise_power", s.noise_power);
  r.finish();
}

void read_solver(const json& j, SolverOptions& s, double wavelength) {
  Reader r{j, "solver", {}};
  r.real("kappa", s.kappa);
  r.integer("max_iter", s.max_iter);
  r.real("sca_tol", s.sca_tol);
  r.integer("sca_max_iter", s.sca_max_iter);
  r.real("inner_tol", s.inner_tol);
  r.real("prune_factor", s.prune_factor);
  r.integer("starts", s.starts);
  if (auto init = r.text("init")) {
    if (*init == "fpa") s.init = InitStrategy::fpa;
    else if (*init == "random") s.init = InitStrategy::random;
    else r.fail("init", "expected \"fpa\" or \"random\"");
  }
  r.boolean("strict_ordering", s.strict_ordering);
  r.length("gas_grid_step", s.gas_grid_step, wavelength);
  r.integer("position_scan", s.position_scan);
  if (s.position_scan < 0) r.fail("position_scan", "must be nonnegative");
  if (!(s.kappa > 0.0)) r.fail("kappa", "must be positive");
  if (s.max_iter < 1) r.fail("max_iter", "must be at least 1");
  if (s.starts < 1) r.fail("starts", "must be at least 1");
  r.finish();
}

void read_experiment(const json& j, ExperimentOptions& e) {
  Reader r{j, "experiment", {}};
  r.list("converge_paths", e.converge_paths);
  r.list("converge_orders", e.converge_orders);
  r.list("schemes", e.schemes);
  r.list("snr_db", e.snr_db);
  r.list("paths_list", e.paths_list);
  r.real("paths_snr_db", e.paths_snr_db);
  r.integer("min_bits", e.min_bits);
  r.integer("max_bits", e.max_bits);
  r.integer("target_errors", e.target_errors);
  r.integer("workers", e.workers);
  r.finish();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": malformed JSON");
  }
  if (!j.is_object()) throw ConfigError("top level must be an object");

  ExperimentConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "system" && it.key() != "solver" && it.key() != "experiment") {
      throw ConfigError(it.key() + ": unknown section");
    }
    if (!it->is_object()) throw ConfigError(it.key() + ": expected an object");
  }
  if (j.contains("system")) read_system(j["system"], cfg.system);
  if (j.contains("solver")) read_solver(j["solver"], cfg.solver, cfg.system.wavelength);
  if (j.contains("experiment")) read_experiment(j["experiment"], cfg.experiment);
  try {
    cfg.system.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("system.") + e.what());
  }
  for (const auto& s : cfg.experiment.schemes) {
    if (s != "ma" && s != "fpa" && s != "gas" && s != "ma-tx" && s != "ma-rx") {
      throw ConfigError("experiment.schemes: unknown scheme '" + s + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& cfg) {
  const auto& s = cfg.system;
  const auto& o = cfg.solver;
  const auto& e = cfg.experiment;
  json j;
  j["system"] = {
      {"tx_antennas", s.tx_antennas},
      {"rx_antennas", s.rx_antennas},
      {"modulation_order", s.modulation_order},
      {"constellation", s.constellation == Constellation::psk ? "psk" : "qam"},
      {"wavelength", s.wavelength},
      {"min_spacing", s.min_spacing},
      {"tx_region", s.tx_region},
      {"rx_region", s.rx_region},
      {"tx_power", s.tx_power},
      {"noise_power", s.noise_power},
      {"distance", s.distance},
      {"reference_gain", s.reference_gain},
      {"pathloss_exponent", s.pathloss_exponent},
      {"paths", s.paths},
      {"snr_reference", s.snr_reference == SnrReference::receive ? "receive" : "transmit"},
  };
  j["solver"] = {
      {"kappa", o.kappa},
      {"max_iter", o.max_iter},
      {"sca_tol", o.sca_tol},
      {"sca_max_iter", o.sca_max_iter},
      {"inner_tol", o.inner_tol},
      {"prune_factor", o.prune_factor},
      {"starts", o.starts},
      {"init", o.init == InitStrategy::fpa ? "fpa" : "random"},
      {"strict_ordering", o.strict_ordering},
      {"gas_grid_step", o.gas_grid_step > 0.0 ? o.gas_grid_step : cfg.system.wavelength / 2.0},
      {"position_scan", o.position_scan},
  };
  j["experiment"] = {
      {"converge_paths", e.converge_paths},
      {"converge_orders", e.converge_orders},
      {"schemes", e.schemes},
      {"snr_db", e.snr_db},
      {"paths_list", e.paths_list},
      {"paths_snr_db", e.paths_snr_db},
      {"min_bits", e.min_bits},
      {"max_bits", e.max_bits},
      {"target_errors", e.target_errors},
      {"workers", e.workers},
  };
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  // the worker count never changes results
  ExperimentConfig canon = cfg;
  canon.experiment.workers = 1;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_to_json(canon)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mamimo
