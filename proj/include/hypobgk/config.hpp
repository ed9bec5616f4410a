#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypobgk/core.hpp"

namespace hypobgk {

/**
 * One run of the command-line tool. Every field always serializes (fixed
 * order, shortest round-trip decimals), so identical configs hash and
 * print identically, and parse(serialize(c)) == c bit for bit. The text
 * form is `key = value` lines; the JSON mirror carries the same keys.
 */
struct RunConfig {
  std::string command = "certify";
  std::string model = "continuous-linear";
  std::string ansatz;  // empty = the model's natural family
  Real alpha = 0.0;  // 0 means "not set": per-mode rule / model default
  Real beta = 0.0;
  Real gamma = 0.0;
  Real sigma = 1.0;
  Real temperature = 1.0;
  Real lambda = 1.0;
  std::string rho = "0.5,0.5";
  std::string generator = "quadratic";
  Real p = 2.0;
  int kmax = 100;
  int nhermite = 60;
  int nvelocity = 4;
  Real dt = 1e-3;
  Real tmax = 10.0;
  Real eps = 1e-2;
  std::uint64_t seed = 1;
  int stride = 100;
  bool optimize = false;
  std::string param;
  std::string values;
  std::string nlist;
  std::string out;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

template <typename Fn>
void for_each_field(RunConfig& c, Fn&& fn) {
  fn("command", c.command);
  fn("model", c.model);
  fn("ansatz", c.ansatz);
  fn("alpha", c.alpha);
  fn("beta", c.beta);
  fn("gamma", c.gamma);
  fn("sigma", c.sigma);
  fn("temperature", c.temperature);
  fn("lambda", c.lambda);
  fn("rho", c.rho);
  fn("generator", c.generator);
  fn("p", c.p);
  fn("kmax", c.kmax);
  fn("nhermite", c.nhermite);
  fn("nvelocity", c.nvelocity);
  fn("dt", c.dt);
  fn("tmax", c.tmax);
  fn("eps", c.eps);
  fn("seed", c.seed);
  fn("stride", c.stride);
  fn("optimize", c.optimize);
  fn("param", c.param);
  fn("values", c.values);
  fn("nlist", c.nlist);
  fn("out", c.out);
}

inline std::string field_to_string(const std::string& v) { return v; }
inline std::string field_to_string(Real v) { return format_double(v); }
inline std::string field_to_string(int v) { return std::to_string(v); }
inline std::string field_to_string(std::uint64_t v) { return std::to_string(v); }
inline std::string field_to_string(bool v) { return v ? "true" : "false"; }

inline void field_from_string(const std::string& s, std::string& out) { out = s; }
inline void field_from_string(const std::string& s, Real& out) { out = std::stod(s); }
inline void field_from_string(const std::string& s, int& out) { out = std::stoi(s); }
inline void field_from_string(const std::string& s, std::uint64_t& out) { out = std::stoull(s); }
inline void field_from_string(const std::string& s, bool& out) {
  if (s == "true" || s == "1") {
    out = true;
  } else if (s == "false" || s == "0") {
    out = false;
  } else {
    throw std::invalid_argument("config: bad boolean '" + s + "'");
  }
}

}  // namespace detail

inline std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  RunConfig copy = config;
  detail::for_each_field(copy, [&](const char* key, auto& value) {
    out << key << " = " << detail::field_to_string(value) << '\n';
  });
  return out.str();
}

inline void apply_config_line(RunConfig& config, const std::string& key,
                              const std::string& value) {
  bool found = false;
  detail::for_each_field(config, [&](const char* name, auto& field) {
    if (key == name) {
      detail::field_from_string(value, field);
      found = true;
    }
  });
  if (!found) throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) apply_config_line(config, key, value);
  }
  return config;
}

inline nlohmann::ordered_json config_to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  RunConfig copy = config;
  detail::for_each_field(copy, [&](const char* key, auto& value) {
    using T = std::decay_t<decltype(value)>;
    if constexpr (std::is_same_v<T, Real>) {
      j[key] = detail::field_to_string(value);  // keep the exact decimal form
    } else {
      j[key] = value;
    }
  });
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig config;
  detail::for_each_field(config, [&](const char* key, auto& value) {
    if (!j.contains(key)) return;
    using T = std::decay_t<decltype(value)>;
    if constexpr (std::is_same_v<T, Real>) {
      if (j[key].is_string()) {
        detail::field_from_string(j[key].template get<std::string>(), value);
      } else {
        value = j[key].template get<Real>();
      }
    } else {
      value = j[key].template get<T>();
    }
  });
  return config;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    return config_from_json(nlohmann::json::parse(buffer.str()));
  }
  return parse_config_text(buffer.str());
}

/// Provenance hash embedded in every report.
inline std::uint64_t config_hash(const RunConfig& config) {
  return fnv1a64(serialize_config(config));
}

inline std::vector<Real> parse_number_list(const std::string& spec) {
  std::vector<Real> out;
  if (spec.empty()) return out;
  const auto c1 = spec.find(':');
  if (c1 != std::string::npos) {
    const auto c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("range needs start:stop:count");
    const Real start = std::stod(spec.substr(0, c1));
    const Real stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    const int count = std::stoi(spec.substr(c2 + 1));
    if (count < 1) throw std::invalid_argument("range count must be >= 1");
    for (int i = 0; i < count; ++i) {
      out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
    }
    return out;
  }
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace hypobgk
