#include "conewave/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <toml.hpp>

#include "conewave/error.hpp"

namespace conewave {

namespace {

std::string where(const toml::node& node, const std::string& key) {
  std::ostringstream os;
  os << key << " (line " << node.source().begin.line << ")";
  return os.str();
}

double read_real(const toml::node& node, const std::string& key) {
  if (auto v = node.value<double>()) return *v;
  if (auto s = node.value<std::string>()) {
    if (*s == "inf" || *s == "infinity") return kInf;
  }
  throw ConfigError(where(node, key) + ": expected a number");
}

long long read_int(const toml::node& node, const std::string& key) {
  if (!node.is_integer()) throw ConfigError(where(node, key) + ": expected an integer");
  return *node.value<long long>();
}

std::string read_string(const toml::node& node, const std::string& key) {
  if (!node.is_string()) throw ConfigError(where(node, key) + ": expected a string");
  return *node.value<std::string>();
}

bool read_bool(const toml::node& node, const std::string& key) {
  if (!node.is_boolean()) throw ConfigError(where(node, key) + ": expected a boolean");
  return *node.value<bool>();
}

std::vector<double> read_reals(const toml::node& node, const std::string& key) {
  if (!node.is_array()) return {read_real(node, key)};
  std::vector<double> out;
  for (const toml::node& v : *node.as_array()) out.push_back(read_real(v, key));
  return out;
}

std::vector<int> read_ints(const toml::node& node, const std::string& key) {
  if (!node.is_array()) return {static_cast<int>(read_int(node, key))};
  std::vector<int> out;
  for (const toml::node& v : *node.as_array()) out.push_back(static_cast<int>(read_int(v, key)));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const toml::node&, const std::string&)>;

std::map<std::string, Setter> setters() {
  std::map<std::string, Setter> m;
  auto str = [](std::string ExperimentConfig::*f) {
    return [f](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.*f = read_string(n, k); };
  };
  auto real = [](double ExperimentConfig::*f) {
    return [f](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.*f = read_real(n, k); };
  };
  auto integer = [](int ExperimentConfig::*f) {
    return [f](ExperimentConfig& c, const toml::node& n, const std::string& k) {
      c.*f = static_cast<int>(read_int(n, k));
    };
  };
  auto boolean = [](bool ExperimentConfig::*f) {
    return [f](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.*f = read_bool(n, k); };
  };
  auto reals = [](std::vector<double> ExperimentConfig::*f) {
    return [f](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.*f = read_reals(n, k); };
  };
  auto ints = [](std::vector<int> ExperimentConfig::*f) {
    return [f](ExperimentConfig& c, const toml::node& n, const std::string& k) { c.*f = read_ints(n, k); };
  };
  m["experiment"] = str(&ExperimentConfig::experiment);
  m["cone"] = str(&ExperimentConfig::cone);
  m["cone_dim"] = integer(&ExperimentConfig::cone_dim);
  m["group"] = str(&ExperimentConfig::group);
  m["group_n"] = integer(&ExperimentConfig::group_n);
  m["group_direction"] = reals(&ExperimentConfig::group_direction);
  m["grid_count"] = ints(&ExperimentConfig::grid_count);
  m["grid_half_width"] = reals(&ExperimentConfig::grid_half_width);
  m["e_count"] = integer(&ExperimentConfig::e_count);
  m["e_half_width"] = real(&ExperimentConfig::e_half_width);
  m["delta"] = real(&ExperimentConfig::delta);
  m["R"] = real(&ExperimentConfig::R);
  m["region"] = str(&ExperimentConfig::region);
  m["scale_lo"] = real(&ExperimentConfig::scale_lo);
  m["scale_hi"] = real(&ExperimentConfig::scale_hi);
  m["angle"] = real(&ExperimentConfig::angle);
  m["box_lo"] = reals(&ExperimentConfig::box_lo);
  m["box_hi"] = reals(&ExperimentConfig::box_hi);
  m["shell_c"] = real(&ExperimentConfig::shell_c);
  m["bump_mode"] = str(&ExperimentConfig::bump_mode);
  m["transport"] = str(&ExperimentConfig::transport);
  m["s"] = reals(&ExperimentConfig::s);
  m["p"] = real(&ExperimentConfig::p);
  m["q"] = real(&ExperimentConfig::q);
  m["trials"] = integer(&ExperimentConfig::trials);
  m["seed"] = [](ExperimentConfig& c, const toml::node& n, const std::string& k) {
    const long long v = read_int(n, k);
    if (v < 0) throw ConfigError(where(n, k) + ": seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(v);
  };
  m["threads"] = integer(&ExperimentConfig::threads);
  m["terms"] = integer(&ExperimentConfig::terms);
  m["bump_radius"] = real(&ExperimentConfig::bump_radius);
  m["weighted"] = boolean(&ExperimentConfig::weighted);
  m["weight_c"] = real(&ExperimentConfig::weight_c);
  m["k_max"] = integer(&ExperimentConfig::k_max);
  m["blowup_j"] = integer(&ExperimentConfig::blowup_j);
  m["multiplier"] = str(&ExperimentConfig::multiplier);
  m["tau"] = real(&ExperimentConfig::tau);
  m["t_samples"] = integer(&ExperimentConfig::t_samples);
  m["p0"] = real(&ExperimentConfig::p0);
  m["symbol_grid_count"] = integer(&ExperimentConfig::symbol_grid_count);
  m["symbol_grid_half_width"] = real(&ExperimentConfig::symbol_grid_half_width);
  m["single_term"] = boolean(&ExperimentConfig::single_term);
  m["single_j"] = integer(&ExperimentConfig::single_j);
  m["single_offset"] = real(&ExperimentConfig::single_offset);
  m["deltas"] = reals(&ExperimentConfig::deltas);
  m["p1"] = real(&ExperimentConfig::p1);
  m["p2"] = real(&ExperimentConfig::p2);
  m["p3"] = real(&ExperimentConfig::p3);
  m["refine_counts"] = ints(&ExperimentConfig::refine_counts);
  m["output_dir"] = str(&ExperimentConfig::output_dir);
  m["plot"] = boolean(&ExperimentConfig::plot);
  return m;
}

void check_ranges(const ExperimentConfig& c) {
  if (!(c.delta > 0.0)) throw ConfigError("delta must be positive");
  if (!(c.R > 1.0)) throw ConfigError("R must exceed 1");
  if (!(c.p > 0.0) || !(c.q > 0.0)) throw ConfigError("p and q must be positive");
  if (c.trials < 0) throw ConfigError("trials must be nonnegative");
  if (c.threads < 0) throw ConfigError("threads must be nonnegative");
  if (c.terms < 1) throw ConfigError("terms must be >= 1");
  if (!(c.bump_radius > 0.0)) throw ConfigError("bump_radius must be positive");
  for (double d : c.deltas)
    if (!(d > 0.0)) throw ConfigError("deltas must be positive");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  toml::table tbl;
  try {
    tbl = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
  const auto table = setters();
  ExperimentConfig cfg;
  for (auto&& [key, node] : tbl) {
    const std::string k(key.str());
    auto it = table.find(k);
    if (it == table.end()) throw ConfigError(source + ": unknown key '" + k + "'");
    it->second(cfg, node, k);
  }
  check_ranges(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace conewave
