#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "bearing_swarm/errors.hpp"
#include "bearing_swarm/sim.hpp"
#include "bearing_swarm/trace_csv.hpp"

namespace bearing_swarm {

/// One parsed configuration value: number, bool, string, or (possibly
/// nested) array.
struct ConfigValue {
  std::variant<double, bool, std::string, std::vector<ConfigValue>> v;

  bool is_number() const { return std::holds_alternative<double>(v); }
  bool is_array() const { return std::holds_alternative<std::vector<ConfigValue>>(v); }

  friend bool operator==(const ConfigValue&, const ConfigValue&) = default;
};

/// Flat document keyed by dotted path ("sim.dt", "scenario.params.omega0").
using ConfigDoc = std::map<std::string, ConfigValue>;

namespace config_detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
  return true;
}

// Parse one value from text[pos...), advancing pos past it.
inline ConfigValue parse_value(const std::string& text, size_t& pos, int line_no) {
  auto fail = [line_no](const std::string& why) -> ConfigValue {
    throw ConfigError("line " + std::to_string(line_no) + ": " + why);
  };
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos >= text.size()) return fail("missing value");

  if (text[pos] == '[') {
    ++pos;
    std::vector<ConfigValue> items;
    while (true) {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos >= text.size()) return fail("unterminated array");
      if (text[pos] == ']') {
        ++pos;
        return ConfigValue{std::move(items)};
      }
      if (!items.empty()) {
        if (text[pos] != ',') return fail("expected ',' or ']' in array");
        ++pos;
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos < text.size() && text[pos] == ']') {  // tolerate trailing comma
          ++pos;
          return ConfigValue{std::move(items)};
        }
      }
      items.push_back(parse_value(text, pos, line_no));
    }
  }
  if (text[pos] == '"') {
    std::string out;
    ++pos;
    while (pos < text.size() && text[pos] != '"') {
      if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
      out += text[pos++];
    }
    if (pos >= text.size()) return fail("unterminated string");
    ++pos;
    return ConfigValue{std::move(out)};
  }
  if (text.compare(pos, 4, "true") == 0 &&
      (pos + 4 == text.size() || !std::isalnum(static_cast<unsigned char>(text[pos + 4])))) {
    pos += 4;
    return ConfigValue{true};
  }
  if (text.compare(pos, 5, "false") == 0 &&
      (pos + 5 == text.size() || !std::isalnum(static_cast<unsigned char>(text[pos + 5])))) {
    pos += 5;
    return ConfigValue{false};
  }
  char* end = nullptr;
  const double num = std::strtod(text.c_str() + pos, &end);
  if (end == text.c_str() + pos) return fail("cannot parse value near '" + text.substr(pos) + "'");
  pos = end - text.c_str();
  return ConfigValue{num};
}

inline std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

inline void render_value(const ConfigValue& value, std::string& out) {
  if (const auto* d = std::get_if<double>(&value.v)) {
    out += format_double(*d);
  } else if (const auto* b = std::get_if<bool>(&value.v)) {
    out += *b ? "true" : "false";
  } else if (const auto* s = std::get_if<std::string>(&value.v)) {
    out += '"';
    for (char c : *s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    out += '"';
  } else {
    const auto& items = std::get<std::vector<ConfigValue>>(value.v);
    out += '[';
    for (size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      render_value(items[i], out);
    }
    out += ']';
  }
}

}  // namespace config_detail

/// Parse the key-value configuration dialect: `key = value` lines, optional
/// `[section]` headers that prefix the keys after them, `#` comments,
/// numbers / booleans / quoted strings / single-line (nested) arrays.
inline ConfigDoc parse_config(std::istream& is) {
  using namespace config_detail;
  ConfigDoc doc;
  std::string prefix;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      prefix = trim(line.substr(1, line.size() - 2));
      if (!valid_key(prefix))
        throw ConfigError("line " + std::to_string(line_no) + ": invalid section name '" +
                          prefix + "'");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (!valid_key(key))
      throw ConfigError("line " + std::to_string(line_no) + ": invalid key '" + key + "'");
    if (!prefix.empty()) key = prefix + "." + key;
    size_t pos = eq + 1;
    ConfigValue value = parse_value(line, pos, line_no);
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos != line.size())
      throw ConfigError("line " + std::to_string(line_no) + ": trailing characters after value");
    if (doc.count(key))
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    doc.emplace(std::move(key), std::move(value));
  }
  return doc;
}

inline ConfigDoc parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  return parse_config(is);
}

/// Serialize as sorted flat `key = value` lines. parse(serialize(doc))
/// reproduces the document exactly (numbers are written with full precision).
inline std::string serialize_config(const ConfigDoc& doc) {
  std::string out;
  for (const auto& [key, value] : doc) {
    out += key;
    out += " = ";
    config_detail::render_value(value, out);
    out += '\n';
  }
  return out;
}

/// Overwrite an existing numeric parameter addressed by dotted path.
inline void set_param(ConfigDoc& doc, const std::string& path, double value) {
  auto it = doc.find(path);
  if (it == doc.end()) throw ConfigError("unknown parameter: " + path);
  if (!it->second.is_number())
    throw ConfigError("parameter is not numeric: " + path);
  it->second.v = value;
}

namespace config_detail {

inline const ConfigValue& require(const ConfigDoc& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ConfigError("missing required key: " + key);
  return it->second;
}

inline double get_number(const ConfigDoc& doc, const std::string& key) {
  const ConfigValue& v = require(doc, key);
  if (!v.is_number()) throw ConfigError("key " + key + ": expected a number");
  return std::get<double>(v.v);
}

inline double get_number_or(const ConfigDoc& doc, const std::string& key, double fallback) {
  return doc.count(key) ? get_number(doc, key) : fallback;
}

inline int get_integer(const ConfigDoc& doc, const std::string& key) {
  const double d = get_number(doc, key);
  const long long r = std::llround(d);
  if (std::abs(d - static_cast<double>(r)) > 1e-9)
    throw ConfigError("key " + key + ": expected an integer, got " + format_double(d));
  return static_cast<int>(r);
}

inline bool get_bool_or(const ConfigDoc& doc, const std::string& key, bool fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!std::holds_alternative<bool>(it->second.v))
    throw ConfigError("key " + key + ": expected true or false");
  return std::get<bool>(it->second.v);
}

inline std::string get_string(const ConfigDoc& doc, const std::string& key) {
  const ConfigValue& v = require(doc, key);
  if (!std::holds_alternative<std::string>(v.v))
    throw ConfigError("key " + key + ": expected a string");
  return std::get<std::string>(v.v);
}

inline std::vector<double> number_list(const ConfigValue& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("key " + key + ": expected an array");
  std::vector<double> out;
  for (const ConfigValue& item : std::get<std::vector<ConfigValue>>(v.v)) {
    if (!item.is_number()) throw ConfigError("key " + key + ": expected numbers");
    out.push_back(std::get<double>(item.v));
  }
  return out;
}

inline std::vector<double> get_numbers(const ConfigDoc& doc, const std::string& key) {
  return number_list(require(doc, key), key);
}

/// Flat array [a1, b1, a2, b2, ...] interpreted as 2-vectors.
inline std::vector<Eigen::Vector2d> get_flat_pairs(const ConfigDoc& doc, const std::string& key) {
  const std::vector<double> flat = get_numbers(doc, key);
  if (flat.size() % 2 != 0)
    throw ConfigError("key " + key + ": expected an even count of numbers");
  std::vector<Eigen::Vector2d> out(flat.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) out[i] = {flat[2 * i], flat[2 * i + 1]};
  return out;
}

}  // namespace config_detail

/// Build a validated SimConfig from a parsed document. Unknown keys are
/// rejected so typos surface instead of silently using defaults.
inline SimConfig build_sim_config(const ConfigDoc& doc) {
  using namespace config_detail;

  std::vector<std::string> known = {
      "graph.vertices",    "graph.edges",      "graph.anchors",
      "formation.p_star0", "scenario.kind",    "gains.k_p",
      "sim.dt",            "sim.t_final",      "sim.record_every",
      "sim.mode",          "sim.v_limit",      "sim.omega_limit",
      "initial.positions", "initial.headings", "initial.estimates",
      "controller.position_gain", "controller.omega_frame"};

  const int n = get_integer(doc, "graph.vertices");
  std::vector<std::pair<int, int>> edges;
  {
    const ConfigValue& v = require(doc, "graph.edges");
    if (!v.is_array()) throw ConfigError("key graph.edges: expected an array of pairs");
    for (const ConfigValue& item : std::get<std::vector<ConfigValue>>(v.v)) {
      const std::vector<double> pair = number_list(item, "graph.edges");
      if (pair.size() != 2) throw ConfigError("key graph.edges: each entry must be a pair");
      edges.emplace_back(static_cast<int>(std::llround(pair[0])),
                         static_cast<int>(std::llround(pair[1])));
    }
  }
  std::vector<int> anchors;
  for (double a : get_numbers(doc, "graph.anchors"))
    anchors.push_back(static_cast<int>(std::llround(a)));

  FormationGraph graph(n, edges, anchors);
  if (!graph.is_connected()) throw ConfigError("graph is not connected");

  const std::vector<Eigen::Vector2d> base = get_flat_pairs(doc, "formation.p_star0");
  if (static_cast<int>(base.size()) != n)
    throw ConfigError("formation.p_star0: expected " + std::to_string(2 * n) + " numbers");

  const std::string kind = get_string(doc, "scenario.kind");
  ScenarioSpec scenario = [&]() -> ScenarioSpec {
    if (kind == "sinusoid") {
      known.insert(known.end(), {"scenario.params.amplitude", "scenario.params.spatial_freq",
                                 "scenario.params.speed"});
      SinusoidParams p;
      p.amplitude = get_number_or(doc, "scenario.params.amplitude", p.amplitude);
      p.spatial_freq = get_number_or(doc, "scenario.params.spatial_freq", p.spatial_freq);
      p.speed = get_number_or(doc, "scenario.params.speed", p.speed);
      return make_sinusoid(base, p);
    }
    if (kind == "rotation") {
      known.insert(known.end(), {"scenario.params.center", "scenario.params.omega0",
                                 "scenario.params.allow_zero_speed"});
      RotationParams p;
      if (doc.count("scenario.params.center")) {
        const std::vector<double> c =
            number_list(doc.at("scenario.params.center"), "scenario.params.center");
        if (c.size() != 2) throw ConfigError("scenario.params.center: expected a pair");
        p.center = {c[0], c[1]};
      }
      p.omega0 = get_number_or(doc, "scenario.params.omega0", p.omega0);
      p.allow_zero_speed = get_bool_or(doc, "scenario.params.allow_zero_speed", false);
      return make_rotation(base, p);
    }
    if (kind == "custom")
      throw ConfigError("scenario.kind 'custom' is only constructible programmatically");
    throw ConfigError("scenario.kind must be \"sinusoid\" or \"rotation\", got \"" + kind + "\"");
  }();

  const std::vector<Eigen::Vector2d> positions = get_flat_pairs(doc, "initial.positions");
  const std::vector<double> headings = get_numbers(doc, "initial.headings");
  if (static_cast<int>(positions.size()) != n)
    throw ConfigError("initial.positions: expected " + std::to_string(2 * n) + " numbers");
  if (static_cast<int>(headings.size()) != n)
    throw ConfigError("initial.headings: expected " + std::to_string(n) + " values");
  std::vector<AgentState> agents(n);
  for (int i = 0; i < n; ++i) agents[i] = {positions[i].x(), positions[i].y(), headings[i]};

  std::vector<Eigen::Vector2d> estimates = get_flat_pairs(doc, "initial.estimates");
  if (static_cast<int>(estimates.size()) != n)
    throw ConfigError("initial.estimates: expected " + std::to_string(2 * n) + " numbers");

  std::optional<std::vector<ControlInput>> open_loop;
  const std::string mode =
      doc.count("sim.mode") ? get_string(doc, "sim.mode") : std::string("closedloop");
  if (mode == "openloop") {
    known.push_back("openloop.inputs");
    const std::vector<Eigen::Vector2d> raw = get_flat_pairs(doc, "openloop.inputs");
    if (static_cast<int>(raw.size()) != n)
      throw ConfigError("openloop.inputs: expected " + std::to_string(2 * n) + " numbers");
    std::vector<ControlInput> inputs(n);
    for (int i = 0; i < n; ++i) inputs[i] = {raw[i].x(), raw[i].y()};
    open_loop = std::move(inputs);
  } else if (mode != "closedloop") {
    throw ConfigError("sim.mode must be \"closedloop\" or \"openloop\", got \"" + mode + "\"");
  }

  ControllerOptions controller;
  controller.position_gain = get_number_or(doc, "controller.position_gain", 1.0);
  if (doc.count("controller.omega_frame")) {
    const std::string frame = get_string(doc, "controller.omega_frame");
    if (frame == "reference")
      controller.reference_frame_perp = true;
    else if (frame != "body")
      throw ConfigError("controller.omega_frame must be \"body\" or \"reference\"");
  }

  const double t_final = get_number(doc, "sim.t_final");
  if (!(t_final > 0.0)) throw ConfigError("sim.t_final must be > 0");

  SimConfig cfg{std::move(graph),
                std::move(scenario),
                EstimatorGains{get_number(doc, "gains.k_p")},
                controller,
                get_number(doc, "sim.dt"),
                t_final,
                get_integer(doc, "sim.record_every"),
                std::move(agents),
                std::move(estimates),
                std::move(open_loop),
                doc.count("sim.v_limit") ? std::optional<double>(get_number(doc, "sim.v_limit"))
                                         : std::nullopt,
                doc.count("sim.omega_limit")
                    ? std::optional<double>(get_number(doc, "sim.omega_limit"))
                    : std::nullopt};

  for (const auto& [key, value] : doc)
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unrecognized key: " + key);

  validate_sim_config(cfg);
  return cfg;
}

inline SimConfig load_sim_config(const std::string& path) {
  return build_sim_config(parse_config_file(path));
}

}  // namespace bearing_swarm
