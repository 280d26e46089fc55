#include "qbrown/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "qbrown/dispersion.hpp"
#include "qbrown/pde.hpp"

namespace qbrown {

namespace {

enum class Type { Real, Positive, NonNegative, Fraction, Integer, Bool, Choice, Text, ModelList };

struct KeySpec {
  std::string name;
  Type type;
  std::string fallback;                          ///< default for every listed scenario
  std::vector<std::string> scenarios = {};            ///< empty = all scenarios
  std::map<std::string, std::string> overrides = {};  ///< per-scenario defaults
  std::vector<std::string> choices = {};              ///< Choice only
  bool allow_auto = false;
  long min_int = 0;
};

const std::vector<std::string> kTimed = {"free-zero-T", "free-high-friction", "vacuum-spreading", "harmonic",
                                         "dispersion-compare"};
const std::vector<std::string> kPde = {"classical-telegraph", "quantum-zero-T-pde", "semiclassical-pde"};
const std::vector<std::string> kPicard = {"free-high-friction", "dispersion-compare"};

std::vector<std::string> join(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    auto add = [&](KeySpec k) { t.push_back(std::move(k)); };
    add({"name", Type::Text, "run"});
    add({"seed", Type::Integer, "0"});
    add({"params.hbar", Type::Positive, "1"});
    add({"params.k_B", Type::Positive, "1"});
    add({"params.mass", Type::Positive, "1"});
    add({"params.friction", Type::NonNegative, "1", {},
         {{"vacuum-spreading", "0"}, {"free-zero-T", "100"}, {"quantum-zero-T-pde", "100"}}});
    add({"params.temperature", Type::NonNegative, "1",
         {},
         {{"free-zero-T", "0"}, {"vacuum-spreading", "0"}, {"quantum-zero-T-pde", "0"}}});
    add({"params.omega0", Type::NonNegative, "0", {}, {{"harmonic", "1"}}});
    add({"params.force", Type::Real, "0"});

    add({"time.unit", Type::Choice, "t_c", kTimed,
         {{"free-zero-T", "tau_m"}, {"vacuum-spreading", "absolute"}, {"harmonic", "absolute"}},
         {"absolute", "t_c", "tau_m"}});
    add({"time.start", Type::Positive, "1e-3", kTimed,
         {{"free-zero-T", "10"}, {"vacuum-spreading", "0.1"}, {"harmonic", "0.1"}}});
    add({"time.end", Type::Positive, "1e3", kTimed,
         {{"free-zero-T", "1000"}, {"vacuum-spreading", "10"}, {"harmonic", "60"}}});
    add({"time.points", Type::Integer, "60", kTimed, {}, {}, false, 2});
    add({"time.spacing", Type::Choice, "log", kTimed, {{"vacuum-spreading", "linear"}, {"harmonic", "linear"}},
         {"log", "linear"}});

    add({"init.sigma0", Type::Positive, "0.3", {"free-zero-T", "vacuum-spreading"}, {{"vacuum-spreading", "1"}}});
    add({"init.sigma_dot0", Type::Real, "auto", {"free-zero-T", "vacuum-spreading"}, {{"vacuum-spreading", "0"}},
         {}, true});
    add({"init.mu0", Type::Real, "0", join({"free-zero-T", "vacuum-spreading", "harmonic"}, kPde)});
    add({"init.mu_dot0", Type::Real, "0", {"free-zero-T", "vacuum-spreading", "harmonic"}});
    add({"init.sigma2_0", Type::NonNegative, "0.09", join({"harmonic"}, kPde),
         {{"harmonic", "1"}}});
    add({"init.sigma2_dot0", Type::Real, "0", {"harmonic"}});

    const std::vector<std::string> ode = {"free-zero-T", "vacuum-spreading", "harmonic"};
    add({"ode.method", Type::Choice, "rk45", ode, {}, {"rk45", "rk4"}});
    add({"ode.rel_tol", Type::Positive, "1e-10", ode});
    add({"ode.abs_tol", Type::Positive, "1e-12", ode});
    add({"ode.max_step", Type::Positive, "auto", ode, {}, {}, true});

    add({"models", Type::ModelList, "overdamped-full, overdamped-bounded, lambert-exact, superposition, einstein",
         kPicard,
         {{"dispersion-compare",
           "einstein, pure-quantum, superposition, lambert-exact, coth-interpolation, semiclassical-log, "
           "elementary-log-approx, overdamped-bounded, overdamped-full"}}});
    add({"beta.nodes", Type::Integer, "97", join({"harmonic"}, kPicard), {{"harmonic", "129"}}, {}, false, 3});
    add({"beta.smallest", Type::Fraction, "1e-4", {"harmonic"}});

    add({"picard.theta", Type::Fraction, "0.7", kPicard});
    add({"picard.tol", Type::Positive, "1e-8", kPicard});
    add({"picard.max_iter", Type::Integer, "200", kPicard, {}, {}, false, 1});
    add({"picard.outer", Type::Choice, "unknown", kPicard, {}, {"unknown", "previous-iterate"}});
    add({"picard.nodes_per_efold", Type::Integer, "32", kPicard, {}, {}, false, 2});
    add({"picard.window_efolds", Type::Positive, "1", kPicard});
    add({"picard.start_fraction", Type::Fraction, "1e-4", kPicard});

    add({"pde.model", Type::Choice, "classical-telegraph", kPde,
         {{"quantum-zero-T-pde", "quantum-zero-T-smoluchowski"}, {"semiclassical-pde", "semiclassical-smoluchowski"}},
         {"classical-telegraph", "classical-smoluchowski", "semiclassical-telegraph", "semiclassical-smoluchowski",
          "quantum-zero-T-telegraph", "quantum-zero-T-smoluchowski"}});
    add({"pde.potential", Type::Choice, "free", kPde, {{"semiclassical-pde", "harmonic"}},
         {"free", "linear", "harmonic", "quartic"}});
    add({"pde.k4", Type::Positive, "1", kPde});
    add({"pde.x_min", Type::Real, "auto", kPde, {}, {}, true});
    add({"pde.x_max", Type::Real, "auto", kPde, {}, {}, true});
    add({"pde.n", Type::Integer, "auto", kPde, {}, {}, true, 16});
    add({"pde.dt", Type::Positive, "auto", kPde, {}, {}, true});
    add({"pde.t_final", Type::Positive, "20", kPde, {{"quantum-zero-T-pde", "10"}}});
    add({"pde.records", Type::Integer, "200", kPde, {}, {}, false, 1});
    add({"pde.boundary", Type::Choice, "reflecting", kPde, {}, {"reflecting", "periodic"}});
    add({"pde.floor", Type::Fraction, "1e-12", kPde});
    add({"pde.ankerhold", Type::Bool, "false", kPde});

    const std::vector<std::string> eq = {"equilibrium"};
    add({"eq.potential", Type::Choice, "harmonic", eq, {}, {"free", "harmonic", "quartic"}});
    add({"eq.k4", Type::Positive, "1", eq});
    add({"eq.x_min", Type::Real, "auto", eq, {}, {}, true});
    add({"eq.x_max", Type::Real, "auto", eq, {}, {}, true});
    add({"eq.n", Type::Integer, "801", eq, {}, {}, false, 16});
    add({"eq.beta_steps", Type::Integer, "512", eq, {}, {}, false, 16});
    add({"eq.n_states", Type::Integer, "0", eq});
    add({"eq.entropy_nodes", Type::Integer, "9", eq, {}, {}, false, 2});
    add({"eq.boundary", Type::Choice, "reflecting", eq, {}, {"reflecting", "periodic"}});

    add({"acceptance.quick", Type::Bool, "false", {"acceptance"}});
    return t;
  }();
  return table;
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

bool applies(const KeySpec& k, const std::string& scenario) {
  return k.scenarios.empty() || std::find(k.scenarios.begin(), k.scenarios.end(), scenario) != k.scenarios.end();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_real(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long> parse_integer(const std::string& s) {
  long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  return std::nullopt;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Returns an error message, or empty when the value is acceptable.
std::string check_value(const KeySpec& k, const std::string& v) {
  if (k.allow_auto && v == "auto") return {};
  const std::string field = k.name.substr(k.name.find('.') + 1);
  switch (k.type) {
    case Type::Text:
      return {};
    case Type::Real:
    case Type::Positive:
    case Type::NonNegative:
    case Type::Fraction: {
      const auto x = parse_real(v);
      if (!x) return "'" + k.name + "' expects a finite number, got '" + v + "'";
      if (k.type == Type::Positive && !(*x > 0.0)) return field + " must be positive";
      if (k.type == Type::NonNegative && !(*x >= 0.0)) return field + " must be non-negative";
      if (k.type == Type::Fraction && !(*x > 0.0 && *x <= 1.0)) return field + " must lie in (0, 1]";
      return {};
    }
    case Type::Integer: {
      const auto x = parse_integer(v);
      if (!x) return "'" + k.name + "' expects an integer, got '" + v + "'";
      if (*x < k.min_int) return field + " must be at least " + std::to_string(k.min_int);
      return {};
    }
    case Type::Bool:
      return parse_bool(v) ? std::string{} : "'" + k.name + "' expects true or false, got '" + v + "'";
    case Type::Choice:
      if (std::find(k.choices.begin(), k.choices.end(), v) != k.choices.end()) return {};
      {
        std::string opts;
        for (const auto& c : k.choices) opts += (opts.empty() ? "" : ", ") + c;
        return "'" + k.name + "' must be one of {" + opts + "}, got '" + v + "'";
      }
    case Type::ModelList: {
      const auto items = split_list(v);
      if (items.empty()) return "'" + k.name + "' needs at least one model";
      for (const auto& item : items)
        if (!model_from_string(item)) return "unknown model '" + item + "'";
      return {};
    }
  }
  return {};
}

// Scenario requirements on the physical parameters: {key, predicate, message}.
struct Requirement {
  const char* key;
  std::function<bool(const PhysicalParams&)> ok;
  const char* message;
};

std::vector<Requirement> requirements(const std::string& scenario) {
  auto zero_T = [](const PhysicalParams& p) { return p.zero_temperature(); };
  auto warm = [](const PhysicalParams& p) { return !p.zero_temperature(); };
  auto damped = [](const PhysicalParams& p) { return !p.vacuum(); };
  if (scenario == "free-zero-T") return {{"params.temperature", zero_T, "free-zero-T needs temperature = 0"}};
  if (scenario == "vacuum-spreading")
    return {{"params.friction", [](const PhysicalParams& p) { return p.vacuum(); }, "vacuum-spreading needs friction = 0"},
            {"params.temperature", zero_T, "vacuum-spreading needs temperature = 0"}};
  if (scenario == "harmonic")
    return {{"params.omega0", [](const PhysicalParams& p) { return p.omega0() > 0.0; }, "harmonic needs omega0 > 0"},
            {"params.temperature", warm, "harmonic needs temperature > 0"}};
  if (scenario == "quantum-zero-T-pde") return {{"params.temperature", zero_T, "quantum-zero-T-pde needs temperature = 0"}};
  if (scenario == "free-high-friction" || scenario == "dispersion-compare")
    return {{"params.temperature", warm, "this scenario needs temperature > 0"},
            {"params.friction", damped, "this scenario needs friction > 0"}};
  if (scenario == "classical-telegraph" || scenario == "semiclassical-pde" || scenario == "equilibrium")
    return {{"params.temperature", warm, "this scenario needs temperature > 0"}};
  return {};
}

}  // namespace

ConfigParseError::ConfigParseError(std::vector<ConfigIssue> issues)
    : ConfigError([&] {
        std::ostringstream os;
        os << issues.size() << " config error" << (issues.size() == 1 ? "" : "s");
        for (const auto& i : issues) {
          os << "\n  ";
          if (i.line > 0) os << "line " << i.line << ": ";
          os << i.message;
        }
        return os.str();
      }()),
      issues_(std::move(issues)) {}

bool ScenarioConfig::is_default(const std::string& key) const { return values.at(key).line == 0; }

bool ScenarioConfig::is_auto(const std::string& key) const { return text(key) == "auto"; }

const std::string& ScenarioConfig::text(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError("scenario '" + scenario + "' has no key '" + key + "'");
  return it->second.text;
}

double ScenarioConfig::number(const std::string& key) const {
  const auto v = parse_real(text(key));
  if (!v) throw ConfigError("'" + key + "' is not a number");
  return *v;
}

long ScenarioConfig::integer(const std::string& key) const {
  const auto v = parse_integer(text(key));
  if (!v) throw ConfigError("'" + key + "' is not an integer");
  return *v;
}

bool ScenarioConfig::flag(const std::string& key) const {
  const auto v = parse_bool(text(key));
  if (!v) throw ConfigError("'" + key + "' is not a boolean");
  return *v;
}

std::vector<std::string> ScenarioConfig::list(const std::string& key) const { return split_list(text(key)); }

ScenarioConfig parse_config(std::string_view text) {
  std::vector<ConfigIssue> issues;
  std::map<std::string, ConfigValue> given;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      issues.push_back({line_no, "expected 'key = value', got '" + body + "'"});
      continue;
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const bool key_ok = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    });
    if (!key_ok) {
      issues.push_back({line_no, "malformed key '" + key + "'"});
      continue;
    }
    if (value.empty()) {
      issues.push_back({line_no, "key '" + key + "' has an empty value"});
      continue;
    }
    if (const auto it = given.find(key); it != given.end()) {
      issues.push_back({line_no, "duplicate key '" + key + "' (lines " + std::to_string(it->second.line) + " and " +
                                     std::to_string(line_no) + ")"});
      continue;
    }
    given[key] = {value, line_no};
  }

  ScenarioConfig cfg;
  const auto sc = given.find("scenario");
  if (sc == given.end()) {
    issues.push_back({0, "missing required key 'scenario'"});
  } else if (std::find(std::begin(kScenarioNames), std::end(kScenarioNames), sc->second.text) ==
             std::end(kScenarioNames)) {
    std::string opts;
    for (auto n : kScenarioNames) opts += (opts.empty() ? "" : ", ") + std::string(n);
    issues.push_back({sc->second.line, "unknown scenario '" + sc->second.text + "' (expected one of {" + opts + "})"});
  } else {
    cfg.scenario = sc->second.text;
  }

  if (!cfg.scenario.empty()) {
    for (const auto& [key, v] : given) {
      if (key == "scenario") continue;
      const KeySpec* spec = find_key(key);
      if (!spec) {
        issues.push_back({v.line, "unknown key '" + key + "'"});
      } else if (!applies(*spec, cfg.scenario)) {
        issues.push_back({v.line, "key '" + key + "' does not apply to scenario '" + cfg.scenario + "'"});
      } else if (auto msg = check_value(*spec, v.text); !msg.empty()) {
        issues.push_back({v.line, msg});
      } else {
        cfg.values[key] = v;
      }
    }
    for (const auto& spec : key_table()) {
      if (!applies(spec, cfg.scenario) || given.count(spec.name)) continue;
      const auto o = spec.overrides.find(cfg.scenario);
      cfg.values[spec.name] = {o != spec.overrides.end() ? o->second : spec.fallback, 0};
    }
    cfg.values["scenario"] = sc->second;

    const bool params_ok = std::none_of(issues.begin(), issues.end(), [&](const ConfigIssue& i) {
      for (const auto& [key, v] : given)
        if (key.rfind("params.", 0) == 0 && v.line == i.line) return true;
      return false;
    });
    if (params_ok) {
      RawParams raw;
      raw.hbar = cfg.number("params.hbar");
      raw.k_B = cfg.number("params.k_B");
      raw.mass = cfg.number("params.mass");
      raw.friction = cfg.number("params.friction");
      raw.temperature = cfg.number("params.temperature");
      raw.omega0 = cfg.number("params.omega0");
      raw.force = cfg.number("params.force");
      try {
        cfg.params = make_params(raw);
        for (const auto& r : requirements(cfg.scenario))
          if (!r.ok(cfg.params)) issues.push_back({cfg.values.at(r.key).line, r.message});
      } catch (const Error& e) {
        issues.push_back({0, e.what()});
      }
    }
  }

  if (!issues.empty()) {
    std::stable_sort(issues.begin(), issues.end(), [](const ConfigIssue& a, const ConfigIssue& b) {
      return a.line < b.line;
    });
    throw ConfigParseError(std::move(issues));
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace qbrown
