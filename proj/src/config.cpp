#include "nrpursuit/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace nrpursuit {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : -1; }

// Reads one scenario map, tracking which optional fields fell back to defaults.
class SectionReader {
 public:
  SectionReader(const YAML::Node& node, std::string prefix, std::vector<std::string>& defaulted)
      : node_(node), prefix_(std::move(prefix)), defaulted_(defaulted) {}

  std::string field(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    if (!node_.IsMap()) throw ConfigError(prefix_, "expected a mapping", line_of(node_));
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw ConfigError(field(key), "unknown key (expected one of: " + list + ")",
                          line_of(kv.first));
      }
    }
  }

  bool has(const std::string& key) const { return node_.IsMap() && node_[key]; }

  double number(const std::string& key) const {
    const YAML::Node v = node_[key];
    if (!v) throw ConfigError(field(key), "required field missing", line_of(node_));
    return as_number(v, field(key));
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) {
      defaulted_.push_back(field(key));
      return fallback;
    }
    return as_number(node_[key], field(key));
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) {
      defaulted_.push_back(field(key));
      return fallback;
    }
    const YAML::Node v = node_[key];
    try {
      return v.as<long long>();
    } catch (const YAML::Exception&) {
      throw ConfigError(field(key), "expected an integer", line_of(v));
    }
  }

  std::string text(const std::string& key) const {
    const YAML::Node v = node_[key];
    if (!v) throw ConfigError(field(key), "required field missing", line_of(node_));
    if (!v.IsScalar()) throw ConfigError(field(key), "expected a string", line_of(v));
    return v.as<std::string>();
  }

  Vec2 point(const std::string& key) const {
    const YAML::Node v = node_[key];
    if (!v) throw ConfigError(field(key), "required field missing", line_of(node_));
    return as_point(v, field(key));
  }

  Vec2 point(const std::string& key, Vec2 fallback) const {
    if (!has(key)) {
      defaulted_.push_back(field(key));
      return fallback;
    }
    return as_point(node_[key], field(key));
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) {
      defaulted_.push_back(field(key));
      return fallback;
    }
    try {
      return node_[key].as<bool>();
    } catch (const YAML::Exception&) {
      throw ConfigError(field(key), "expected true or false", line_of(node_[key]));
    }
  }

  int line() const { return line_of(node_); }

  static double as_number(const YAML::Node& v, const std::string& name) {
    if (!v.IsScalar()) throw ConfigError(name, "expected a number", line_of(v));
    try {
      return v.as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError(name, "expected a number, got '" + v.Scalar() + "'", line_of(v));
    }
  }

  static Vec2 as_point(const YAML::Node& v, const std::string& name) {
    if (!v.IsSequence() || v.size() != 2) {
      throw ConfigError(name, "expected a pair [x, y]", line_of(v));
    }
    return {as_number(v[0], name + "[0]"), as_number(v[1], name + "[1]")};
  }

 private:
  YAML::Node node_;
  std::string prefix_;
  std::vector<std::string>& defaulted_;
};

// Re-throws a validation error with the line of the YAML node it refers to.
int line_for_field(const YAML::Node& root, const std::string& field) {
  YAML::Node cur = root;
  int line = line_of(root);
  std::string path = field;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const std::size_t dot = path.find('.', pos);
    std::string part = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    std::optional<std::size_t> index;
    if (const auto br = part.find('['); br != std::string::npos) {
      index = std::stoul(part.substr(br + 1));
      part = part.substr(0, br);
    }
    if (!cur.IsMap() || !cur[part]) break;
    cur = cur[part];
    line = line_of(cur);
    if (index) {
      if (!cur.IsSequence() || *index >= cur.size()) break;
      cur = cur[*index];
      line = line_of(cur);
    }
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return line;
}

ScenarioConfig read_scenario(const YAML::Node& root, std::vector<std::string>& defaulted) {
  ScenarioConfig cfg;
  SectionReader top(root, "", defaulted);
  top.allow_only({"scenario", "pursuers", "evader", "reference", "controller", "objective",
                  "learning"});

  if (!top.has("scenario")) throw ConfigError("scenario", "required section missing", top.line());
  SectionReader sc(root["scenario"], "scenario", defaulted);
  sc.allow_only({"name", "mode", "duration", "dt", "seed", "capture_radius_scale"});
  cfg.name = sc.text("name");
  if (cfg.name.empty() || cfg.name.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
                                                      "0123456789_.-") != std::string::npos) {
    throw ConfigError("scenario.name", "use letters, digits, '_', '-' or '.' only",
                      line_of(root["scenario"]["name"]));
  }
  const std::string mode = sc.text("mode");
  if (!parse_mode(mode, cfg.mode)) {
    throw ConfigError("scenario.mode",
                      "unknown mode '" + mode +
                          "' (valid: agnostic_tracking, single_pursuer_adversarial, "
                          "multi_pursuer_model_based, multi_pursuer_learning)",
                      line_of(root["scenario"]["mode"]));
  }
  cfg.duration = sc.number("duration");
  cfg.dt = sc.number("dt", cfg.dt);
  const long long seed = sc.integer("seed", static_cast<long long>(cfg.seed));
  if (seed < 0) throw ConfigError("scenario.seed", "must be a nonnegative integer", sc.line());
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.capture_radius_scale = sc.number("capture_radius_scale", cfg.capture_radius_scale);

  if (!top.has("pursuers")) throw ConfigError("pursuers", "required section missing", top.line());
  const YAML::Node ps = root["pursuers"];
  if (!ps.IsSequence() || ps.size() == 0) {
    throw ConfigError("pursuers", "expected a non-empty list", line_of(ps));
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    SectionReader pr(ps[i], "pursuers[" + std::to_string(i) + "]", defaulted);
    pr.allow_only({"speed", "u_max", "x", "y", "heading"});
    PursuerSetup p;
    p.params.speed = pr.number("speed");
    p.params.u_max = pr.number("u_max");
    p.initial.pos.x = pr.number("x", 0.0);
    p.initial.pos.y = pr.number("y", 0.0);
    p.initial.heading = pr.number("heading", 0.0);
    cfg.pursuers.push_back(p);
  }

  if (cfg.mode == ScenarioMode::agnostic_tracking) {
    if (!top.has("reference")) {
      throw ConfigError("reference", "required for agnostic_tracking", top.line());
    }
    SectionReader rf(root["reference"], "reference", defaulted);
    rf.allow_only({"start", "radius1", "radius2", "speed"});
    cfg.reference.start = rf.point("start", cfg.reference.start);
    cfg.reference.radius1 = rf.number("radius1", cfg.reference.radius1);
    cfg.reference.radius2 = rf.number("radius2", cfg.reference.radius2);
    cfg.reference.speed = rf.number("speed");
    if (top.has("evader")) {
      throw ConfigError("evader", "not used by agnostic_tracking; use reference",
                        line_of(root["evader"]));
    }
  } else {
    if (!top.has("evader")) throw ConfigError("evader", "required section missing", top.line());
    SectionReader ev(root["evader"], "evader", defaulted);
    ev.allow_only({"speed", "start", "goal", "evade_radius_scale"});
    cfg.evader.speed = ev.number("speed");
    cfg.evader.goal = ev.point("goal");
    cfg.evader_start = ev.point("start", cfg.evader_start);
    cfg.evader.evade_radius_scale =
        ev.number("evade_radius_scale", cfg.evader.evade_radius_scale);
    if (top.has("reference")) {
      throw ConfigError("reference", "only used by agnostic_tracking",
                        line_of(root["reference"]));
    }
  }

  {
    const YAML::Node n = top.has("controller") ? root["controller"] : YAML::Node(YAML::NodeType::Map);
    SectionReader ct(n, "controller", defaulted);
    ct.allow_only({"alpha", "horizon", "jac_epsilon", "prediction_substeps", "objective"});
    cfg.controller.alpha = ct.number("alpha", cfg.controller.alpha);
    cfg.controller.horizon = ct.number("horizon", cfg.controller.horizon);
    cfg.controller.jac_epsilon = ct.number("jac_epsilon", cfg.controller.jac_epsilon);
    cfg.controller.prediction_substeps = static_cast<int>(
        ct.integer("prediction_substeps", cfg.controller.prediction_substeps));
    cfg.objective = default_objective(cfg.mode);
    if (ct.has("objective")) {
      const std::string kind = ct.text("objective");
      if (!parse_objective_kind(kind, cfg.objective)) {
        throw ConfigError("controller.objective",
                          "unknown objective '" + kind + "' (valid: terminal, cooperative)",
                          line_of(n["objective"]));
      }
    } else {
      defaulted.push_back("controller.objective");
    }
  }

  {
    const YAML::Node n = top.has("objective") ? root["objective"] : YAML::Node(YAML::NodeType::Map);
    SectionReader ob(n, "objective", defaulted);
    ob.allow_only({"beta1", "beta2", "beta3", "gamma", "gamma_cost", "gamma_repel"});
    cfg.weights.beta1 = ob.number("beta1", cfg.weights.beta1);
    cfg.weights.beta2 = ob.number("beta2", cfg.weights.beta2);
    cfg.weights.beta3 = ob.number("beta3", cfg.weights.beta3);
    const double gamma = ob.number("gamma", cfg.weights.gamma_cost);
    cfg.weights.gamma_cost = ob.number("gamma_cost", gamma);
    cfg.weights.gamma_repel = ob.number("gamma_repel", gamma);
  }

  {
    const bool present = top.has("learning");
    if (present && cfg.mode != ScenarioMode::multi_pursuer_learning) {
      throw ConfigError("learning", "only used by multi_pursuer_learning",
                        line_of(root["learning"]));
    }
    if (cfg.mode == ScenarioMode::multi_pursuer_learning) {
      const YAML::Node n = present ? root["learning"] : YAML::Node(YAML::NodeType::Map);
      SectionReader ln(n, "learning", defaulted);
      ln.allow_only({"hidden", "eta", "epochs", "window", "retrain_interval", "sample_interval",
                     "input_scale", "backtrack"});
      if (ln.has("hidden")) {
        const YAML::Node h = n["hidden"];
        if (!h.IsSequence()) throw ConfigError("learning.hidden", "expected a list", line_of(h));
        cfg.learning.hidden_layers.clear();
        for (const auto& w : h) {
          try {
            cfg.learning.hidden_layers.push_back(w.as<int>());
          } catch (const YAML::Exception&) {
            throw ConfigError("learning.hidden", "expected integer widths", line_of(w));
          }
        }
      } else {
        defaulted.push_back("learning.hidden");
      }
      cfg.learning.eta = ln.number("eta", cfg.learning.eta);
      cfg.learning.epochs_per_update =
          static_cast<int>(ln.integer("epochs", cfg.learning.epochs_per_update));
      cfg.learning.window = ln.number("window", cfg.learning.window);
      cfg.learning.retrain_interval = ln.number("retrain_interval", cfg.learning.retrain_interval);
      cfg.learning.sample_interval = ln.number("sample_interval", cfg.learning.sample_interval);
      cfg.learning.input_scale = ln.number("input_scale", cfg.learning.input_scale);
      cfg.learning.backtrack = ln.boolean("backtrack", cfg.learning.backtrack);
    }
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    if (e.line() >= 0) throw;
    const std::string msg = e.what();
    const std::string prefix = e.field() + ": ";
    throw ConfigError(e.field(), msg.rfind(prefix, 0) == 0 ? msg.substr(prefix.size()) : msg,
                      line_for_field(root, e.field()));
  }
  return cfg;
}

}  // namespace

std::vector<ParsedScenario> parse_config_text(std::string_view text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("document", e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
  }
  if (!doc || !doc.IsMap()) throw ConfigError("document", "expected a mapping at top level", 1);

  std::vector<YAML::Node> nodes;
  if (doc["scenarios"]) {
    if (doc.size() != 1) {
      throw ConfigError("document", "'scenarios' must be the only top-level key", line_of(doc));
    }
    const YAML::Node list = doc["scenarios"];
    if (!list.IsSequence() || list.size() == 0) {
      throw ConfigError("scenarios", "expected a non-empty list", line_of(list));
    }
    for (const auto& n : list) nodes.push_back(n);
  } else {
    nodes.push_back(doc);
  }

  std::vector<ParsedScenario> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    ParsedScenario p;
    const YAML::Node& n = nodes[i];
    if (n.IsMap() && n["scenario"] && n["scenario"].IsMap() && n["scenario"]["name"] &&
        n["scenario"]["name"].IsScalar()) {
      p.name = n["scenario"]["name"].as<std::string>();
    }
    try {
      p.config = read_scenario(n, p.defaulted);
    } catch (const ConfigError& e) {
      p.error = e;
    } catch (const YAML::Exception& e) {
      p.error = ConfigError("scenario", e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
    }
    if (p.name.empty()) p.name = "scenario_" + std::to_string(i);
    out.push_back(std::move(p));
  }

  std::set<std::string> seen;
  for (auto& p : out) {
    if (p.config && !seen.insert(p.name).second) {
      p.error = ConfigError("scenario.name", "duplicate scenario name '" + p.name + "'");
      p.config.reset();
    }
  }
  return out;
}

std::vector<ParsedScenario> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<ScenarioConfig> parse_config(std::string_view text) {
  std::vector<ScenarioConfig> out;
  for (auto& p : parse_config_text(text)) {
    if (p.error) throw *p.error;
    out.push_back(std::move(*p.config));
  }
  return out;
}

std::vector<ScenarioConfig> load_config(const std::filesystem::path& path) {
  std::vector<ScenarioConfig> out;
  for (auto& p : load_config_file(path)) {
    if (p.error) throw *p.error;
    out.push_back(std::move(*p.config));
  }
  return out;
}

}  // namespace nrpursuit
