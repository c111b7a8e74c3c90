#include "igs/config.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

#include "igs/error.hpp"
#include "igs/reference.hpp"

#ifndef IGS_DEFAULT_DATA_DIR
#define IGS_DEFAULT_DATA_DIR "data"
#endif

namespace igs {

namespace fs = std::filesystem;
using nlohmann::json;
using ojson = nlohmann::ordered_json;

const AnalyzerDescriptor& RunConfig::analyzer_descriptor(const std::string& id) const {
  for (const auto& a : analyzers) {
    if (a.analyzer_id == id) return a;
  }
  throw ConfigError("unknown analyzer '" + id + "'");
}

const AttributeSpec* RunConfig::attribute(AttributeKind kind) const {
  for (const auto& a : attributes) {
    if (a.kind == kind) return &a;
  }
  return nullptr;
}

std::vector<std::string> default_refusal_patterns() {
  return {
      R"(\bI('m| am) (sorry|unable|not able)\b)",
      R"(\bI (cannot|can't|can not|won't) (answer|provide|generalize|make generalizations|speak for)\b)",
      R"(\bas an AI\b)",
      R"(\bI do(n't| not) have (personal )?(opinions|feelings|beliefs)\b)",
  };
}

fs::path default_data_dir() { return fs::path(IGS_DEFAULT_DATA_DIR); }

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where.empty() ? what : where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(where, "unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where, std::optional<T> fallback = std::nullopt) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    fail(where, std::string("missing '") + key + "'");
  }
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw std::invalid_argument("not a string");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw std::invalid_argument("not a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw std::invalid_argument("not an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw std::invalid_argument("not a number");
    }
    return it->get<T>();
  } catch (const std::exception& e) {
    fail(where, std::string("'") + key + "' has the wrong type (" + e.what() + ")");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::http_chat ? "http_chat" : "replay";
}

BackendDescriptor parse_backend(const json& j, const fs::path& base, const std::string& where) {
  check_keys(j, where,
             {"id", "kind", "endpoint", "model", "auth_env", "generation_params", "timeout_s",
              "requests_per_second", "max_attempts", "base_delay_ms", "max_delay_ms", "jitter", "fixture"});
  BackendDescriptor b;
  b.backend_id = get<std::string>(j, "id", where);
  validate_backend_id(b.backend_id);
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "http_chat") {
    b.kind = BackendKind::http_chat;
    b.endpoint = get<std::string>(j, "endpoint", where);
    if (b.endpoint.rfind("http://", 0) != 0 && b.endpoint.rfind("https://", 0) != 0) {
      fail(where, "endpoint must start with http:// or https://");
    }
    b.model = get<std::string>(j, "model", where, b.backend_id);
    b.auth_env = get<std::string>(j, "auth_env", where, std::string());
    if (j.contains("generation_params")) {
      b.generation_params = j["generation_params"];
      if (!b.generation_params.is_object()) fail(where, "generation_params must be an object");
      if (b.generation_params.contains("messages")) fail(where, "generation_params may not set messages");
    }
    const double timeout_s = get<double>(j, "timeout_s", where, 60.0);
    if (!(timeout_s > 0)) fail(where, "timeout_s must be positive");
    b.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(timeout_s * 1000.0));
    b.requests_per_second = get<double>(j, "requests_per_second", where, 2.0);
    b.retry.max_attempts = get<int>(j, "max_attempts", where, 5);
    if (b.retry.max_attempts < 1) fail(where, "max_attempts must be >= 1");
    b.retry.base_delay = std::chrono::milliseconds(get<std::int64_t>(j, "base_delay_ms", where, 1000));
    b.retry.max_delay = std::chrono::milliseconds(get<std::int64_t>(j, "max_delay_ms", where, 30000));
    b.retry.jitter = get<double>(j, "jitter", where, 0.5);
    if (b.retry.base_delay.count() < 0 || b.retry.max_delay < b.retry.base_delay) {
      fail(where, "need 0 <= base_delay_ms <= max_delay_ms");
    }
    if (b.retry.jitter < 0 || b.retry.jitter > 1) fail(where, "jitter must lie in [0, 1]");
  } else if (kind == "replay") {
    b.kind = BackendKind::replay;
    b.fixture = resolve(base, get<std::string>(j, "fixture", where));
  } else {
    fail(where, "kind must be 'http_chat' or 'replay', got '" + kind + "'");
  }
  return b;
}

ojson backend_to_json(const BackendDescriptor& b) {
  ojson j;
  j["id"] = b.backend_id;
  j["kind"] = std::string(to_string(b.kind));
  if (b.kind == BackendKind::replay) {
    j["fixture"] = b.fixture.string();
    return j;
  }
  j["endpoint"] = b.endpoint;
  j["model"] = b.model;
  j["auth_env"] = b.auth_env;
  j["generation_params"] = ojson::parse(b.generation_params.dump());
  j["timeout_s"] = static_cast<double>(b.timeout.count()) / 1000.0;
  j["requests_per_second"] = b.requests_per_second;
  j["max_attempts"] = b.retry.max_attempts;
  j["base_delay_ms"] = b.retry.base_delay.count();
  j["max_delay_ms"] = b.retry.max_delay.count();
  j["jitter"] = b.retry.jitter;
  return j;
}

AnalyzerDescriptor builtin_vader() {
  AnalyzerDescriptor a;
  a.analyzer_id = "vader";
  a.kind = AnalyzerKind::builtin_lexicon_rules;
  a.lexicon_path = (default_data_dir() / "vader_lexicon.txt").lexically_normal();
  a.emoji_lexicon_path = (default_data_dir() / "emoji_utf8_lexicon.txt").lexically_normal();
  return a;
}

AnalyzerDescriptor parse_analyzer(const json& j, const fs::path& base, const std::string& where) {
  check_keys(j, where, {"id", "kind", "lexicon", "emoji_lexicon", "command"});
  AnalyzerDescriptor a;
  a.analyzer_id = get<std::string>(j, "id", where);
  if (a.analyzer_id.empty()) fail(where, "analyzer id must not be empty");
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "builtin") {
    a.kind = AnalyzerKind::builtin_lexicon_rules;
    a.lexicon_path = resolve(base, get<std::string>(j, "lexicon", where));
    a.emoji_lexicon_path = resolve(base, get<std::string>(j, "emoji_lexicon", where, std::string()));
  } else if (kind == "external_command") {
    a.kind = AnalyzerKind::external_command;
    const auto it = j.find("command");
    if (it == j.end() || !it->is_array() || it->empty()) fail(where, "command must be a non-empty array");
    for (const auto& arg : *it) {
      if (!arg.is_string()) fail(where, "command entries must be strings");
      a.command.push_back(arg.get<std::string>());
    }
  } else {
    fail(where, "kind must be 'builtin' or 'external_command', got '" + kind + "'");
  }
  return a;
}

ojson analyzer_to_json(const AnalyzerDescriptor& a) {
  ojson j;
  j["id"] = a.analyzer_id;
  if (a.kind == AnalyzerKind::external_command) {
    j["kind"] = "external_command";
    j["command"] = a.command;
  } else {
    j["kind"] = "builtin";
    j["lexicon"] = a.lexicon_path.string();
    if (!a.emoji_lexicon_path.empty()) j["emoji_lexicon"] = a.emoji_lexicon_path.string();
  }
  return j;
}

Roster parse_roster(AttributeKind kind, const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "roster must be an array");
  Roster roster;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    check_keys(j[i], w, {"code", "base_surface", "plural_surface", "can_be_from"});
    Group g;
    g.attribute = kind;
    g.code = get<std::string>(j[i], "code", w);
    g.base_surface = get<std::string>(j[i], "base_surface", w);
    g.plural_surface = get<std::string>(j[i], "plural_surface", w, std::string());
    g.can_be_from = get<bool>(j[i], "can_be_from", w, true);
    roster.push_back(std::move(g));
  }
  validate_roster(kind, roster);
  return roster;
}

ojson roster_to_json(const Roster& roster) {
  ojson out = ojson::array();
  for (const auto& g : roster) {
    ojson j;
    j["code"] = g.code;
    j["base_surface"] = g.base_surface;
    if (!g.plural_surface.empty()) j["plural_surface"] = g.plural_surface;
    j["can_be_from"] = g.can_be_from;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<QuestionTemplate> parse_templates(const json& j) {
  if (!j.is_array()) fail("templates", "must be an array");
  std::vector<QuestionTemplate> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = "templates[" + std::to_string(i) + "]";
    check_keys(j[i], w, {"id", "qtype", "row_index", "pattern"});
    QuestionTemplate t;
    t.id = get<std::string>(j[i], "id", w);
    const auto qtype = parse_question_type(get<std::string>(j[i], "qtype", w));
    if (!qtype) fail(w, "qtype must be 'yes_no' or 'wh'");
    t.qtype = *qtype;
    t.row_index = get<int>(j[i], "row_index", w);
    t.pattern = get<std::string>(j[i], "pattern", w);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

RunConfig parse_config(const json& j, const fs::path& base_dir) {
  check_keys(j, "config",
             {"run_id", "output_dir", "backends", "analyzers", "analyzer", "attributes", "settings", "repeats",
              "parallelism", "max_failure_fraction", "templates", "mixed_rows", "drop_refusals",
              "refusal_patterns"});
  const fs::path base = fs::absolute(base_dir);
  RunConfig c;

  c.run_id = get<std::string>(j, "run_id", "config");
  try {
    validate_backend_id(c.run_id);
  } catch (const ConfigError&) {
    fail("run_id", "'" + c.run_id + "' must be a non-empty name using only [A-Za-z0-9._-]");
  }
  c.output_dir = resolve(base, get<std::string>(j, "output_dir", "config", std::string("runs")));

  const auto backends = j.find("backends");
  if (backends == j.end() || !backends->is_array() || backends->empty()) {
    fail("backends", "at least one backend is required");
  }
  std::set<std::string> backend_ids;
  for (std::size_t i = 0; i < backends->size(); ++i) {
    auto b = parse_backend((*backends)[i], base, "backends[" + std::to_string(i) + "]");
    if (!backend_ids.insert(b.backend_id).second) fail("backends", "duplicate backend id '" + b.backend_id + "'");
    c.backends.push_back(std::move(b));
  }

  if (const auto it = j.find("analyzers"); it != j.end()) {
    if (!it->is_array()) fail("analyzers", "must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      auto a = parse_analyzer((*it)[i], base, "analyzers[" + std::to_string(i) + "]");
      for (const auto& prev : c.analyzers) {
        if (prev.analyzer_id == a.analyzer_id) fail("analyzers", "duplicate analyzer id '" + a.analyzer_id + "'");
      }
      c.analyzers.push_back(std::move(a));
    }
  }
  if (std::none_of(c.analyzers.begin(), c.analyzers.end(),
                   [](const auto& a) { return a.analyzer_id == "vader"; })) {
    c.analyzers.insert(c.analyzers.begin(), builtin_vader());
  }
  c.analyzer = get<std::string>(j, "analyzer", "config", std::string("vader"));
  c.analyzer_descriptor(c.analyzer);

  const auto attrs = j.find("attributes");
  if (attrs == j.end() || !attrs->is_object() || attrs->empty()) {
    fail("attributes", "at least one attribute is required");
  }
  for (const auto& [name, _] : attrs->items()) {
    if (!parse_attribute(name)) fail("attributes", "unknown attribute '" + name + "'");
  }
  for (AttributeKind kind : kAllAttributes) {
    const auto it = attrs->find(std::string(to_string(kind)));
    if (it == attrs->end()) continue;
    const std::string where = "attributes." + std::string(to_string(kind));
    check_keys(*it, where, {"reference", "roster"});
    AttributeSpec spec;
    spec.kind = kind;
    spec.reference = resolve(base, get<std::string>(*it, "reference", where));
    spec.roster = it->contains("roster") ? parse_roster(kind, (*it)["roster"], where + ".roster")
                                         : default_roster(kind);
    if (spec.roster.empty()) fail(where, "roster must not be empty");
    c.attributes.push_back(std::move(spec));
  }

  const auto settings = j.find("settings");
  if (settings == j.end()) {
    c.settings.assign(std::begin(kAllSettings), std::end(kAllSettings));
  } else {
    if (!settings->is_array() || settings->empty()) fail("settings", "at least one setting is required");
    std::set<QuestionTypeSetting> chosen;
    for (const auto& s : *settings) {
      const auto parsed = s.is_string() ? parse_setting(s.get<std::string>()) : std::nullopt;
      if (!parsed) fail("settings", "expected yes_no_only, wh_only or mixed, got " + s.dump());
      chosen.insert(*parsed);
    }
    for (auto s : kAllSettings) {
      if (chosen.contains(s)) c.settings.push_back(s);
    }
  }

  c.repeats = get<int>(j, "repeats", "config", kDefaultRepeats);
  if (c.repeats < 1) fail("repeats", "must be >= 1");
  const auto parallelism = get<std::int64_t>(j, "parallelism", "config", 4);
  if (parallelism < 1 || parallelism > 1024) fail("parallelism", "must lie in 1..1024");
  c.parallelism = static_cast<std::size_t>(parallelism);
  c.max_failure_fraction = get<double>(j, "max_failure_fraction", "config", 0.0);
  if (!(c.max_failure_fraction >= 0 && c.max_failure_fraction <= 1)) {
    fail("max_failure_fraction", "must lie in [0, 1]");
  }

  c.templates = j.contains("templates") ? parse_templates(j["templates"]) : canonical_templates();
  if (const auto it = j.find("mixed_rows"); it != j.end()) {
    if (!it->is_array() || it->size() != kTemplatesPerSetting) fail("mixed_rows", "must list six row numbers");
    for (std::size_t i = 0; i < kTemplatesPerSetting; ++i) {
      if (!(*it)[i].is_number_integer()) fail("mixed_rows", "entries must be integers");
      c.mixed_rows[i] = (*it)[i].get<int>();
    }
  }
  (void)c.catalog();  // validates templates and mixed rows

  c.drop_refusals = get<bool>(j, "drop_refusals", "config", false);
  if (const auto it = j.find("refusal_patterns"); it != j.end()) {
    if (!it->is_array()) fail("refusal_patterns", "must be an array of strings");
    for (const auto& p : *it) {
      if (!p.is_string()) fail("refusal_patterns", "must be an array of strings");
      c.refusal_patterns.push_back(p.get<std::string>());
    }
  } else {
    c.refusal_patterns = default_refusal_patterns();
  }
  for (const auto& p : c.refusal_patterns) {
    try {
      std::regex re(p, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      fail("refusal_patterns", "invalid pattern '" + p + "': " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j, fs::absolute(path).parent_path());
}

nlohmann::ordered_json config_snapshot(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["run_id"] = c.run_id;
  j["backends"] = ojson::array();
  for (const auto& b : c.backends) j["backends"].push_back(backend_to_json(b));
  j["analyzers"] = ojson::array();
  for (const auto& a : c.analyzers) j["analyzers"].push_back(analyzer_to_json(a));
  j["analyzer"] = c.analyzer;
  nlohmann::ordered_json attrs = nlohmann::ordered_json::object();
  for (const auto& a : c.attributes) {
    attrs[std::string(to_string(a.kind))] = {{"reference", a.reference.string()}, {"roster", roster_to_json(a.roster)}};
  }
  j["attributes"] = attrs;
  j["settings"] = ojson::array();
  for (auto s : c.settings) j["settings"].push_back(std::string(to_string(s)));
  j["repeats"] = c.repeats;
  j["parallelism"] = c.parallelism;
  j["max_failure_fraction"] = c.max_failure_fraction;
  j["templates"] = ojson::array();
  for (const auto& t : c.templates) {
    j["templates"].push_back(
        {{"id", t.id}, {"qtype", std::string(to_string(t.qtype))}, {"row_index", t.row_index}, {"pattern", t.pattern}});
  }
  j["mixed_rows"] = c.mixed_rows;
  j["drop_refusals"] = c.drop_refusals;
  j["refusal_patterns"] = c.refusal_patterns;
  return j;
}

ConfigCheck check_config_inputs(const RunConfig& c) {
  ConfigCheck out;
  auto& problems = out.errors;
  try {
    (void)make_analyzer(c.analyzer_descriptor(c.analyzer));
  } catch (const std::exception& e) {
    problems.push_back("analyzer " + c.analyzer + ": " + e.what());
  }
  for (const auto& b : c.backends) {
    if (b.kind == BackendKind::replay && !fs::exists(b.fixture)) {
      problems.push_back("backend " + b.backend_id + ": replay fixture not found: " + b.fixture.string());
    }
  }
  for (const auto& a : c.attributes) {
    const std::string name(to_string(a.kind));
    try {
      const auto ref = load_reference(a.kind, a.reference, a.roster);
      const auto cov = validate_coverage(ref, a.roster);
      for (const auto& [from, to] : cov.missing) {
 out.warnings.push_back("reference " + name + ": no value for " + from + "->" + to);
      }
      for (const auto& [from, to] : cov.unexpected) {
 out.warnings.push_back("reference " + name + ": unexpected value for " + from + "->" + to);
      }
    } catch (const std::exception& e) {
      problems.push_back("reference " + name + ": " + e.what());
    }
  }
  return out;
}

}  // namespace igs
