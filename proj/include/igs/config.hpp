#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "igs/gateway.hpp"
#include "igs/groups.hpp"
#include "igs/prompts.hpp"
#include "igs/sentiment.hpp"

namespace igs {

struct AttributeSpec {
  AttributeKind kind = AttributeKind::nationalities;
  Roster roster;
  std::filesystem::path reference;
};

// Everything one run needs. Paths are absolute after loading.
struct RunConfig {
  std::string run_id;
  std::filesystem::path output_dir;
  std::vector<BackendDescriptor> backends;
  std::vector<AnalyzerDescriptor> analyzers;  // always contains the builtin "vader"
  std::string analyzer = "vader";             // active analyzer id
  std::vector<AttributeSpec> attributes;      // canonical attribute order
  std::vector<QuestionTypeSetting> settings;  // canonical setting order
  int repeats = kDefaultRepeats;
  std::size_t parallelism = 4;
  double max_failure_fraction = 0.0;
  std::vector<QuestionTemplate> templates;  // the twelve in use
  std::array<int, kTemplatesPerSetting> mixed_rows = {1, 3, 5, 7, 9, 11};
  bool drop_refusals = false;
  std::vector<std::string> refusal_patterns;

  TemplateCatalog catalog() const { return TemplateCatalog(templates, mixed_rows); }
  const AnalyzerDescriptor& analyzer_descriptor(const std::string& id) const;
  const AttributeSpec* attribute(AttributeKind kind) const;
};

// Default case-insensitive patterns for the optional refusal filter.
std::vector<std::string> default_refusal_patterns();

// Directory holding the bundled lexicons.
std::filesystem::path default_data_dir();

// Parses a JSON run configuration. Relative paths resolve against base_dir.
// Unknown keys, bad values and structural problems throw ConfigError.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Normalized form (absolute paths, defaults filled in). parse_config of the
// snapshot yields the same configuration. output_dir is left out so a run
// directory can be moved.
nlohmann::ordered_json config_snapshot(const RunConfig& config);

// Checks that would otherwise fail mid-run: analyzer loadable, replay
// fixtures and references readable. Reference cells missing for a roster pair
// only shrink n, so coverage gaps are warnings.
struct ConfigCheck {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};
ConfigCheck check_config_inputs(const RunConfig& config);

}  // namespace igs
