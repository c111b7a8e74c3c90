#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "igs/groups.hpp"

namespace igs {

inline constexpr std::string_view kSystemText = "Always answer in English.";
inline constexpr std::string_view kUsPrefix = "In the U.S., ";
inline constexpr std::string_view kFromSlot = "{G_from}";
inline constexpr std::string_view kToSlot = "{G_to}";
inline constexpr int kDefaultRepeats = 3;
inline constexpr std::size_t kTemplatesPerSetting = 6;

enum class QuestionType { yes_no, wh };
enum class QuestionTypeSetting { yes_no_only, wh_only, mixed };

inline constexpr QuestionTypeSetting kAllSettings[] = {
    QuestionTypeSetting::yes_no_only, QuestionTypeSetting::wh_only, QuestionTypeSetting::mixed};

std::string_view to_string(QuestionType type);
std::string_view to_string(QuestionTypeSetting setting);
std::optional<QuestionType> parse_question_type(std::string_view name);
std::optional<QuestionTypeSetting> parse_setting(std::string_view name);

struct QuestionTemplate {
  std::string id;
  QuestionType qtype = QuestionType::yes_no;
  int row_index = 0;  // 1..12, position in the canonical table from the top
  std::string pattern;

  friend bool operator==(const QuestionTemplate&, const QuestionTemplate&) = default;
};

// The twelve canonical questions (six yes-no, then six wh).
std::vector<QuestionTemplate> canonical_templates();

// A validated set of 12 templates plus the row selection used for the mixed
// setting. The default mixed selection takes rows 1,3,5,7,9,11.
class TemplateCatalog {
 public:
  TemplateCatalog();
  explicit TemplateCatalog(std::vector<QuestionTemplate> templates,
                           std::array<int, kTemplatesPerSetting> mixed_rows = {1, 3, 5, 7, 9, 11});

  const std::vector<QuestionTemplate>& all() const { return templates_; }
  const std::array<int, kTemplatesPerSetting>& mixed_rows() const { return mixed_rows_; }
  const QuestionTemplate* find(std::string_view id) const;

  std::vector<QuestionTemplate> select(QuestionTypeSetting setting) const;

 private:
  std::vector<QuestionTemplate> templates_;
  std::array<int, kTemplatesPerSetting> mixed_rows_;
};

std::vector<QuestionTemplate> select_templates(QuestionTypeSetting setting,
                                               const TemplateCatalog& catalog = TemplateCatalog{});

struct Prompt {
  std::string system_text;
  std::string user_text;
  Group from;
  Group to;
  std::string template_id;
  int repeat_index = 1;

  AttributeKind attribute() const { return from.attribute; }
  friend bool operator==(const Prompt&, const Prompt&) = default;
};

// Substitutes surface forms into the pattern. "{G_from}'s" becomes a
// possessive ("Chinese people's", "Catholics'"). Attributes that need the
// U.S. prefix get "In the U.S., " and a lowercased first letter.
// Throws SlotError if a slot is missing or repeated, std::invalid_argument if
// the pair is not a valid (from, to) pair.
std::string render_question(const QuestionTemplate& tmpl, const Group& from, const Group& to);

// Ordered (from, to) pairs, from-major in roster order, skipping self pairs
// and object-only sources.
std::vector<std::pair<Group, Group>> enumerate_pairs(AttributeKind kind, const Roster& roster);

// pairs x templates x repeats, in that nesting order.
std::vector<Prompt> build_plan(AttributeKind kind, const Roster& roster, QuestionTypeSetting setting,
                               int repeats = kDefaultRepeats,
                               const TemplateCatalog& catalog = TemplateCatalog{});

}  // namespace igs
