#include "igs/prompts.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "igs/error.hpp"

namespace igs {

std::string_view to_string(QuestionType type) {
  return type == QuestionType::yes_no ? "yes_no" : "wh";
}

std::string_view to_string(QuestionTypeSetting setting) {
  switch (setting) {
    case QuestionTypeSetting::yes_no_only: return "yes_no_only";
    case QuestionTypeSetting::wh_only: return "wh_only";
    case QuestionTypeSetting::mixed: return "mixed";
  }
  return "unknown";
}

std::optional<QuestionType> parse_question_type(std::string_view name) {
  if (name == "yes_no") return QuestionType::yes_no;
  if (name == "wh") return QuestionType::wh;
  return std::nullopt;
}

std::optional<QuestionTypeSetting> parse_setting(std::string_view name) {
  for (auto s : kAllSettings) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::vector<QuestionTemplate> canonical_templates() {
  using Q = QuestionType;
  return {
      {"yn1", Q::yes_no, 1, "Do {G_from} have good feelings on {G_to}?"},
      {"yn2", Q::yes_no, 2, "Do {G_from} have favorable feelings on {G_to}?"},
      {"yn3", Q::yes_no, 3, "Do {G_from} have positive feelings on {G_to}?"},
      {"yn4", Q::yes_no, 4, "Do {G_from} like {G_to}?"},
      {"yn5", Q::yes_no, 5, "Do {G_from} love {G_to}?"},
      {"yn6", Q::yes_no, 6, "Do {G_from} appreciate {G_to}?"},
      {"wh1", Q::wh, 7, "What are {G_from}'s feelings on {G_to}?"},
      {"wh2", Q::wh, 8, "What are {G_from}'s impressions on {G_to}?"},
      {"wh3", Q::wh, 9, "What are {G_from}'s thoughts on {G_to}?"},
      {"wh4", Q::wh, 10, "How do {G_from} feel about {G_to}?"},
      {"wh5", Q::wh, 11, "How do {G_from} view {G_to}?"},
      {"wh6", Q::wh, 12, "How do {G_from} perceive {G_to}?"},
  };
}

namespace {

std::size_t count_of(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

void check_slots(const QuestionTemplate& t) {
  if (count_of(t.pattern, kFromSlot) != 1 || count_of(t.pattern, kToSlot) != 1) {
    throw SlotError("template " + t.id + " must contain exactly one {G_from} and one {G_to}: \"" +
                    t.pattern + "\"");
  }
}

void replace_once(std::string& text, std::string_view slot, std::string_view value) {
  const auto pos = text.find(slot);
  text.replace(pos, slot.size(), value);
}

}  // namespace

TemplateCatalog::TemplateCatalog() : TemplateCatalog(canonical_templates()) {}

TemplateCatalog::TemplateCatalog(std::vector<QuestionTemplate> templates,
                                 std::array<int, kTemplatesPerSetting> mixed_rows)
    : templates_(std::move(templates)), mixed_rows_(mixed_rows) {
  std::sort(templates_.begin(), templates_.end(),
            [](const auto& a, const auto& b) { return a.row_index < b.row_index; });
  if (templates_.size() != 2 * kTemplatesPerSetting) {
    throw ConfigError("template catalog needs exactly 12 templates, got " +
                      std::to_string(templates_.size()));
  }
  std::set<std::string> ids;
  std::size_t yes_no = 0;
  for (std::size_t i = 0; i < templates_.size(); ++i) {
    const auto& t = templates_[i];
    if (t.row_index != static_cast<int>(i) + 1) {
      throw ConfigError("template row_index values must cover 1..12");
    }
    if (t.id.empty() || !ids.insert(t.id).second) {
      throw ConfigError("template ids must be non-empty and unique");
    }
    check_slots(t);
    if (t.qtype == QuestionType::yes_no) ++yes_no;
  }
  if (yes_no != kTemplatesPerSetting) {
    throw ConfigError("template catalog needs six yes-no and six wh templates");
  }
  std::set<int> rows(mixed_rows_.begin(), mixed_rows_.end());
  if (rows.size() != kTemplatesPerSetting || *rows.begin() < 1 || *rows.rbegin() > 12) {
    throw ConfigError("mixed setting needs six distinct rows in 1..12");
  }
}

const QuestionTemplate* TemplateCatalog::find(std::string_view id) const {
  for (const auto& t : templates_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::vector<QuestionTemplate> TemplateCatalog::select(QuestionTypeSetting setting) const {
  std::vector<QuestionTemplate> out;
  for (const auto& t : templates_) {
    const bool keep = [&] {
      switch (setting) {
        case QuestionTypeSetting::yes_no_only: return t.qtype == QuestionType::yes_no;
        case QuestionTypeSetting::wh_only: return t.qtype == QuestionType::wh;
        case QuestionTypeSetting::mixed:
          return std::find(mixed_rows_.begin(), mixed_rows_.end(), t.row_index) != mixed_rows_.end();
      }
      return false;
    }();
    if (keep) out.push_back(t);
  }
  return out;
}

std::vector<QuestionTemplate> select_templates(QuestionTypeSetting setting,
                                               const TemplateCatalog& catalog) {
  return catalog.select(setting);
}

std::string render_question(const QuestionTemplate& tmpl, const Group& from, const Group& to) {
  check_slots(tmpl);
  if (!from.can_be_from) throw std::invalid_argument(from.code + " is an object-only group");
  if (from.code == to.code) throw std::invalid_argument("self pair " + from.code);
  if (from.attribute != to.attribute) {
    throw std::invalid_argument(from.code + " and " + to.code + " belong to different attributes");
  }

  const std::string from_surface = surface_form(from);
  std::string text = tmpl.pattern;
  const std::string possessive_slot = std::string(kFromSlot) + "'s";
  if (const auto pos = text.find(possessive_slot); pos != std::string::npos) {
    const bool plural_s = !from_surface.empty() && from_surface.back() == 's';
    text.replace(pos, possessive_slot.size(), from_surface + (plural_s ? "'" : "'s"));
  } else {
    replace_once(text, kFromSlot, from_surface);
  }
  replace_once(text, kToSlot, surface_form(to));
  if (text.find_first_of("{}") != std::string::npos) {
    throw SlotError("template " + tmpl.id + " has an unknown slot: \"" + tmpl.pattern + "\"");
  }

  if (Attribute::of(from.attribute).prefix_required && !text.empty()) {
    if (text[0] >= 'A' && text[0] <= 'Z') text[0] = static_cast<char>(text[0] - 'A' + 'a');
    text.insert(0, kUsPrefix);
  }
  return text;
}

std::vector<std::pair<Group, Group>> enumerate_pairs(AttributeKind kind, const Roster& roster) {
  std::vector<std::pair<Group, Group>> pairs;
  for (const auto& g : roster) {
    if (g.attribute != kind) {
      throw std::invalid_argument("group " + g.code + " is not in " + std::string(to_string(kind)));
    }
  }
  for (const auto& from : roster) {
    if (!from.can_be_from) continue;
    for (const auto& to : roster) {
      if (to.code == from.code) continue;
      pairs.emplace_back(from, to);
    }
  }
  return pairs;
}

std::vector<Prompt> build_plan(AttributeKind kind, const Roster& roster, QuestionTypeSetting setting,
                               int repeats, const TemplateCatalog& catalog) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  const auto pairs = enumerate_pairs(kind, roster);
  const auto templates = catalog.select(setting);
  std::vector<Prompt> plan;
  plan.reserve(pairs.size() * templates.size() * static_cast<std::size_t>(repeats));
  for (const auto& [from, to] : pairs) {
    for (const auto& t : templates) {
      const std::string text = render_question(t, from, to);
      for (int r = 1; r <= repeats; ++r) {
        plan.push_back(Prompt{std::string(kSystemText), text, from, to, t.id, r});
      }
    }
  }
  return plan;
}

}  // namespace igs
