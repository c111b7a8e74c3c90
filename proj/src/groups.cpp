#include "igs/groups.hpp"

#include <set>

#include "igs/error.hpp"

namespace igs {

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::nationalities: return "nationalities";
    case AttributeKind::religions: return "religions";
    case AttributeKind::races_ethnicities: return "races_ethnicities";
  }
  return "unknown";
}

std::optional<AttributeKind> parse_attribute(std::string_view name) {
  for (auto kind : kAllAttributes) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

Group make(AttributeKind kind, std::string code, std::string base, std::string plural = {},
           bool can_be_from = true) {
  return Group{std::move(code), std::move(base), std::move(plural), can_be_from, kind};
}

}  // namespace

Roster default_roster(AttributeKind kind) {
  using K = AttributeKind;
  switch (kind) {
    case K::nationalities:
      return {make(kind, "CN", "Chinese"),  make(kind, "FR", "French"),
              make(kind, "GB", "British"),  make(kind, "KR", "Korean"),
              make(kind, "TH", "Thai"),     make(kind, "US", "American"),
              make(kind, "JP", "Japanese", {}, false), make(kind, "RU", "Russian", {}, false)};
    case K::religions:
      return {make(kind, "ATH", "atheist", "atheists"),
              make(kind, "CTH", "Catholic", "Catholics"),
              make(kind, "EVG", "Evangelical", "Evangelicals"),
              make(kind, "JEW", "Jew", "Jews"),
              make(kind, "MPR", "Mainline Protestant", "Mainline Protestants"),
              make(kind, "LDS", "Mormon", "Mormons"),
              make(kind, "MUS", "Muslim", "Muslims", false)};
    case K::races_ethnicities:
      return {make(kind, "AS", "Asian"), make(kind, "BL", "Black"),
              make(kind, "SP", "Hispanic"), make(kind, "WH", "White")};
  }
  return {};
}

std::string surface_form(const Group& group) {
  if (group.attribute == AttributeKind::religions) return group.plural_surface;
  return group.base_surface + " people";
}

void validate_roster(AttributeKind kind, const Roster& roster) {
  std::set<std::string> seen;
  const auto bad_text = [](const std::string& s) {
    return s.empty() || s.find_first_of("{}") != std::string::npos;
  };
  for (const auto& g : roster) {
    if (g.code.empty()) throw ConfigError("group with empty code in " + std::string(to_string(kind)));
    if (g.attribute != kind) {
      throw ConfigError("group " + g.code + " belongs to " + std::string(to_string(g.attribute)) +
                        ", not " + std::string(to_string(kind)));
    }
    if (!seen.insert(g.code).second) throw ConfigError("duplicate group code " + g.code);
    if (bad_text(g.base_surface)) throw ConfigError("group " + g.code + " has an invalid base_surface");
    if (kind == AttributeKind::religions && bad_text(g.plural_surface)) {
      throw ConfigError("religion group " + g.code + " needs a plural_surface");
    }
  }
}

const Group* find_group(const Roster& roster, std::string_view code) {
  for (const auto& g : roster) {
    if (g.code == code) return &g;
  }
  return nullptr;
}

}  // namespace igs
