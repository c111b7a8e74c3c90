#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace igs {

enum class AttributeKind { nationalities, religions, races_ethnicities };

inline constexpr AttributeKind kAllAttributes[] = {
    AttributeKind::nationalities, AttributeKind::religions, AttributeKind::races_ethnicities};

std::string_view to_string(AttributeKind kind);
std::optional<AttributeKind> parse_attribute(std::string_view name);

struct Attribute {
  AttributeKind kind;
  // Religion and race polls were fielded in the U.S.; questions about those
  // attributes carry an "In the U.S., " prefix.
  bool prefix_required;

  static Attribute of(AttributeKind kind) {
    return {kind, kind != AttributeKind::nationalities};
  }
};

struct Group {
  std::string code;
  std::string base_surface;
  // Only used for religions, where the surface form is the plural noun.
  std::string plural_surface;
  bool can_be_from = true;
  AttributeKind attribute = AttributeKind::nationalities;

  friend bool operator==(const Group&, const Group&) = default;
};

using Roster = std::vector<Group>;

// Default rosters. Japanese, Russian and Muslim are object-only groups.
Roster default_roster(AttributeKind kind);

// Text substituted into question slots: "<base> people" for nationalities
// and races/ethnicities, the plural noun for religions.
std::string surface_form(const Group& group);

// Checks code uniqueness, attribute consistency and non-empty surfaces.
// Throws ConfigError.
void validate_roster(AttributeKind kind, const Roster& roster);

const Group* find_group(const Roster& roster, std::string_view code);

}  // namespace igs
