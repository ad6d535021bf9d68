#pragma once

// Canonical syntaxes:
//   date          YYYY-MM-DD (ISO 8601, a real calendar day)
//   decimal_area  (0|[1-9][0-9]*)(\.[0-9]*[1-9])?   '.' separator, no trailing zeros
//   id_number     [0-9A-Z]+
//   state_code    [A-Z]{2}
//   categorical   one of the schema vocabulary entries, or a lowercase
//                 [a-z0-9_] token when the field declares no vocabulary
//   free_text     trimmed, whitespace-collapsed, non-empty

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ie/schema.hpp"

namespace ie {

struct CanonicalValue {
  std::string canonical;
  std::optional<std::string> raw;
  CanonicalType type = CanonicalType::free_text;

  bool operator==(const CanonicalValue&) const = default;
};

/// Month names (lowercase) mapped to month numbers, checked after case folding.
using MonthTable = std::vector<std::pair<std::string, int>>;

const MonthTable& portuguese_months();
const MonthTable& english_months();

struct NormalizationOptions {
  MonthTable months = portuguese_months();
  /// Read "1.234,56" as 1234.56. Off by default: areas use a decimal comma.
  bool thousands_separators = false;
  std::vector<std::string> categories;
};

CanonicalValue normalize(std::string_view raw, CanonicalType type, const NormalizationOptions& options = {});

/// Options derived from a field: its vocabulary plus the given month table.
NormalizationOptions options_for(const FieldSchema& field, const MonthTable& months = portuguese_months());

bool validate(std::string_view canonical, CanonicalType type, const std::vector<std::string>& categories = {});

}  // namespace ie
