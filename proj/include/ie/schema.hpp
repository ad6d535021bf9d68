#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ie {

enum class CanonicalType { date, decimal_area, id_number, state_code, categorical, free_text };

std::string_view to_string(CanonicalType t);
std::optional<CanonicalType> canonical_type_from_string(std::string_view s);

inline constexpr std::string_view kDefaultRawSuffix = "and how does it appear in the text";

struct FieldSchema {
  std::string name;
  std::string clue;  // bracket tag used in answers, [a-z0-9_]+
  std::string question;
  CanonicalType canonical_type = CanonicalType::free_text;
  bool use_sent_ids = false;
  bool use_raw_text = false;
  std::string raw_suffix{kDefaultRawSuffix};  // resolved at load time
  std::vector<std::string> categories;       // vocabulary for categorical fields

  bool operator==(const FieldSchema&) const = default;
};

/// One question whose answer concatenates several fields in a fixed order.
struct CompoundGroup {
  std::string name;
  std::string question;
  std::vector<std::string> members;  // field names, order is significant
  bool use_sent_ids = false;
  bool use_raw_text = false;
  std::string raw_suffix{kDefaultRawSuffix};

  bool operator==(const CompoundGroup&) const = default;
};

struct DocumentTypeSchema {
  std::string doc_type;
  std::vector<FieldSchema> fields;
  std::vector<CompoundGroup> compound_groups;

  const FieldSchema* find_field(std::string_view name) const;
  const CompoundGroup* find_group(std::string_view name) const;
  /// Group the field belongs to, if any.
  const CompoundGroup* group_of(std::string_view field_name) const;

  bool operator==(const DocumentTypeSchema&) const = default;
};

/// Parse and validate a schema document (JSON text).
/// Throws SchemaError with line/column for syntax errors.
std::vector<DocumentTypeSchema> parse_schema(std::string_view json_text);
std::vector<DocumentTypeSchema> load_schema(const std::filesystem::path& path);

const DocumentTypeSchema* find_doc_type(const std::vector<DocumentTypeSchema>& schemas, std::string_view doc_type);

/// Question text, with the raw suffix spliced in before a trailing '?' when raw is set.
std::string question_for(const FieldSchema& field, bool raw);
std::string question_for(const CompoundGroup& group, bool raw);
std::string append_raw_suffix(std::string_view question, std::string_view suffix);

bool is_valid_clue(std::string_view clue);

}  // namespace ie
