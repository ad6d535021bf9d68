#pragma once

// Bracketed answer grammar:
//
//   answer   := "N/A" | item (" " item)*
//   item     := [sent " "] clue ":" " " value [" " rawpart]
//   sent     := "[SENT" digits "]"
//   clue     := "[" cluename "]"
//   rawpart  := "[text] " rawtext
//
// value and rawtext run up to the next "[SENTn]", "[cluename]:" or "[text]"
// token. There is no escaping; encode() rejects values that contain tokens.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ie/schema.hpp"

namespace ie {

inline constexpr std::string_view kNotAvailable = "N/A";

/// Which of the eight answer layouts is in use.
struct AnswerFormat {
  bool compound = false;
  bool sent = false;
  bool raw = false;

  bool operator==(const AnswerFormat&) const = default;
};

std::string to_string(const AnswerFormat& f);

struct AnswerItem {
  std::string clue;
  std::string value;  // canonical form
  std::optional<int> sent_id;
  std::optional<std::string> raw_text;

  bool operator==(const AnswerItem&) const = default;
};

struct AnswerRecord {
  std::vector<AnswerItem> items;
  bool is_na = false;

  static AnswerRecord not_available() { return {{}, true}; }
  bool operator==(const AnswerRecord&) const = default;
};

struct MalformedAnswer {
  std::size_t position = 0;  // byte offset into the whitespace-collapsed answer
  std::string reason;

  bool operator==(const MalformedAnswer&) const = default;
};

using ParsedAnswer = std::variant<AnswerRecord, MalformedAnswer>;

struct EncodeOptions {
  /// Replace '[' in offending values with U+FF3B instead of rejecting them.
  bool replace_reserved_brackets = false;
};

/// Throws VariantMismatch when items do not carry exactly the components the
/// format requires, or when a value cannot round-trip.
std::string encode(const AnswerRecord& record, const AnswerFormat& format, const EncodeOptions& options = {});

/// Never throws on malformed input; returns MalformedAnswer instead.
ParsedAnswer parse(std::string_view answer, const std::set<std::string>& expected_clues, const AnswerFormat& format);

/// True when the text contains a grammar token ("[SENT", "[text]" or "[name]:").
bool contains_reserved_token(std::string_view s);

struct CompoundSplit {
  std::map<std::string, AnswerItem> by_field;  // members with no item are absent
  std::vector<std::string> duplicates;         // fields whose clue appeared more than once
};

/// Map record items onto the group's member fields; the first occurrence of a
/// repeated clue wins and the field is listed in `duplicates`.
CompoundSplit split_compound(const AnswerRecord& record, const CompoundGroup& group, const DocumentTypeSchema& schema);
CompoundSplit split_compound(const AnswerRecord& record, const std::vector<const FieldSchema*>& members);

}  // namespace ie
