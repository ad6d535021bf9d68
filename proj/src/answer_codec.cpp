#include "ie/answer_codec.hpp"

#include <algorithm>

#include "ie/errors.hpp"
#include "ie/text.hpp"

namespace ie {

namespace {

enum class TokenKind { sent, clue, raw_marker, text };

struct Token {
  TokenKind kind;
  std::size_t position;
  std::string payload;  // clue name, free text, or sentence digits
  int sent_id = 0;
};

bool is_clue_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; }

// Length of the token starting at s[i] (which is '['), or 0 when s[i] starts no token.
std::size_t match_token(std::string_view s, std::size_t i, Token& out) {
  auto rest = s.substr(i);
  if (rest.starts_with("[SENT")) {
    std::size_t j = 5;
    while (j < rest.size() && rest[j] >= '0' && rest[j] <= '9') ++j;
    if (j > 5 && j < rest.size() && rest[j] == ']') {
      out = {TokenKind::sent, i, std::string(rest.substr(5, j - 5))};
      return j + 1;
    }
    return 0;
  }
  if (rest.starts_with("[text]")) {
    out = {TokenKind::raw_marker, i, {}};
    return 6;
  }
  std::size_t j = 1;
  while (j < rest.size() && is_clue_char(rest[j])) ++j;
  if (j > 1 && j + 1 < rest.size() && rest[j] == ']' && rest[j + 1] == ':') {
    out = {TokenKind::clue, i, std::string(rest.substr(1, j - 1))};
    return j + 2;
  }
  return 0;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t text_start = 0;
  auto flush_text = [&](std::size_t end) {
    auto raw = s.substr(text_start, end - text_start);
    auto trimmed = text::trim(raw);
    if (!trimmed.empty())
      tokens.push_back({TokenKind::text, text_start + static_cast<std::size_t>(trimmed.data() - raw.data()),
                        std::string(trimmed)});
  };
  for (std::size_t i = 0; i < s.size();) {
    Token t;
    std::size_t len = s[i] == '[' ? match_token(s, i, t) : 0;
    if (len == 0) {
      ++i;
      continue;
    }
    flush_text(i);
    tokens.push_back(std::move(t));
    i += len;
    text_start = i;
  }
  flush_text(s.size());
  return tokens;
}

bool looks_like_bare_clue(std::string_view s) {
  if (s.empty() || s[0] != '[') return false;
  std::size_t j = 1;
  while (j < s.size() && is_clue_char(s[j])) ++j;
  return j > 1 && j < s.size() && s[j] == ']';
}

void check_component(std::string_view what, std::string_view s) {
  if (s.empty()) throw VariantMismatch(std::string(what) + " is empty");
  if (!text::is_collapsed(s)) throw VariantMismatch(std::string(what) + " '" + std::string(s) + "' has irregular whitespace");
  if (contains_reserved_token(s))
    throw VariantMismatch(std::string(what) + " '" + std::string(s) + "' contains a reserved answer token");
}

std::string sanitize(std::string_view s, const EncodeOptions& options) {
  if (!options.replace_reserved_brackets || !contains_reserved_token(s)) return std::string(s);
  std::string out;
  for (char c : s) {
    if (c == '[')
      out += "\xEF\xBC\xBB";  // U+FF3B fullwidth left square bracket
    else
      out += c;
  }
  return out;
}

}  // namespace

std::string to_string(const AnswerFormat& f) {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += '+';
    s += name;
  };
  add(f.compound, "comp");
  add(f.sent, "sent");
  add(f.raw, "raw");
  return s.empty() ? "plain" : s;
}

bool contains_reserved_token(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '[') continue;
    if (s.substr(i).starts_with("[SENT") || s.substr(i).starts_with("[text]")) return true;
    Token t;
    if (match_token(s, i, t)) return true;
  }
  return false;
}

std::string encode(const AnswerRecord& record, const AnswerFormat& format, const EncodeOptions& options) {
  if (record.is_na) {
    if (!record.items.empty()) throw VariantMismatch("N/A record carries items");
    return std::string(kNotAvailable);
  }
  if (record.items.empty()) throw VariantMismatch("answer record has no items");
  if (!format.compound && record.items.size() != 1)
    throw VariantMismatch("non-compound answer must have exactly one item");

  std::string out;
  for (const auto& item : record.items) {
    if (!is_valid_clue(item.clue)) throw VariantMismatch("invalid clue '" + item.clue + "'");
    if (format.sent != item.sent_id.has_value())
      throw VariantMismatch(format.sent ? "item '" + item.clue + "' lacks a sentence id"
                                        : "item '" + item.clue + "' has a sentence id in a non-sent format");
    if (format.raw != item.raw_text.has_value())
      throw VariantMismatch(format.raw ? "item '" + item.clue + "' lacks raw text"
                                       : "item '" + item.clue + "' has raw text in a non-raw format");
    auto value = sanitize(item.value, options);
    check_component("value", value);

    if (!out.empty()) out += ' ';
    if (item.sent_id) {
      if (*item.sent_id < 1) throw VariantMismatch("sentence id must be positive");
      out += "[SENT" + std::to_string(*item.sent_id) + "] ";
    }
    out += '[';
    out += item.clue;
    out += "]: ";
    out += value;
    if (item.raw_text) {
      auto raw = sanitize(*item.raw_text, options);
      check_component("raw text", raw);
      if (raw.front() == ':') throw VariantMismatch("raw text cannot start with ':'");
      out += " [text] ";
      out += raw;
    }
  }
  return out;
}

ParsedAnswer parse(std::string_view answer, const std::set<std::string>& expected_clues, const AnswerFormat& format) {
  const std::string s = text::collapse_whitespace(answer);
  if (s == kNotAvailable) return AnswerRecord::not_available();
  if (s.empty()) return MalformedAnswer{0, "empty answer"};

  const auto tokens = tokenize(s);
  AnswerRecord record;
  std::size_t i = 0;
  auto fail = [&](std::size_t pos, std::string reason) -> ParsedAnswer { return MalformedAnswer{pos, std::move(reason)}; };

  while (i < tokens.size()) {
    AnswerItem item;
    const Token& head = tokens[i];
    switch (head.kind) {
      case TokenKind::raw_marker:
        return fail(head.position, "[text] without a preceding item");
      case TokenKind::text:
        if (looks_like_bare_clue(head.payload)) return fail(head.position, "missing colon after clue");
        return fail(head.position, "unexpected text before clue");
      case TokenKind::sent: {
        if (!format.sent) return fail(head.position, "sentence token in a non-sent format");
        if (head.payload.size() > 9) return fail(head.position, "sentence id too large");
        item.sent_id = std::stoi(head.payload);
        if (*item.sent_id < 1) return fail(head.position, "sentence id must be positive");
        ++i;
        if (i >= tokens.size() || tokens[i].kind != TokenKind::clue)
          return fail(head.position, "sentence token not followed by a clue");
        break;
      }
      case TokenKind::clue:
        if (format.sent) return fail(head.position, "missing sentence id before clue");
        break;
    }

    const Token& clue = tokens[i];
    if (!expected_clues.contains(clue.payload)) return fail(clue.position, "unknown clue '" + clue.payload + "'");
    item.clue = clue.payload;
    ++i;
    if (i >= tokens.size() || tokens[i].kind != TokenKind::text)
      return fail(clue.position, "empty value for clue '" + clue.payload + "'");
    item.value = tokens[i].payload;
    ++i;

    if (i < tokens.size() && tokens[i].kind == TokenKind::raw_marker) {
      const Token& marker = tokens[i];
      if (!format.raw) return fail(marker.position, "[text] in a non-raw format");
      ++i;
      if (i >= tokens.size() || tokens[i].kind != TokenKind::text) return fail(marker.position, "dangling [text]");
      if (tokens[i].payload.front() == ':') return fail(tokens[i].position, "unexpected colon after [text]");
      item.raw_text = tokens[i].payload;
      ++i;
    } else if (format.raw) {
      return fail(clue.position, "missing [text] part for clue '" + item.clue + "'");
    }
    record.items.push_back(std::move(item));
  }

  if (!format.compound && record.items.size() > 1)
    return fail(tokens.empty() ? 0 : tokens.back().position, "several items in a non-compound answer");
  return record;
}

CompoundSplit split_compound(const AnswerRecord& record, const std::vector<const FieldSchema*>& members) {
  std::map<std::string, std::string> field_by_clue;
  for (const auto* f : members) field_by_clue[f->clue] = f->name;

  CompoundSplit split;
  for (const auto& item : record.items) {
    auto it = field_by_clue.find(item.clue);
    if (it == field_by_clue.end()) continue;
    if (!split.by_field.emplace(it->second, item).second) {
      if (std::find(split.duplicates.begin(), split.duplicates.end(), it->second) == split.duplicates.end())
        split.duplicates.push_back(it->second);
    }
  }
  return split;
}

CompoundSplit split_compound(const AnswerRecord& record, const CompoundGroup& group, const DocumentTypeSchema& schema) {
  std::vector<const FieldSchema*> members;
  for (const auto& m : group.members)
    if (const auto* f = schema.find_field(m)) members.push_back(f);
  return split_compound(record, members);
}

}  // namespace ie
