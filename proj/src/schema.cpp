#include "ie/schema.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ie/errors.hpp"

namespace ie {

using nlohmann::json;

namespace {

struct TypeName {
  CanonicalType type;
  std::string_view name;
};

constexpr TypeName kTypeNames[] = {
    {CanonicalType::date, "date"},
    {CanonicalType::decimal_area, "decimal_area"},
    {CanonicalType::id_number, "id_number"},
    {CanonicalType::state_code, "state_code"},
    {CanonicalType::categorical, "categorical"},
    {CanonicalType::free_text, "free_text"},
};

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

// Byte offset -> 1-based line/column.
std::pair<std::size_t, std::size_t> position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw SchemaError(where + ": unknown key '" + key + "'");
  }
}

std::string required_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw SchemaError(where + ": '" + key + "' must be a string");
  return it->get<std::string>();
}

bool optional_bool(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return false;
  if (!it->is_boolean()) throw SchemaError(where + ": '" + key + "' must be a boolean");
  return it->get<bool>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(where + ": '" + key + "' must be a string");
  return it->get<std::string>();
}

FieldSchema parse_field(const json& j, const std::string& where, const std::string& inherited_suffix) {
  check_keys(j, {"name", "clue", "question", "canonical_type", "sent", "raw", "raw_suffix", "categories"}, where);
  FieldSchema f;
  f.name = required_string(j, "name", where);
  if (!is_identifier(f.name)) throw SchemaError(where + ": field name '" + f.name + "' is not an identifier");
  f.clue = j.contains("clue") ? required_string(j, "clue", where) : f.name;
  if (!is_valid_clue(f.clue)) throw SchemaError(where + ": clue '" + f.clue + "' must match [a-z0-9_]+ and not be 'text'");
  f.question = required_string(j, "question", where);
  if (f.question.empty()) throw SchemaError(where + ": question is empty");
  auto type_name = j.contains("canonical_type") ? required_string(j, "canonical_type", where) : "free_text";
  auto type = canonical_type_from_string(type_name);
  if (!type) throw SchemaError(where + ": unknown canonical_type '" + type_name + "'");
  f.canonical_type = *type;
  f.use_sent_ids = optional_bool(j, "sent", where);
  f.use_raw_text = optional_bool(j, "raw", where);
  f.raw_suffix = optional_string(j, "raw_suffix", where).value_or(inherited_suffix);
  if (auto it = j.find("categories"); it != j.end()) {
    if (!it->is_array()) throw SchemaError(where + ": 'categories' must be an array");
    for (const auto& c : *it) {
      if (!c.is_string() || c.get<std::string>().empty())
        throw SchemaError(where + ": categories must be non-empty strings");
      f.categories.push_back(c.get<std::string>());
    }
  }
  return f;
}

CompoundGroup parse_group(const json& j, const std::string& where, const std::string& inherited_suffix) {
  check_keys(j, {"name", "question", "members", "sent", "raw", "raw_suffix"}, where);
  CompoundGroup g;
  g.name = required_string(j, "name", where);
  if (!is_identifier(g.name)) throw SchemaError(where + ": group name '" + g.name + "' is not an identifier");
  g.question = required_string(j, "question", where);
  if (g.question.empty()) throw SchemaError(where + ": question is empty");
  auto it = j.find("members");
  if (it == j.end() || !it->is_array()) throw SchemaError(where + ": 'members' must be an array");
  for (const auto& m : *it) {
    if (!m.is_string()) throw SchemaError(where + ": members must be field names");
    g.members.push_back(m.get<std::string>());
  }
  if (g.members.size() < 2) throw SchemaError(where + ": compound group '" + g.name + "' needs at least 2 members");
  g.use_sent_ids = optional_bool(j, "sent", where);
  g.use_raw_text = optional_bool(j, "raw", where);
  g.raw_suffix = optional_string(j, "raw_suffix", where).value_or(inherited_suffix);
  return g;
}

DocumentTypeSchema parse_doc_type(const json& j, const std::string& where, const std::string& inherited_suffix) {
  check_keys(j, {"doc_type", "fields", "compound_groups", "raw_suffix"}, where);
  DocumentTypeSchema schema;
  schema.doc_type = required_string(j, "doc_type", where);
  if (!is_identifier(schema.doc_type)) throw SchemaError(where + ": doc_type is not an identifier");
  auto suffix = optional_string(j, "raw_suffix", where).value_or(inherited_suffix);

  auto fields = j.find("fields");
  if (fields == j.end() || !fields->is_array() || fields->empty())
    throw SchemaError(where + ": 'fields' must be a non-empty array");
  std::set<std::string> names, clues;
  for (std::size_t i = 0; i < fields->size(); ++i) {
    auto f = parse_field((*fields)[i], where + ".fields[" + std::to_string(i) + "]", suffix);
    if (!names.insert(f.name).second) throw SchemaError(where + ": duplicate field name '" + f.name + "'");
    if (!clues.insert(f.clue).second)
      throw SchemaError(where + ": duplicate clue '" + f.clue + "' in doc type '" + schema.doc_type + "'");
    schema.fields.push_back(std::move(f));
  }

  if (auto groups = j.find("compound_groups"); groups != j.end()) {
    if (!groups->is_array()) throw SchemaError(where + ": 'compound_groups' must be an array");
    std::set<std::string> grouped;
    for (std::size_t i = 0; i < groups->size(); ++i) {
      auto gw = where + ".compound_groups[" + std::to_string(i) + "]";
      auto g = parse_group((*groups)[i], gw, suffix);
      if (!names.insert(g.name).second) throw SchemaError(gw + ": group name '" + g.name + "' collides with another name");
      for (const auto& m : g.members) {
        if (!schema.find_field(m)) throw SchemaError(gw + ": member '" + m + "' does not reference a field");
        if (!grouped.insert(m).second) throw SchemaError(gw + ": field '" + m + "' is a member of more than one group slot");
      }
      schema.compound_groups.push_back(std::move(g));
    }
  }
  return schema;
}

}  // namespace

std::string_view to_string(CanonicalType t) {
  for (const auto& tn : kTypeNames)
    if (tn.type == t) return tn.name;
  return "free_text";
}

std::optional<CanonicalType> canonical_type_from_string(std::string_view s) {
  for (const auto& tn : kTypeNames)
    if (tn.name == s) return tn.type;
  return std::nullopt;
}

bool is_valid_clue(std::string_view clue) {
  if (clue.empty() || clue == "text") return false;
  for (char c : clue)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
  return true;
}

const FieldSchema* DocumentTypeSchema::find_field(std::string_view name) const {
  for (const auto& f : fields)
    if (f.name == name) return &f;
  return nullptr;
}

const CompoundGroup* DocumentTypeSchema::find_group(std::string_view name) const {
  for (const auto& g : compound_groups)
    if (g.name == name) return &g;
  return nullptr;
}

const CompoundGroup* DocumentTypeSchema::group_of(std::string_view field_name) const {
  for (const auto& g : compound_groups)
    for (const auto& m : g.members)
      if (m == field_name) return &g;
  return nullptr;
}

std::vector<DocumentTypeSchema> parse_schema(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    auto [line, column] = position_of(json_text, e.byte > 0 ? e.byte - 1 : 0);
    throw SchemaError(std::string("schema parse error: ") + e.what(), line, column);
  }
  check_keys(root, {"raw_suffix", "doc_types"}, "schema");
  auto suffix = optional_string(root, "raw_suffix", "schema").value_or(std::string(kDefaultRawSuffix));
  auto doc_types = root.find("doc_types");
  if (doc_types == root.end() || !doc_types->is_array() || doc_types->empty())
    throw SchemaError("schema: 'doc_types' must be a non-empty array");

  std::vector<DocumentTypeSchema> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc_types->size(); ++i) {
    auto s = parse_doc_type((*doc_types)[i], "doc_types[" + std::to_string(i) + "]", suffix);
    if (!seen.insert(s.doc_type).second) throw SchemaError("schema: duplicate doc_type '" + s.doc_type + "'");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DocumentTypeSchema> load_schema(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open schema file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_schema(ss.str());
}

const DocumentTypeSchema* find_doc_type(const std::vector<DocumentTypeSchema>& schemas, std::string_view doc_type) {
  for (const auto& s : schemas)
    if (s.doc_type == doc_type) return &s;
  return nullptr;
}

std::string append_raw_suffix(std::string_view question, std::string_view suffix) {
  if (suffix.empty()) return std::string(question);
  std::string_view stem = question;
  bool has_mark = !stem.empty() && stem.back() == '?';
  if (has_mark) stem.remove_suffix(1);
  while (!stem.empty() && stem.back() == ' ') stem.remove_suffix(1);
  std::string out(stem);
  out += ' ';
  out += suffix;
  if (has_mark && suffix.back() != '?') out += '?';
  return out;
}

std::string question_for(const FieldSchema& field, bool raw) {
  return raw ? append_raw_suffix(field.question, field.raw_suffix) : field.question;
}

std::string question_for(const CompoundGroup& group, bool raw) {
  return raw ? append_raw_suffix(group.question, group.raw_suffix) : group.question;
}

}  // namespace ie
