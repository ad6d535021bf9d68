#include "ie/normalization.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>

#include "ie/errors.hpp"
#include "ie/text.hpp"

namespace ie {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool all_digits(std::string_view s) { return !s.empty() && std::all_of(s.begin(), s.end(), is_digit); }

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> days{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : days[static_cast<std::size_t>(m - 1)];
}

std::string iso_date(int y, int m, int d, std::string_view raw) {
  if (m < 1 || m > 12) throw UnnormalizableValue("date '" + std::string(raw) + "': month out of range");
  if (y < 1 || y > 9999) throw UnnormalizableValue("date '" + std::string(raw) + "': year out of range");
  if (d < 1 || d > days_in_month(y, m)) throw UnnormalizableValue("date '" + std::string(raw) + "': day out of range");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

int to_int(std::string_view digits) {
  int v = 0;
  for (char c : digits) v = v * 10 + (c - '0');
  return v;
}

int parse_year(std::string_view s, std::string_view raw) {
  if (!all_digits(s)) throw UnnormalizableValue("date '" + std::string(raw) + "': bad year");
  if (s.size() != 4)
    throw UnnormalizableValue("date '" + std::string(raw) + "': year must have four digits (two-digit years are not guessed)");
  return to_int(s);
}

// "20", "1º", "1°", "1o", "1st", "22nd", "3rd", "4th" -> day number, or -1.
int parse_day(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && is_digit(s[n])) ++n;
  if (n == 0 || n > 2) return -1;
  auto rest = s.substr(n);
  static constexpr std::string_view kSuffixes[] = {"", "º", "°", "ª", "o", "st", "nd", "rd", "th"};
  for (auto suf : kSuffixes)
    if (rest == suf) return to_int(s.substr(0, n));
  return -1;
}

std::string normalize_date(std::string_view raw, const NormalizationOptions& options) {
  const std::string s = text::fold_case(text::collapse_whitespace(raw));

  // Numeric: D/M/YYYY, D-M-YYYY, D.M.YYYY, or ISO YYYY-M-D.
  for (char sep : {'/', '-', '.'}) {
    std::vector<std::string_view> parts;
    std::string_view rest = s;
    while (true) {
      auto p = rest.find(sep);
      parts.push_back(rest.substr(0, p));
      if (p == std::string_view::npos) break;
      rest.remove_prefix(p + 1);
    }
    if (parts.size() != 3 || !std::all_of(parts.begin(), parts.end(), all_digits)) continue;
    if (parts[0].size() == 4 && sep == '-' && parts[1].size() <= 2 && parts[2].size() <= 2)
      return iso_date(to_int(parts[0]), to_int(parts[1]), to_int(parts[2]), raw);
    if (parts[0].size() > 2 || parts[1].size() > 2)
      throw UnnormalizableValue("date '" + std::string(raw) + "': ambiguous numeric layout");
    return iso_date(parse_year(parts[2], raw), to_int(parts[1]), to_int(parts[0]), raw);
  }

  // Long form: "20 de novembro de 2021", "20 November 2021", "November 20, 2021".
  std::vector<std::string> words;
  std::string word;
  for (char c : s) {
    if (c == ' ' || c == ',') {
      if (!word.empty()) words.push_back(std::move(word));
      word.clear();
    } else {
      word += c;
    }
  }
  if (!word.empty()) words.push_back(std::move(word));
  std::erase_if(words, [](const std::string& w) { return w == "de" || w == "of" || w == "do"; });
  for (auto& w : words)
    if (w.size() > 1 && w.back() == '.') w.pop_back();
  if (words.size() != 3) throw UnnormalizableValue("date '" + std::string(raw) + "': unrecognized format");

  auto month_of = [&](const std::string& w) {
    for (const auto& [name, number] : options.months)
      if (w == name) return number;
    return 0;
  };
  if (int m = month_of(words[1]); m && parse_day(words[0]) > 0)
    return iso_date(parse_year(words[2], raw), m, parse_day(words[0]), raw);
  if (int m = month_of(words[0]); m && parse_day(words[1]) > 0)
    return iso_date(parse_year(words[2], raw), m, parse_day(words[1]), raw);
  throw UnnormalizableValue("date '" + std::string(raw) + "': unrecognized format");
}

std::string normalize_decimal(std::string_view raw, const NormalizationOptions& options) {
  std::string s;
  for (char c : raw)
    if (!text::is_space(c)) s += c;
  if (s.empty()) throw UnnormalizableValue("decimal: empty");
  for (char c : s)
    if (!is_digit(c) && c != ',' && c != '.')
      throw UnnormalizableValue("decimal '" + std::string(raw) + "': unexpected character '" + std::string(1, c) + "'");

  const auto commas = std::count(s.begin(), s.end(), ',');
  const auto dots = std::count(s.begin(), s.end(), '.');
  std::string integer, fraction;
  auto split_at = [&](std::size_t pos) {
    integer = s.substr(0, pos);
    fraction = pos == std::string::npos ? "" : s.substr(pos + 1);
  };

  if (!options.thousands_separators) {
    if (commas && dots)
      throw UnnormalizableValue("decimal '" + std::string(raw) + "': both ',' and '.' present (thousands separators disabled)");
    if (commas > 1 || dots > 1) throw UnnormalizableValue("decimal '" + std::string(raw) + "': repeated separator");
    split_at(s.find_first_of(",."));
  } else {
    // Comma is the decimal separator; dots group thousands. A lone dot
    // followed by exactly three digits is grouping, otherwise decimal.
    if (commas > 1) throw UnnormalizableValue("decimal '" + std::string(raw) + "': repeated ','");
    std::size_t comma = s.find(',');
    std::string head = s.substr(0, comma);
    bool dots_group = commas == 1 || dots > 1 || (dots == 1 && head.size() - head.find('.') - 1 == 3);
    if (dots_group && dots) {
      std::size_t first = head.find('.');
      if (first == 0 || first > 3) throw UnnormalizableValue("decimal '" + std::string(raw) + "': bad digit grouping");
      for (std::size_t p = first; p < head.size(); p += 4)
        if (head[p] != '.' || head.size() < p + 4 || !all_digits(std::string_view(head).substr(p + 1, 3)))
          throw UnnormalizableValue("decimal '" + std::string(raw) + "': bad digit grouping");
      std::erase(head, '.');
      s = head + (comma == std::string::npos ? "" : s.substr(comma));
      split_at(s.find(','));
    } else {
      split_at(s.find_first_of(",."));
    }
  }
  if (integer.empty() && fraction.empty()) throw UnnormalizableValue("decimal '" + std::string(raw) + "': no digits");
  if (!integer.empty() && !all_digits(integer)) throw UnnormalizableValue("decimal '" + std::string(raw) + "': bad integer part");
  if (!fraction.empty() && !all_digits(fraction)) throw UnnormalizableValue("decimal '" + std::string(raw) + "': bad fraction");

  integer.erase(0, std::min(integer.find_first_not_of('0'), integer.size()));
  if (integer.empty()) integer = "0";
  while (!fraction.empty() && fraction.back() == '0') fraction.pop_back();
  return fraction.empty() ? integer : integer + "." + fraction;
}

struct StateName {
  std::string_view name;  // case-folded
  std::string_view code;
};

constexpr StateName kBrazilianStates[] = {
    {"acre", "AC"}, {"alagoas", "AL"}, {"amapá", "AP"}, {"amazonas", "AM"}, {"bahia", "BA"},
    {"ceará", "CE"}, {"distrito federal", "DF"}, {"espírito santo", "ES"}, {"goiás", "GO"},
    {"maranhão", "MA"}, {"mato grosso", "MT"}, {"mato grosso do sul", "MS"}, {"minas gerais", "MG"},
    {"pará", "PA"}, {"paraíba", "PB"}, {"paraná", "PR"}, {"pernambuco", "PE"}, {"piauí", "PI"},
    {"rio de janeiro", "RJ"}, {"rio grande do norte", "RN"}, {"rio grande do sul", "RS"},
    {"rondônia", "RO"}, {"roraima", "RR"}, {"santa catarina", "SC"}, {"são paulo", "SP"},
    {"sergipe", "SE"}, {"tocantins", "TO"},
};

std::string normalize_state(std::string_view raw) {
  const std::string s = text::fold_case(text::collapse_whitespace(raw));
  if (s.size() == 2 && std::isalpha(static_cast<unsigned char>(s[0])) && std::isalpha(static_cast<unsigned char>(s[1])))
    return text::ascii_upper(s);
  for (const auto& st : kBrazilianStates)
    if (s == st.name) return std::string(st.code);
  throw UnnormalizableValue("state '" + std::string(raw) + "': not a two-letter code or known state name");
}

std::string category_key(std::string_view s) {
  std::string k = text::fold_case(text::collapse_whitespace(s));
  std::replace(k.begin(), k.end(), ' ', '_');
  return k;
}

std::string normalize_categorical(std::string_view raw, const std::vector<std::string>& categories) {
  const std::string key = category_key(raw);
  if (key.empty()) throw UnnormalizableValue("categorical: empty");
  if (categories.empty()) return key;
  for (const auto& c : categories)
    if (category_key(c) == key) return c;
  throw UnnormalizableValue("categorical '" + std::string(raw) + "': not in the field vocabulary");
}

}  // namespace

const MonthTable& portuguese_months() {
  static const MonthTable table = {
      {"janeiro", 1}, {"fevereiro", 2}, {"março", 3}, {"marco", 3}, {"abril", 4}, {"maio", 5},
      {"junho", 6}, {"julho", 7}, {"agosto", 8}, {"setembro", 9}, {"outubro", 10}, {"novembro", 11},
      {"dezembro", 12}, {"jan", 1}, {"fev", 2}, {"mar", 3}, {"abr", 4}, {"mai", 5}, {"jun", 6},
      {"jul", 7}, {"ago", 8}, {"set", 9}, {"out", 10}, {"nov", 11}, {"dez", 12},
  };
  return table;
}

const MonthTable& english_months() {
  static const MonthTable table = {
      {"january", 1}, {"february", 2}, {"march", 3}, {"april", 4}, {"may", 5}, {"june", 6},
      {"july", 7}, {"august", 8}, {"september", 9}, {"october", 10}, {"november", 11}, {"december", 12},
      {"jan", 1}, {"feb", 2}, {"mar", 3}, {"apr", 4}, {"jun", 6}, {"jul", 7}, {"aug", 8},
      {"sep", 9}, {"sept", 9}, {"oct", 10}, {"nov", 11}, {"dec", 12},
  };
  return table;
}

NormalizationOptions options_for(const FieldSchema& field, const MonthTable& months) {
  NormalizationOptions o;
  o.months = months;
  o.categories = field.categories;
  return o;
}

CanonicalValue normalize(std::string_view raw, CanonicalType type, const NormalizationOptions& options) {
  if (text::trim(raw).empty()) throw UnnormalizableValue("empty value");
  CanonicalValue v;
  v.raw = std::string(raw);
  v.type = type;
  switch (type) {
    case CanonicalType::date:
      v.canonical = normalize_date(raw, options);
      break;
    case CanonicalType::decimal_area:
      v.canonical = normalize_decimal(raw, options);
      break;
    case CanonicalType::id_number:
      for (char c : raw)
        if (std::isalnum(static_cast<unsigned char>(c)) && static_cast<unsigned char>(c) < 0x80)
          v.canonical += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (v.canonical.empty()) throw UnnormalizableValue("id number '" + std::string(raw) + "': no digits or letters");
      break;
    case CanonicalType::state_code:
      v.canonical = normalize_state(raw);
      break;
    case CanonicalType::categorical:
      v.canonical = normalize_categorical(raw, options.categories);
      break;
    case CanonicalType::free_text:
      v.canonical = text::collapse_whitespace(raw);
      break;
  }
  return v;
}

bool validate(std::string_view c, CanonicalType type, const std::vector<std::string>& categories) {
  switch (type) {
    case CanonicalType::date: {
      if (c.size() != 10 || c[4] != '-' || c[7] != '-') return false;
      if (!all_digits(c.substr(0, 4)) || !all_digits(c.substr(5, 2)) || !all_digits(c.substr(8, 2))) return false;
      int y = to_int(c.substr(0, 4)), m = to_int(c.substr(5, 2)), d = to_int(c.substr(8, 2));
      return y >= 1 && m >= 1 && m <= 12 && d >= 1 && d <= days_in_month(y, m);
    }
    case CanonicalType::decimal_area: {
      auto dot = c.find('.');
      auto integer = c.substr(0, dot);
      if (!all_digits(integer) || (integer.size() > 1 && integer[0] == '0')) return false;
      if (dot == std::string_view::npos) return true;
      auto fraction = c.substr(dot + 1);
      return all_digits(fraction) && fraction.back() != '0';
    }
    case CanonicalType::id_number:
      return !c.empty() && std::all_of(c.begin(), c.end(), [](char ch) { return is_digit(ch) || (ch >= 'A' && ch <= 'Z'); });
    case CanonicalType::state_code:
      return c.size() == 2 && c[0] >= 'A' && c[0] <= 'Z' && c[1] >= 'A' && c[1] <= 'Z';
    case CanonicalType::categorical:
      if (!categories.empty()) return std::find(categories.begin(), categories.end(), c) != categories.end();
      return !c.empty() && std::all_of(c.begin(), c.end(), [](char ch) {
        auto u = static_cast<unsigned char>(ch);
        return u >= 0x80 || (ch >= 'a' && ch <= 'z') || is_digit(ch) || ch == '_';
      });
    case CanonicalType::free_text:
      return !c.empty() && text::is_collapsed(c);
  }
  return false;
}

}  // namespace ie
