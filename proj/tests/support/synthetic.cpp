#include "synthetic.hpp"

#include <random>

#include "ie/text.hpp"

namespace ie::synth {

namespace {

const char* kSchema = R"({
  "raw_suffix": "and how does it appear in the text",
  "doc_types": [
    {
      "doc_type": "property",
      "fields": [
        {"name": "registration_id", "clue": "registration", "question": "What is the registration number?", "canonical_type": "id_number", "sent": true, "raw": true},
        {"name": "property_type", "clue": "type", "question": "What is the type of the property?", "canonical_type": "categorical", "categories": ["apartment", "house", "land"], "sent": true},
        {"name": "purchase_date", "clue": "date", "question": "When was the property purchased?", "canonical_type": "date", "sent": true, "raw": true},
        {"name": "area_value", "clue": "value", "question": "What is the value of the private area?", "canonical_type": "decimal_area", "sent": true, "raw": true},
        {"name": "area_unit", "clue": "unit", "question": "What is the unit of the private area?", "canonical_type": "free_text", "sent": true, "raw": true},
        {"name": "street", "clue": "street", "question": "What is the street of the property?", "canonical_type": "free_text", "sent": true, "raw": true},
        {"name": "number", "clue": "number", "question": "What is the street number of the property?", "canonical_type": "id_number", "sent": true, "raw": true},
        {"name": "complement", "clue": "complement", "question": "What is the address complement of the property?", "canonical_type": "free_text", "sent": true, "raw": true},
        {"name": "neighborhood", "clue": "neighborhood", "question": "What is the neighborhood of the property?", "canonical_type": "free_text", "sent": true, "raw": true},
        {"name": "city", "clue": "city", "question": "What is the city of the property?", "canonical_type": "free_text", "sent": true, "raw": true},
        {"name": "state", "clue": "state", "question": "What is the state of the property?", "canonical_type": "state_code", "sent": true, "raw": true},
        {"name": "zip_code", "clue": "zip", "question": "What is the zip code of the property?", "canonical_type": "id_number", "sent": true, "raw": true}
      ],
      "compound_groups": [
        {"name": "private_area", "question": "What is the private area?", "members": ["area_value", "area_unit"], "sent": true, "raw": true, "raw_suffix": "and how does it appear in text"},
        {"name": "address", "question": "What is the address of the property?", "members": ["street", "number", "complement", "neighborhood", "city", "state", "zip_code"], "sent": true, "raw": true}
      ]
    },
    {
      "doc_type": "certificate",
      "fields": [
        {"name": "certificate_number", "clue": "number", "question": "What is the certificate number?", "canonical_type": "id_number", "sent": true, "raw": true},
        {"name": "issue_date", "clue": "date", "question": "When was the certificate issued?", "canonical_type": "date", "sent": true, "raw": true},
        {"name": "holder", "clue": "holder", "question": "Who is the certificate holder?", "canonical_type": "free_text", "sent": true, "raw": true},
        {"name": "issuing_state", "clue": "state", "question": "Which state issued the certificate?", "canonical_type": "state_code", "sent": true, "raw": true},
        {"name": "result", "clue": "result", "question": "What is the result of the certificate?", "canonical_type": "categorical", "categories": ["negative", "positive"], "sent": true, "raw": true}
      ],
      "compound_groups": []
    }
  ]
})";

const std::vector<std::string> kStreets{"Santos Dumont", "Rio Branco",   "Sete de Setembro", "das Flores",
                                        "Marechal Deodoro", "XV de Novembro", "Tiradentes", "Barão do Rio Branco"};
const std::vector<std::string> kNeighborhoods{"Centro", "Jardim América", "Vila Mariana", "Boa Vista", "Água Verde", "Batel"};
const std::vector<std::pair<std::string, std::string>> kCities{{"Curitiba", "PR"},  {"Campinas", "SP"},
                                                               {"Niterói", "RJ"},   {"Joinville", "SC"},
                                                               {"Londrina", "PR"},  {"Uberlândia", "MG"}};
const std::vector<std::pair<std::string, std::string>> kStateNames{{"Paraná", "PR"}, {"São Paulo", "SP"},
                                                                   {"Minas Gerais", "MG"}, {"Santa Catarina", "SC"}};
const std::vector<std::string> kMonthsPt{"janeiro", "fevereiro", "março",    "abril",   "maio",     "junho",
                                         "julho",   "agosto",    "setembro", "outubro", "novembro", "dezembro"};
const std::vector<std::string> kNames{"Ana Souza", "Bruno Lima", "Carla Mendes", "Diego Rocha", "Elisa Prado", "Fábio Nunes"};
const std::vector<std::string> kVerbs{"review", "deliver", "inspect", "register", "sign", "archive", "forward", "settle"};
const std::vector<std::string> kNouns{"deed", "survey", "receipt", "inventory", "contract", "statement", "plan", "notice"};

class Builder {
 public:
  Builder(std::string doc_id, std::string doc_type) {
    record_.doc_id = std::move(doc_id);
    record_.doc_type = std::move(doc_type);
  }

  // Appends a line made of literal pieces and (field, raw, canonical) slots.
  struct Piece {
    std::string text;
    std::string field;  // empty for literal text
    std::string canonical;
  };

  void line(const std::vector<Piece>& pieces) {
    if (!record_.text.empty()) record_.text += '\n';
    ++sentences_;
    for (const auto& p : pieces) {
      const std::size_t start = text::length(record_.text);
      record_.text += p.text;
      if (p.field.empty()) continue;
      GoldAnnotation a;
      a.field = p.field;
      a.value_canonical = p.canonical;
      a.raw = RawSpan{p.text, start, start + text::length(p.text)};
      record_.annotations.push_back(std::move(a));
    }
  }

  void blank_line() { record_.text += '\n'; }

  // Annotation without a raw span, pinned to the next line.
  void classify(std::string field, std::string canonical) {
    record_.annotations.push_back({std::move(field), std::move(canonical), std::nullopt, sentences_ + 1});
  }

  DocumentRecord take() { return std::move(record_); }

 private:
  DocumentRecord record_;
  int sentences_ = 0;
};

class Generator {
 public:
  explicit Generator(std::uint32_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  std::string filler() {
    ++filler_id_;
    return "Clause " + std::to_string(filler_id_) + " states that the parties shall " + pick(kVerbs) + " the " +
           pick(kNouns) + " within " + std::to_string(uniform(2, 90)) + " days of notice " + std::to_string(filler_id_ * 7 + 3) +
           ".";
  }

  void fillers(Builder& b, int n) {
    for (int i = 0; i < n; ++i) {
      b.line({{filler(), "", ""}});
      if (chance(0.05)) b.blank_line();
    }
  }

  // Returns (raw, canonical ISO).
  std::pair<std::string, std::string> date() {
    const int y = uniform(1990, 2023), m = uniform(1, 12), d = uniform(1, 28);
    char iso[16];
    std::snprintf(iso, sizeof iso, "%04d-%02d-%02d", y, m, d);
    std::string raw;
    switch (uniform(0, 2)) {
      case 0: raw = std::to_string(d) + "/" + std::to_string(m) + "/" + std::to_string(y); break;
      case 1: {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02d-%02d-%04d", d, m, y);
        raw = buf;
        break;
      }
      default: raw = std::to_string(d) + " de " + kMonthsPt[static_cast<std::size_t>(m - 1)] + " de " + std::to_string(y);
    }
    return {raw, iso};
  }

  DocumentRecord property(const std::string& id, std::set<std::pair<std::string, std::string>>& duplicates) {
    Builder b(id, "property");
    fillers(b, uniform(2, 12));

    const std::string reg_digits = std::to_string(uniform(10, 99)) + std::to_string(uniform(100, 999));
    const std::string reg_check = std::to_string(uniform(0, 9));
    b.line({{"Registration nº ", "", ""},
            {reg_digits.substr(0, 2) + "." + reg_digits.substr(2) + "-" + reg_check, "registration_id", reg_digits + reg_check},
            {", recorded at the property registry office.", "", ""}});
    fillers(b, uniform(1, 8));

    static const std::vector<std::pair<std::string, std::string>> kTypes{
        {"Apartment type nº", "apartment"}, {"House built on lot nº", "house"}, {"Vacant land lot nº", "land"}};
    const auto& type = pick(kTypes);
    b.classify("property_type", type.second);
    b.line({{type.first + " " + std::to_string(uniform(1, 400)) + ",", "", ""}});

    if (chance(0.85)) {
      const int whole = uniform(20, 900);
      std::string frac = std::to_string(uniform(0, 999));
      frac.insert(0, 3 - frac.size(), '0');
      std::string canon_frac = frac;
      while (!canon_frac.empty() && canon_frac.back() == '0') canon_frac.pop_back();
      const std::string raw = std::to_string(whole) + "," + frac;
      const std::string canonical = std::to_string(whole) + (canon_frac.empty() ? "" : "." + canon_frac);
      const bool metric_word = chance(0.6);
      const std::string unit_raw = metric_word ? "square meters" : "m²";
      std::vector<Builder::Piece> pieces{{"having a private covered built area of ", "", ""},
                                         {raw, "area_value", canonical},
                                         {" ", "", ""},
                                         {unit_raw, "area_unit", "m²"},
                                         {",", "", ""}};
      if (chance(0.2)) {
        pieces.push_back({" matching the surveyed figure of " + raw + " in the plan,", "", ""});
        duplicates.insert({id, "area_value"});
      }
      b.line(pieces);
    }
    fillers(b, uniform(0, 6));

    const auto& [city, state] = pick(kCities);
    const std::string number = std::to_string(uniform(1, 4999));
    std::vector<Builder::Piece> street_line{{"situated at ", "", ""},
                                            {number, "number", number},
                                            {" ", "", ""},
                                            {pick(kStreets), "street", ""},
                                            {" St.", "", ""}};
    street_line[3].canonical = street_line[3].text;
    if (chance(0.7)) {
      const std::string complement = "apartment " + std::to_string(uniform(11, 1204));
      street_line.push_back({", ", "", ""});
      street_line.push_back({complement, "complement", complement});
    }
    street_line.push_back({",", "", ""});
    b.line(street_line);
    const std::string hood = pick(kNeighborhoods);
    b.line({{hood, "neighborhood", hood}, {" neighborhood, ", "", ""}, {city, "city", city}, {" - ", "", ""}, {state, "state", state}, {",", "", ""}});
    if (chance(0.8)) {
      const std::string zip5 = std::to_string(uniform(10000, 99999)), zip3 = std::to_string(uniform(100, 999));
      b.line({{"ZIP code ", "", ""}, {zip5 + "-" + zip3, "zip_code", zip5 + zip3}, {".", "", ""}});
    }
    fillers(b, uniform(0, 6));

    if (chance(0.8)) {
      const auto [raw, iso] = date();
      b.line({{"The property was purchased on ", "", ""}, {raw, "purchase_date", iso}, {" by the current owner.", "", ""}});
    }
    fillers(b, uniform(1, 10));
    return b.take();
  }

  DocumentRecord certificate(const std::string& id, std::set<std::pair<std::string, std::string>>& duplicates) {
    Builder b(id, "certificate");
    fillers(b, uniform(1, 6));
    const std::string number = std::to_string(uniform(100000, 999999));
    const std::string raw_number = "C-" + number.substr(0, 3) + "/" + number.substr(3);
    b.line({{"Certificate nº ", "", ""}, {raw_number, "certificate_number", "C" + number}});
    fillers(b, uniform(0, 5));
    if (chance(0.9)) {
      const auto [raw, iso] = date();
      b.line({{"Issued on ", "", ""}, {raw, "issue_date", iso}, {".", "", ""}});
    }
    const std::string holder = pick(kNames);
    std::vector<Builder::Piece> holder_line{{"Holder: ", "", ""}, {holder, "holder", holder}, {".", "", ""}};
    if (chance(0.2)) {
      holder_line.push_back({" Signed by " + holder + ".", "", ""});
      duplicates.insert({id, "holder"});
    }
    b.line(holder_line);
    fillers(b, uniform(0, 5));
    if (chance(0.5)) {
      const auto& [name, code] = pick(kStateNames);
      b.line({{"Issuing authority of the state of ", "", ""}, {name, "issuing_state", code}, {".", "", ""}});
    } else {
      const auto& [city, code] = pick(kCities);
      b.line({{"Issued in " + city + " - ", "", ""}, {code, "issuing_state", code}, {".", "", ""}});
    }
    if (chance(0.85)) {
      const bool negative = chance(0.6);
      b.line({{"Result: ", "", ""}, {negative ? "NEGATIVE" : "POSITIVE", "result", negative ? "negative" : "positive"}});
    }
    fillers(b, uniform(1, 8));
    return b.take();
  }

 private:
  std::mt19937 rng_;
  int filler_id_ = 0;
};

}  // namespace

const std::string& schema_json() {
  static const std::string s = kSchema;
  return s;
}

Corpus make_corpus(std::uint32_t seed, std::size_t documents) {
  Corpus c;
  c.schema_json = schema_json();
  Generator g(seed);
  for (std::size_t i = 0; i < documents; ++i) {
    char id[32];
    if (i % 3 == 2) {
      std::snprintf(id, sizeof id, "cert-%04zu", i);
      c.docs.push_back(g.certificate(id, c.duplicate_raw));
    } else {
      std::snprintf(id, sizeof id, "prop-%04zu", i);
      c.docs.push_back(g.property(id, c.duplicate_raw));
    }
  }
  return c;
}

}  // namespace ie::synth
