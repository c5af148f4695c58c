#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ctxclass/dataset.hpp"
#include "json.hpp"

namespace ctxclass {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> split_blank(const std::string& line) {
  std::string copy = line;
  std::replace(copy.begin(), copy.end(), ',', ' ');
  std::istringstream ss(copy);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

std::optional<long> parse_int(const std::string& s) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::istringstream in(text);
  std::size_t number = 0;
  for (std::string line; std::getline(in, line);) {
    ++number;
    if (trim(line).empty()) continue;
    fn(line, number);
  }
}

const std::vector<std::string> kVowels = {"hid", "hId", "hEd", "hAd", "hYd", "had",
                                          "hOd", "hod", "hUd", "hud", "hed"};

struct VowelRow {
  long flag;
  long speaker;
  long sex;
  std::vector<double> formants;
  long vowel;
};

std::vector<VowelRow> read_vowel_rows(const std::filesystem::path& path) {
  const auto text = read_file(path);
  std::vector<VowelRow> rows;
  for_each_line(text, [&](const std::string& line, std::size_t number) {
    const auto tok = split_blank(line);
    if (tok.size() != 14)
      throw LoadError(path.string() + ": expected 14 fields, found " + std::to_string(tok.size()),
                      number);
    VowelRow row;
    auto need_int = [&](const std::string& s, long lo, long hi, const char* what) {
      auto v = parse_int(s);
      if (!v || *v < lo || *v > hi)
        throw LoadError(path.string() + ": bad " + what + " '" + s + "'", number);
      return *v;
    };
    row.flag = need_int(tok[0], 0, 1, "train/test flag");
    row.speaker = need_int(tok[1], 0, 1000, "speaker index");
    row.sex = need_int(tok[2], 0, 1, "sex");
    for (int i = 0; i < 10; ++i) {
      auto v = parse_double(tok[3 + i]);
      if (!v) throw LoadError(path.string() + ": bad real '" + tok[3 + i] + "'", number);
      row.formants.push_back(*v);
    }
    row.vowel = need_int(tok[13], 0, 10, "class index");
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw LoadError(path.string() + ": no data rows");
  return rows;
}

}  // namespace

std::pair<Dataset, Dataset> load_vowel(const std::filesystem::path& train_path,
                                       const std::filesystem::path& test_path,
                                       std::vector<std::string>* warnings) {
  auto train_rows = read_vowel_rows(train_path);
  auto test_rows = train_path == test_path ? train_rows : read_vowel_rows(test_path);
  std::erase_if(train_rows, [](const VowelRow& r) { return r.flag != 0; });
  std::erase_if(test_rows, [](const VowelRow& r) { return r.flag != 1; });
  if (train_rows.empty()) throw LoadError(train_path.string() + ": no training rows (flag 0)");
  if (test_rows.empty()) throw LoadError(test_path.string() + ": no testing rows (flag 1)");

  std::set<long> speakers;
  for (const auto& r : train_rows) speakers.insert(r.speaker);
  for (const auto& r : test_rows) speakers.insert(r.speaker);
  std::vector<std::string> speaker_alphabet;
  for (auto s : speakers) speaker_alphabet.push_back(std::to_string(s));

  std::vector<FeatureSpec> features;
  features.push_back({"speaker", FeatureRole::Contextual, FeatureKind::Discrete, speaker_alphabet});
  features.push_back({"sex", FeatureRole::Contextual, FeatureKind::Discrete, {"male", "female"}});
  for (int i = 1; i <= 10; ++i)
    features.push_back({"f" + std::to_string(i), FeatureRole::Primary, FeatureKind::Continuous, {}});
  features.push_back({"vowel", FeatureRole::Class, FeatureKind::Discrete, kVowels});
  FeatureSchema schema(std::move(features));

  auto build = [&](const std::vector<VowelRow>& src) {
    std::vector<Observation> rows;
    for (const auto& r : src) {
      Observation o;
      o.emplace_back(std::to_string(r.speaker));
      o.emplace_back(std::string(r.sex == 0 ? "male" : "female"));
      for (double f : r.formants) o.emplace_back(f);
      o.emplace_back(kVowels[static_cast<std::size_t>(r.vowel)]);
      rows.push_back(std::move(o));
    }
    return Dataset(schema, std::move(rows));
  };

  Dataset train = build(train_rows);
  Dataset test = build(test_rows);
  if (warnings) {
    if (train.size() != 528)
      warnings->push_back("vowel: training set has " + std::to_string(train.size()) +
                          " rows, expected 528");
    if (test.size() != 462)
      warnings->push_back("vowel: testing set has " + std::to_string(test.size()) +
                          " rows, expected 462");
  }
  return {std::move(train), std::move(test)};
}

Dataset load_hepatitis(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  const std::vector<std::string> yes_no = {"no", "yes"};
  auto boolean = [&](const char* name) {
    return FeatureSpec{name, FeatureRole::Primary, FeatureKind::Discrete, yes_no};
  };
  auto real = [](const char* name, FeatureRole role = FeatureRole::Primary) {
    return FeatureSpec{name, role, FeatureKind::Continuous, {}};
  };
  // UCI codes: class 1=DIE 2=LIVE, sex 1=male 2=female, booleans 1=no 2=yes.
  FeatureSchema schema({
      {"class", FeatureRole::Class, FeatureKind::Discrete, {"die", "live"}},
      real("age", FeatureRole::Contextual),
      {"sex", FeatureRole::Contextual, FeatureKind::Discrete, {"male", "female"}},
      boolean("steroid"),
      boolean("antivirals"),
      boolean("fatigue"),
      boolean("malaise"),
      boolean("anorexia"),
      boolean("liver_big"),
      boolean("liver_firm"),
      boolean("spleen_palpable"),
      boolean("spiders"),
      boolean("ascites"),
      boolean("varices"),
      real("bilirubin"),
      real("alk_phosphate"),
      real("sgot"),
      real("albumin"),
      real("protime"),
      boolean("histology"),
  });

  const auto text = read_file(path);
  std::vector<Observation> rows;
  for_each_line(text, [&](const std::string& line, std::size_t number) {
    const auto tok = split_fields(line, ',');
    if (tok.size() != schema.size())
      throw LoadError(path.string() + ": expected " + std::to_string(schema.size()) +
                          " fields, found " + std::to_string(tok.size()),
                      number);
    Observation o;
    for (std::size_t c = 0; c < tok.size(); ++c) {
      const auto& spec = schema[c];
      if (tok[c] == "?") {
        if (spec.role == FeatureRole::Class)
          throw LoadError(path.string() + ": missing class", number);
        o.emplace_back(Missing{});
        continue;
      }
      if (spec.kind == FeatureKind::Continuous) {
        auto v = parse_double(tok[c]);
        if (!v) throw LoadError(path.string() + ": bad number '" + tok[c] + "' in " + spec.name, number);
        o.emplace_back(*v);
      } else {
        auto code = parse_int(tok[c]);
        if (!code || *code < 1 || *code > static_cast<long>(spec.alphabet.size()))
          throw LoadError(path.string() + ": unknown symbol '" + tok[c] + "' in " + spec.name,
                          number);
        o.emplace_back(spec.alphabet[static_cast<std::size_t>(*code - 1)]);
      }
    }
    rows.push_back(std::move(o));
  });
  if (rows.empty()) throw LoadError(path.string() + ": no data rows");
  if (warnings && rows.size() != 155)
    warnings->push_back("hepatitis: " + std::to_string(rows.size()) + " rows, expected 155");
  return Dataset(std::move(schema), std::move(rows));
}

Dataset parse_table(const std::string& csv_text, const FeatureSchema& schema) {
  std::vector<Observation> rows;
  bool first = true;
  for_each_line(csv_text, [&](const std::string& line, std::size_t number) {
    const auto tok = split_fields(line, ',');
    if (first) {
      first = false;
      bool header = tok.size() == schema.size();
      for (std::size_t c = 0; header && c < tok.size(); ++c) header = tok[c] == schema[c].name;
      if (header) return;
    }
    if (tok.size() != schema.size())
      throw LoadError("schema declares " + std::to_string(schema.size()) + " columns, row has " +
                          std::to_string(tok.size()),
                      number);
    Observation o;
    for (std::size_t c = 0; c < tok.size(); ++c) {
      const auto& spec = schema[c];
      if (tok[c] == "?" || tok[c].empty()) {
        o.emplace_back(Missing{});
      } else if (spec.kind == FeatureKind::Continuous) {
        auto v = parse_double(tok[c]);
        if (!v) throw LoadError("bad number '" + tok[c] + "' in column " + spec.name, number);
        o.emplace_back(*v);
      } else {
        if (!spec.symbol_index(tok[c]))
          throw LoadError("undeclared symbol '" + tok[c] + "' in column " + spec.name, number);
        o.emplace_back(tok[c]);
      }
    }
    rows.push_back(std::move(o));
  });
  return Dataset(schema, std::move(rows));
}

Dataset load_table(const std::filesystem::path& data_path,
                   const std::filesystem::path& schema_path) {
  const auto schema = read_schema(schema_path);
  try {
    return parse_table(read_file(data_path), schema);
  } catch (const LoadError& e) {
    throw LoadError(data_path.string() + ": " + e.what());
  }
}

std::string format_table(const Dataset& dataset) {
  const auto& schema = dataset.schema();
  std::string out;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c) out += ',';
    out += schema[c].name;
  }
  out += '\n';
  for (const auto& row : dataset.rows()) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Missing>) out += '?';
            else if constexpr (std::is_same_v<T, double>) out += format_double(v);
            else out += v;
          },
          row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_table(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << format_table(dataset);
}

FeatureSchema parse_schema(const std::string& json_text) {
  try {
    const auto doc = json::parse(json_text);
    std::vector<FeatureSpec> features;
    for (const auto& f : doc.at("features")) {
      FeatureSpec spec;
      spec.name = f.at("name").get<std::string>();
      spec.role = parse_role(f.at("role").get<std::string>());
      spec.kind = parse_kind(f.at("kind").get<std::string>());
      if (f.contains("alphabet")) spec.alphabet = f.at("alphabet").get<std::vector<std::string>>();
      features.push_back(std::move(spec));
    }
    return FeatureSchema(std::move(features));
  } catch (const json::exception& e) {
    throw LoadError(std::string("schema: ") + e.what());
  } catch (const PreconditionError& e) {
    throw LoadError(e.what());
  }
}

FeatureSchema read_schema(const std::filesystem::path& path) {
  try {
    return parse_schema(read_file(path));
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

std::string format_schema(const FeatureSchema& schema) {
  json features = json::array();
  for (const auto& f : schema.features()) {
    json entry = {{"name", f.name}, {"role", to_string(f.role)}, {"kind", to_string(f.kind)}};
    if (f.kind == FeatureKind::Discrete) entry["alphabet"] = f.alphabet;
    features.push_back(std::move(entry));
  }
  return json{{"features", features}}.dump(2) + "\n";
}

void write_schema(const FeatureSchema& schema, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << format_schema(schema);
}

JointSpec parse_joint_spec(const std::string& json_text) {
  JointSpec spec;
  try {
    const auto doc = json::parse(json_text);
    for (const auto& v : doc.at("variables")) {
      spec.names.push_back(v.at("name").get<std::string>());
      spec.alphabets.push_back(v.at("values").get<std::vector<std::string>>());
    }
    if (doc.contains("class")) {
      const auto name = doc.at("class").get<std::string>();
      const auto it = std::find(spec.names.begin(), spec.names.end(), name);
      if (it == spec.names.end()) throw LoadError("joint spec: unknown class variable " + name);
      spec.class_variable = static_cast<std::size_t>(it - spec.names.begin());
    }
    for (const auto& e : doc.at("entries")) {
      const auto values = e.at("values").get<std::vector<std::string>>();
      if (values.size() != spec.names.size()) throw LoadError("joint spec: tuple length mismatch");
      std::vector<int> tuple;
      for (std::size_t v = 0; v < values.size(); ++v) {
        const auto& a = spec.alphabets[v];
        const auto it = std::find(a.begin(), a.end(), values[v]);
        if (it == a.end())
          throw LoadError("joint spec: value '" + values[v] + "' not in alphabet of " +
                          spec.names[v]);
        tuple.push_back(static_cast<int>(it - a.begin()));
      }
      spec.entries.emplace_back(std::move(tuple), e.at("p").get<double>());
    }
  } catch (const json::exception& e) {
    throw LoadError(std::string("joint spec: ") + e.what());
  }
  try {
    spec.validate();
  } catch (const PreconditionError& e) {
    throw LoadError(e.what());
  }
  return spec;
}

JointSpec read_joint_spec(const std::filesystem::path& path) {
  try {
    return parse_joint_spec(read_file(path));
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

std::string format_joint_spec(const JointSpec& spec) {
  json variables = json::array();
  for (std::size_t v = 0; v < spec.names.size(); ++v)
    variables.push_back({{"name", spec.names[v]}, {"values", spec.alphabets[v]}});
  json entries = json::array();
  for (const auto& [tuple, p] : spec.entries) {
    std::vector<std::string> values;
    for (std::size_t v = 0; v < tuple.size(); ++v)
      values.push_back(spec.alphabets[v][static_cast<std::size_t>(tuple[v])]);
    entries.push_back({{"values", values}, {"p", p}});
  }
  return json{{"variables", variables},
              {"class", spec.names.at(spec.class_variable)},
              {"entries", entries}}
             .dump(2) +
         "\n";
}

}  // namespace ctxclass
