#include "stance/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <tuple>

#include "stance/errors.hpp"
#include "stance/prompting.hpp"
#include "stance/text.hpp"

namespace stance {

using nlohmann::json;

// --- rows -------------------------------------------------------------------

json to_json(const EvalRow& row) {
  return {{"record_id", row.record_id},
          {"dataset", row.dataset},
          {"model", row.model},
          {"scheme", row.scheme},
          {"gold", to_string(row.gold)},
          {"pred", to_string(row.pred)},
          {"validity", to_string(row.validity)},
          {"word_count", row.word_count},
          {"non_stance_word_count", row.non_stance_word_count},
          {"status", row.aborted ? "aborted" : "complete"},
          {"config_hash", row.config_hash},
          {"seed", row.seed}};
}

EvalRow eval_row_from_json(const json& doc) {
  auto label = [&](const char* key) {
    const auto parsed = parse_canonical(doc.at(key).get<std::string>());
    if (!parsed) throw ConfigError(std::string("results row: bad label in \"") + key + "\"");
    return *parsed;
  };
  EvalRow row;
  row.record_id = doc.at("record_id").get<std::string>();
  row.dataset = doc.at("dataset").get<std::string>();
  row.model = doc.at("model").get<std::string>();
  row.scheme = doc.at("scheme").get<std::string>();
  row.gold = label("gold");
  row.pred = label("pred");
  const auto validity = parse_validity(doc.at("validity").get<std::string>());
  if (!validity) throw ConfigError("results row: validity must be good or bad");
  row.validity = *validity;
  row.word_count = doc.at("word_count").get<std::size_t>();
  row.non_stance_word_count = doc.at("non_stance_word_count").get<std::size_t>();
  row.aborted = doc.value("status", std::string("complete")) == "aborted";
  row.config_hash = doc.value("config_hash", std::string());
  row.seed = doc.value("seed", std::uint64_t{0});
  return row;
}

std::vector<EvalRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<EvalRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      rows.push_back(eval_row_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw MalformedRecord(line_no, path.string() + ": " + e.what());
    } catch (const ConfigError& e) {
      throw MalformedRecord(line_no, path.string() + ": " + e.what());
    }
  }
  return rows;
}

// --- metrics ----------------------------------------------------------------

std::array<ClassMetrics, 3> per_class_metrics(std::span<const LabelPair> pairs) {
  std::array<ClassMetrics, 3> m{};
  for (const auto& [gold, pred] : pairs) {
    ++m[index_of(gold)].gold_count;
    ++m[index_of(pred)].predicted_count;
    if (gold == pred) ++m[index_of(gold)].true_positive;
  }
  for (auto& c : m) {
    const auto tp = static_cast<double>(c.true_positive);
    c.precision = c.predicted_count ? tp / static_cast<double>(c.predicted_count) : 0.0;
    c.recall = c.gold_count ? tp / static_cast<double>(c.gold_count) : 0.0;
    const double denom = c.precision + c.recall;
    c.f1 = denom > 0.0 ? 2.0 * c.precision * c.recall / denom : 0.0;
  }
  return m;
}

double macro_f1(std::span<const LabelPair> pairs) {
  if (pairs.empty()) throw EmptyEvaluation();
  const auto m = per_class_metrics(pairs);
  return (m[0].f1 + m[1].f1 + m[2].f1) / 3.0;
}

// --- reports ----------------------------------------------------------------

EvalReport build_report(std::span<const EvalRow> rows) {
  if (rows.empty()) throw EmptyEvaluation();
  EvalReport report;
  report.dataset = rows.front().dataset;
  report.model = rows.front().model;
  report.scheme = rows.front().scheme;

  std::vector<LabelPair> all;
  std::vector<LabelPair> good;
  all.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.dataset != report.dataset || row.model != report.model || row.scheme != report.scheme) {
      throw ConfigError("build_report: rows span more than one (dataset, model, scheme) group");
    }
    all.push_back({row.gold, row.pred});
    if (row.validity == Validity::Good) good.push_back({row.gold, row.pred});
    if (row.aborted) ++report.aborted_rows;
  }

  report.rows = rows.size();
  report.good_rows = good.size();
  report.per_class = per_class_metrics(all);
  report.macro_f1_all = macro_f1(all);
  if (!good.empty()) report.macro_f1_good = macro_f1(good);
  report.valid_proportion = static_cast<double>(good.size()) / static_cast<double>(rows.size());
  return report;
}

std::vector<EvalReport> build_reports(std::span<const EvalRow> rows) {
  if (rows.empty()) throw EmptyEvaluation();
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<EvalRow>> groups;
  for (const auto& row : rows) groups[{row.dataset, row.model, row.scheme}].push_back(row);
  std::vector<EvalReport> reports;
  reports.reserve(groups.size());
  for (const auto& [key, group] : groups) reports.push_back(build_report(group));
  return reports;
}

json to_json(const EvalReport& report) {
  json per_class = json::object();
  for (CanonicalLabel label : kCanonicalLabels) {
    const auto& c = report.per_class[index_of(label)];
    per_class[std::string(to_string(label))] = {{"precision", c.precision},
                                                {"recall", c.recall},
                                                {"f1", c.f1},
                                                {"true_positive", c.true_positive},
                                                {"gold_count", c.gold_count},
                                                {"predicted_count", c.predicted_count}};
  }
  return {{"dataset", report.dataset},
          {"model", report.model},
          {"scheme", report.scheme},
          {"macro_f1_all", report.macro_f1_all},
          {"macro_f1_good", report.macro_f1_good ? json(*report.macro_f1_good) : json(nullptr)},
          {"valid_proportion", report.valid_proportion},
          {"rows", report.rows},
          {"good_rows", report.good_rows},
          {"aborted_rows", report.aborted_rows},
          {"per_class", std::move(per_class)}};
}

// --- matrices ---------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string file_stem(const std::string& dataset) {
  std::string out = dataset;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

}  // namespace

std::string MatrixTable::to_csv() const {
  std::string out = "model";
  for (const auto& s : schemes) out += "," + csv_field(s);
  out += '\n';
  for (const auto& m : models) {
    out += csv_field(m);
    for (const auto& s : schemes) {
      out += ',';
      if (auto it = cells.find({m, s}); it != cells.end()) out += two_decimals(it->second->macro_f1_all);
    }
    out += '\n';
  }
  return out;
}

json MatrixTable::to_json() const {
  auto grid = [&](auto&& value) {
    json rows = json::array();
    for (const auto& m : models) {
      json row = json::array();
      for (const auto& s : schemes) {
        const auto it = cells.find({m, s});
        row.push_back(it == cells.end() ? json(nullptr) : value(*it->second));
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return {{"dataset", dataset},
          {"models", models},
          {"schemes", schemes},
          {"macro_f1_all", grid([](const EvalReport& r) { return json(r.macro_f1_all); })},
          {"macro_f1_good",
           grid([](const EvalReport& r) { return r.macro_f1_good ? json(*r.macro_f1_good) : json(nullptr); })},
          {"valid_proportion", grid([](const EvalReport& r) { return json(r.valid_proportion); })}};
}

std::vector<MatrixTable> build_matrices(std::span<const EvalReport> reports) {
  std::map<std::string, MatrixTable> tables;
  for (const auto& r : reports) {
    auto& t = tables[r.dataset];
    t.dataset = r.dataset;
    if (std::find(t.models.begin(), t.models.end(), r.model) == t.models.end()) t.models.push_back(r.model);
    if (std::find(t.schemes.begin(), t.schemes.end(), r.scheme) == t.schemes.end()) t.schemes.push_back(r.scheme);
    t.cells[{r.model, r.scheme}] = &r;
  }

  auto scheme_rank = [](const std::string& s) {
    const auto known = parse_scheme(s);
    return std::make_pair(known ? static_cast<int>(*known) : static_cast<int>(kAllSchemes.size()), s);
  };
  std::vector<MatrixTable> out;
  for (auto& [name, t] : tables) {
    std::sort(t.models.begin(), t.models.end());
    std::sort(t.schemes.begin(), t.schemes.end(),
              [&](const std::string& a, const std::string& b) { return scheme_rank(a) < scheme_rank(b); });
    out.push_back(std::move(t));
  }
  return out;
}

void emit_matrix(std::span<const EvalReport> reports, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& table : build_matrices(reports)) {
    const std::string stem = "matrix_" + file_stem(table.dataset);
    std::ofstream csv(dir / (stem + ".csv"), std::ios::binary | std::ios::trunc);
    csv << table.to_csv();
    std::ofstream js(dir / (stem + ".json"), std::ios::binary | std::ios::trunc);
    js << table.to_json().dump(2) << '\n';
    if (!csv || !js) throw ConfigError("cannot write matrix files under " + dir.string());
  }
}

}  // namespace stance
