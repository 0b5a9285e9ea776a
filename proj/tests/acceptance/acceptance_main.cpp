// Exit-gate checks. Prints one PASS/FAIL line per criterion and returns
// nonzero if any fail.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include <stance/corpus.hpp>
#include <stance/evaluator.hpp>
#include <stance/orchestrator.hpp>
#include <stance/parser.hpp>
#include <stance/prompting.hpp>
#include <stance/quality.hpp>

#include "app.hpp"
#include "test_support.hpp"

using namespace stance;
using namespace stance::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream why;

  void fail(const std::string& msg) {
    if (!ok) why << "; ";
    ok = false;
    why << msg;
  }
  void expect(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
  }
};

app::RunConfig mock_run(const fs::path& dir, const std::string& dataset, PromptScheme scheme, const json& script,
                        const std::string& model = "mock-model") {
  fs::create_directories(dir);
  write_file(dir / "mock.json", script.dump());
  app::RunConfig cfg;
  cfg.dataset = fixture(dataset);
  cfg.dataset_config = dataset_config_path(dataset);
  cfg.scheme = scheme;
  cfg.backend.model_name = model;
  cfg.backend.max_retries = 0;
  cfg.mock_script = dir / "mock.json";
  cfg.out_dir = dir / "out";
  return cfg;
}

std::string tag(const std::string& dataset, PromptScheme scheme) {
  return dataset + "/" + std::string(scheme_name(scheme));
}

void golden_prompts(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const auto cfg = load_dataset_config(dataset_config_path("semeval2016"));
  const auto exemplars = select_exemplars(cfg, 5, 0);
  const auto doc = json::parse(read_file(tests_dir() / "golden/prompts/bindings.json"));
  const auto records = load_dataset(fixture("semeval2016"), cfg);
  const auto& rec = records.front();
  v.expect(rec.id == doc["record"]["id"] && rec.statement == doc["record"]["statement"] &&
               rec.target == doc["record"]["target"],
           "golden bindings do not describe the first fixture record");
  Bindings b = record_bindings(rec);
  for (const auto& [k, val] : doc["stage_outputs"].items()) b[k] = val.get<std::string>();

  std::size_t compared = 0;
  for (auto scheme : kAllSchemes) {
    const auto plan = build_plan(scheme, cfg, exemplars);
    for (std::size_t i = 0; i < plan.stages.size(); ++i) {
      const auto name = std::string(scheme_name(scheme)) + "_" + std::to_string(i) + ".txt";
      const auto got = render_stage(plan, i, b, rec.id).text;
      v.expect(got == read_file(tests_dir() / "golden/prompts" / name), name + " differs from golden");
      ++compared;
    }
  }
  v.expect(compared == 13, "expected 13 stage prompts, rendered " + std::to_string(compared));
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  v.expect(ms < 1000.0, "took " + std::to_string(ms) + " ms");
}

void parser_fixture(Verdict& v) {
  const auto vocab = StanceVocab::defaults();
  const std::vector<std::tuple<std::string, CanonicalLabel, Validity>> cases{
      {"agree", CanonicalLabel::Agree, Validity::Good},
      {"the stance is agree", CanonicalLabel::Agree, Validity::Good},
      {"unconfirmed", CanonicalLabel::Neutral, Validity::Bad},
      {"agree, neutral, disagree", CanonicalLabel::Neutral, Validity::Bad}};
  for (const auto& [text, label, validity] : cases) {
    const auto out = parse(text, vocab);
    v.expect(out.label == label && out.validity == validity, "\"" + text + "\" parsed as (" +
                                                                 std::string(to_string(out.label)) + ", " +
                                                                 std::string(to_string(out.validity)) + ")");
  }
}

void macro_f1_oracle(Verdict& v) {
  constexpr auto A = CanonicalLabel::Agree, D = CanonicalLabel::Disagree, N = CanonicalLabel::Neutral;
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    std::vector<LabelPair> pairs;
    for (std::size_t i = 0; i < n; ++i) pairs.push_back({kCanonicalLabels[rng() % 3], kCanonicalLabels[rng() % 3]});
    worst = std::max(worst, std::abs(macro_f1(pairs) - oracle_macro_f1(pairs)));
  }
  v.expect(worst <= 1e-12, "max deviation from oracle " + std::to_string(worst));

  const std::vector<LabelPair> ex1{{A, A}, {A, D}, {D, D}};
  const std::vector<LabelPair> ex2{{A, N}, {D, N}, {N, N}};
  const double m1 = macro_f1(ex1), m2 = macro_f1(ex2);
  v.expect(std::abs(m1 - 4.0 / 9.0) <= 1e-15 && std::abs(oracle_macro_f1(ex1) - 4.0 / 9.0) <= 1e-15,
           "4/9 example gave " + std::to_string(m1));
  v.expect(std::abs(m2 - 1.0 / 6.0) <= 1e-15 && std::abs(oracle_macro_f1(ex2) - 1.0 / 6.0) <= 1e-15,
           "1/6 example gave " + std::to_string(m2));
}

void end_to_end(Verdict& v, const fs::path& scratch) {
  for (const auto& dataset : kFixtureDatasets) {
    const auto cfg = load_dataset_config(dataset_config_path(dataset));
    std::vector<LabelPair> all_neutral;
    for (const auto& r : load_dataset(fixture(dataset), cfg)) all_neutral.push_back({r.canonical_gold, CanonicalLabel::Neutral});
    const double analytic = oracle_macro_f1(all_neutral);

    for (auto scheme : kAllSchemes) {
      const auto dir = scratch / dataset / std::string(scheme_name(scheme));
      const auto echo = app::cmd_run(mock_run(dir / "echo", dataset, scheme, json{{"rule", "echo_gold"}}));
      if (echo.exit_code != 0) {
        v.fail(tag(dataset, scheme) + " echo run exited " + std::to_string(echo.exit_code) + ": " + echo.message);
        continue;
      }
      const auto rep = build_report(read_results(dir / "echo/out/results.jsonl"));
      v.expect(rep.macro_f1_all == 1.0 && rep.valid_proportion == 1.0,
               tag(dataset, scheme) + " echo-gold scored " + std::to_string(rep.macro_f1_all));

      const auto neutral = app::cmd_run(mock_run(dir / "neutral", dataset, scheme, json{{"always", "neutral"}}));
      if (neutral.exit_code != 0) {
        v.fail(tag(dataset, scheme) + " neutral run exited " + std::to_string(neutral.exit_code));
        continue;
      }
      const auto nrep = build_report(read_results(dir / "neutral/out/results.jsonl"));
      v.expect(std::abs(nrep.macro_f1_all - analytic) <= 1e-12,
               tag(dataset, scheme) + " always-neutral scored " + std::to_string(nrep.macro_f1_all) + ", oracle " +
                   std::to_string(analytic));
    }
  }
}

void chain_shape(Verdict& v) {
  for (const auto& dataset : kFixtureDatasets) {
    const auto cfg = load_dataset_config(dataset_config_path(dataset));
    const auto records = load_dataset(fixture(dataset), cfg);
    for (auto [scheme, per_record] : {std::pair{PromptScheme::ZeroShotCoT, 2u}, std::pair{PromptScheme::CoDA, 6u}}) {
      // Each reply is unique to its record and position so it can be traced downstream.
      auto counters = std::make_shared<std::map<std::string, int>>();
      auto mutex = std::make_shared<std::mutex>();
      auto transport = std::make_shared<CallbackTransport>([=](const WireRequest& req) {
        int n = 0;
        {
          std::lock_guard lock(*mutex);
          n = (*counters)[req.record_id]++;
        }
        const std::string text = "<<" + req.record_id + " reply " + std::to_string(n) + ">>";
        return HttpResponse{200, make_wire_response(ApiStyle::Chat, text).dump()};
      });
      BackendConfig bc;
      bc.endpoint_url = "mock://scripted";
      bc.model_name = "scripted";
      bc.parallelism = 4;
      CompletionClient client(bc, transport);
      const auto plan = build_plan(scheme, cfg);
      const auto transcripts = run_experiment(records, plan, client);

      v.expect(transport->requests_sent() == per_record * records.size(),
               tag(dataset, scheme) + " sent " + std::to_string(transport->requests_sent()) + " requests");
      for (const auto& t : transcripts) {
        if (t.stages.size() != per_record) {
          v.fail(tag(dataset, scheme) + " " + t.record_id + " has " + std::to_string(t.stages.size()) + " stages");
          continue;
        }
        std::map<std::string, std::string> produced;
        for (std::size_t i = 0; i < plan.stages.size(); ++i) {
          for (const auto& name : plan.stages[i].consumes) {
            const auto it = produced.find(name);
            if (it == produced.end()) continue;
            v.expect(t.stages[i].prompt.find(it->second) != std::string::npos,
                     tag(dataset, scheme) + " stage " + std::to_string(i) + " lacks " + name);
          }
          produced[plan.stages[i].produces] = t.stages[i].completion;
        }
      }
    }
  }
}

void cache_resume(Verdict& v, const fs::path& scratch) {
  const std::vector<std::pair<std::string, PromptScheme>> experiments{
      {"semeval2016", PromptScheme::CoDA}, {"semeval2016", PromptScheme::FewShot},
      {"srq", PromptScheme::ZeroShotCoT},  {"wtwt", PromptScheme::ContextAnalyze},
      {"covid-lies", PromptScheme::TaskDefinition}};
  for (const auto& [dataset, scheme] : experiments) {
    const auto dir = scratch / dataset / std::string(scheme_name(scheme));
    auto first = mock_run(dir / "serial", dataset, scheme, json{{"rule", "echo_gold"}});
    first.cache_dir = dir / "cache";
    const auto r1 = app::cmd_run(first);
    const auto results1 = read_file(first.out_dir / "results.jsonl");
    const auto transcripts1 = read_file(first.out_dir / "transcripts.jsonl");
    v.expect(r1.exit_code == 0 && r1.requests_sent > 0, tag(dataset, scheme) + " first run failed");

    auto again = first;
    again.out_dir = dir / "rerun";
    const auto r2 = app::cmd_run(again);
    v.expect(r2.requests_sent == 0, tag(dataset, scheme) + " rerun sent " + std::to_string(r2.requests_sent));
    v.expect(read_file(again.out_dir / "results.jsonl") == results1, tag(dataset, scheme) + " rerun results differ");

    auto wide = mock_run(dir / "wide", dataset, scheme, json{{"rule", "echo_gold"}});
    wide.backend.parallelism = 8;
    wide.cache_dir = dir / "cache8";
    const auto r3 = app::cmd_run(wide);
    v.expect(r3.requests_sent == r1.requests_sent, tag(dataset, scheme) + " parallel run sent a different count");
    v.expect(read_file(wide.out_dir / "results.jsonl") == results1,
             tag(dataset, scheme) + " parallelism 8 results differ");
    v.expect(read_file(wide.out_dir / "transcripts.jsonl") == transcripts1,
             tag(dataset, scheme) + " parallelism 8 transcripts differ");
  }
}

void quality_analysis(Verdict& v) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng() % 300;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(1 + rng() % 120);
      y[i] = static_cast<double>(rng() % 2);
    }
    x[0] = 1;
    x[1] = 2;
    y[0] = 0;
    y[1] = 1;
    worst = std::max(worst, std::abs(correlate(x, y).r - oracle_pearson(x, y)));
  }
  v.expect(worst <= 1e-10, "pearson deviation " + std::to_string(worst));

  constexpr auto C = Outcome::Correct, I = Outcome::Incorrect;
  const std::vector<FeatureVector> X{
      FeatureVector::make(1, 0, true),  FeatureVector::make(1, 0, true),  FeatureVector::make(2, 1, true),
      FeatureVector::make(3, 2, true),  FeatureVector::make(5, 4, false), FeatureVector::make(1, 0, true),
      FeatureVector::make(8, 7, false), FeatureVector::make(2, 1, false)};
  const std::vector<Outcome> y{C, C, C, I, I, C, I, C};
  const auto want = oracle_best_split(X, y);
  const auto tree = train_tree(X, y);
  v.expect(want.has_value() && !tree.root().is_leaf() && tree.root().feature == want->feature &&
               tree.root().threshold == (want->left_max + want->right_min) / 2.0,
           "root split disagrees with exhaustive enumeration");
  v.expect(tree.root().feature == 0 && tree.root().threshold == 2.5, "root split is not (feature 0, 2.5)");

  std::vector<FeatureVector> sx;
  std::vector<Outcome> sy;
  for (int i = 0; i < 250; ++i) {
    const bool valid = rng() % 3 != 0;
    sx.push_back(FeatureVector::make(1 + rng() % 60, rng() % 20, valid));
    sy.push_back(valid ? C : I);
  }
  const auto split = train_test_split(sx.size(), 0.2, 11);
  std::vector<FeatureVector> xtr, xte;
  std::vector<Outcome> ytr, yte;
  for (auto i : split.train) xtr.push_back(sx[i]), ytr.push_back(sy[i]);
  for (auto i : split.test) xte.push_back(sx[i]), yte.push_back(sy[i]);
  const double acc = tree_accuracy(train_tree(xtr, ytr), xte, yte);
  v.expect(acc == 1.0, "held-out accuracy on separable data " + std::to_string(acc));
}

void report_emission(Verdict& v, const fs::path& scratch) {
  struct Cell {
    std::string model;
    PromptScheme scheme;
    json script;
  };
  const std::vector<Cell> grid{
      {"alpha", PromptScheme::TaskOnly, {{"rule", "echo_gold"}}},
      {"alpha", PromptScheme::ContextAnalyze, {{"rule", "echo_gold"}}},
      {"alpha", PromptScheme::CoDA, {{"rule", "echo_gold"}}},
      {"beta", PromptScheme::TaskOnly, {{"always", "against"}}},
      {"beta", PromptScheme::ContextAnalyze, {{"always", "neutral"}}},
      // beta x CoDA is not run.
  };
  std::vector<fs::path> results;
  for (const auto& c : grid) {
    const auto dir = scratch / (c.model + "-" + std::string(scheme_name(c.scheme)));
    const auto out = app::cmd_run(mock_run(dir, "semeval2016", c.scheme, c.script, c.model));
    v.expect(out.exit_code == 0, c.model + " run failed");
    results.push_back(dir / "out/results.jsonl");
  }
  std::ostringstream err;
  const int rc = app::cmd_eval(results, scratch / "report", err);
  v.expect(rc == 0, "eval failed: " + err.str());
  if (rc != 0) return;
  const auto got = read_file(scratch / "report/matrix_semeval2016.csv");
  v.expect(got == read_file(tests_dir() / "golden/matrix_semeval2016.csv"), "matrix csv differs:\n" + got);
}

}  // namespace

int main() {
  TempDir scratch("acceptance");
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"golden prompts", golden_prompts},
      {"parser fixture", parser_fixture},
      {"macro-F1 oracle", macro_f1_oracle},
      {"end-to-end mock runs", [&](Verdict& v) { end_to_end(v, scratch / "e2e"); }},
      {"chain shape", chain_shape},
      {"cache and resume", [&](Verdict& v) { cache_resume(v, scratch / "cache"); }},
      {"quality analysis", quality_analysis},
      {"report emission", [&](Verdict& v) { report_emission(v, scratch / "grid"); }},
  };

  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      check(v);
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    if (v.ok) {
      std::cout << "PASS  " << name << '\n';
    } else {
      ++failed;
      std::cout << "FAIL  " << name << ": " << v.why.str() << '\n';
    }
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
