#include <random>

#include <benchmark/benchmark.h>

#include <stance/corpus.hpp>
#include <stance/evaluator.hpp>
#include <stance/parser.hpp>
#include <stance/prompting.hpp>
#include <stance/quality.hpp>

using namespace stance;

namespace {

const DatasetConfig& semeval() {
  static const auto cfg = load_dataset_config(std::filesystem::path(STANCE_CONFIGS_DIR) / "semeval2016.json");
  return cfg;
}

void BM_ParseShort(benchmark::State& state) {
  const auto vocab = StanceVocab::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(parse("Against.", vocab));
}
BENCHMARK(BM_ParseShort);

void BM_ParseLong(benchmark::State& state) {
  const auto vocab = StanceVocab::defaults();
  std::string text;
  for (int i = 0; i < state.range(0); ++i) text += "the author appears to lean, on balance, ";
  text += "against";
  for (auto _ : state) benchmark::DoNotOptimize(parse(text, vocab));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseLong)->Arg(8)->Arg(64);

void BM_MacroF1(benchmark::State& state) {
  std::mt19937 rng(1);
  std::vector<LabelPair> pairs;
  for (int i = 0; i < state.range(0); ++i) pairs.push_back({kCanonicalLabels[rng() % 3], kCanonicalLabels[rng() % 3]});
  for (auto _ : state) benchmark::DoNotOptimize(macro_f1(pairs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MacroF1)->Arg(1000)->Arg(30000);

void BM_TrainTree(benchmark::State& state) {
  std::mt19937 rng(2);
  std::vector<FeatureVector> X;
  std::vector<Outcome> y;
  for (int i = 0; i < state.range(0); ++i) {
    const double len = 1 + rng() % 80;
    X.push_back(FeatureVector::make(len, rng() % static_cast<unsigned>(len), rng() % 2 == 0));
    y.push_back(rng() % 2 ? Outcome::Correct : Outcome::Incorrect);
  }
  for (auto _ : state) benchmark::DoNotOptimize(train_tree(X, y));
}
BENCHMARK(BM_TrainTree)->Arg(1000)->Arg(10000);

void BM_BuildPlanFewShot(benchmark::State& state) {
  const auto exemplars = select_exemplars(semeval(), 5, 0);
  for (auto _ : state) benchmark::DoNotOptimize(build_plan(PromptScheme::FewShot, semeval(), exemplars));
}
BENCHMARK(BM_BuildPlanFewShot);

void BM_RenderCoDAFinal(benchmark::State& state) {
  const auto plan = build_plan(PromptScheme::CoDA, semeval());
  Bindings b{{"statement", "Religion has done more harm than good. #SemST"}, {"event", "Atheism"}};
  for (const auto& s : plan.stages) b[s.produces] = std::string(400, 'x');
  for (auto _ : state) benchmark::DoNotOptimize(render_stage(plan, 5, b));
}
BENCHMARK(BM_RenderCoDAFinal);

}  // namespace

BENCHMARK_MAIN();
