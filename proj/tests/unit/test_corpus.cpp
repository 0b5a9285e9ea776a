#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include <stance/corpus.hpp>
#include <stance/errors.hpp>

#include "test_support.hpp"

using namespace stance;
using stance::testing::configs_dir;
using stance::testing::dataset_config_path;
using stance::testing::fixture;

namespace {

DatasetConfig semeval() { return load_dataset_config(dataset_config_path("semeval2016")); }

std::string line(const std::string& id, const std::string& statement, const std::string& label) {
  return R"({"id":")" + id + R"(","statement":")" + statement + R"(","target":"Atheism","label":")" + label +
         "\"}\n";
}

}  // namespace

TEST_CASE("read_dataset keeps file order and standardizes labels") {
  std::istringstream in(line("a", "one", "FAVOR") + line("b", "two", "AGAINST") + line("c", "three", "NONE"));
  const auto records = read_dataset(in, semeval());
  REQUIRE(records.size() == 3);
  CHECK(records[0].id == "a");
  CHECK(records[1].id == "b");
  CHECK(records[2].id == "c");
  CHECK(records[0].canonical_gold == CanonicalLabel::Agree);
  CHECK(records[1].canonical_gold == CanonicalLabel::Disagree);
  CHECK(records[2].canonical_gold == CanonicalLabel::Neutral);
  CHECK(records[2].raw_label == "NONE");
}

TEST_CASE("read_dataset reports the offending line") {
  std::istringstream in(line("a", "one", "FAVOR") + R"({"id":"b","target":"Atheism","label":"FAVOR"})" + "\n");
  try {
    read_dataset(in, semeval());
    FAIL("expected MalformedRecord");
  } catch (const MalformedRecord& e) {
    CHECK(e.line_no() == 2);
  }
}

TEST_CASE("read_dataset rejects empty fields, duplicate ids and unknown labels") {
  {
    std::istringstream in(line("a", "  ", "FAVOR"));
    CHECK_THROWS_AS(read_dataset(in, semeval()), MalformedRecord);
  }
  {
    std::istringstream in(line("a", "one", "FAVOR") + line("a", "two", "FAVOR"));
    CHECK_THROWS_AS(read_dataset(in, semeval()), MalformedRecord);
  }
  {
    std::istringstream in(line("a", "one", "MAYBE"));
    CHECK_THROWS_AS(read_dataset(in, semeval()), UnknownRawLabel);
  }
  {
    std::istringstream in("not json\n");
    CHECK_THROWS_AS(read_dataset(in, semeval()), MalformedRecord);
  }
}

TEST_CASE("standardize_label") {
  const auto cfg = load_dataset_config(dataset_config_path("covid-lies"));
  CHECK(standardize_label("supports", cfg.label_map) == CanonicalLabel::Agree);
  CHECK(standardize_label("denies", cfg.label_map) == CanonicalLabel::Disagree);
  CHECK(standardize_label("unrelated", cfg.label_map) == CanonicalLabel::Neutral);
  CHECK(standardize_label("Denies", cfg.label_map) == CanonicalLabel::Disagree);
  CHECK(standardize_label("for", semeval().label_map) == CanonicalLabel::Agree);
  CHECK_THROWS_AS(standardize_label("maybe", cfg.label_map), UnknownRawLabel);
}

TEST_CASE("write_dataset round-trips") {
  const auto cfg = semeval();
  const auto records = load_dataset(fixture("semeval2016"), cfg);
  std::ostringstream out;
  write_dataset(out, records);
  std::istringstream in(out.str());
  CHECK(read_dataset(in, cfg) == records);
}

TEST_CASE("every shipped config loads its fixture and covers all three classes") {
  for (const auto& name : stance::testing::kFixtureDatasets) {
    CAPTURE(name);
    const auto cfg = load_dataset_config(dataset_config_path(name));
    CHECK(cfg.name == name);
    const auto records = load_dataset(fixture(name), cfg);
    CHECK(records.size() == 10);
    std::set<CanonicalLabel> seen;
    for (const auto& r : records) seen.insert(r.canonical_gold);
    CHECK(seen.size() == 3);
    for (const auto& r : records) {
      const auto& word = gold_option_word(r, cfg);
      CHECK(std::find(cfg.stance_options.begin(), cfg.stance_options.end(), word) != cfg.stance_options.end());
    }
  }
}

TEST_CASE("dataset config validation") {
  using nlohmann::json;
  json good{{"name", "d"},
            {"target_kind", "rumor"},
            {"stance_options", {"supports", "denies", "neutral", "unrelated"}},
            {"label_map", {{"support", "agree"}}}};
  CHECK(parse_dataset_config(good, ".").target_kind_plural == "rumors");

  json three = good;
  three["stance_options"] = {"supports", "denies", "neutral"};
  CHECK_THROWS_AS(parse_dataset_config(three, "."), ConfigError);

  json bad_label = good;
  bad_label["label_map"] = {{"support", "maybe"}};
  CHECK_THROWS_AS(parse_dataset_config(bad_label, "."), ConfigError);

  json no_name = good;
  no_name.erase("name");
  CHECK_THROWS_AS(parse_dataset_config(no_name, "."), ConfigError);
}

TEST_CASE("gold_option_word prefers the raw label when it is an option") {
  const auto cfg = load_dataset_config(dataset_config_path("wtwt"));
  StanceRecord r{"x", "s", "t", "unrelated", CanonicalLabel::Neutral};
  CHECK(gold_option_word(r, cfg) == "unrelated");
  r.raw_label = "comment";
  CHECK(gold_option_word(r, cfg) == "neutral");
  r.raw_label = "refute";
  r.canonical_gold = CanonicalLabel::Disagree;
  CHECK(gold_option_word(r, cfg) == "denies");
}

TEST_CASE("select_exemplars from the curated file") {
  const auto cfg = semeval();
  const auto five = select_exemplars(cfg, 5, 0);
  REQUIRE(five.size() == 5);
  CHECK(five[0].target == "Atheism");
  CHECK(five[1].target == "Climate Change is a Real Concern");
  CHECK(five[2].target == "Feminist Movement");
  CHECK(five[3].target == "Hillary Clinton");
  CHECK(five[4].target == "Legalization of Abortion");
  CHECK(five[3].stance_word == "against");

  const auto two = select_exemplars(cfg, 2, 99);
  REQUIRE(two.size() == 2);
  CHECK(two[1].target == "Climate Change is a Real Concern");

  CHECK_THROWS_AS(select_exemplars(cfg, 0, 0), InsufficientExemplars);
  CHECK_THROWS_AS(select_exemplars(cfg, 6, 0), InsufficientExemplars);
}

TEST_CASE("select_exemplars samples a pool deterministically") {
  const auto cfg = load_dataset_config(dataset_config_path("election2016"));
  REQUIRE_FALSE(cfg.exemplar_file.has_value());
  const auto pool = load_dataset(fixture("election2016"), cfg);
  const auto a = select_exemplars(cfg, 2, 7, pool);
  const auto b = select_exemplars(cfg, 2, 7, pool);
  REQUIRE(a.size() == 2);
  CHECK(a[0].statement == b[0].statement);
  CHECK(a[1].statement == b[1].statement);
  CHECK(a[0].statement != a[1].statement);

  bool differs = false;
  for (std::uint64_t seed = 0; seed < 20 && !differs; ++seed) {
    const auto c = select_exemplars(cfg, 2, seed, pool);
    differs = c[0].statement != a[0].statement || c[1].statement != a[1].statement;
  }
  CHECK(differs);
  CHECK_THROWS_AS(select_exemplars(cfg, 11, 0, pool), InsufficientExemplars);
  CHECK_THROWS_AS(select_exemplars(cfg, 1, 0), InsufficientExemplars);
}
