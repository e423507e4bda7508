#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "logdoc/evalgen.hpp"
#include "logdoc/tree_parser.hpp"
#include "test_fixtures.hpp"

using namespace logdoc;

namespace {

// Independent O(n^2) oracle: walk every unordered pair.
PairwiseCounts exhaustive_counts(const std::vector<std::string>& labels,
                                 const std::vector<int>& clusters) {
  PairwiseCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      const bool same_event = labels[i] == labels[j];
      const bool same_cluster = clusters[i] == clusters[j];
      if (same_event && same_cluster) ++c.tp;
      else if (!same_event && same_cluster) ++c.fp;
      else if (same_event && !same_cluster) ++c.fn;
    }
  }
  return c;
}

}  // namespace

TEST_CASE("generate_corpus with n = 0 is empty") {
  DefinitionStore defs;
  defs.add(testfix::arc0704e_definition());
  CHECK(generate_corpus(defs, 0, 1).empty());
}

TEST_CASE("the same seed reproduces the corpus exactly") {
  auto defs = load_definitions(testfix::data_path("mining_defs_full.json"));
  auto a = generate_corpus(defs, 250, 42);
  auto b = generate_corpus(defs, 250, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].line == b[i].line);
    CHECK(a[i].event_label == b[i].event_label);
  }
  auto c = generate_corpus(defs, 250, 43);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_diff |= a[i].line != c[i].line;
  CHECK(any_diff);
}

TEST_CASE("ARC0704E instances cover exactly the eight enumerated events") {
  DefinitionStore defs;
  defs.add(testfix::arc0704e_definition());
  auto corpus = generate_corpus(defs, 600, 7);
  std::set<std::string> labels;
  for (const auto& log : corpus) labels.insert(log.event_label);
  CHECK(labels.size() == enumerate_resolved_templates(testfix::arc0704e_definition()).size());
  for (const auto& l : labels) CHECK(l.rfind("ARC0704E/", 0) == 0);
}

TEST_CASE("noise-free generated instances parse against their definitions") {
  auto defs = load_definitions(testfix::data_path("defs_roundtrip.json"));
  auto corpus = generate_corpus(defs, 300, 11);
  for (const auto& log : corpus) {
    const std::string id = log.event_label.substr(0, log.event_label.find('/'));
    const auto* def = defs.lookup(id);
    REQUIRE(def != nullptr);
    auto tokens = tokenize(log.line);
    CHECK(parse_dfs(*def, tokens));
  }
}

TEST_CASE("labels are canonical: same label iff same resolved token shape") {
  // a definition whose nested optionals collide on the excluded shape
  DefinitionStore defs;
  defs.add(MessageDefinition{
      "COLL1",
      SyntaxNode::sequential(
          {SyntaxNode::keyword("COLL1"),
           SyntaxNode::optional({SyntaxNode::optional({SyntaxNode::keyword("X")})})}),
      {}});
  auto corpus = generate_corpus(defs, 200, 3);
  std::map<std::string, std::set<std::string>> lines_by_label;
  for (const auto& log : corpus) lines_by_label[log.event_label].insert(log.line);
  CHECK(lines_by_label.size() == 2);  // "COLL1 X" and "COLL1"
  for (const auto& [label, lines] : lines_by_label) CHECK(lines.size() == 1);
}

TEST_CASE("generation honors weights") {
  auto defs = load_definitions(testfix::data_path("mining_defs_full.json"));
  GeneratorConfig cfg;
  for (const auto& [id, def] : defs) cfg.weights[id] = 0.0;
  cfg.weights["HSM1001I"] = 1.0;
  auto corpus = generate_corpus(defs, 50, 5, cfg);
  for (const auto& log : corpus) CHECK(log.event_label.rfind("HSM1001I/", 0) == 0);
}

TEST_CASE("the noise injector mutates roughly the configured share of lines") {
  auto defs = load_definitions(testfix::data_path("mining_defs_documented.json"));
  GeneratorConfig noisy;
  noisy.noise_rate = 0.5;
  auto clean = generate_corpus(defs, 400, 21);
  auto mutated = generate_corpus(defs, 400, 21, noisy);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < clean.size(); ++i)
    if (clean[i].line != mutated[i].line) ++differing;
  // same seed, so lines match except where a mutation fired
  CHECK(differing > 100);
  CHECK(differing < 300);
}

TEST_CASE("multi-token phrase pools flow through parameter overrides") {
  DefinitionStore defs;
  defs.add(MessageDefinition{
      "PHR1",
      SyntaxNode::sequential({SyntaxNode::keyword("PHR1"), SyntaxNode::keyword("NOTE"),
                              SyntaxNode::parameter("msgtext"), SyntaxNode::keyword("END"),
                              SyntaxNode::keyword("NOW")}),
      {}});
  GeneratorConfig cfg;
  cfg.value_model.name_pool_override["msgtext"] = "phrase";
  auto corpus = generate_corpus(defs, 40, 13, cfg);
  bool saw_multi = false;
  for (const auto& log : corpus) {
    auto tokens = tokenize(log.line);
    saw_multi |= tokens.size() > 5;
    CHECK(parse_with_anchors(*defs.lookup("PHR1"), tokens));
  }
  CHECK(saw_multi);
}

TEST_CASE("pairwise counts on the worked examples") {
  using V = std::vector<std::string>;
  using C = std::vector<int>;
  CHECK(pairwise_counts(V{"a", "a", "b", "b"}, C{1, 1, 2, 2}) == PairwiseCounts{2, 0, 0});
  CHECK(pairwise_counts(V{"a", "a", "b", "b"}, C{1, 1, 1, 1}) == PairwiseCounts{2, 4, 0});
  CHECK(pairwise_counts(V{"a", "a"}, C{1, 2}) == PairwiseCounts{0, 0, 1});
  CHECK_THROWS_AS(pairwise_counts(V{"a"}, C{1, 2}), std::invalid_argument);
}

TEST_CASE("contingency counts equal the exhaustive oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 400;
    std::vector<std::string> labels;
    std::vector<int> clusters;
    const int label_space = 1 + static_cast<int>(rng() % 12);
    const int cluster_space = 1 + static_cast<int>(rng() % 15);
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back("e" + std::to_string(rng() % label_space));
      clusters.push_back(static_cast<int>(rng() % cluster_space));
    }
    CHECK(pairwise_counts(labels, clusters) == exhaustive_counts(labels, clusters));
  }
}

TEST_CASE("f_measure is the harmonic mean at reference precision/recall points") {
  // tp/(tp+fp) = 0.7729 and tp/(tp+fn) = 0.9850 exactly
  PairwiseCounts drain{1522613, 447387, 23187};
  auto m1 = metrics(drain);
  CHECK(m1.precision == doctest::Approx(0.7729).epsilon(1e-9));
  CHECK(m1.recall == doctest::Approx(0.9850).epsilon(1e-9));
  CHECK(m1.f_measure == doctest::Approx(0.8661).epsilon(1e-4));

  PairwiseCounts ours{9993, 0, 7};
  auto m2 = metrics(ours);
  CHECK(m2.precision == 1.0);
  CHECK(m2.recall == doctest::Approx(0.9993).epsilon(1e-9));
  CHECK(m2.f_measure == doctest::Approx(0.9996).epsilon(1e-4));
}

TEST_CASE("metrics symmetry and degenerate handling") {
  auto sym = metrics(PairwiseCounts{5, 5, 5});
  CHECK(sym.precision == 0.5);
  CHECK(sym.recall == 0.5);
  CHECK(sym.f_measure == 0.5);

  auto no_positive = metrics(PairwiseCounts{0, 0, 3});
  CHECK(no_positive.precision == 1.0);
  CHECK(no_positive.degenerate);
  CHECK(no_positive.recall == 0.0);

  auto nothing = metrics(PairwiseCounts{0, 0, 0});
  CHECK(nothing.precision == 1.0);
  CHECK(nothing.recall == 1.0);
  CHECK(nothing.f_measure == 1.0);
  CHECK(nothing.degenerate);
}

TEST_CASE("metrics are invariant under cluster relabeling and bounded by P and R") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 120;
    std::vector<std::string> labels;
    std::vector<int> clusters;
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back("e" + std::to_string(rng() % 5));
      clusters.push_back(static_cast<int>(rng() % 6));
    }
    std::vector<int> relabeled;
    for (int c : clusters) relabeled.push_back(1000 - c * 7);
    CHECK(pairwise_counts(labels, clusters) == pairwise_counts(labels, relabeled));
    auto m = metrics(pairwise_counts(labels, clusters));
    CHECK(m.f_measure <= std::max(m.precision, m.recall) + 1e-12);
    CHECK(m.f_measure >= std::min(m.precision, m.recall) - 1e-12);
  }
}

TEST_CASE("corpus files round-trip labels") {
  auto defs = load_definitions(testfix::data_path("mining_defs_documented.json"));
  auto corpus = generate_corpus(defs, 25, 6);
  const auto path = std::filesystem::temp_directory_path() / "logdoc_corpus_test.tsv";
  write_corpus(path, corpus);
  auto labels = read_labels(path);
  REQUIRE(labels.size() == corpus.size());
  for (std::size_t i = 0; i < labels.size(); ++i) CHECK(labels[i] == corpus[i].event_label);
  std::filesystem::remove(path);
}
