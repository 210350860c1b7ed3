#include <gtest/gtest.h>

#include "support.hpp"

namespace {

using namespace cqc;
using cqc::testing::as_set;
using cqc::testing::load_fixture;
using cqc::testing::node_of;
using cqc::testing::oracle_paths;

constexpr auto F = Direction::forward;
constexpr auto R = Direction::reversed;

SearchConfig general() {
  SearchConfig cfg;
  cfg.terminal_only = false;
  return cfg;
}

TEST(FindCqcPaths, TwoNodeCycle) {
  const auto g = NoisyGraph::from_edges({0, 1}, {{0, 1}, {1, 0}});
  const auto paths = find_cqc_paths(g, 1, 0, SearchConfig{});
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths.paths()[0], (Path{{0, 1, 0}, {F, F}}));
}

TEST(FindCqcPaths, LanguageExampleHistograms) {
  const auto dict = load_fixture("language.json");
  const auto g = build_noisy_graph(dict);
  const auto s = node_of(g, dict, "language", "en", "1");
  auto hist = [&](const char* lemma, const char* label) {
    return find_cqc_paths(g, node_of(g, dict, lemma, "it", label), s, general()).by_length();
  };
  using H = std::map<int, std::size_t>;
  EXPECT_EQ(hist("lingua", "1"), (H{{4, 2}}));
  EXPECT_EQ(hist("lingua", "2"), (H{{2, 1}, {3, 3}, {4, 2}}));
  EXPECT_EQ(hist("linguaggio", "1"), (H{{4, 2}}));
  EXPECT_EQ(hist("linguaggio", "2"), (H{{2, 1}, {3, 2}, {4, 2}}));
  EXPECT_EQ(hist("linguaggio", "3"), (H{{2, 1}}));
}

TEST(FindCqcPaths, EloquioQuasiCycle) {
  const auto dict = load_fixture("language.json");
  const auto g = build_noisy_graph(dict);
  const auto s = node_of(g, dict, "language", "en", "1");
  const auto linguaggio1 = node_of(g, dict, "linguaggio", "it", "1");
  const Path expected{{s, linguaggio1, node_of(g, dict, "speech", "en", "1"), node_of(g, dict, "eloquio", "it", "1"), s},
                      {F, F, R, F}};
  EXPECT_TRUE(find_cqc_paths(g, linguaggio1, s, general()).contains(expected));
  EXPECT_EQ(format_path(expected, g, dict), "language#n#1->linguaggio#n#1->speech#n#1<-eloquio#n#1->language#n#1");
  // The run does not end at s, so the default terminal-only search drops it.
  EXPECT_FALSE(find_cqc_paths(g, linguaggio1, s, SearchConfig{}).contains(expected));
}

TEST(FindCqcPaths, SameLemmaPathRejected) {
  const auto dict = load_fixture("language.json");
  const auto g = build_noisy_graph(dict);
  const auto s = node_of(g, dict, "language", "en", "1");
  const auto lingua1 = node_of(g, dict, "lingua", "it", "1");
  const auto lingua2 = node_of(g, dict, "lingua", "it", "2");
  const auto tongue = node_of(g, dict, "tongue", "en", "1");
  const Path crossing{{s, lingua1, tongue, lingua2, s}, {F, F, R, F}};
  // Every edge exists, yet the path visits two senses of lingua.
  EXPECT_TRUE(g.has_edge(lingua1, tongue));
  EXPECT_TRUE(g.has_edge(lingua2, tongue));
  EXPECT_TRUE(g.has_edge(lingua2, s));
  const auto verdict = is_legal_path(crossing, general(), g);
  EXPECT_FALSE(verdict.legal);
  EXPECT_EQ(verdict.rule, PathRule::same_lemma);
  EXPECT_FALSE(find_cqc_paths(g, lingua1, s, general()).contains(crossing));
}

TEST(FindCqcPaths, NonConsecutiveReversedEdgesRejected) {
  // s -> a -> b <- c -> d <- s : two separate reversed runs.
  const auto g = NoisyGraph::from_edges({0, 1, 2, 3, 4}, {{0, 1}, {1, 2}, {3, 2}, {3, 4}, {0, 4}});
  SearchConfig cfg = general();
  cfg.max_depth = 6;
  cfg.max_reversed = 3;
  const Path shape{{0, 1, 2, 3, 4, 0}, {F, F, R, F, R}};
  EXPECT_EQ(is_legal_path(shape, cfg, g).rule, PathRule::consecutive);
  EXPECT_TRUE(find_cqc_paths(g, 1, 0, cfg).empty());
  EXPECT_TRUE(enumerate_paths_bruteforce(g, 1, 0, cfg).empty());
}

TEST(FindCqcPaths, RejectsBadConfigAndEndpoints) {
  const auto g = NoisyGraph::from_edges({0, 1, 1}, {{0, 1}, {1, 0}});
  SearchConfig cfg;
  cfg.max_depth = 9;
  try {
    find_cqc_paths(g, 1, 0, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::illegal_config);
  }
  cfg.max_depth = 0;
  EXPECT_THROW(find_cqc_paths(g, 1, 0, cfg), Error);
  EXPECT_THROW(find_cqc_paths(g, 1, 2, SearchConfig{}), Error);  // same lemma
  EXPECT_THROW(find_cqc_paths(g, 1, 7, SearchConfig{}), Error);
}

TEST(IsLegalPath, Rules) {
  // 0 -> 1 -> 2 <- 3 <- 4 <- 0 : reversed run of three edges ending at s.
  const auto g = NoisyGraph::from_edges({0, 1, 2, 3, 4}, {{0, 1}, {1, 0}, {1, 2}, {3, 2}, {4, 3}, {0, 4}});
  SearchConfig cfg;
  cfg.max_depth = 6;
  EXPECT_TRUE(is_legal_path({{0, 1, 0}, {F, F}}, cfg, g).legal);

  const Path run3{{0, 1, 2, 3, 4, 0}, {F, F, R, R, R}};
  EXPECT_EQ(is_legal_path(run3, cfg, g).rule, PathRule::max_reversed);
  cfg.max_reversed = 3;
  EXPECT_TRUE(is_legal_path(run3, cfg, g).legal);

  // Run 1 -> 2 <- 3 followed by forward edges back to s is not terminal.
  const auto h = NoisyGraph::from_edges({0, 1, 2, 3}, {{0, 1}, {1, 2}, {3, 2}, {3, 0}});
  const Path inner{{0, 1, 2, 3, 0}, {F, F, R, F}};
  EXPECT_EQ(is_legal_path(inner, SearchConfig{}, h).rule, PathRule::terminal_only);
  EXPECT_TRUE(is_legal_path(inner, general(), h).legal);

  EXPECT_EQ(is_legal_path({{0, 1, 0}, {F, F}}, SearchConfig{.max_depth = 1}, g).rule, PathRule::max_depth);
  EXPECT_EQ(is_legal_path({{0, 1, 2}, {F, F}}, cfg, g).rule, PathRule::not_closed);
  EXPECT_EQ(is_legal_path({{0, 4, 0}, {F, F}}, cfg, g).rule, PathRule::missing_edge);
  EXPECT_EQ(is_legal_path({{0, 1, 0}, {F}}, cfg, g).rule, PathRule::structure);
  EXPECT_EQ(is_legal_path({{0, 1, 2, 1, 0}, {F, F, R, F}}, general(), g).rule, PathRule::simple);
  EXPECT_EQ(is_legal_path(inner, cycles_only(general()), h).rule, PathRule::quasi_disallowed);
}

TEST(IsLegalPath, ReversedRunMayNotTouchTheFirstTwoEdges) {
  // s -> s' <- a -> s: the edge leaving s' is reversed.
  const auto g = NoisyGraph::from_edges({0, 1, 2}, {{0, 1}, {2, 1}, {2, 0}});
  const Path p{{0, 1, 2, 0}, {F, R, F}};
  EXPECT_EQ(is_legal_path(p, general(), g).rule, PathRule::reversed_position);
  const auto h = NoisyGraph::from_edges({0, 1}, {{1, 0}});
  EXPECT_EQ(is_legal_path({{0, 1, 0}, {R, F}}, general(), h).rule, PathRule::first_edge);
}

TEST(FindOpenPaths, Basics) {
  const auto two = NoisyGraph::from_edges({0, 1}, {{0, 1}, {1, 0}});
  const auto p = find_open_paths(two, 1, 0, 4);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.paths()[0].length(), 2);

  const auto dead = NoisyGraph::from_edges({0, 1}, {{0, 1}});
  EXPECT_TRUE(find_open_paths(dead, 1, 0, 4).empty());

  const auto chain = NoisyGraph::from_edges({0, 1, 2}, {{0, 1}, {1, 2}, {2, 0}});
  const auto c = find_open_paths(chain, 1, 0, 4);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.paths()[0].length(), 3);
}

TEST(FindOpenPaths, IgnoresLemmaSharing) {
  // s' -> a -> s where a shares its lemma with s'.
  const auto g = NoisyGraph::from_edges({0, 1, 1}, {{0, 1}, {1, 2}, {2, 0}});
  EXPECT_EQ(find_open_paths(g, 1, 0, 4).size(), 1u);
  EXPECT_TRUE(find_cqc_paths(g, 1, 0, SearchConfig{}).empty());
}

TEST(BruteForce, GuardsAndEmptyGraph) {
  const auto empty = NoisyGraph::from_edges({0, 1, 2}, {});
  EXPECT_TRUE(enumerate_paths_bruteforce(empty, 1, 0, SearchConfig{}).empty());
  std::vector<std::uint32_t> lemmas(15);
  for (std::uint32_t i = 0; i < 15; ++i) lemmas[i] = i;
  const auto big = NoisyGraph::from_edges(lemmas, {{0, 1}});
  try {
    enumerate_paths_bruteforce(big, 1, 0, SearchConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::graph_too_large);
  }
}

TEST(Oracle, MatchesSearchOnFixtures) {
  const auto dict = load_fixture("language.json");
  const auto g = build_noisy_graph(dict);
  const auto s = node_of(g, dict, "language", "en", "1");
  for (const auto& e : g.out_edges(s)) {
    for (auto cfg : {SearchConfig{}, general(), cycles_only(general())}) {
      EXPECT_EQ(as_set(find_cqc_paths(g, e.node, s, cfg)), oracle_paths(g, e.node, s, cfg));
    }
  }
}

// Random graphs: search, library brute force and the test oracle agree, and
// the structural properties hold.
class RandomGraphs : public ::testing::TestWithParam<int> {};

TEST_P(RandomGraphs, SearchAgreesWithOracles) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) * 7919u + 11u);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4 + rng() % 8;
    const auto graph = cqc::testing::random_graph(rng, n, 0.25);
    const auto& g = graph.graph;
    const auto cfg = cqc::testing::random_search_config(rng);
    for (auto [s, t] : graph.edges) {
      if (g.lemma_of(s) == g.lemma_of(t)) continue;
      const auto found = find_cqc_paths(g, t, s, cfg);
      EXPECT_EQ(found.size(), as_set(found).size()) << "duplicates";
      EXPECT_EQ(as_set(found), oracle_paths(g, t, s, cfg));
      EXPECT_EQ(found, enumerate_paths_bruteforce(g, t, s, cfg));
      for (const auto& p : found.paths()) {
        EXPECT_TRUE(is_legal_path(p, cfg, g).legal);
        EXPECT_GE(p.length(), 2);
        EXPECT_LE(p.length(), cfg.max_depth);
      }
      if (cfg.max_depth < kMaxSearchDepth) {
        auto deeper = cfg;
        ++deeper.max_depth;
        EXPECT_TRUE(found.is_subset_of(find_cqc_paths(g, t, s, deeper)));
      }
      const auto cycles = find_cqc_paths(g, t, s, cycles_only(cfg));
      EXPECT_TRUE(cycles.is_subset_of(found));
      for (const auto& p : cycles.paths()) {
        EXPECT_EQ(p.reversed_count(), 0);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomGraphs, ::testing::Range(0, 10));

}  // namespace
