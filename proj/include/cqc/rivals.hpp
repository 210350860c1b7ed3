#pragma once

// Comparison disambiguators. Each one produces the same SenseMapping
// contract as CQC so they can be evaluated side by side.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqc/dictionary.hpp"
#include "cqc/error.hpp"
#include "cqc/graph.hpp"
#include "cqc/mapping.hpp"
#include "cqc/paths.hpp"
#include "cqc/random.hpp"
#include "cqc/scoring.hpp"

namespace cqc {

enum class AlgorithmId {
  cqc,
  cycles,
  dfs,
  random_walks,
  markov,
  ppr,
  lesk,
  fs,
  random,
  degree,
  undirected_cycles,
};

inline constexpr AlgorithmId kAllAlgorithms[] = {
    AlgorithmId::cqc,  AlgorithmId::cycles, AlgorithmId::dfs,    AlgorithmId::random_walks,
    AlgorithmId::markov, AlgorithmId::ppr,  AlgorithmId::lesk,   AlgorithmId::fs,
    AlgorithmId::random, AlgorithmId::degree, AlgorithmId::undirected_cycles,
};

inline std::string_view to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::cqc: return "cqc";
    case AlgorithmId::cycles: return "cycles";
    case AlgorithmId::dfs: return "dfs";
    case AlgorithmId::random_walks: return "random_walks";
    case AlgorithmId::markov: return "markov";
    case AlgorithmId::ppr: return "ppr";
    case AlgorithmId::lesk: return "lesk";
    case AlgorithmId::fs: return "fs";
    case AlgorithmId::random: return "random";
    case AlgorithmId::degree: return "degree";
    case AlgorithmId::undirected_cycles: return "undirected_cycles";
  }
  return "cqc";
}

inline std::optional<AlgorithmId> parse_algorithm(std::string_view text) {
  for (auto id : kAllAlgorithms) {
    if (to_string(id) == text) return id;
  }
  return std::nullopt;
}

inline bool is_baseline(AlgorithmId id) {
  return id == AlgorithmId::fs || id == AlgorithmId::random || id == AlgorithmId::degree;
}

struct AlgorithmConfig {
  SearchConfig search;
  WeightFunction weight;
  int walk_count = 400;
  std::uint64_t seed = 0;
  int markov_steps = 2;
  double damping = 0.85;
  int ppr_iterations = 30;
};

// ---------------------------------------------------------------------------
// Path-collecting variants

inline SenseMapping run_cycles_only(const NoisyGraph& g, NodeId source, const SearchConfig& cfg,
                                    const WeightFunction& weight = {}) {
  return disambiguate_entry(g, source, cycles_only(cfg), weight);
}

inline SenseMapping run_open_dfs(const NoisyGraph& g, NodeId source, const SearchConfig& cfg,
                                 const WeightFunction& weight = {}) {
  cfg.validate();
  return disambiguate_with_paths(g, source, weight, cfg.max_depth, [&](NodeId start, NodeId target) {
    return find_open_paths(g, start, target, cfg.max_depth, cfg.include_meta);
  });
}

struct RandomWalkConfig {
  int walk_count = 400;
  int max_depth = 4;
  std::uint64_t seed = 0;
  bool include_meta = true;

  void validate() const {
    if (walk_count < 1) throw Error(ErrorKind::illegal_config, "walk count must be >= 1");
    SearchConfig{max_depth}.validate();
  }
};

// Walk i from s' draws from its own stream, so the first k walks are the
// same for any walk_count >= k. A walk ends at s (collected), at a dead end,
// after max_depth edges, or when it would revisit a node or lemma.
inline PathSet collect_random_walk_paths(const NoisyGraph& g, NodeId start, NodeId target,
                                         const RandomWalkConfig& cfg) {
  cfg.validate();
  std::set<Path> seen;
  PathSet out;
  std::vector<NodeId> choices;
  for (int walk = 0; walk < cfg.walk_count; ++walk) {
    Rng rng(stream_seed(cfg.seed, "walks", {target, start, static_cast<std::uint64_t>(walk)}));
    Path path{{target, start}, {Direction::forward}};
    while (path.length() < cfg.max_depth) {
      choices.clear();
      for (const auto& edge : g.out_edges(path.nodes.back())) {
        if (usable(edge, cfg.include_meta)) choices.push_back(edge.node);
      }
      if (choices.empty()) break;
      const NodeId next = choices[uniform_index(rng, choices.size())];
      path.nodes.push_back(next);
      path.directions.push_back(Direction::forward);
      if (next == target) {
        if (seen.insert(path).second) out.add(path);
        break;
      }
      const bool repeats = std::any_of(path.nodes.begin(), path.nodes.end() - 1, [&](NodeId id) {
        return id == next || g.lemma_of(id) == g.lemma_of(next);
      });
      if (repeats) break;
    }
  }
  return out;
}

inline SenseMapping run_random_walks(const NoisyGraph& g, NodeId source, const RandomWalkConfig& cfg,
                                     const WeightFunction& weight = {}) {
  cfg.validate();
  return disambiguate_with_paths(g, source, weight, cfg.max_depth, [&](NodeId start, NodeId target) {
    return collect_random_walk_paths(g, start, target, cfg);
  });
}

// ---------------------------------------------------------------------------
// Markov chains

// Row-stochastic transition matrix, p(v, v') = 1 / out(v) on every edge.
// Rows of dangling nodes are all zero.
class TransitionMatrix {
 public:
  struct Entry {
    NodeId column;
    double probability;
  };

  static TransitionMatrix from(const NoisyGraph& g, bool include_meta = true) {
    TransitionMatrix m;
    m.rows_.resize(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
      std::vector<NodeId> targets;
      for (const auto& edge : g.out_edges(v)) {
        if (usable(edge, include_meta)) targets.push_back(edge.node);
      }
      for (NodeId t : targets) m.rows_[v].push_back({t, 1.0 / static_cast<double>(targets.size())});
    }
    return m;
  }

  std::size_t size() const { return rows_.size(); }
  std::span<const Entry> row(NodeId v) const { return rows_[v]; }

  double row_sum(NodeId v) const {
    double sum = 0.0;
    for (const auto& e : rows_[v]) sum += e.probability;
    return sum;
  }

  // x P
  std::vector<double> propagate(std::span<const double> x) const {
    std::vector<double> next(rows_.size(), 0.0);
    for (NodeId v = 0; v < rows_.size(); ++v) {
      if (x[v] == 0.0) continue;
      for (const auto& e : rows_[v]) next[e.column] += x[v] * e.probability;
    }
    return next;
  }

 private:
  std::vector<std::vector<Entry>> rows_;
};

// (1/n) sum_{m=1..n} p^(m)(start, target).
inline double markov_arrival_probability(const TransitionMatrix& m, NodeId start, NodeId target, int steps) {
  if (steps < 1) throw Error(ErrorKind::illegal_config, "markov steps must be >= 1");
  std::vector<double> x(m.size(), 0.0);
  x[start] = 1.0;
  double sum = 0.0;
  for (int step = 1; step <= steps; ++step) {
    x = m.propagate(x);
    sum += x[target];
  }
  return sum / static_cast<double>(steps);
}

inline SenseMapping run_markov(const NoisyGraph& g, NodeId source, int steps, bool include_meta = true) {
  if (steps < 1) throw Error(ErrorKind::illegal_config, "markov steps must be >= 1");
  const auto matrix = TransitionMatrix::from(g, include_meta);
  return map_translations(g, source, [&](WordDecision& decision) {
    for (auto& candidate : decision.candidates) {
      candidate.score = markov_arrival_probability(matrix, candidate.sense, source, steps);
    }
    decision.chosen = pick_best(std::span<const CandidateScore>(decision.candidates));
  });
}

// ---------------------------------------------------------------------------
// Personalized PageRank

using RankObserver = std::function<void(int iteration, std::span<const double> ranks)>;

// Power iteration with all teleport mass on `seed`; the mass of dangling
// nodes is returned to `seed` as well, so ranks always sum to one.
inline std::vector<double> personalized_pagerank(const NoisyGraph& g, NodeId seed, double damping = 0.85,
                                                 int iterations = 30, bool include_meta = true,
                                                 const RankObserver& observer = {}) {
  if (seed >= g.node_count()) throw Error(ErrorKind::unknown_node, "node " + std::to_string(seed));
  if (damping < 0.0 || damping > 1.0) throw Error(ErrorKind::illegal_config, "damping outside [0, 1]");
  if (iterations < 0) throw Error(ErrorKind::illegal_config, "negative iteration count");
  const auto matrix = TransitionMatrix::from(g, include_meta);
  std::vector<double> rank(g.node_count(), 0.0);
  rank[seed] = 1.0;
  for (int it = 1; it <= iterations; ++it) {
    std::vector<double> next(rank.size(), 0.0);
    double dangling = 0.0;
    for (NodeId v = 0; v < rank.size(); ++v) {
      const auto row = matrix.row(v);
      if (row.empty()) {
        dangling += rank[v];
        continue;
      }
      for (const auto& e : row) next[e.column] += damping * rank[v] * e.probability;
    }
    next[seed] += (1.0 - damping) + damping * dangling;
    rank = std::move(next);
    if (observer) observer(it, rank);
  }
  return rank;
}

namespace detail {

inline const TranslationLink& resolvable_link(const NoisyGraph& g, NodeId source, std::size_t word_index) {
  check_source(g, source);
  const auto links = g.translation_links(source);
  if (word_index >= links.size()) {
    throw Error(ErrorKind::unknown_word, "translation #" + std::to_string(word_index));
  }
  if (!links[word_index].entry) throw Error(ErrorKind::unresolvable_word, links[word_index].word);
  return links[word_index];
}

inline WordDecision decision_for(const NoisyGraph& g, NodeId source, std::size_t word_index) {
  const auto& link = resolvable_link(g, source, word_index);
  WordDecision decision{link.word, word_index, link.entry, {}, std::nullopt};
  for (NodeId candidate : g.senses_of(*link.entry)) decision.candidates.push_back({candidate, 0.0});
  return decision;
}

}  // namespace detail

inline void score_ppr(const NoisyGraph& g, NodeId source, WordDecision& decision, double damping, int iterations,
                      bool include_meta) {
  for (auto& candidate : decision.candidates) {
    candidate.score = personalized_pagerank(g, candidate.sense, damping, iterations, include_meta)[source];
  }
  decision.chosen = pick_best(std::span<const CandidateScore>(decision.candidates));
}

inline WordDecision run_ppr(const NoisyGraph& g, NodeId source, std::size_t word_index, double damping = 0.85,
                            int iterations = 30, bool include_meta = true) {
  auto decision = detail::decision_for(g, source, word_index);
  score_ppr(g, source, decision, damping, iterations, include_meta);
  return decision;
}

// ---------------------------------------------------------------------------
// Lesk

// |next*(s) ∩ next*(s')| / max(|next*(s)|, |next*(s')|) with
// next*(x) = synonyms(x) ∪ next(x). Synonyms (lemma plus variants) compare
// as strings, neighbours as nodes. Without a dictionary synonyms are empty.
inline double lesk_overlap(const NoisyGraph& g, NodeId s, NodeId other, const Dictionary* dict,
                           bool include_meta = true) {
  auto neighbours = [&](NodeId x) {
    std::set<NodeId> out;
    for (const auto& edge : g.out_edges(x)) {
      if (usable(edge, include_meta)) out.insert(edge.node);
    }
    return out;
  };
  auto synonyms = [&](NodeId x) {
    std::set<std::string> out;
    if (!dict) return out;
    const auto& entry = dict->entry(g.node(x).sense.entry);
    out.insert(entry.lemma.text);
    out.insert(entry.variants.begin(), entry.variants.end());
    return out;
  };
  const auto n1 = neighbours(s), n2 = neighbours(other);
  const auto w1 = synonyms(s), w2 = synonyms(other);
  std::size_t shared = 0;
  for (NodeId x : n1) shared += n2.count(x);
  for (const auto& w : w1) shared += w2.count(w);
  const std::size_t size = std::max(n1.size() + w1.size(), n2.size() + w2.size());
  return size == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(size);
}

inline WordDecision run_lesk(const Dictionary& dict, const NoisyGraph& g, NodeId source, std::size_t word_index,
                             bool include_meta = true) {
  auto decision = detail::decision_for(g, source, word_index);
  for (auto& candidate : decision.candidates) {
    candidate.score = lesk_overlap(g, source, candidate.sense, &dict, include_meta);
  }
  decision.chosen = pick_best(std::span<const CandidateScore>(decision.candidates));
  return decision;
}

// ---------------------------------------------------------------------------
// Baselines: first sense, random sense, highest out-degree. They never abstain.

inline WordDecision run_baseline(AlgorithmId id, const Dictionary& dict, const NoisyGraph& g, NodeId source,
                                 std::size_t word_index, std::uint64_t seed = 0) {
  (void)dict;
  auto decision = detail::decision_for(g, source, word_index);
  auto& candidates = decision.candidates;
  if (candidates.empty()) return decision;
  switch (id) {
    case AlgorithmId::fs:
      decision.chosen = 0;
      break;
    case AlgorithmId::random: {
      Rng rng(stream_seed(seed, "random-baseline", {source, word_index}));
      decision.chosen = uniform_index(rng, candidates.size());
      break;
    }
    case AlgorithmId::degree: {
      std::size_t best = 0;
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        candidates[k].score = static_cast<double>(out_degree(g, candidates[k].sense));
        if (candidates[k].score > candidates[best].score) best = k;
      }
      decision.chosen = best;
      return decision;
    }
    default:
      throw Error(ErrorKind::invalid_argument, std::string(to_string(id)) + " is not a baseline");
  }
  candidates[*decision.chosen].score = 1.0;
  return decision;
}

// ---------------------------------------------------------------------------
// Undirected cycles

// Simple cycles through the edge s - s' of the symmetrized graph, where
// antiparallel edges merge into one. Reusing s - s' is not a cycle, so the
// shortest cycle has length 3. Direction flags record the original
// orientation of each step.
inline PathSet find_undirected_cycles(const NoisyGraph& g, NodeId start, NodeId target, int max_depth,
                                      bool include_meta = true) {
  SearchConfig{max_depth}.validate();
  detail::check_endpoints(g, start, target);
  std::vector<std::vector<NodeId>> adjacent(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    std::set<NodeId> merged;
    for (const auto& e : g.out_edges(v)) {
      if (usable(e, include_meta)) merged.insert(e.node);
    }
    for (const auto& e : g.in_edges(v)) {
      if (usable(e, include_meta)) merged.insert(e.node);
    }
    adjacent[v].assign(merged.begin(), merged.end());
  }

  PathSet out;
  Path path{{target, start}, {Direction::forward}};
  std::function<void()> extend = [&] {
    if (path.length() >= max_depth) return;
    const NodeId current = path.nodes.back();
    for (NodeId next : adjacent[current]) {
      if (next == target) {
        if (path.length() < 2) continue;
      } else {
        const bool repeats = std::any_of(path.nodes.begin(), path.nodes.end(), [&](NodeId id) {
          return id == next || g.lemma_of(id) == g.lemma_of(next);
        });
        if (repeats) continue;
      }
      path.nodes.push_back(next);
      path.directions.push_back(g.has_edge(current, next, include_meta) ? Direction::forward : Direction::reversed);
      if (next == target) {
        out.add(path);
      } else {
        extend();
      }
      path.nodes.pop_back();
      path.directions.pop_back();
    }
  };
  extend();
  return out;
}

inline SenseMapping run_undirected_cycles(const NoisyGraph& g, NodeId source, const SearchConfig& cfg,
                                          const WeightFunction& weight = {}) {
  cfg.validate();
  return disambiguate_with_paths(g, source, weight, cfg.max_depth, [&](NodeId start, NodeId target) {
    return find_undirected_cycles(g, start, target, cfg.max_depth, cfg.include_meta);
  });
}

// ---------------------------------------------------------------------------
// Dispatch

inline SenseMapping run_algorithm(AlgorithmId id, const Dictionary& dict, const NoisyGraph& g, NodeId source,
                                  const AlgorithmConfig& cfg) {
  const bool meta = cfg.search.include_meta;
  switch (id) {
    case AlgorithmId::cqc:
      return disambiguate_entry(g, source, cfg.search, cfg.weight);
    case AlgorithmId::cycles:
      return run_cycles_only(g, source, cfg.search, cfg.weight);
    case AlgorithmId::dfs:
      return run_open_dfs(g, source, cfg.search, cfg.weight);
    case AlgorithmId::random_walks:
      return run_random_walks(g, source, {cfg.walk_count, cfg.search.max_depth, cfg.seed, meta}, cfg.weight);
    case AlgorithmId::markov:
      return run_markov(g, source, cfg.markov_steps, meta);
    case AlgorithmId::undirected_cycles:
      return run_undirected_cycles(g, source, cfg.search, cfg.weight);
    case AlgorithmId::ppr:
      return map_translations(g, source, [&](WordDecision& decision) {
        score_ppr(g, source, decision, cfg.damping, cfg.ppr_iterations, meta);
      });
    case AlgorithmId::lesk:
      return map_translations(g, source, [&](WordDecision& decision) {
        decision = run_lesk(dict, g, source, decision.word_index, meta);
      });
    case AlgorithmId::fs:
    case AlgorithmId::random:
    case AlgorithmId::degree:
      return map_translations(g, source, [&](WordDecision& decision) {
        decision = run_baseline(id, dict, g, source, decision.word_index, cfg.seed);
      });
  }
  throw Error(ErrorKind::invalid_argument, "unknown algorithm");
}

inline DictionaryDisambiguation run_algorithm_on_dictionary(AlgorithmId id, const Dictionary& dict,
                                                            const NoisyGraph& g, const AlgorithmConfig& cfg,
                                                            unsigned threads = 1) {
  cfg.search.validate();
  return disambiguate_all(
      g, dict, [&](NodeId source) { return run_algorithm(id, dict, g, source, cfg); }, threads);
}

}  // namespace cqc
