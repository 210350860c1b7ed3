#pragma once

// Sense scoring from collected paths and the CQC disambiguation driver.
//
//   score(s') = sum_{l=2..delta} w(l) * NumPaths(paths(s'), l) / NumPaths(all_paths, l)
//
// all_paths pools the paths of every candidate sense of one translation word.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqc/dictionary.hpp"
#include "cqc/error.hpp"
#include "cqc/format.hpp"
#include "cqc/graph.hpp"
#include "cqc/mapping.hpp"
#include "cqc/parallel.hpp"
#include "cqc/paths.hpp"

namespace cqc {

enum class WeightKind { constant, linear, exponential };

inline std::string_view to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::constant: return "const";
    case WeightKind::linear: return "linear";
    case WeightKind::exponential: return "exp";
  }
  return "exp";
}

inline std::optional<WeightKind> parse_weight_kind(std::string_view text) {
  if (text == "const" || text == "constant") return WeightKind::constant;
  if (text == "linear") return WeightKind::linear;
  if (text == "exp" || text == "exponential") return WeightKind::exponential;
  return std::nullopt;
}

// w(l) = 1, 1/l or e^-l, optionally multiplied by a positive scale.
struct WeightFunction {
  WeightKind kind = WeightKind::exponential;
  double scale = 1.0;

  double operator()(int length) const {
    switch (kind) {
      case WeightKind::constant: return scale;
      case WeightKind::linear: return scale / static_cast<double>(length);
      case WeightKind::exponential: return scale * std::exp(-static_cast<double>(length));
    }
    return 0.0;
  }

  // Upper bound of any score: sum_{l=2..delta} w(l).
  double total(int max_depth) const {
    double sum = 0.0;
    for (int l = 2; l <= max_depth; ++l) sum += (*this)(l);
    return sum;
  }
};

struct PathHistogram {
  std::vector<std::map<int, std::size_t>> per_sense;
  std::map<int, std::size_t> pooled;

  void add_sense(const std::map<int, std::size_t>& counts) {
    per_sense.push_back(counts);
    for (auto [length, count] : counts) pooled[length] += count;
  }

  static PathHistogram from(std::span<const PathSet> sets) {
    PathHistogram h;
    for (const auto& set : sets) h.add_sense(set.by_length());
    return h;
  }
};

// Terms are added in ascending length so results are reproducible bit for bit.
// The scale is applied once at the end so that rounding cannot reorder scores.
inline std::vector<double> score_senses(const PathHistogram& h, const WeightFunction& weight, int max_depth) {
  std::vector<double> scores(h.per_sense.size(), 0.0);
  const WeightFunction unit{weight.kind, 1.0};
  for (int l = 2; l <= max_depth; ++l) {
    auto pooled = h.pooled.find(l);
    if (pooled == h.pooled.end() || pooled->second == 0) continue;
    const double w = unit(l);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      auto it = h.per_sense[i].find(l);
      if (it == h.per_sense[i].end()) continue;
      scores[i] += w * static_cast<double>(it->second) / static_cast<double>(pooled->second);
    }
  }
  if (weight.scale != 1.0) {
    for (double& score : scores) score *= weight.scale;
  }
  return scores;
}

// Highest positive score; ties go to the lowest listing index.
inline std::optional<std::size_t> pick_best(std::span<const double> scores) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] <= 0.0) continue;
    if (!best || scores[i] > scores[*best]) best = i;
  }
  return best;
}

inline std::optional<std::size_t> pick_best(std::span<const CandidateScore> candidates) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(c.score);
  return pick_best(std::span<const double>(scores));
}

using PathCollector = std::function<PathSet(NodeId start, NodeId target)>;

inline void check_source(const NoisyGraph& g, NodeId source) {
  if (source >= g.node_count()) throw Error(ErrorKind::unknown_sense, "node " + std::to_string(source));
}

// One WordDecision per word of T(source), candidates in listing order.
// `decide` fills in the candidate scores and the choice.
template <class Decide>
SenseMapping map_translations(const NoisyGraph& g, NodeId source, Decide&& decide) {
  check_source(g, source);
  SenseMapping mapping{source, {}};
  const auto links = g.translation_links(source);
  for (std::size_t i = 0; i < links.size(); ++i) {
    WordDecision decision;
    decision.word = links[i].word;
    decision.word_index = i;
    decision.entry = links[i].entry;
    if (decision.entry) {
      for (NodeId candidate : g.senses_of(*decision.entry)) decision.candidates.push_back({candidate, 0.0});
      decide(decision);
    }
    mapping.words.push_back(std::move(decision));
  }
  return mapping;
}

// Path-based disambiguation shared by every path-collecting algorithm.
inline SenseMapping disambiguate_with_paths(const NoisyGraph& g, NodeId source, const WeightFunction& weight,
                                            int max_depth, const PathCollector& collect) {
  return map_translations(g, source, [&](WordDecision& decision) {
    std::vector<PathSet> sets;
    sets.reserve(decision.candidates.size());
    for (const auto& candidate : decision.candidates) {
      if (g.lemma_of(candidate.sense) == g.lemma_of(source)) {
        sets.emplace_back();
      } else {
        sets.push_back(collect(candidate.sense, source));
      }
    }
    const auto scores = score_senses(PathHistogram::from(sets), weight, max_depth);
    for (std::size_t k = 0; k < scores.size(); ++k) decision.candidates[k].score = scores[k];
    decision.chosen = pick_best(std::span<const double>(scores));
  });
}

inline SenseMapping disambiguate_entry(const NoisyGraph& g, NodeId source, const SearchConfig& cfg,
                                       const WeightFunction& weight = {}) {
  cfg.validate();
  return disambiguate_with_paths(g, source, weight, cfg.max_depth,
                                 [&](NodeId start, NodeId target) { return find_cqc_paths(g, start, target, cfg); });
}

struct DisambiguationStats {
  std::size_t entries = 0;
  std::size_t senses = 0;
  std::size_t words = 0;       // all translation words
  std::size_t resolved = 0;    // words found in the lexicon
  std::size_t answered = 0;
  std::size_t abstained = 0;   // resolved but unanswered
};

inline DisambiguationStats summarize(std::span<const SenseMapping> mappings, std::size_t entries) {
  DisambiguationStats stats;
  stats.entries = entries;
  stats.senses = mappings.size();
  for (const auto& mapping : mappings) {
    for (const auto& word : mapping.words) {
      ++stats.words;
      if (!word.resolved()) continue;
      ++stats.resolved;
      if (word.answered()) {
        ++stats.answered;
      } else {
        ++stats.abstained;
      }
    }
  }
  return stats;
}

struct DictionaryDisambiguation {
  std::vector<SenseMapping> mappings;  // indexed by source node
  PrunedGraph pruned;
  DisambiguationStats stats;
};

// Applies a per-source disambiguator to every sense. Parallel and serial
// runs produce identical results.
template <class PerSource>
DictionaryDisambiguation disambiguate_all(const NoisyGraph& g, const Dictionary& dict, PerSource&& per_source,
                                          unsigned threads = 1) {
  DictionaryDisambiguation result;
  result.mappings.resize(g.node_count());
  detail::parallel_for(g.node_count(), threads,
                       [&](std::size_t i) { result.mappings[i] = per_source(static_cast<NodeId>(i)); });
  result.pruned = prune(g, result.mappings);
  result.stats = summarize(result.mappings, dict.entry_count());
  return result;
}

inline DictionaryDisambiguation disambiguate_dictionary(const NoisyGraph& g, const Dictionary& dict,
                                                        const SearchConfig& cfg, const WeightFunction& weight = {},
                                                        unsigned threads = 1) {
  cfg.validate();
  return disambiguate_all(
      g, dict, [&](NodeId source) { return disambiguate_entry(g, source, cfg, weight); }, threads);
}

// Score of the chosen sense of `word`; 0 when the word was not answered.
inline double confidence(const SenseMapping& mapping, std::string_view word) {
  const auto* decision = mapping.find(word);
  if (!decision) throw Error(ErrorKind::unknown_word, std::string(word));
  return decision->chosen_score();
}

// src_lemma src_pos src_sense tgt_word chosen_sense|ABSTAIN score
inline void write_mapping_tsv(std::ostream& out, const NoisyGraph& g, const Dictionary& dict,
                              std::span<const SenseMapping> mappings) {
  for (const auto& mapping : mappings) {
    const auto& ref = g.node(mapping.source).sense;
    const auto& entry = dict.entry(ref.entry);
    const std::string prefix =
        entry.lemma.text + "\t" + pos_code(entry.lemma.pos) + "\t" + dict.sense(ref).id.label + "\t";
    for (const auto& word : mapping.words) {
      out << prefix << word.word << '\t';
      if (auto chosen = word.chosen_sense()) {
        out << dict.sense(g.node(*chosen).sense).id.label;
      } else {
        out << "ABSTAIN";
      }
      out << '\t' << format_fixed(word.chosen_score(), 6) << '\n';
    }
  }
}

}  // namespace cqc
