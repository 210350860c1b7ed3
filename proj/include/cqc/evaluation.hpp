#pragma once

// Gold datasets, precision/recall/F1/accuracy, first-sense backoff and
// exhaustive parameter tuning.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqc/dictionary.hpp"
#include "cqc/error.hpp"
#include "cqc/format.hpp"
#include "cqc/graph.hpp"
#include "cqc/mapping.hpp"
#include "cqc/parallel.hpp"
#include "cqc/rivals.hpp"
#include "cqc/scoring.hpp"

namespace cqc {

inline constexpr std::string_view kNoSense = "NONE";

struct GoldItem {
  LemmaKey source;
  std::string sense_label;
  std::string word;
  std::optional<std::string> gold;  // empty = no listed sense is appropriate
  std::size_t line = 0;
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) return fields;
    start = tab + 1;
  }
}

// Reads non-blank, non-comment lines, stripping a trailing CR.
template <class Fn>
void for_each_tsv_row(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    fn(split_tabs(line), number);
  }
}

}  // namespace detail

// src_lang lemma pos sense_id target_word gold_sense_id|NONE
inline std::vector<GoldItem> parse_gold(std::istream& in) {
  std::vector<GoldItem> items;
  detail::for_each_tsv_row(in, [&](const std::vector<std::string>& f, std::size_t line) {
    const std::string where = "gold line " + std::to_string(line);
    if (f.size() != 6) {
      throw Error(ErrorKind::malformed_input, where + ": expected 6 fields, got " + std::to_string(f.size()));
    }
    auto pos = parse_pos(f[2]);
    if (!pos) throw Error(ErrorKind::malformed_input, where + ": bad part of speech '" + f[2] + "'");
    for (std::size_t i : {0u, 1u, 3u, 4u, 5u}) {
      if (f[i].empty()) throw Error(ErrorKind::malformed_input, where + ": empty field " + std::to_string(i + 1));
    }
    GoldItem item{{f[1], *pos, f[0]}, f[3], f[4], std::nullopt, line};
    if (f[5] != kNoSense) item.gold = f[5];
    items.push_back(std::move(item));
  });
  return items;
}

inline std::vector<GoldItem> parse_gold(const std::string& text) {
  std::istringstream in(text);
  return parse_gold(in);
}

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::size_t answered = 0;    // gold-sensed items the system answered
  std::size_t correct = 0;
  std::size_t gold_total = 0;  // items with a real gold sense
  std::size_t all_total = 0;
  std::size_t no_sense_abstained = 0;

  static Metrics from_counts(std::size_t answered, std::size_t correct, std::size_t gold_total,
                             std::size_t all_total, std::size_t no_sense_abstained) {
    Metrics m{0, 0, 0, 0, answered, correct, gold_total, all_total, no_sense_abstained};
    auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / b; };
    m.precision = ratio(correct, answered);
    m.recall = ratio(correct, gold_total);
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    m.accuracy = ratio(correct + no_sense_abstained, all_total);
    return m;
  }
};

inline nlohmann::ordered_json metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["accuracy"] = m.accuracy;
  j["counts"] = {{"answered", m.answered},
                 {"correct", m.correct},
                 {"gold_total", m.gold_total},
                 {"all_total", m.all_total}};
  return j;
}

// The decision a run made for one gold item.
struct GoldOutcome {
  const GoldItem* item = nullptr;
  const WordDecision* decision = nullptr;
  std::optional<std::string> answer;  // chosen sense label
};

inline std::vector<GoldOutcome> match_gold(std::span<const SenseMapping> mappings, const NoisyGraph& g,
                                           const Dictionary& dict, std::span<const GoldItem> gold) {
  std::map<NodeId, const SenseMapping*> by_source;
  for (const auto& m : mappings) by_source.emplace(m.source, &m);

  std::vector<GoldOutcome> out;
  out.reserve(gold.size());
  for (const auto& item : gold) {
    const std::string where = "gold line " + std::to_string(item.line) + " (" + to_string(item.source) + " " +
                              item.sense_label + " -> " + item.word + ")";
    const auto ref = dict.find_sense(item.source, item.sense_label);
    const auto node = ref ? g.node_of(*ref) : std::nullopt;
    auto it = node ? by_source.find(*node) : by_source.end();
    if (it == by_source.end()) throw Error(ErrorKind::gold_mismatch, where + ": source sense not in the run");
    const auto* decision = it->second->find(item.word);
    if (!decision) throw Error(ErrorKind::gold_mismatch, where + ": word is not a translation of the sense");
    if (item.gold) {
      if (!decision->resolved()) throw Error(ErrorKind::gold_mismatch, where + ": word is not in the lexicon");
      const auto& entry = dict.entry(*decision->entry);
      const bool listed = std::any_of(entry.senses.begin(), entry.senses.end(),
                                      [&](const SenseEntry& s) { return s.id.label == *item.gold; });
      if (!listed) throw Error(ErrorKind::gold_mismatch, where + ": no sense '" + *item.gold + "'");
    }
    GoldOutcome outcome{&item, decision, std::nullopt};
    if (auto chosen = decision->chosen_sense()) outcome.answer = dict.sense(g.node(*chosen).sense).id.label;
    out.push_back(std::move(outcome));
  }
  return out;
}

inline Metrics evaluate(std::span<const SenseMapping> mappings, const NoisyGraph& g, const Dictionary& dict,
                        std::span<const GoldItem> gold) {
  std::size_t answered = 0, correct = 0, gold_total = 0, no_sense_abstained = 0;
  for (const auto& outcome : match_gold(mappings, g, dict, gold)) {
    if (!outcome.item->gold) {
      if (!outcome.answer) ++no_sense_abstained;
      continue;
    }
    ++gold_total;
    if (!outcome.answer) continue;
    ++answered;
    if (*outcome.answer == *outcome.item->gold) ++correct;
  }
  return Metrics::from_counts(answered, correct, gold_total, gold.size(), no_sense_abstained);
}

enum class BackoffPolicy { none, fs };

inline std::optional<BackoffPolicy> parse_backoff(std::string_view text) {
  if (text == "none") return BackoffPolicy::none;
  if (text == "fs") return BackoffPolicy::fs;
  return std::nullopt;
}

// Replaces every abstention on a resolvable word with its first-listed sense.
inline std::size_t apply_backoff(std::span<SenseMapping> mappings, BackoffPolicy policy = BackoffPolicy::fs) {
  if (policy == BackoffPolicy::none) return 0;
  std::size_t filled = 0;
  for (auto& mapping : mappings) {
    for (auto& word : mapping.words) {
      if (word.resolved() && !word.answered() && !word.candidates.empty()) {
        word.chosen = 0;
        ++filled;
      }
    }
  }
  return filled;
}

// ---------------------------------------------------------------------------
// Tuning

struct TuningGrid {
  std::vector<int> depths{4};
  std::vector<WeightKind> weights{WeightKind::exponential};
  std::vector<int> max_reversed{2};
  std::vector<bool> terminal_only{true};
  std::vector<int> walk_counts{400};
  std::vector<int> markov_steps{2};

  std::size_t size() const {
    return depths.size() * weights.size() * max_reversed.size() * terminal_only.size() * walk_counts.size() *
           markov_steps.size();
  }

  // Axes relevant to `id`; the others stay at their defaults.
  static TuningGrid for_algorithm(AlgorithmId id) {
    TuningGrid grid;
    const std::vector<int> depths{1, 2, 3, 4, 5, 6};
    const std::vector<WeightKind> weights{WeightKind::constant, WeightKind::linear, WeightKind::exponential};
    switch (id) {
      case AlgorithmId::cqc:
        grid.depths = depths;
        grid.weights = weights;
        grid.max_reversed = {0, 1, 2, 3};
        grid.terminal_only = {true, false};
        break;
      case AlgorithmId::cycles:
      case AlgorithmId::dfs:
      case AlgorithmId::undirected_cycles:
        grid.depths = depths;
        grid.weights = weights;
        break;
      case AlgorithmId::random_walks:
        grid.depths = depths;
        grid.weights = weights;
        grid.walk_counts = {50, 100, 200, 400, 1000, 2000};
        break;
      case AlgorithmId::markov:
        grid.markov_steps = {1, 2, 3, 4, 5, 6};
        break;
      default:
        break;
    }
    return grid;
  }

  std::vector<AlgorithmConfig> points(const AlgorithmConfig& base) const {
    std::vector<AlgorithmConfig> out;
    for (int depth : depths)
      for (auto weight : weights)
        for (int reversed : max_reversed)
          for (bool terminal : terminal_only)
            for (int walks : walk_counts)
              for (int steps : markov_steps) {
                AlgorithmConfig cfg = base;
                cfg.search.max_depth = depth;
                cfg.search.max_reversed = reversed;
                cfg.search.terminal_only = terminal;
                cfg.weight.kind = weight;
                cfg.walk_count = walks;
                cfg.markov_steps = steps;
                out.push_back(cfg);
              }
    return out;
  }
};

struct TuningRow {
  AlgorithmConfig config;
  Metrics metrics;
};

struct TuningResult {
  std::vector<TuningRow> table;  // grid order
  std::size_t best = 0;

  const TuningRow& best_row() const { return table.at(best); }
};

// Highest F1; ties go to the smaller depth, then to the exponential weight,
// then to the earlier grid point.
inline std::size_t select_best(std::span<const TuningRow> table) {
  auto better = [](const TuningRow& a, const TuningRow& b) {
    if (a.metrics.f1 != b.metrics.f1) return a.metrics.f1 > b.metrics.f1;
    if (a.config.search.max_depth != b.config.search.max_depth) {
      return a.config.search.max_depth < b.config.search.max_depth;
    }
    const bool a_exp = a.config.weight.kind == WeightKind::exponential;
    const bool b_exp = b.config.weight.kind == WeightKind::exponential;
    return a_exp && !b_exp;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (better(table[i], table[best])) best = i;
  }
  return best;
}

inline TuningResult tune(AlgorithmId id, const TuningGrid& grid, std::span<const GoldItem> gold,
                         const Dictionary& dict, const NoisyGraph& g, const AlgorithmConfig& base = {},
                         BackoffPolicy backoff = BackoffPolicy::none, unsigned threads = 1) {
  if (gold.empty()) throw Error(ErrorKind::illegal_config, "tuning needs a non-empty gold set");
  const auto points = grid.points(base);
  if (points.empty()) throw Error(ErrorKind::illegal_config, "empty tuning grid");
  for (const auto& p : points) p.search.validate();

  TuningResult result;
  result.table.resize(points.size());
  detail::parallel_for(points.size(), threads, [&](std::size_t i) {
    auto run = run_algorithm_on_dictionary(id, dict, g, points[i]);
    apply_backoff(run.mappings, backoff);
    result.table[i] = {points[i], evaluate(run.mappings, g, dict, gold)};
  });
  result.best = select_best(result.table);
  return result;
}

inline nlohmann::ordered_json config_to_json(AlgorithmId id, const AlgorithmConfig& cfg) {
  nlohmann::ordered_json j;
  j["algorithm"] = to_string(id);
  j["max_depth"] = cfg.search.max_depth;
  j["weight"] = to_string(cfg.weight.kind);
  j["max_reversed"] = cfg.search.max_reversed;
  j["terminal_only"] = cfg.search.terminal_only;
  j["include_meta"] = cfg.search.include_meta;
  j["walks"] = cfg.walk_count;
  j["markov_steps"] = cfg.markov_steps;
  j["seed"] = cfg.seed;
  return j;
}

inline void write_tuning_tsv(std::ostream& out, const TuningResult& result) {
  out << "max_depth\tweight\tmax_reversed\tterminal_only\twalks\tmarkov_steps\tprecision\trecall\tf1\taccuracy"
         "\tbest\n";
  for (std::size_t i = 0; i < result.table.size(); ++i) {
    const auto& [cfg, m] = result.table[i];
    out << cfg.search.max_depth << '\t' << to_string(cfg.weight.kind) << '\t' << cfg.search.max_reversed << '\t'
        << (cfg.search.terminal_only ? "on" : "off") << '\t' << cfg.walk_count << '\t' << cfg.markov_steps << '\t'
        << format_fixed(m.precision, 6) << '\t' << format_fixed(m.recall, 6) << '\t' << format_fixed(m.f1, 6)
        << '\t' << format_fixed(m.accuracy, 6) << '\t' << (i == result.best ? "*" : "") << '\n';
  }
}

}  // namespace cqc
