#pragma once

// Synonym extraction from (quasi-)cycles. A candidate sense s'' of a query
// sense s scores sum_{p in P(s), s'' on p} e^-length(p).

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cqc/dictionary.hpp"
#include "cqc/error.hpp"
#include "cqc/evaluation.hpp"
#include "cqc/format.hpp"
#include "cqc/graph.hpp"
#include "cqc/parallel.hpp"
#include "cqc/paths.hpp"

namespace cqc {

inline constexpr int kSynonymDepth = 6;

inline SearchConfig synonym_search(int max_depth = kSynonymDepth) {
  SearchConfig cfg;
  cfg.max_depth = max_depth;
  return cfg;
}

// Every legal (quasi-)cycle through s: the union over its out-neighbours t of
// the paths s -> t ... s.
inline PathSet cycles_through(const NoisyGraph& g, NodeId s, const SearchConfig& cfg) {
  if (s >= g.node_count()) throw Error(ErrorKind::unknown_sense, "node " + std::to_string(s));
  cfg.validate();
  PathSet out;
  for (const auto& edge : g.out_edges(s)) {
    if (!usable(edge, cfg.include_meta) || g.lemma_of(edge.node) == g.lemma_of(s)) continue;
    const auto found = find_cqc_paths(g, edge.node, s, cfg);
    for (const auto& p : found.paths()) out.add(p);
  }
  return out;
}

struct SenseSynonym {
  NodeId sense = 0;
  double score = 0.0;
};

struct WordSynonym {
  std::uint32_t entry = 0;
  double score = 0.0;
};

namespace detail {

inline std::map<NodeId, double> accumulate_sense_scores(const NoisyGraph& g, NodeId s, const PathSet& paths) {
  std::map<NodeId, double> scores;
  for (const auto& p : paths.paths()) {
    const double w = std::exp(-static_cast<double>(p.length()));
    for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) {
      if (g.lemma_of(p.nodes[i]) != g.lemma_of(s)) scores[p.nodes[i]] += w;
    }
  }
  return scores;
}

inline const std::string& lemma_text(const NoisyGraph& g, const Dictionary* dict, NodeId node) {
  static const std::string empty;
  return dict ? dict->entry(g.node(node).sense.entry).lemma.text : empty;
}

}  // namespace detail

// Descending score; ties by lemma text (when a dictionary is given), then id.
inline std::vector<SenseSynonym> extract_synonyms_sense(const NoisyGraph& g, NodeId s, int max_depth = kSynonymDepth,
                                                        const Dictionary* dict = nullptr, bool include_meta = true) {
  auto cfg = synonym_search(max_depth);
  cfg.include_meta = include_meta;
  std::vector<SenseSynonym> out;
  for (auto [node, score] : detail::accumulate_sense_scores(g, s, cycles_through(g, s, cfg))) {
    out.push_back({node, score});
  }
  std::sort(out.begin(), out.end(), [&](const SenseSynonym& a, const SenseSynonym& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto& ta = detail::lemma_text(g, dict, a.sense);
    const auto& tb = detail::lemma_text(g, dict, b.sense);
    if (ta != tb) return ta < tb;
    return a.sense < b.sense;
  });
  return out;
}

// Sum of the sense-level scores over every sense of `entry`, per candidate lemma.
inline std::vector<WordSynonym> extract_synonyms_word(const NoisyGraph& g, const Dictionary& dict, std::size_t entry,
                                                      int max_depth = kSynonymDepth, bool include_meta = true) {
  if (entry >= dict.entry_count()) throw Error(ErrorKind::unknown_lemma, "entry " + std::to_string(entry));
  std::map<std::uint32_t, double> totals;
  for (NodeId s : g.senses_of(static_cast<std::uint32_t>(entry))) {
    for (const auto& c : extract_synonyms_sense(g, s, max_depth, &dict, include_meta)) {
      totals[g.lemma_of(c.sense)] += c.score;
    }
  }
  std::vector<WordSynonym> out;
  for (auto [lemma, score] : totals) {
    if (lemma != entry) out.push_back({lemma, score});
  }
  std::sort(out.begin(), out.end(), [&](const WordSynonym& a, const WordSynonym& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto& ta = dict.entry(a.entry).lemma;
    const auto& tb = dict.entry(b.entry).lemma;
    if (ta.text != tb.text) return ta.text < tb.text;
    return a.entry < b.entry;
  });
  return out;
}

inline std::vector<WordSynonym> extract_synonyms_word(const NoisyGraph& g, const Dictionary& dict,
                                                      const LemmaKey& word, int max_depth = kSynonymDepth,
                                                      bool include_meta = true) {
  auto entry = dict.find_entry(word);
  if (!entry) throw Error(ErrorKind::unknown_lemma, to_string(word));
  return extract_synonyms_word(g, dict, *entry, max_depth, include_meta);
}

// lang word_or_sense score
inline void write_sense_ranking(std::ostream& out, const NoisyGraph& g, const Dictionary& dict,
                                std::span<const SenseSynonym> ranking) {
  for (const auto& c : ranking) {
    const auto ref = g.node(c.sense).sense;
    out << dict.entry(ref.entry).lemma.lang << '\t' << sense_token(dict, ref) << '\t' << format_fixed(c.score, 2)
        << '\n';
  }
}

inline void write_word_ranking(std::ostream& out, const Dictionary& dict, std::span<const WordSynonym> ranking) {
  for (const auto& c : ranking) {
    const auto& lemma = dict.entry(c.entry).lemma;
    out << lemma.lang << '\t' << lemma.text << '\t' << format_fixed(c.score, 2) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Multiple-choice synonym questions

struct ToeflQuestion {
  std::string target;
  std::array<std::string, 4> choices;
  std::optional<std::size_t> answer;  // 0-based; the file stores 1..4
  std::size_t line = 0;
};

// target choice1 choice2 choice3 choice4 answer_index (1..4, or - if unknown)
inline std::vector<ToeflQuestion> parse_toefl(std::istream& in) {
  std::vector<ToeflQuestion> out;
  detail::for_each_tsv_row(in, [&](const std::vector<std::string>& f, std::size_t line) {
    const std::string where = "question line " + std::to_string(line);
    if (f.size() != 6) {
      throw Error(ErrorKind::malformed_input, where + ": expected 6 fields, got " + std::to_string(f.size()));
    }
    ToeflQuestion q{f[0], {f[1], f[2], f[3], f[4]}, std::nullopt, line};
    std::set<std::string> distinct(q.choices.begin(), q.choices.end());
    if (q.target.empty() || distinct.size() != 4 || distinct.count("") || distinct.count(q.target)) {
      throw Error(ErrorKind::malformed_input, where + ": choices must be 4 distinct words other than the target");
    }
    if (f[5] != "-") {
      if (f[5].size() != 1 || f[5][0] < '1' || f[5][0] > '4') {
        throw Error(ErrorKind::malformed_input, where + ": answer index must be 1..4");
      }
      q.answer = static_cast<std::size_t>(f[5][0] - '1');
    }
    out.push_back(std::move(q));
  });
  return out;
}

inline std::vector<ToeflQuestion> parse_toefl(const std::string& text) {
  std::istringstream in(text);
  return parse_toefl(in);
}

struct ToeflAnswer {
  std::array<double, 4> scores{};
  std::optional<std::size_t> choice;  // empty = ABSTAIN
};

// Words are matched by spelling across both languages and every part of
// speech. A target outside the lexicon is not answered.
inline ToeflAnswer solve_toefl(const NoisyGraph& g, const Dictionary& dict, const ToeflQuestion& q,
                               int max_depth = kSynonymDepth, bool include_meta = true) {
  ToeflAnswer answer;
  std::map<std::uint32_t, double> totals;
  for (std::size_t e : dict.entries_with_text(q.target)) {
    for (const auto& c : extract_synonyms_word(g, dict, e, max_depth, include_meta)) totals[c.entry] += c.score;
  }
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t e : dict.entries_with_text(q.choices[k])) {
      auto it = totals.find(static_cast<std::uint32_t>(e));
      if (it != totals.end()) answer.scores[k] += it->second;
    }
  }
  for (std::size_t k = 0; k < 4; ++k) {
    if (answer.scores[k] <= 0.0) continue;
    if (!answer.choice || answer.scores[k] > answer.scores[*answer.choice]) answer.choice = k;
  }
  return answer;
}

struct ToeflRun {
  std::vector<ToeflAnswer> answers;
  std::size_t answered = 0;
  std::size_t correct = 0;
  std::size_t total = 0;

  double precision() const { return answered == 0 ? 0.0 : static_cast<double>(correct) / answered; }
  double recall() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

inline ToeflRun run_toefl(const NoisyGraph& g, const Dictionary& dict, std::span<const ToeflQuestion> questions,
                          int max_depth = kSynonymDepth, bool include_meta = true, unsigned threads = 1) {
  ToeflRun run;
  run.answers.resize(questions.size());
  detail::parallel_for(questions.size(), threads, [&](std::size_t i) {
    run.answers[i] = solve_toefl(g, dict, questions[i], max_depth, include_meta);
  });
  run.total = questions.size();
  for (std::size_t i = 0; i < questions.size(); ++i) {
    if (!run.answers[i].choice) continue;
    ++run.answered;
    if (run.answers[i].choice == questions[i].answer) ++run.correct;
  }
  return run;
}

// target chosen_index|ABSTAIN chosen_word score correct
inline void write_toefl_tsv(std::ostream& out, std::span<const ToeflQuestion> questions, const ToeflRun& run) {
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    const auto& a = run.answers[i];
    out << q.target << '\t';
    if (a.choice) {
      out << (*a.choice + 1) << '\t' << q.choices[*a.choice] << '\t' << format_fixed(a.scores[*a.choice], 2);
    } else {
      out << "ABSTAIN\t-\t" << format_fixed(0.0, 2);
    }
    out << '\t' << (a.choice && a.choice == q.answer ? 1 : 0) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Precision@K

struct PrecisionAtK {
  std::size_t k = 0;
  std::size_t correct = 0;
  std::size_t given = 0;

  double precision() const { return given == 0 ? 0.0 : static_cast<double>(correct) / given; }
};

// Pools the top-k items of every ranking; short rankings contribute only
// what they return.
inline std::vector<PrecisionAtK> precision_at_k(std::span<const std::vector<std::string>> rankings,
                                                std::span<const std::set<std::string>> gold,
                                                std::span<const std::size_t> ks) {
  if (rankings.size() != gold.size()) {
    throw Error(ErrorKind::invalid_argument, "one gold set is needed per ranking");
  }
  for (const auto& set : gold) {
    if (set.empty()) throw Error(ErrorKind::invalid_argument, "empty gold synonym set");
  }
  std::vector<PrecisionAtK> out;
  for (std::size_t k : ks) {
    PrecisionAtK row{k, 0, 0};
    for (std::size_t q = 0; q < rankings.size(); ++q) {
      const std::size_t n = std::min(k, rankings[q].size());
      row.given += n;
      for (std::size_t i = 0; i < n; ++i) row.correct += gold[q].count(rankings[q][i]);
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace cqc
