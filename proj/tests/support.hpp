#pragma once

// Shared fixtures, generators and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cqc/cqc.hpp"

namespace cqc::testing {

inline std::string fixture(std::string_view name) { return std::string(CQC_FIXTURE_DIR) + "/" + std::string(name); }

inline Dictionary load_fixture(std::string_view name) { return load_dictionary(fixture(name)); }

inline NodeId node_of(const NoisyGraph& g, const Dictionary& dict, const std::string& lemma, const std::string& lang,
                      const std::string& label, PartOfSpeech pos = PartOfSpeech::noun) {
  auto ref = dict.find_sense({lemma, pos, lang}, label);
  if (!ref) throw std::runtime_error("no sense " + lemma + " " + label);
  return *g.node_of(*ref);
}

// ---------------------------------------------------------------------------
// Random raw graphs

struct RandomGraph {
  NoisyGraph graph;
  std::vector<std::pair<NodeId, NodeId>> edges;
};

// Every ordered pair becomes an edge with probability `density`. About one
// node in four shares its lemma with another so the same-lemma rule matters.
inline RandomGraph random_graph(std::mt19937_64& rng, std::size_t nodes, double density) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::uint32_t> lemmas(nodes);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    lemmas[i] = (i > 0 && coin(rng) < 0.25) ? lemmas[i - 1] : next++;
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId a = 0; a < nodes; ++a) {
    for (NodeId b = 0; b < nodes; ++b) {
      if (a != b && coin(rng) < density) edges.emplace_back(a, b);
    }
  }
  return {NoisyGraph::from_edges(lemmas, edges), edges};
}

inline SearchConfig random_search_config(std::mt19937_64& rng) {
  SearchConfig cfg;
  cfg.max_depth = std::uniform_int_distribution<int>(2, 6)(rng);
  cfg.max_reversed = std::uniform_int_distribution<int>(0, 3)(rng);
  cfg.terminal_only = rng() & 1u;
  cfg.allow_quasi = (rng() % 4) != 0;
  return cfg;
}

// ---------------------------------------------------------------------------
// Path oracle: walks every step the graph permits in either orientation,
// then filters complete paths with a restatement of the legality rules.

inline bool oracle_directions_ok(const std::vector<Direction>& dirs, const SearchConfig& cfg) {
  std::vector<std::size_t> rev;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (dirs[i] == Direction::reversed) rev.push_back(i);
  }
  if (rev.empty()) return true;
  const int budget = cfg.allow_quasi ? cfg.max_reversed : 0;
  if (static_cast<int>(rev.size()) > budget) return false;
  if (rev.front() < 2) return false;  // neither s -> s' nor the step out of s' may be reversed
  for (std::size_t k = 1; k < rev.size(); ++k) {
    if (rev[k] != rev[k - 1] + 1) return false;
  }
  if (cfg.terminal_only && rev.back() + 1 != dirs.size()) return false;
  return true;
}

inline std::set<Path> oracle_paths(const NoisyGraph& g, NodeId start, NodeId target, const SearchConfig& cfg) {
  std::set<Path> out;
  Path p{{target, start}, {Direction::forward}};
  if (!g.has_edge(target, start, cfg.include_meta)) return out;
  std::function<void()> walk = [&] {
    const NodeId here = p.nodes.back();
    for (NodeId next = 0; next < g.node_count(); ++next) {
      for (Direction d : {Direction::forward, Direction::reversed}) {
        const bool exists = d == Direction::forward ? g.has_edge(here, next, cfg.include_meta)
                                                    : g.has_edge(next, here, cfg.include_meta);
        if (!exists || p.length() + 1 > cfg.max_depth) continue;
        if (next == target) {
          p.nodes.push_back(next);
          p.directions.push_back(d);
          if (oracle_directions_ok(p.directions, cfg)) out.insert(p);
          p.nodes.pop_back();
          p.directions.pop_back();
          continue;
        }
        bool clash = false;
        for (NodeId seen : p.nodes) clash |= seen == next || g.lemma_of(seen) == g.lemma_of(next);
        if (clash) continue;
        p.nodes.push_back(next);
        p.directions.push_back(d);
        walk();
        p.nodes.pop_back();
        p.directions.pop_back();
      }
    }
  };
  walk();
  return out;
}

inline std::set<Path> as_set(const PathSet& s) {
  auto v = s.sorted();
  return {v.begin(), v.end()};
}

// ---------------------------------------------------------------------------
// Scoring oracle

inline std::vector<double> oracle_scores(const std::vector<std::map<int, std::size_t>>& hist,
                                         const std::function<double(int)>& w, int max_depth) {
  std::vector<double> scores(hist.size(), 0.0);
  for (int l = 2; l <= max_depth; ++l) {
    double pooled = 0;
    for (const auto& h : hist) pooled += h.count(l) ? static_cast<double>(h.at(l)) : 0.0;
    if (pooled == 0) continue;
    for (std::size_t i = 0; i < hist.size(); ++i) {
      if (hist[i].count(l)) scores[i] += w(l) * static_cast<double>(hist[i].at(l)) / pooled;
    }
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Markov oracle: dense matrix powers.

using Dense = std::vector<std::vector<double>>;

inline Dense dense_transition(const NoisyGraph& g, bool include_meta = true) {
  const auto n = g.node_count();
  Dense p(n, std::vector<double>(n, 0.0));
  for (NodeId v = 0; v < n; ++v) {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < n; ++u) {
      if (g.has_edge(v, u, include_meta)) out.push_back(u);
    }
    for (NodeId u : out) p[v][u] = 1.0 / static_cast<double>(out.size());
  }
  return p;
}

inline Dense multiply(const Dense& a, const Dense& b) {
  const auto n = a.size();
  Dense c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline double dense_markov(const NoisyGraph& g, NodeId start, NodeId target, int steps, bool include_meta = true) {
  const auto p = dense_transition(g, include_meta);
  Dense power = p;
  double sum = power[start][target];
  for (int m = 2; m <= steps; ++m) {
    power = multiply(power, p);
    sum += power[start][target];
  }
  return sum / steps;
}

// ---------------------------------------------------------------------------
// Planted-truth synthetic dictionaries

struct Synthetic {
  Dictionary dict;
  std::vector<GoldItem> gold;
};

struct SyntheticParams {
  std::size_t words_per_language = 60;
  std::size_t concepts = 110;
  double keep_translation = 0.75;  // chance a correct translation is listed
  double noise = 0.35;             // chance a sense gains one wrong translation
};

// Concepts are lexicalized by a few words in each language; a word's senses
// are the concepts it lexicalizes, in shuffled order. Each sense translates
// to (most of) the other language's words for its concept, plus noise.
// Gold: the concept-matching sense for planted translations, NONE for noise.
inline Synthetic synthetic_dictionary(std::uint64_t seed, const SyntheticParams& params = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const std::string langs[2] = {"en", "it"};
  const std::size_t n = params.words_per_language;

  // words[lang][c]: the words lexicalizing concept c.
  std::vector<std::vector<std::vector<std::size_t>>> words(2, std::vector<std::vector<std::size_t>>(params.concepts));
  std::vector<std::vector<std::vector<std::size_t>>> concepts_of(2, std::vector<std::vector<std::size_t>>(n));
  for (int l = 0; l < 2; ++l) {
    for (std::size_t c = 0; c < params.concepts; ++c) {
      const std::size_t count = 1 + (coin(rng) < 0.5 ? 1 : 0);
      std::set<std::size_t> chosen;
      // Cycle through words first so every word has at least one sense.
      chosen.insert((c + l * 7) % n);
      while (chosen.size() < count) chosen.insert(rng() % n);
      for (auto w : chosen) {
        words[l][c].push_back(w);
        concepts_of[l][w].push_back(c);
      }
    }
    for (auto& list : concepts_of[l]) std::shuffle(list.begin(), list.end(), rng);
  }
  auto name = [&](int l, std::size_t w) { return langs[l] + "w" + std::to_string(w); };

  std::vector<DictEntry> entries;
  std::vector<GoldItem> gold;
  for (int l = 0; l < 2; ++l) {
    const int other = 1 - l;
    for (std::size_t w = 0; w < n; ++w) {
      DictEntry entry;
      entry.lemma = {name(l, w), PartOfSpeech::noun, langs[l]};
      for (std::size_t k = 0; k < concepts_of[l][w].size(); ++k) {
        const std::size_t c = concepts_of[l][w][k];
        SenseEntry sense;
        sense.id = {std::to_string(k + 1), k};
        for (auto t : words[other][c]) {
          if (coin(rng) < params.keep_translation || sense.translations.empty()) {
            sense.translations.push_back(name(other, t));
          }
        }
        if (sense.translations.empty()) sense.translations.push_back(name(other, words[other][c].front()));
        for (const auto& t : sense.translations) {
          const std::size_t tw = std::stoul(t.substr(3));
          const auto& tc = concepts_of[other][tw];
          const auto pos = std::find(tc.begin(), tc.end(), c) - tc.begin();
          gold.push_back({entry.lemma, sense.id.label, t, std::to_string(pos + 1), 0});
        }
        if (coin(rng) < params.noise) {
          const std::size_t tw = rng() % n;
          const std::string t = name(other, tw);
          const auto& tc = concepts_of[other][tw];
          if (std::find(sense.translations.begin(), sense.translations.end(), t) == sense.translations.end() &&
              std::find(tc.begin(), tc.end(), c) == tc.end()) {
            sense.translations.push_back(t);
            gold.push_back({entry.lemma, sense.id.label, t, std::nullopt, 0});
          }
        }
        entry.senses.push_back(std::move(sense));
      }
      entries.push_back(std::move(entry));
    }
  }
  return {Dictionary(langs[0], langs[1], std::move(entries)), std::move(gold)};
}

// ---------------------------------------------------------------------------
// Enhancement pattern predicates

// Sense named by a "lemma#pos#label" token; lemma texts are unique in the fixtures.
inline std::optional<SenseRef> sense_by_token(const Dictionary& dict, const std::string& token) {
  const auto first = token.find('#');
  const auto last = token.rfind('#');
  if (first == std::string::npos || first == last) return std::nullopt;
  const auto entries = dict.entries_with_text(token.substr(0, first));
  if (entries.size() != 1) return std::nullopt;
  return dict.find_sense(dict.entry(entries[0]).lemma, token.substr(last + 1));
}

inline std::optional<std::size_t> entry_by_text(const Dictionary& dict, const std::string& text) {
  const auto entries = dict.entries_with_text(text);
  if (entries.size() != 1) return std::nullopt;
  return entries[0];
}

inline bool lists(const Dictionary& dict, SenseRef s, const std::string& word) {
  const auto& ts = dict.sense(s).translations;
  return std::find(ts.begin(), ts.end(), word) != ts.end();
}

inline bool lists_any(const Dictionary& dict, std::size_t entry, const DictEntry& w) {
  for (std::uint32_t s = 0; s < dict.entry(entry).senses.size(); ++s) {
    if (lists(dict, {static_cast<std::uint32_t>(entry), s}, w.lemma.text)) return true;
    for (const auto& v : w.variants) {
      if (lists(dict, {static_cast<std::uint32_t>(entry), s}, v)) return true;
    }
  }
  return false;
}

inline std::string squash(std::string s) {
  std::erase_if(s, [](char c) { return c == '-' || c == ' '; });
  return s;
}

// Restates each pattern directly on the dictionary.
inline bool pattern_holds(const Dictionary& dict, const Issue& issue) {
  const auto src = sense_by_token(dict, issue.src);
  if (!src) return false;
  const auto& w = dict.entry(src->entry);
  switch (issue.type) {
    case IssueType::misalignment: {
      const auto target = entry_by_text(dict, issue.dst.substr(0, issue.dst.find('#')));
      return target && lists(dict, *src, dict.entry(*target).lemma.text) && !lists_any(dict, *target, w);
    }
    case IssueType::partial_alignment: {
      const auto via = sense_by_token(dict, issue.via);
      if (!via || !lists(dict, *src, dict.entry(via->entry).lemma.text) || !lists(dict, *via, issue.dst)) {
        return false;
      }
      auto ends_with = [](const std::string& text, const std::string& tail) {
        return text.size() > tail.size() + 1 && text.ends_with(" " + tail);
      };
      return ends_with(issue.dst, w.lemma.text) || ends_with(w.lemma.text, issue.dst);
    }
    case IssueType::missing_lemma:
      return lists(dict, *src, issue.dst) && dict.entries_with_text(issue.dst).empty();
    case IssueType::use_of_reference: {
      const auto via = sense_by_token(dict, issue.via);
      const auto dst = sense_by_token(dict, issue.dst);
      return via && dst && lists(dict, *src, dict.entry(via->entry).lemma.text) &&
             dict.sense(*via).reference.has_value() && dict.sense(*via).translations.empty() &&
             resolve_reference(dict, *via).sense == *dst && lists(dict, *dst, w.lemma.text);
    }
    case IssueType::use_of_variant: {
      const auto dst = sense_by_token(dict, issue.dst);
      if (!dst || !lists(dict, *src, issue.via) || !dict.entries_with_text(issue.via).empty()) return false;
      const auto& variants = dict.entry(dst->entry).variants;
      return std::find(variants.begin(), variants.end(), issue.via) != variants.end() &&
             lists(dict, *dst, w.lemma.text);
    }
    case IssueType::inconsistent_spelling: {
      const auto dst = sense_by_token(dict, issue.dst);
      return dst && lists(dict, *src, issue.via) && dict.entries_with_text(issue.via).empty() &&
             squash(dict.entry(dst->entry).lemma.text) == squash(issue.via) && lists(dict, *dst, w.lemma.text);
    }
  }
  return false;
}

}  // namespace cqc::testing
