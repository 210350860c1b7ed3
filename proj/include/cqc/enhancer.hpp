#pragma once

// Dictionary defect detection. Every translation (s_w, w') of the noisy
// graph is matched against six structural patterns; instances are ranked by
// the disambiguation score of the anchoring translation.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cqc/dictionary.hpp"
#include "cqc/error.hpp"
#include "cqc/format.hpp"
#include "cqc/graph.hpp"
#include "cqc/mapping.hpp"

namespace cqc {

enum class IssueType {
  misalignment,
  partial_alignment,
  missing_lemma,
  use_of_reference,
  use_of_variant,
  inconsistent_spelling,
};

inline constexpr IssueType kAllIssueTypes[] = {
    IssueType::misalignment,     IssueType::partial_alignment, IssueType::missing_lemma,
    IssueType::use_of_reference, IssueType::use_of_variant,    IssueType::inconsistent_spelling,
};

inline std::string_view to_string(IssueType type) {
  switch (type) {
    case IssueType::misalignment: return "misalignment";
    case IssueType::partial_alignment: return "partial_alignment";
    case IssueType::missing_lemma: return "missing_lemma";
    case IssueType::use_of_reference: return "use_of_reference";
    case IssueType::use_of_variant: return "use_of_variant";
    case IssueType::inconsistent_spelling: return "inconsistent_spelling";
  }
  return "misalignment";
}

inline std::optional<IssueType> parse_issue_type(std::string_view text) {
  for (auto type : kAllIssueTypes) {
    if (to_string(type) == text) return type;
  }
  return std::nullopt;
}

// Patterns that disconnect the graph carry no usable score.
inline bool is_structural(IssueType type) {
  return type == IssueType::missing_lemma || type == IssueType::partial_alignment ||
         type == IssueType::inconsistent_spelling;
}

struct Issue {
  IssueType type = IssueType::misalignment;
  SenseRef source;      // s_w, the sense whose translation anchors the issue
  std::string word;     // w', as written in the entry
  std::string src;      // participants, rendered
  std::string via;      // "-" for two-participant patterns
  std::string dst;
  double confidence = 0.0;
  std::string explanation;

  auto key() const { return std::tie(type, src, via, dst); }
};

// Lowercased ASCII with hyphens and spaces removed.
inline std::string spelling_key(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (c == '-' || c == ' ') continue;
    out.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
  }
  return out;
}

// Final whitespace-separated token, or empty for a single-token phrase.
inline std::string compound_head(std::string_view text) {
  const auto space = text.find_last_of(' ');
  if (space == std::string_view::npos) return {};
  return std::string(text.substr(space + 1));
}

namespace detail {

class IssueDetector {
 public:
  IssueDetector(const Dictionary& dict, const NoisyGraph& g, std::span<const SenseMapping> mappings)
      : dict_(dict), g_(g) {
    for (const auto& m : mappings) by_source_.emplace(m.source, &m);
    const auto entries = dict.entries();
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto& lemma = entries[e].lemma;
      by_spelling_[{spelling_key(lemma.text), lemma.pos, lemma.lang}].push_back(e);
    }
  }

  std::vector<Issue> run() {
    for (NodeId id = 0; id < g_.node_count(); ++id) {
      const auto links = g_.translation_links(id);
      for (std::size_t i = 0; i < links.size(); ++i) inspect(id, links[i]);
    }
    return std::move(issues_);
  }

 private:
  // Does `sense` list w (main form or a variant) among its translations?
  bool translates_to(SenseRef sense, const DictEntry& w, bool main_form_only = false) const {
    for (const auto& t : dict_.sense(sense).translations) {
      if (t == w.lemma.text) return true;
      if (!main_form_only && std::find(w.variants.begin(), w.variants.end(), t) != w.variants.end()) return true;
    }
    return false;
  }

  std::optional<SenseRef> back_translation(std::uint32_t entry, const DictEntry& w,
                                           bool main_form_only = false) const {
    const auto& target = dict_.entry(entry);
    for (std::uint32_t s = 0; s < target.senses.size(); ++s) {
      if (translates_to({entry, s}, w, main_form_only)) return SenseRef{entry, s};
    }
    return std::nullopt;
  }

  bool spelled_back(std::uint32_t entry, const DictEntry& w) const {
    const std::string key = spelling_key(w.lemma.text);
    for (const auto& sense : dict_.entry(entry).senses) {
      for (const auto& t : sense.translations) {
        if (spelling_key(t) == key) return true;
      }
    }
    return false;
  }

  double score_of(NodeId source, std::string_view word) const {
    auto it = by_source_.find(source);
    if (it == by_source_.end()) return 0.0;
    const auto* decision = it->second->find(word);
    return decision ? decision->chosen_score() : 0.0;
  }

  // The chosen sense of w', its only sense, or the lemma when undecided.
  std::string target_token(NodeId source, const TranslationLink& link) const {
    auto it = by_source_.find(source);
    if (it != by_source_.end()) {
      if (const auto* decision = it->second->find(link.word)) {
        if (auto chosen = decision->chosen_sense()) return sense_token(dict_, g_.node(*chosen).sense);
      }
    }
    const auto& entry = dict_.entry(*link.entry);
    if (entry.senses.size() == 1) return sense_token(dict_, {*link.entry, 0});
    return to_string(entry.lemma);
  }

  void emit(Issue issue) {
    if (seen_.insert({issue.type, issue.src, issue.via, issue.dst}).second) issues_.push_back(std::move(issue));
  }

  void inspect(NodeId id, const TranslationLink& link) {
    const SenseRef source = g_.node(id).sense;
    const auto& w = dict_.entry(source.entry);
    const std::string src = sense_token(dict_, source);
    const double score = score_of(id, link.word);

    if (!link.entry) {
      inspect_unresolved(source, w, src, link.word);
      return;
    }

    const std::uint32_t target = *link.entry;
    const bool reciprocal = back_translation(target, w).has_value();
    bool explained = false;

    // Forward partial alignment: w' translates to a compound headed by w.
    if (!reciprocal) {
      if (auto hit = find_compound(target, w.lemma.text)) {
        explained = true;
        emit({IssueType::partial_alignment, source, link.word, src, sense_token(dict_, hit->first), hit->second,
              0.0,
              src + " -> " + sense_token(dict_, hit->first) + " -> '" + hit->second + "': compound ending in '" +
                  w.lemma.text + "'"});
      }
      // Reverse: s_w is itself a compound and w' translates to its head.
      const std::string head = compound_head(w.lemma.text);
      if (!head.empty()) {
        if (auto hit = find_translation(target, head)) {
          explained = true;
          emit({IssueType::partial_alignment, source, link.word, src, sense_token(dict_, *hit), head, 0.0,
                src + " -> " + sense_token(dict_, *hit) + " -> '" + head + "': reverse, '" + w.lemma.text +
                    "' ends in '" + head + "'"});
        }
      }
    }

    // w' has a sense that only points elsewhere, and the referenced sense
    // translates back to w.
    const auto& target_entry = dict_.entry(target);
    for (std::uint32_t s = 0; s < target_entry.senses.size(); ++s) {
      if (!target_entry.senses[s].reference) continue;
      std::optional<ResolvedReference> resolved;
      try {
        resolved = resolve_reference(dict_, {target, s});
      } catch (const Error&) {
        continue;
      }
      if (!translates_to(resolved->sense, w)) continue;
      explained = true;
      const std::string via = sense_token(dict_, {target, s});
      const std::string dst = sense_token(dict_, resolved->sense);
      emit({IssueType::use_of_reference, source, link.word, src, via, dst, score,
            src + " -> " + via + " => " + dst + " -> '" + w.lemma.text + "'"});
    }

    if (link.via_variant) {
      if (auto back = back_translation(target, w, true)) {
        explained = true;
        const std::string dst = sense_token(dict_, *back);
        emit({IssueType::use_of_variant, source, link.word, src, link.word, dst, score,
              src + " -> '" + link.word + "' (variant of '" + target_entry.lemma.text + "'); " + dst + " -> '" +
                  w.lemma.text + "'"});
      }
    }

    // A back-translation spelled differently is reported from the other
    // side as inconsistent_spelling.
    if (!reciprocal && !explained && !spelled_back(target, w)) {
      const std::string dst = target_token(id, link);
      emit({IssueType::misalignment, source, link.word, src, "-", dst, score,
            src + " -> " + dst + ": no sense of '" + target_entry.lemma.text + "' translates back to '" +
                w.lemma.text + "'"});
    }
  }

  void inspect_unresolved(SenseRef source, const DictEntry& w, const std::string& src, const std::string& word) {
    const LemmaKey key = dict_.translation_key(w, word);
    auto it = by_spelling_.find({spelling_key(word), key.pos, key.lang});
    if (it != by_spelling_.end()) {
      for (std::size_t e : it->second) {
        auto back = back_translation(static_cast<std::uint32_t>(e), w);
        if (!back) continue;
        const std::string dst = sense_token(dict_, *back);
        emit({IssueType::inconsistent_spelling, source, word, src, word, dst, 0.0,
              src + " -> '" + word + "' but " + dst + " -> '" + w.lemma.text + "'"});
        return;
      }
    }
    emit({IssueType::missing_lemma, source, word, src, "-", word, 0.0,
          src + " -> '" + word + "': not in the lexicon"});
  }

  // First sense of `entry` with a translation that is a compound headed by `head`.
  std::optional<std::pair<SenseRef, std::string>> find_compound(std::uint32_t entry, const std::string& head) const {
    const auto& e = dict_.entry(entry);
    for (std::uint32_t s = 0; s < e.senses.size(); ++s) {
      for (const auto& t : e.senses[s].translations) {
        if (compound_head(t) == head) return std::pair{SenseRef{entry, s}, t};
      }
    }
    return std::nullopt;
  }

  std::optional<SenseRef> find_translation(std::uint32_t entry, const std::string& word) const {
    const auto& e = dict_.entry(entry);
    for (std::uint32_t s = 0; s < e.senses.size(); ++s) {
      const auto& ts = e.senses[s].translations;
      if (std::find(ts.begin(), ts.end(), word) != ts.end()) return SenseRef{entry, s};
    }
    return std::nullopt;
  }

  const Dictionary& dict_;
  const NoisyGraph& g_;
  std::map<NodeId, const SenseMapping*> by_source_;
  std::map<std::tuple<std::string, PartOfSpeech, std::string>, std::vector<std::size_t>> by_spelling_;
  std::set<std::tuple<IssueType, std::string, std::string, std::string>> seen_;
  std::vector<Issue> issues_;
};

}  // namespace detail

// Issues in graph order: source sense, then translation word.
inline std::vector<Issue> detect_issues(const Dictionary& dict, const NoisyGraph& g,
                                        std::span<const SenseMapping> mappings) {
  return detail::IssueDetector(dict, g, mappings).run();
}

inline constexpr double kHighScore = 0.3;

struct IssueReport {
  std::vector<Issue> issues;
  bool has_high_scores = false;  // any confidence above kHighScore
};

// Descending confidence; equal confidences keep type order, then input order.
inline IssueReport rank_issues(std::vector<Issue> issues) {
  std::stable_sort(issues.begin(), issues.end(), [](const Issue& a, const Issue& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.type < b.type;
  });
  IssueReport report{std::move(issues), false};
  for (const auto& issue : report.issues) report.has_high_scores |= issue.confidence > kHighScore;
  return report;
}

inline void write_issue_tsv(std::ostream& out, const IssueReport& report) {
  if (report.has_high_scores) {
    out << "# note: scores above " << format_fixed(kHighScore, 1)
        << " are close to the practical maximum and rarely observed\n";
  }
  out << "type\tconfidence\tsrc\tvia\tdst\texplanation\n";
  for (const auto& issue : report.issues) {
    out << to_string(issue.type) << '\t' << format_fixed(issue.confidence, 4) << '\t' << issue.src << '\t'
        << issue.via << '\t' << issue.dst << '\t' << issue.explanation << '\n';
  }
}

}  // namespace cqc
