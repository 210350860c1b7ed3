#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cqc {

using NodeId = std::uint32_t;

struct CandidateScore {
  NodeId sense = 0;
  double score = 0.0;
};

// Outcome for one translation word w' of a source sense: the candidate
// senses of w' (listing order) with their scores and the chosen one, if any.
struct WordDecision {
  std::string word;
  std::size_t word_index = 0;            // position in T(source)
  std::optional<std::uint32_t> entry;    // lemma w' resolves to; empty if not in L
  std::vector<CandidateScore> candidates;
  std::optional<std::size_t> chosen;     // index into candidates; empty = ABSTAIN

  bool resolved() const { return entry.has_value(); }
  bool answered() const { return chosen.has_value(); }

  std::optional<NodeId> chosen_sense() const {
    if (!chosen) return std::nullopt;
    return candidates[*chosen].sense;
  }

  double chosen_score() const { return chosen ? candidates[*chosen].score : 0.0; }
};

// The mapping mu computed for one source sense.
struct SenseMapping {
  NodeId source = 0;
  std::vector<WordDecision> words;

  const WordDecision* find(std::string_view word) const {
    for (const auto& decision : words) {
      if (decision.word == word) return &decision;
    }
    return nullptr;
  }
};

}  // namespace cqc
