#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cqc {

enum class ErrorKind {
  malformed_input,
  duplicate_lemma_key,
  duplicate_sense_label,
  unknown_language_tag,
  unknown_sense,
  unknown_lemma,
  unknown_word,
  unknown_node,
  unresolvable_word,
  dangling_reference,
  reference_cycle,
  empty_graph,
  inconsistent_mapping,
  illegal_config,
  graph_too_large,
  gold_mismatch,
  invalid_argument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_input: return "MalformedInput";
    case ErrorKind::duplicate_lemma_key: return "DuplicateLemmaKey";
    case ErrorKind::duplicate_sense_label: return "DuplicateSenseLabel";
    case ErrorKind::unknown_language_tag: return "UnknownLanguageTag";
    case ErrorKind::unknown_sense: return "UnknownSense";
    case ErrorKind::unknown_lemma: return "UnknownLemma";
    case ErrorKind::unknown_word: return "UnknownWord";
    case ErrorKind::unknown_node: return "UnknownNode";
    case ErrorKind::unresolvable_word: return "UnresolvableWord";
    case ErrorKind::dangling_reference: return "DanglingReference";
    case ErrorKind::reference_cycle: return "ReferenceCycle";
    case ErrorKind::empty_graph: return "EmptyGraph";
    case ErrorKind::inconsistent_mapping: return "InconsistentMapping";
    case ErrorKind::illegal_config: return "IllegalConfig";
    case ErrorKind::graph_too_large: return "GraphTooLarge";
    case ErrorKind::gold_mismatch: return "GoldMismatch";
    case ErrorKind::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

// All library failures are reported through this exception. The message
// names the offending location (JSON path, TSV line, sense token).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cqc
