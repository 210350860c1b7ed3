#pragma once

// Bilingual dictionary model: the lexicon of both languages, the sense
// inventory of each lemma, per-sense translations, meta-information words,
// lexical variants and references between entries.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cqc/error.hpp"

namespace cqc {

enum class PartOfSpeech : char {
  noun = 'n',
  verb = 'v',
  adjective = 'a',
  adverb = 'r',
};

inline char pos_code(PartOfSpeech pos) { return static_cast<char>(pos); }

inline std::optional<PartOfSpeech> parse_pos(std::string_view text) {
  if (text == "n") return PartOfSpeech::noun;
  if (text == "v") return PartOfSpeech::verb;
  if (text == "a") return PartOfSpeech::adjective;
  if (text == "r") return PartOfSpeech::adverb;
  return std::nullopt;
}

// (text, pos, lang) uniquely identifies a lemma. Case-sensitive, no
// normalization: spelling differences are themselves a dictionary defect.
struct LemmaKey {
  std::string text;
  PartOfSpeech pos = PartOfSpeech::noun;
  std::string lang;

  auto operator<=>(const LemmaKey&) const = default;
  bool operator==(const LemmaKey&) const = default;
};

inline std::string to_string(const LemmaKey& key) {
  return key.text + "#" + pos_code(key.pos) + "#" + key.lang;
}

struct SenseId {
  std::string label;
  std::size_t order_index = 0;

  bool operator==(const SenseId&) const = default;
};

// Target of a reference sense ("tesserino n. 1 -> tessera"). The referenced
// entry lives in the same language as the referring one. Without an explicit
// sense label the first listed sense of the target is meant.
struct ReferenceTarget {
  std::string lemma;
  PartOfSpeech pos = PartOfSpeech::noun;
  std::optional<std::string> sense;

  bool operator==(const ReferenceTarget&) const = default;
};

struct SenseEntry {
  SenseId id;
  std::vector<std::string> translations;  // T(s), listing order
  std::vector<std::string> meta;          // M(s), duplicates removed
  std::optional<ReferenceTarget> reference;

  bool operator==(const SenseEntry&) const = default;
};

struct DictEntry {
  LemmaKey lemma;
  std::vector<std::string> variants;
  std::vector<SenseEntry> senses;

  bool operator==(const DictEntry&) const = default;
};

// Addresses one sense: entry index in file order, sense index in listing
// order.
struct SenseRef {
  std::uint32_t entry = 0;
  std::uint32_t sense = 0;

  auto operator<=>(const SenseRef&) const = default;
  bool operator==(const SenseRef&) const = default;
};

class Dictionary {
 public:
  Dictionary() = default;

  // Validates every invariant and builds the lookup tables. Throws Error.
  Dictionary(std::string source_lang, std::string target_lang,
             std::vector<DictEntry> entries)
      : source_lang_(std::move(source_lang)),
        target_lang_(std::move(target_lang)),
        entries_(std::move(entries)) {
    if (source_lang_.empty() || target_lang_.empty()) {
      throw Error(ErrorKind::unknown_language_tag, "language tags must be non-empty");
    }
    if (source_lang_ == target_lang_) {
      throw Error(ErrorKind::unknown_language_tag,
                  "source and target language are both '" + source_lang_ + "'");
    }
    build_index();
  }

  const std::string& source_lang() const { return source_lang_; }
  const std::string& target_lang() const { return target_lang_; }

  // The language opposite to `lang` within this dictionary.
  const std::string& other_language(std::string_view lang) const {
    return lang == source_lang_ ? target_lang_ : source_lang_;
  }

  std::span<const DictEntry> entries() const { return entries_; }
  std::size_t entry_count() const { return entries_.size(); }
  std::size_t sense_count() const { return sense_count_; }

  const DictEntry& entry(std::size_t index) const {
    if (index >= entries_.size()) {
      throw Error(ErrorKind::unknown_lemma, "entry index " + std::to_string(index));
    }
    return entries_[index];
  }

  const SenseEntry& sense(SenseRef ref) const {
    if (ref.entry >= entries_.size() || ref.sense >= entries_[ref.entry].senses.size()) {
      throw Error(ErrorKind::unknown_sense, "sense reference (" + std::to_string(ref.entry) +
                                                ", " + std::to_string(ref.sense) + ")");
    }
    return entries_[ref.entry].senses[ref.sense];
  }

  bool contains(SenseRef ref) const {
    return ref.entry < entries_.size() && ref.sense < entries_[ref.entry].senses.size();
  }

  std::optional<std::size_t> find_entry(const LemmaKey& key) const {
    auto it = by_key_.find(key);
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
  }

  // Entry listing `key.text` among its variants (same pos and language).
  std::optional<std::size_t> find_variant(const LemmaKey& key) const {
    auto it = by_variant_.find(key);
    if (it == by_variant_.end()) return std::nullopt;
    return it->second;
  }

  // Every entry whose main form is `text`, in any language or part of speech.
  std::span<const std::size_t> entries_with_text(std::string_view text) const {
    auto it = by_text_.find(text);
    if (it == by_text_.end()) return {};
    return it->second;
  }

  std::optional<SenseRef> find_sense(const LemmaKey& key, std::string_view label) const {
    auto entry = find_entry(key);
    if (!entry) return std::nullopt;
    const auto& senses = entries_[*entry].senses;
    for (std::size_t i = 0; i < senses.size(); ++i) {
      if (senses[i].id.label == label) {
        return SenseRef{static_cast<std::uint32_t>(*entry), static_cast<std::uint32_t>(i)};
      }
    }
    return std::nullopt;
  }

  // Lemma key a translation word of `source` is looked up under: same part
  // of speech, opposite language.
  LemmaKey translation_key(const DictEntry& source, const std::string& word) const {
    return LemmaKey{word, source.lemma.pos, other_language(source.lemma.lang)};
  }

  bool operator==(const Dictionary& other) const {
    return source_lang_ == other.source_lang_ && target_lang_ == other.target_lang_ &&
           entries_ == other.entries_;
  }

 private:
  void build_index() {
    sense_count_ = 0;
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      auto& entry = entries_[e];
      const std::string where = "entries[" + std::to_string(e) + "] (" + to_string(entry.lemma) + ")";
      if (entry.lemma.text.empty()) {
        throw Error(ErrorKind::malformed_input, where + ": empty lemma");
      }
      if (entry.lemma.lang != source_lang_ && entry.lemma.lang != target_lang_) {
        throw Error(ErrorKind::unknown_language_tag, where + ": language '" + entry.lemma.lang + "'");
      }
      if (!by_key_.emplace(entry.lemma, e).second) {
        throw Error(ErrorKind::duplicate_lemma_key, where);
      }
      if (entry.senses.empty()) {
        throw Error(ErrorKind::malformed_input, where + ": no senses");
      }
      for (const auto& variant : entry.variants) {
        if (variant == entry.lemma.text) {
          throw Error(ErrorKind::malformed_input, where + ": variant repeats the lemma");
        }
      }
      std::set<std::string_view> labels;
      for (std::size_t s = 0; s < entry.senses.size(); ++s) {
        auto& sense = entry.senses[s];
        const std::string sense_where = where + ".senses[" + std::to_string(s) + "]";
        sense.id.order_index = s;
        if (sense.id.label.empty()) {
          throw Error(ErrorKind::malformed_input, sense_where + ": empty sense id");
        }
        if (!labels.insert(sense.id.label).second) {
          throw Error(ErrorKind::duplicate_sense_label, sense_where + ": label '" + sense.id.label + "'");
        }
        if (sense.translations.empty() && !sense.reference) {
          throw Error(ErrorKind::malformed_input, sense_where + ": no translations and no reference");
        }
        std::set<std::string_view> seen;
        for (const auto& word : sense.translations) {
          if (word.empty()) {
            throw Error(ErrorKind::malformed_input, sense_where + ": empty translation");
          }
          if (!seen.insert(word).second) {
            throw Error(ErrorKind::malformed_input, sense_where + ": duplicate translation '" + word + "'");
          }
        }
        std::vector<std::string> meta;
        for (auto& word : sense.meta) {
          if (std::find(meta.begin(), meta.end(), word) == meta.end()) meta.push_back(std::move(word));
        }
        sense.meta = std::move(meta);
        ++sense_count_;
      }
    }
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      const auto& entry = entries_[e];
      by_text_[entry.lemma.text].push_back(e);
      for (const auto& variant : entry.variants) {
        // A main form always wins over a variant spelling.
        by_variant_.emplace(LemmaKey{variant, entry.lemma.pos, entry.lemma.lang}, e);
      }
    }
  }

  std::string source_lang_;
  std::string target_lang_;
  std::vector<DictEntry> entries_;
  std::size_t sense_count_ = 0;
  std::map<LemmaKey, std::size_t> by_key_;
  std::map<LemmaKey, std::size_t> by_variant_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_text_;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& object, const char* field,
                                     const std::string& where) {
  if (!object.is_object() || !object.contains(field)) {
    throw Error(ErrorKind::malformed_input, where + ": missing field '" + field + "'");
  }
  return object.at(field);
}

inline std::string require_string(const nlohmann::json& object, const char* field,
                                  const std::string& where) {
  const auto& value = require(object, field, where);
  if (!value.is_string()) {
    throw Error(ErrorKind::malformed_input, where + "." + field + ": expected a string");
  }
  return value.get<std::string>();
}

inline std::vector<std::string> string_list(const nlohmann::json& object, const char* field,
                                            const std::string& where) {
  std::vector<std::string> out;
  if (!object.contains(field) || object.at(field).is_null()) return out;
  const auto& value = object.at(field);
  if (!value.is_array()) {
    throw Error(ErrorKind::malformed_input, where + "." + field + ": expected an array");
  }
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_string()) {
      throw Error(ErrorKind::malformed_input,
                  where + "." + field + "[" + std::to_string(i) + "]: expected a string");
    }
    out.push_back(value[i].get<std::string>());
  }
  return out;
}

inline PartOfSpeech require_pos(const nlohmann::json& object, const std::string& where) {
  auto text = require_string(object, "pos", where);
  auto pos = parse_pos(text);
  if (!pos) throw Error(ErrorKind::malformed_input, where + ".pos: unknown part of speech '" + text + "'");
  return *pos;
}

inline std::string label_of(const nlohmann::json& value, const std::string& where) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw Error(ErrorKind::malformed_input, where + ": sense id must be a string");
}

}  // namespace detail

// Parses the JSON interchange format. Usage examples and any other unknown
// fields are ignored.
inline Dictionary parse_dictionary(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::malformed_input, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::malformed_input, "top level must be an object");
  auto source = detail::require_string(doc, "source_lang", "$");
  auto target = detail::require_string(doc, "target_lang", "$");

  std::vector<DictEntry> entries;
  if (doc.contains("entries") && !doc.at("entries").is_null()) {
    const auto& list = doc.at("entries");
    if (!list.is_array()) throw Error(ErrorKind::malformed_input, "$.entries: expected an array");
    entries.reserve(list.size());
    for (std::size_t e = 0; e < list.size(); ++e) {
      const std::string where = "$.entries[" + std::to_string(e) + "]";
      const auto& item = list[e];
      if (!item.is_object()) throw Error(ErrorKind::malformed_input, where + ": expected an object");
      DictEntry entry;
      entry.lemma.text = detail::require_string(item, "lemma", where);
      entry.lemma.pos = detail::require_pos(item, where);
      entry.lemma.lang = detail::require_string(item, "lang", where);
      entry.variants = detail::string_list(item, "variants", where);
      const auto& senses = detail::require(item, "senses", where);
      if (!senses.is_array()) throw Error(ErrorKind::malformed_input, where + ".senses: expected an array");
      for (std::size_t s = 0; s < senses.size(); ++s) {
        const std::string sense_where = where + ".senses[" + std::to_string(s) + "]";
        const auto& node = senses[s];
        if (!node.is_object()) throw Error(ErrorKind::malformed_input, sense_where + ": expected an object");
        SenseEntry sense;
        sense.id.label = detail::label_of(detail::require(node, "id", sense_where), sense_where + ".id");
        sense.id.order_index = s;
        sense.translations = detail::string_list(node, "translations", sense_where);
        sense.meta = detail::string_list(node, "meta", sense_where);
        if (node.contains("ref") && !node.at("ref").is_null()) {
          const auto& ref = node.at("ref");
          const std::string ref_where = sense_where + ".ref";
          ReferenceTarget target_ref;
          target_ref.lemma = detail::require_string(ref, "lemma", ref_where);
          target_ref.pos = ref.contains("pos") ? detail::require_pos(ref, ref_where) : entry.lemma.pos;
          if (ref.contains("sense") && !ref.at("sense").is_null()) {
            target_ref.sense = detail::label_of(ref.at("sense"), ref_where + ".sense");
          }
          sense.reference = std::move(target_ref);
        }
        entry.senses.push_back(std::move(sense));
      }
      entries.push_back(std::move(entry));
    }
  }
  return Dictionary(std::move(source), std::move(target), std::move(entries));
}

inline Dictionary parse_dictionary(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_dictionary(std::string_view(text));
}

inline Dictionary load_dictionary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::malformed_input, "cannot open '" + path + "'");
  return parse_dictionary(in);
}

inline nlohmann::ordered_json dictionary_to_json(const Dictionary& dict) {
  nlohmann::ordered_json doc;
  doc["source_lang"] = dict.source_lang();
  doc["target_lang"] = dict.target_lang();
  auto entries = nlohmann::ordered_json::array();
  for (const auto& entry : dict.entries()) {
    nlohmann::ordered_json item;
    item["lemma"] = entry.lemma.text;
    item["pos"] = std::string(1, pos_code(entry.lemma.pos));
    item["lang"] = entry.lemma.lang;
    item["variants"] = entry.variants;
    auto senses = nlohmann::ordered_json::array();
    for (const auto& sense : entry.senses) {
      nlohmann::ordered_json node;
      node["id"] = sense.id.label;
      node["translations"] = sense.translations;
      node["meta"] = sense.meta;
      if (sense.reference) {
        nlohmann::ordered_json ref;
        ref["lemma"] = sense.reference->lemma;
        ref["pos"] = std::string(1, pos_code(sense.reference->pos));
        if (sense.reference->sense) ref["sense"] = *sense.reference->sense;
        node["ref"] = std::move(ref);
      } else {
        node["ref"] = nullptr;
      }
      senses.push_back(std::move(node));
    }
    item["senses"] = std::move(senses);
    entries.push_back(std::move(item));
  }
  doc["entries"] = std::move(entries);
  return doc;
}

inline std::string serialize_dictionary(const Dictionary& dict) {
  return dictionary_to_json(dict).dump(1) + "\n";
}

// Senses(w) in listing order; empty when the lemma is not in the lexicon.
inline std::vector<SenseRef> senses(const Dictionary& dict, const LemmaKey& lemma) {
  std::vector<SenseRef> out;
  auto entry = dict.find_entry(lemma);
  if (!entry) return out;
  const auto count = dict.entry(*entry).senses.size();
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({static_cast<std::uint32_t>(*entry), static_cast<std::uint32_t>(i)});
  }
  return out;
}

inline const std::vector<std::string>& translations(const Dictionary& dict, SenseRef sense) {
  return dict.sense(sense).translations;
}

inline const std::vector<std::string>& meta(const Dictionary& dict, SenseRef sense) {
  return dict.sense(sense).meta;
}

struct ResolvedReference {
  SenseRef sense;
  std::size_t chain_length = 0;
};

// Follows reference links until a sense that is not itself a reference.
inline ResolvedReference resolve_reference(const Dictionary& dict, SenseRef start) {
  ResolvedReference result{start, 0};
  std::set<SenseRef> visited{start};
  while (true) {
    const auto& sense = dict.sense(result.sense);
    if (!sense.reference) return result;
    const auto& from = dict.entry(result.sense.entry);
    const auto& ref = *sense.reference;
    LemmaKey key{ref.lemma, ref.pos, from.lemma.lang};
    auto entry = dict.find_entry(key);
    if (!entry) {
      throw Error(ErrorKind::dangling_reference, to_string(from.lemma) + " -> " + to_string(key));
    }
    SenseRef next{static_cast<std::uint32_t>(*entry), 0};
    if (ref.sense) {
      auto found = dict.find_sense(key, *ref.sense);
      if (!found) {
        throw Error(ErrorKind::dangling_reference,
                    to_string(from.lemma) + " -> " + to_string(key) + " sense " + *ref.sense);
      }
      next = *found;
    }
    if (!visited.insert(next).second) {
      throw Error(ErrorKind::reference_cycle, "starting at " + to_string(dict.entry(start.entry).lemma));
    }
    result.sense = next;
    ++result.chain_length;
  }
}

// "lemma#pos#label", the token used in every text output.
inline std::string sense_token(const Dictionary& dict, SenseRef ref) {
  const auto& entry = dict.entry(ref.entry);
  return entry.lemma.text + "#" + pos_code(entry.lemma.pos) + "#" + dict.sense(ref).id.label;
}

}  // namespace cqc
