#pragma once

// The noisy dictionary graph: one node per sense, an edge from a sense to
// every sense of each of its translations and meta words.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cqc/dictionary.hpp"
#include "cqc/error.hpp"
#include "cqc/mapping.hpp"

namespace cqc {

enum class EdgeKind : std::uint8_t { translation, meta };

inline std::string_view to_string(EdgeKind kind) {
  return kind == EdgeKind::translation ? "translation" : "meta";
}

// For out-edges `node` is the head, for in-edges it is the tail.
struct Edge {
  NodeId node = 0;
  EdgeKind kind = EdgeKind::translation;

  bool operator==(const Edge&) const = default;
};

struct SenseNode {
  NodeId id = 0;
  SenseRef sense;
  std::uint32_t lemma = 0;  // entry index; equal lemmas never share a path
};

// How one word of T(s) resolved against the lexicon.
struct TranslationLink {
  std::string word;
  std::optional<std::uint32_t> entry;
  bool via_variant = false;
};

class NoisyGraph {
 public:
  NoisyGraph() = default;

  // Raw construction for synthetic graphs: node i belongs to lemma
  // `lemmas[i]`. Duplicate edges and self loops are dropped.
  static NoisyGraph from_edges(std::vector<std::uint32_t> lemmas,
                               const std::vector<std::pair<NodeId, NodeId>>& edges) {
    NoisyGraph g;
    std::map<std::uint32_t, std::uint32_t> rank;
    g.nodes_.reserve(lemmas.size());
    for (std::size_t i = 0; i < lemmas.size(); ++i) {
      const auto id = static_cast<NodeId>(i);
      const SenseRef ref{lemmas[i], rank[lemmas[i]]++};
      g.nodes_.push_back({id, ref, lemmas[i]});
      g.by_sense_.emplace(ref, id);
      if (g.entry_nodes_.size() <= lemmas[i]) g.entry_nodes_.resize(lemmas[i] + 1);
      g.entry_nodes_[lemmas[i]].push_back(id);
    }
    g.out_.assign(lemmas.size(), {});
    g.in_.assign(lemmas.size(), {});
    g.links_.assign(lemmas.size(), {});
    for (auto [from, to] : edges) {
      if (from >= lemmas.size() || to >= lemmas.size()) {
        throw Error(ErrorKind::unknown_node, "edge (" + std::to_string(from) + ", " + std::to_string(to) + ")");
      }
      g.add_edge(from, to, EdgeKind::translation);
    }
    return g;
  }

  std::size_t node_count() const { return nodes_.size(); }

  const SenseNode& node(NodeId id) const {
    check(id);
    return nodes_[id];
  }

  std::uint32_t lemma_of(NodeId id) const { return node(id).lemma; }

  std::optional<NodeId> node_of(SenseRef ref) const {
    auto it = by_sense_.find(ref);
    if (it == by_sense_.end()) return std::nullopt;
    return it->second;
  }

  // Nodes of every sense of entry `entry`, listing order.
  std::span<const NodeId> senses_of(std::uint32_t entry) const {
    if (entry >= entry_nodes_.size()) return {};
    return entry_nodes_[entry];
  }

  std::span<const Edge> out_edges(NodeId id) const {
    check(id);
    return out_[id];
  }

  std::span<const Edge> in_edges(NodeId id) const {
    check(id);
    return in_[id];
  }

  std::span<const TranslationLink> translation_links(NodeId id) const {
    check(id);
    return links_[id];
  }

  std::size_t edge_count() const { return edge_count_; }

  std::size_t edge_count(EdgeKind kind) const {
    return kind == EdgeKind::translation ? translation_edges_ : edge_count_ - translation_edges_;
  }

  bool has_edge(NodeId from, NodeId to, bool include_meta = true) const {
    for (const auto& edge : out_edges(from)) {
      if (edge.node == to) return include_meta || edge.kind == EdgeKind::translation;
    }
    return false;
  }

  bool includes_meta() const { return include_meta_; }

  // Translation words that are not in the lexicon, as (source node, word).
  std::span<const std::pair<NodeId, std::string>> unresolved() const { return unresolved_; }

  bool operator==(const NoisyGraph& other) const {
    return out_ == other.out_ && in_ == other.in_;
  }

 private:
  friend NoisyGraph build_noisy_graph(const Dictionary& dict, bool include_meta);

  void check(NodeId id) const {
    if (id >= nodes_.size()) throw Error(ErrorKind::unknown_node, "node " + std::to_string(id));
  }

  // Collapses parallel edges; a translation edge supersedes a meta edge.
  void add_edge(NodeId from, NodeId to, EdgeKind kind) {
    if (from == to) return;
    for (auto& edge : out_[from]) {
      if (edge.node != to) continue;
      if (kind == EdgeKind::translation && edge.kind == EdgeKind::meta) {
        edge.kind = kind;
        for (auto& back : in_[to]) {
          if (back.node == from) back.kind = kind;
        }
        ++translation_edges_;
      }
      return;
    }
    out_[from].push_back({to, kind});
    in_[to].push_back({from, kind});
    ++edge_count_;
    if (kind == EdgeKind::translation) ++translation_edges_;
  }

  std::vector<SenseNode> nodes_;
  std::map<SenseRef, NodeId> by_sense_;
  std::vector<std::vector<NodeId>> entry_nodes_;
  std::vector<std::vector<Edge>> out_;
  std::vector<std::vector<Edge>> in_;
  std::vector<std::vector<TranslationLink>> links_;
  std::vector<std::pair<NodeId, std::string>> unresolved_;
  std::size_t edge_count_ = 0;
  std::size_t translation_edges_ = 0;
  bool include_meta_ = true;
};

// Nodes are numbered in entry order, then sense order; edges follow the same
// order, translations before meta words.
inline NoisyGraph build_noisy_graph(const Dictionary& dict, bool include_meta = true) {
  NoisyGraph g;
  g.include_meta_ = include_meta;
  g.entry_nodes_.resize(dict.entry_count());
  const auto entries = dict.entries();
  for (std::uint32_t e = 0; e < entries.size(); ++e) {
    for (std::uint32_t s = 0; s < entries[e].senses.size(); ++s) {
      const auto id = static_cast<NodeId>(g.nodes_.size());
      g.nodes_.push_back({id, SenseRef{e, s}, e});
      g.by_sense_.emplace(SenseRef{e, s}, id);
      g.entry_nodes_[e].push_back(id);
    }
  }
  g.out_.assign(g.nodes_.size(), {});
  g.in_.assign(g.nodes_.size(), {});
  g.links_.assign(g.nodes_.size(), {});

  for (const auto& node : g.nodes_) {
    const auto& entry = entries[node.sense.entry];
    const auto& sense = entry.senses[node.sense.sense];
    for (const auto& word : sense.translations) {
      TranslationLink link{word, std::nullopt, false};
      const auto key = dict.translation_key(entry, word);
      if (auto found = dict.find_entry(key)) {
        link.entry = static_cast<std::uint32_t>(*found);
      } else if (auto variant = dict.find_variant(key)) {
        link.entry = static_cast<std::uint32_t>(*variant);
        link.via_variant = true;
      }
      if (link.entry) {
        for (NodeId target : g.entry_nodes_[*link.entry]) g.add_edge(node.id, target, EdgeKind::translation);
      } else {
        g.unresolved_.emplace_back(node.id, word);
      }
      g.links_[node.id].push_back(std::move(link));
    }
    if (!include_meta) continue;
    // Meta words carry no part of speech: they match every entry spelled
    // that way, in either language.
    for (const auto& word : sense.meta) {
      for (std::size_t target_entry : dict.entries_with_text(word)) {
        for (NodeId target : g.entry_nodes_[target_entry]) g.add_edge(node.id, target, EdgeKind::meta);
      }
    }
  }
  return g;
}

// Sum of |T(s)| over senses divided by the number of translation edges.
// A translation word counts once per distinct lemma it resolves to; words
// outside the lexicon contribute no edge and are not counted.
inline double correctness_ratio(const NoisyGraph& g, const Dictionary& dict) {
  (void)dict;
  const auto edges = g.edge_count(EdgeKind::translation);
  if (edges == 0) throw Error(ErrorKind::empty_graph, "no translation edges");
  std::size_t translations = 0;
  for (NodeId id = 0; id < g.node_count(); ++id) {
    std::vector<std::uint32_t> lemmas;
    for (const auto& link : g.translation_links(id)) {
      if (link.entry && std::find(lemmas.begin(), lemmas.end(), *link.entry) == lemmas.end()) {
        lemmas.push_back(*link.entry);
      }
    }
    translations += lemmas.size();
  }
  return static_cast<double>(translations) / static_cast<double>(edges);
}

inline std::size_t out_degree(const NoisyGraph& g, NodeId node) { return g.out_edges(node).size(); }

// G' = (V, E'): one edge per disambiguated (source sense, translation word).
class PrunedGraph {
 public:
  explicit PrunedGraph(std::size_t node_count = 0) : out_(node_count) {}

  std::size_t node_count() const { return out_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  std::span<const NodeId> out_edges(NodeId id) const {
    if (id >= out_.size()) throw Error(ErrorKind::unknown_node, "node " + std::to_string(id));
    return out_[id];
  }

  bool has_edge(NodeId from, NodeId to) const {
    auto edges = out_edges(from);
    return std::find(edges.begin(), edges.end(), to) != edges.end();
  }

  void add_edge(NodeId from, NodeId to) {
    if (std::find(out_[from].begin(), out_[from].end(), to) != out_[from].end()) return;
    out_[from].push_back(to);
    ++edge_count_;
  }

 private:
  std::vector<std::vector<NodeId>> out_;
  std::size_t edge_count_ = 0;
};

inline PrunedGraph prune(const NoisyGraph& g, std::span<const SenseMapping> mappings) {
  PrunedGraph pruned(g.node_count());
  for (const auto& mapping : mappings) {
    const auto links = g.translation_links(mapping.source);
    for (const auto& decision : mapping.words) {
      auto chosen = decision.chosen_sense();
      if (!chosen) continue;
      if (decision.word_index >= links.size() || !links[decision.word_index].entry) {
        throw Error(ErrorKind::inconsistent_mapping, "word '" + decision.word + "' is not a resolvable translation");
      }
      const auto& link = links[decision.word_index];
      if (*chosen >= g.node_count() || g.lemma_of(*chosen) != *link.entry) {
        throw Error(ErrorKind::inconsistent_mapping,
                    "sense " + std::to_string(*chosen) + " is not a sense of '" + decision.word + "'");
      }
      pruned.add_edge(mapping.source, *chosen);
    }
  }
  return pruned;
}

// src_lemma src_pos src_sense dst_lemma dst_pos dst_sense kind
inline void write_graph_tsv(std::ostream& out, const NoisyGraph& g, const Dictionary& dict) {
  auto columns = [&](NodeId id) {
    const auto& ref = g.node(id).sense;
    const auto& entry = dict.entry(ref.entry);
    return entry.lemma.text + "\t" + pos_code(entry.lemma.pos) + "\t" + dict.sense(ref).id.label;
  };
  for (NodeId id = 0; id < g.node_count(); ++id) {
    for (const auto& edge : g.out_edges(id)) {
      out << columns(id) << '\t' << columns(edge.node) << '\t' << to_string(edge.kind) << '\n';
    }
  }
}

}  // namespace cqc
