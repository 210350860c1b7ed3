#pragma once

// Collection of cycles and quasi-cycles through a source sense s and a
// candidate sense s'. Every path is stored closed, s -> s' -> ... -> s, and
// its length counts edges including the leading s -> s'.
//
// A quasi-cycle traverses one consecutive run of edges against their
// orientation. The run may not touch the first two edges (s -> s' and the
// edge leaving s'), may be at most `max_reversed` long, and with
// `terminal_only` it has to end at s.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cqc/dictionary.hpp"
#include "cqc/error.hpp"
#include "cqc/graph.hpp"

namespace cqc {

inline constexpr int kMaxSearchDepth = 8;

struct SearchConfig {
  int max_depth = 4;
  bool allow_quasi = true;
  int max_reversed = 2;
  bool terminal_only = true;
  bool include_meta = true;

  void validate() const {
    if (max_depth < 1 || max_depth > kMaxSearchDepth) {
      throw Error(ErrorKind::illegal_config, "max depth " + std::to_string(max_depth) + " outside [1, " +
                                                 std::to_string(kMaxSearchDepth) + "]");
    }
    if (max_reversed < 0) throw Error(ErrorKind::illegal_config, "negative max_reversed");
  }

  // Effective reversed-run bound.
  int reversed_budget() const { return allow_quasi ? max_reversed : 0; }
};

// Plain cycles only.
inline SearchConfig cycles_only(SearchConfig cfg) {
  cfg.allow_quasi = false;
  return cfg;
}

enum class Direction : std::uint8_t { forward, reversed };

struct Path {
  std::vector<NodeId> nodes;           // s, s', s_1, ..., s
  std::vector<Direction> directions;   // one per edge

  int length() const { return static_cast<int>(directions.size()); }

  int reversed_count() const {
    return static_cast<int>(std::count(directions.begin(), directions.end(), Direction::reversed));
  }

  auto operator<=>(const Path&) const = default;
  bool operator==(const Path&) const = default;
};

class PathSet {
 public:
  void add(Path path) {
    ++by_length_[path.length()];
    paths_.push_back(std::move(path));
  }

  std::span<const Path> paths() const& { return paths_; }
  std::vector<Path> paths() && { return std::move(paths_); }
  std::size_t size() const { return paths_.size(); }
  bool empty() const { return paths_.empty(); }

  const std::map<int, std::size_t>& by_length() const { return by_length_; }

  std::size_t count(int length) const {
    auto it = by_length_.find(length);
    return it == by_length_.end() ? 0 : it->second;
  }

  std::vector<Path> sorted() const {
    auto out = paths_;
    std::sort(out.begin(), out.end());
    return out;
  }

  bool contains(const Path& path) const {
    return std::find(paths_.begin(), paths_.end(), path) != paths_.end();
  }

  // Set semantics: discovery order is not part of the contract.
  bool operator==(const PathSet& other) const { return sorted() == other.sorted(); }

  bool is_subset_of(const PathSet& other) const {
    auto mine = sorted();
    auto theirs = other.sorted();
    return std::includes(theirs.begin(), theirs.end(), mine.begin(), mine.end());
  }

 private:
  std::vector<Path> paths_;
  std::map<int, std::size_t> by_length_;
};

enum class PathRule {
  none,
  structure,
  not_closed,
  max_depth,
  missing_edge,
  first_edge,
  simple,
  same_lemma,
  quasi_disallowed,
  reversed_position,
  consecutive,
  max_reversed,
  terminal_only,
};

inline std::string_view to_string(PathRule rule) {
  switch (rule) {
    case PathRule::none: return "none";
    case PathRule::structure: return "structure";
    case PathRule::not_closed: return "not_closed";
    case PathRule::max_depth: return "max_depth";
    case PathRule::missing_edge: return "missing_edge";
    case PathRule::first_edge: return "first_edge";
    case PathRule::simple: return "simple";
    case PathRule::same_lemma: return "same_lemma";
    case PathRule::quasi_disallowed: return "quasi_disallowed";
    case PathRule::reversed_position: return "reversed_position";
    case PathRule::consecutive: return "consecutive";
    case PathRule::max_reversed: return "max_reversed";
    case PathRule::terminal_only: return "terminal_only";
  }
  return "unknown";
}

struct LegalityVerdict {
  bool legal = true;
  PathRule rule = PathRule::none;

  static LegalityVerdict reject(PathRule rule) { return {false, rule}; }
};

inline bool usable(const Edge& edge, bool include_meta) {
  return include_meta || edge.kind == EdgeKind::translation;
}

// Checks a closed path against every rule, reporting the first violation.
inline LegalityVerdict is_legal_path(const Path& p, const SearchConfig& cfg, const NoisyGraph& g) {
  const auto n = p.directions.size();
  if (p.nodes.size() < 3 || p.nodes.size() != n + 1) return LegalityVerdict::reject(PathRule::structure);
  for (NodeId id : p.nodes) {
    if (id >= g.node_count()) return LegalityVerdict::reject(PathRule::structure);
  }
  if (p.nodes.front() != p.nodes.back()) return LegalityVerdict::reject(PathRule::not_closed);
  if (static_cast<int>(n) > cfg.max_depth) return LegalityVerdict::reject(PathRule::max_depth);

  for (std::size_t i = 0; i < n; ++i) {
    const bool forward = p.directions[i] == Direction::forward;
    const NodeId from = forward ? p.nodes[i] : p.nodes[i + 1];
    const NodeId to = forward ? p.nodes[i + 1] : p.nodes[i];
    if (!g.has_edge(from, to, cfg.include_meta)) return LegalityVerdict::reject(PathRule::missing_edge);
  }
  if (p.directions.front() != Direction::forward) return LegalityVerdict::reject(PathRule::first_edge);

  // nodes[0..n-1] must be pairwise distinct, both as nodes and as lemmas.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (p.nodes[i] == p.nodes[j]) return LegalityVerdict::reject(PathRule::simple);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (g.lemma_of(p.nodes[i]) == g.lemma_of(p.nodes[j])) return LegalityVerdict::reject(PathRule::same_lemma);
    }
  }

  std::vector<std::size_t> reversed;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.directions[i] == Direction::reversed) reversed.push_back(i);
  }
  if (reversed.empty()) return {};
  if (!cfg.allow_quasi) return LegalityVerdict::reject(PathRule::quasi_disallowed);
  if (reversed.front() < 2) return LegalityVerdict::reject(PathRule::reversed_position);
  if (reversed.back() - reversed.front() + 1 != reversed.size()) {
    return LegalityVerdict::reject(PathRule::consecutive);
  }
  if (static_cast<int>(reversed.size()) > cfg.max_reversed) return LegalityVerdict::reject(PathRule::max_reversed);
  if (cfg.terminal_only && reversed.back() != n - 1) return LegalityVerdict::reject(PathRule::terminal_only);
  return {};
}

namespace detail {

inline void check_endpoints(const NoisyGraph& g, NodeId start, NodeId target) {
  if (start >= g.node_count() || target >= g.node_count()) {
    throw Error(ErrorKind::unknown_node, "search endpoint outside the graph");
  }
  if (start == target || g.lemma_of(start) == g.lemma_of(target)) {
    throw Error(ErrorKind::invalid_argument, "start and target are senses of the same lemma");
  }
}

class CqcSearch {
 public:
  CqcSearch(const NoisyGraph& g, NodeId target, const SearchConfig& cfg) : g_(g), target_(target), cfg_(cfg) {}

  PathSet run(NodeId start) {
    path_.nodes = {target_, start};
    path_.directions = {Direction::forward};
    extend();
    return std::move(out_);
  }

 private:
  // Visited-stack discipline: a node appears at most once per path but may
  // appear in many paths.
  void extend() {
    if (path_.length() >= cfg_.max_depth) return;
    const NodeId current = path_.nodes.back();
    for (const auto& edge : g_.out_edges(current)) {
      if (usable(edge, cfg_.include_meta)) step(edge.node, Direction::forward);
    }
    if (cfg_.reversed_budget() == 0) return;
    for (const auto& edge : g_.in_edges(current)) {
      if (usable(edge, cfg_.include_meta)) step(edge.node, Direction::reversed);
    }
  }

  void step(NodeId next, Direction direction) {
    if (!run_allows(direction)) return;
    if (next != target_) {
      for (NodeId seen : path_.nodes) {
        if (seen == next || g_.lemma_of(seen) == g_.lemma_of(next)) return;
      }
    }
    const bool closed_run = direction == Direction::forward && reversed_ > 0 &&
                            path_.directions.back() == Direction::reversed;
    path_.nodes.push_back(next);
    path_.directions.push_back(direction);
    if (direction == Direction::reversed) ++reversed_;
    if (closed_run) run_closed_ = true;

    if (next == target_) {
      out_.add(path_);
    } else {
      extend();
    }

    if (closed_run) run_closed_ = false;
    if (direction == Direction::reversed) --reversed_;
    path_.nodes.pop_back();
    path_.directions.pop_back();
  }

  bool run_allows(Direction direction) const {
    if (direction == Direction::forward) {
      // A forward edge right after the reversed run ends the run before s.
      const bool ends_run = reversed_ > 0 && path_.directions.back() == Direction::reversed;
      return !(ends_run && cfg_.terminal_only);
    }
    if (path_.directions.size() < 2) return false;
    if (run_closed_) return false;
    return reversed_ + 1 <= cfg_.reversed_budget();
  }

  const NoisyGraph& g_;
  NodeId target_;
  SearchConfig cfg_;
  Path path_;
  PathSet out_;
  int reversed_ = 0;
  bool run_closed_ = false;
};

}  // namespace detail

// All legal cycles and quasi-cycles s -> s' -> ... -> s of length <= max_depth.
inline PathSet find_cqc_paths(const NoisyGraph& g, NodeId start, NodeId target, const SearchConfig& cfg) {
  cfg.validate();
  detail::check_endpoints(g, start, target);
  return detail::CqcSearch(g, target, cfg).run(start);
}

// Simple directed paths s' -> ... -> s, stored with the s -> s' prefix, of
// full length <= max_depth. No lemma exclusion: this is an ordinary DFS.
inline PathSet find_open_paths(const NoisyGraph& g, NodeId start, NodeId target, int max_depth,
                               bool include_meta = true) {
  SearchConfig{max_depth}.validate();
  if (start >= g.node_count() || target >= g.node_count()) {
    throw Error(ErrorKind::unknown_node, "search endpoint outside the graph");
  }
  if (start == target) throw Error(ErrorKind::invalid_argument, "start equals target");
  PathSet out;
  Path path{{target, start}, {Direction::forward}};
  std::function<void()> extend = [&] {
    if (path.length() >= max_depth) return;
    for (const auto& edge : g.out_edges(path.nodes.back())) {
      if (!usable(edge, include_meta)) continue;
      if (edge.node != target &&
          std::find(path.nodes.begin(), path.nodes.end(), edge.node) != path.nodes.end()) {
        continue;
      }
      path.nodes.push_back(edge.node);
      path.directions.push_back(Direction::forward);
      if (edge.node == target) {
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

inline constexpr std::size_t kBruteForceNodeLimit = 14;

// Testing oracle: enumerates every sequence of distinct interior nodes and
// every orientation of its steps, keeping whatever is_legal_path accepts.
inline PathSet enumerate_paths_bruteforce(const NoisyGraph& g, NodeId start, NodeId target, const SearchConfig& cfg) {
  cfg.validate();
  if (g.node_count() > kBruteForceNodeLimit) {
    throw Error(ErrorKind::graph_too_large, std::to_string(g.node_count()) + " nodes");
  }
  detail::check_endpoints(g, start, target);

  auto connected = [&](NodeId a, NodeId b) {
    return g.has_edge(a, b, cfg.include_meta) || g.has_edge(b, a, cfg.include_meta);
  };

  PathSet out;
  std::vector<NodeId> sequence{target, start};
  std::vector<bool> used(g.node_count(), false);
  used[target] = used[start] = true;

  auto emit_orientations = [&](const std::vector<NodeId>& nodes) {
    const std::size_t edges = nodes.size() - 1;
    for (std::uint32_t mask = 0; mask < (1u << edges); ++mask) {
      Path candidate{nodes, {}};
      for (std::size_t i = 0; i < edges; ++i) {
        candidate.directions.push_back((mask >> i) & 1u ? Direction::reversed : Direction::forward);
      }
      if (is_legal_path(candidate, cfg, g).legal) out.add(std::move(candidate));
    }
  };

  std::function<void()> grow = [&] {
    if (connected(sequence.back(), target) && static_cast<int>(sequence.size()) <= cfg.max_depth) {
      auto closed = sequence;
      closed.push_back(target);
      emit_orientations(closed);
    }
    if (static_cast<int>(sequence.size()) >= cfg.max_depth) return;
    for (NodeId next = 0; next < g.node_count(); ++next) {
      if (used[next] || !connected(sequence.back(), next)) continue;
      used[next] = true;
      sequence.push_back(next);
      grow();
      sequence.pop_back();
      used[next] = false;
    }
  };
  grow();
  return out;
}

// One path per line: lemma#pos#sense tokens joined by -> or <-.
inline std::string format_path(const Path& path, const std::function<std::string(NodeId)>& name) {
  std::ostringstream out;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    if (i > 0) out << (path.directions[i - 1] == Direction::forward ? "->" : "<-");
    out << name(path.nodes[i]);
  }
  return out.str();
}

inline std::string format_path(const Path& path, const NoisyGraph& g, const Dictionary& dict) {
  return format_path(path, [&](NodeId id) { return sense_token(dict, g.node(id).sense); });
}

}  // namespace cqc
