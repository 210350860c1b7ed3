// cqc: batch front end for dictionary disambiguation, evaluation,
// enhancement and synonym extraction.
//
// Exit codes: 0 success, 1 input error, 2 configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqc/cqc.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kInputError = 1;
constexpr int kConfigError = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string dict;
  std::string algorithm = "cqc";
  std::optional<int> max_depth;
  std::string weight = "exp";
  int max_reversed = 2;
  std::string terminal_only = "on";
  std::string include_meta = "on";
  std::string backoff = "none";
  std::uint64_t seed = 0;
  int walks = 400;
  int markov_steps = 2;
  unsigned threads = 1;
  std::string out;
  std::string summary;
  std::string format = "tsv";

  std::string gold;
  std::string type;
  std::string level = "sense";
  std::string word;
  std::string pos = "n";
  std::string lang;
  std::string sense;
  std::string queries;
  std::vector<std::size_t> ks;
  std::string questions;
};

bool parse_switch(const std::string& text, const char* flag) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw ConfigError(std::string(flag) + " expects on|off, got '" + text + "'");
}

cqc::AlgorithmId algorithm_of(const Options& o) {
  auto id = cqc::parse_algorithm(o.algorithm);
  if (!id) throw ConfigError("unknown algorithm '" + o.algorithm + "'");
  return *id;
}

cqc::AlgorithmConfig config_of(const Options& o, int default_depth = 4) {
  cqc::AlgorithmConfig cfg;
  cfg.search.max_depth = o.max_depth.value_or(default_depth);
  cfg.search.max_reversed = o.max_reversed;
  cfg.search.terminal_only = parse_switch(o.terminal_only, "--terminal-only");
  cfg.search.include_meta = parse_switch(o.include_meta, "--include-meta");
  auto weight = cqc::parse_weight_kind(o.weight);
  if (!weight) throw ConfigError("unknown weight '" + o.weight + "'");
  cfg.weight.kind = *weight;
  cfg.seed = o.seed;
  cfg.walk_count = o.walks;
  cfg.markov_steps = o.markov_steps;
  if (cfg.walk_count < 1) throw ConfigError("--walks must be >= 1");
  if (cfg.markov_steps < 1) throw ConfigError("--markov-steps must be >= 1");
  try {
    cfg.search.validate();
  } catch (const cqc::Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

cqc::BackoffPolicy backoff_of(const Options& o) {
  auto policy = cqc::parse_backoff(o.backoff);
  if (!policy) throw ConfigError("unknown backoff '" + o.backoff + "'");
  return *policy;
}

bool json_format(const Options& o) {
  if (o.format == "json") return true;
  if (o.format == "tsv") return false;
  throw ConfigError("unknown format '" + o.format + "'");
}

std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " path");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(std::string("cannot open ") + what + " '" + path + "'");
  return in;
}

// Writes to `path`, or to stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

// Secondary JSON output: --summary path, or stderr.
void emit_summary(const Options& o, const ordered_json& j) {
  const std::string text = j.dump(2) + "\n";
  if (o.summary.empty()) {
    std::cerr << text;
  } else {
    emit(o.summary, text);
  }
}

struct Loaded {
  cqc::Dictionary dict;
  cqc::NoisyGraph graph;
};

Loaded load(const Options& o, bool include_meta) {
  auto in = open_input(o.dict, "dictionary");
  auto dict = cqc::parse_dictionary(in);
  auto graph = cqc::build_noisy_graph(dict, include_meta);
  return {std::move(dict), std::move(graph)};
}

cqc::DictionaryDisambiguation run(const Options& o, const Loaded& data) {
  const auto id = algorithm_of(o);
  const auto cfg = config_of(o);
  const auto policy = backoff_of(o);
  auto result = cqc::run_algorithm_on_dictionary(id, data.dict, data.graph, cfg, o.threads);
  if (cqc::apply_backoff(result.mappings, policy) > 0) {
    result.pruned = cqc::prune(data.graph, result.mappings);
    result.stats = cqc::summarize(result.mappings, data.dict.entry_count());
  }
  return result;
}

ordered_json stats_json(const cqc::DisambiguationStats& s) {
  return {{"answered", s.answered}, {"abstained", s.abstained}, {"entries", s.entries}, {"senses", s.senses},
          {"words", s.words},       {"resolved", s.resolved}};
}

std::vector<cqc::GoldItem> load_gold(const Options& o) {
  auto in = open_input(o.gold, "gold");
  auto gold = cqc::parse_gold(in);
  if (gold.empty()) throw ConfigError("gold file '" + o.gold + "' has no items");
  return gold;
}

// ---------------------------------------------------------------------------

void cmd_disambiguate(const Options& o) {
  const auto cfg = config_of(o);
  const auto data = load(o, cfg.search.include_meta);
  const auto result = run(o, data);
  std::ostringstream out;
  if (json_format(o)) {
    ordered_json rows = ordered_json::array();
    for (const auto& mapping : result.mappings) {
      const auto ref = data.graph.node(mapping.source).sense;
      for (const auto& word : mapping.words) {
        ordered_json row;
        row["source"] = cqc::sense_token(data.dict, ref);
        row["word"] = word.word;
        if (auto chosen = word.chosen_sense()) {
          row["sense"] = data.dict.sense(data.graph.node(*chosen).sense).id.label;
        } else {
          row["sense"] = nullptr;
        }
        row["score"] = word.chosen_score();
        rows.push_back(std::move(row));
      }
    }
    out << ordered_json{{"summary", stats_json(result.stats)}, {"mappings", rows}}.dump(2) << '\n';
  } else {
    cqc::write_mapping_tsv(out, data.graph, data.dict, result.mappings);
    emit_summary(o, stats_json(result.stats));
  }
  emit(o.out, out.str());
}

void cmd_evaluate(const Options& o) {
  const auto cfg = config_of(o);
  const auto gold = load_gold(o);
  const auto data = load(o, cfg.search.include_meta);
  const auto result = run(o, data);
  const auto metrics = cqc::evaluate(result.mappings, data.graph, data.dict, gold);
  emit(o.out, cqc::metrics_to_json(metrics).dump(2) + "\n");
}

void cmd_tune(const Options& o) {
  const auto id = algorithm_of(o);
  const auto base = config_of(o);
  const auto gold = load_gold(o);
  const auto data = load(o, base.search.include_meta);
  const auto grid = cqc::TuningGrid::for_algorithm(id);
  const auto result = cqc::tune(id, grid, gold, data.dict, data.graph, base, backoff_of(o), o.threads);
  std::ostringstream out;
  if (json_format(o)) {
    ordered_json table = ordered_json::array();
    for (const auto& row : result.table) {
      table.push_back({{"config", cqc::config_to_json(id, row.config)}, {"metrics", cqc::metrics_to_json(row.metrics)}});
    }
    ordered_json best = {{"config", cqc::config_to_json(id, result.best_row().config)},
                         {"metrics", cqc::metrics_to_json(result.best_row().metrics)}};
    out << ordered_json{{"best", best}, {"table", table}}.dump(2) << '\n';
  } else {
    cqc::write_tuning_tsv(out, result);
  }
  emit(o.out, out.str());
}

void cmd_enhance(const Options& o) {
  std::optional<cqc::IssueType> filter;
  if (!o.type.empty()) {
    filter = cqc::parse_issue_type(o.type);
    if (!filter) throw ConfigError("unknown issue type '" + o.type + "'");
  }
  const auto cfg = config_of(o);
  const auto data = load(o, cfg.search.include_meta);
  const auto result = run(o, data);
  auto issues = cqc::detect_issues(data.dict, data.graph, result.mappings);
  if (filter) std::erase_if(issues, [&](const cqc::Issue& i) { return i.type != *filter; });
  const auto report = cqc::rank_issues(std::move(issues));
  std::ostringstream out;
  if (json_format(o)) {
    ordered_json rows = ordered_json::array();
    for (const auto& i : report.issues) {
      rows.push_back({{"type", cqc::to_string(i.type)},
                      {"confidence", i.confidence},
                      {"src", i.src},
                      {"via", i.via},
                      {"dst", i.dst},
                      {"explanation", i.explanation}});
    }
    out << ordered_json{{"high_scores", report.has_high_scores}, {"issues", rows}}.dump(2) << '\n';
  } else {
    cqc::write_issue_tsv(out, report);
  }
  emit(o.out, out.str());
}

struct SynonymQuery {
  cqc::LemmaKey lemma;
  std::optional<std::string> sense;
  std::set<std::string> gold;
};

std::vector<SynonymQuery> load_queries(const Options& o, const cqc::Dictionary& dict) {
  std::vector<SynonymQuery> queries;
  if (!o.queries.empty()) {
    // lang lemma pos sense|- gold1,gold2,...
    auto in = open_input(o.queries, "queries");
    cqc::detail::for_each_tsv_row(in, [&](const std::vector<std::string>& f, std::size_t line) {
      const std::string where = "query line " + std::to_string(line);
      if (f.size() != 4 && f.size() != 5) throw InputError(where + ": expected 4 or 5 fields");
      auto pos = cqc::parse_pos(f[2]);
      if (!pos) throw InputError(where + ": bad part of speech '" + f[2] + "'");
      SynonymQuery q{{f[1], *pos, f[0]}, std::nullopt, {}};
      if (f[3] != "-") q.sense = f[3];
      if (f.size() == 5) {
        std::istringstream list(f[4]);
        for (std::string item; std::getline(list, item, ',');) {
          if (!item.empty()) q.gold.insert(item);
        }
      }
      queries.push_back(std::move(q));
    });
  } else {
    if (o.word.empty()) throw ConfigError("synonyms needs --word or --queries");
    auto pos = cqc::parse_pos(o.pos);
    if (!pos) throw ConfigError("bad part of speech '" + o.pos + "'");
    queries.push_back({{o.word, *pos, o.lang.empty() ? dict.source_lang() : o.lang},
                       o.sense.empty() ? std::nullopt : std::optional<std::string>(o.sense),
                       {}});
  }
  return queries;
}

void cmd_synonyms(const Options& o) {
  bool sense_level;
  if (o.level == "sense") {
    sense_level = true;
  } else if (o.level == "word") {
    sense_level = false;
  } else {
    throw ConfigError("--level expects sense|word");
  }
  const auto cfg = config_of(o, cqc::kSynonymDepth);
  const int depth = cfg.search.max_depth;
  const bool meta = cfg.search.include_meta;
  const auto data = load(o, meta);
  const auto queries = load_queries(o, data.dict);

  std::ostringstream out;
  std::vector<std::vector<std::string>> rankings;
  std::vector<std::set<std::string>> gold;
  for (const auto& q : queries) {
    auto entry = data.dict.find_entry(q.lemma);
    if (!entry) throw cqc::Error(cqc::ErrorKind::unknown_lemma, cqc::to_string(q.lemma));
    std::vector<std::string> ranked;
    if (queries.size() > 1) out << "# " << cqc::to_string(q.lemma) << (q.sense ? "#" + *q.sense : "") << '\n';
    if (sense_level) {
      std::vector<cqc::NodeId> sources;
      if (q.sense) {
        auto ref = data.dict.find_sense(q.lemma, *q.sense);
        if (!ref) throw cqc::Error(cqc::ErrorKind::unknown_sense, cqc::to_string(q.lemma) + " " + *q.sense);
        sources.push_back(*data.graph.node_of(*ref));
      } else {
        for (auto id : data.graph.senses_of(static_cast<std::uint32_t>(*entry))) sources.push_back(id);
      }
      for (auto source : sources) {
        const auto ranking = cqc::extract_synonyms_sense(data.graph, source, depth, &data.dict, meta);
        cqc::write_sense_ranking(out, data.graph, data.dict, ranking);
        for (const auto& c : ranking) {
          ranked.push_back(data.dict.entry(data.graph.node(c.sense).sense.entry).lemma.text);
        }
      }
    } else {
      const auto ranking = cqc::extract_synonyms_word(data.graph, data.dict, *entry, depth, meta);
      cqc::write_word_ranking(out, data.dict, ranking);
      for (const auto& c : ranking) ranked.push_back(data.dict.entry(c.entry).lemma.text);
    }
    rankings.push_back(std::move(ranked));
    gold.push_back(q.gold);
  }
  emit(o.out, out.str());

  if (!o.ks.empty()) {
    const auto table = cqc::precision_at_k(rankings, gold, o.ks);
    ordered_json rows = ordered_json::array();
    for (const auto& row : table) {
      rows.push_back({{"k", row.k}, {"correct", row.correct}, {"given", row.given}, {"precision", row.precision()}});
    }
    emit_summary(o, {{"level", o.level}, {"precision_at_k", rows}});
  }
}

void cmd_toefl(const Options& o) {
  const auto cfg = config_of(o, cqc::kSynonymDepth);
  auto in = open_input(o.questions, "questions");
  const auto questions = cqc::parse_toefl(in);
  const auto data = load(o, cfg.search.include_meta);
  const auto result =
      cqc::run_toefl(data.graph, data.dict, questions, cfg.search.max_depth, cfg.search.include_meta, o.threads);
  std::ostringstream out;
  cqc::write_toefl_tsv(out, questions, result);
  emit(o.out, out.str());
  emit_summary(o, {{"precision", result.precision()},
                   {"recall", result.recall()},
                   {"counts", {{"answered", result.answered}, {"correct", result.correct}, {"total", result.total}}}});
}

void cmd_graph_dump(const Options& o) {
  const auto cfg = config_of(o);
  const auto data = load(o, cfg.search.include_meta);
  std::ostringstream out;
  if (json_format(o)) {
    ordered_json nodes = ordered_json::array(), edges = ordered_json::array();
    for (cqc::NodeId id = 0; id < data.graph.node_count(); ++id) {
      nodes.push_back({{"id", id}, {"sense", cqc::sense_token(data.dict, data.graph.node(id).sense)}});
      for (const auto& e : data.graph.out_edges(id)) {
        edges.push_back({{"from", id}, {"to", e.node}, {"kind", cqc::to_string(e.kind)}});
      }
    }
    ordered_json j{{"nodes", nodes}, {"edges", edges}};
    if (data.graph.edge_count(cqc::EdgeKind::translation) > 0) {
      j["correctness_ratio"] = cqc::correctness_ratio(data.graph, data.dict);
    }
    out << j.dump(2) << '\n';
  } else {
    cqc::write_graph_tsv(out, data.graph, data.dict);
  }
  emit(o.out, out.str());
}

void add_shared(CLI::App* cmd, Options& o) {
  cmd->add_option("--dict", o.dict, "Dictionary JSON file")->required();
  cmd->add_option("--algorithm", o.algorithm, "cqc|cycles|dfs|random_walks|markov|ppr|lesk|fs|random|degree|undirected_cycles")
      ->capture_default_str();
  cmd->add_option("--max-depth", o.max_depth, "Maximum path length (default 4; 6 for synonym tasks)");
  cmd->add_option("--weight", o.weight, "Length weight: const|linear|exp")->capture_default_str();
  cmd->add_option("--max-reversed", o.max_reversed, "Longest run of reversed edges")->capture_default_str();
  cmd->add_option("--terminal-only", o.terminal_only, "Reversed run must end at the source (on|off)")
      ->capture_default_str();
  cmd->add_option("--include-meta", o.include_meta, "Use meta-word edges (on|off)")->capture_default_str();
  cmd->add_option("--backoff", o.backoff, "none|fs")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Seed for randomized algorithms")->capture_default_str();
  cmd->add_option("--walks", o.walks, "Walks per candidate sense (random_walks)")->capture_default_str();
  cmd->add_option("--markov-steps", o.markov_steps, "Steps n of the Markov chain")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  cmd->add_option("--out", o.out, "Output file (default stdout)");
  cmd->add_option("--summary", o.summary, "Summary JSON file (default stderr)");
  cmd->add_option("--format", o.format, "tsv|json")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sense disambiguation of bilingual dictionary translations"};
  app.require_subcommand(1);
  Options o;

  auto* disambiguate = app.add_subcommand("disambiguate", "Disambiguate every translation");
  auto* evaluate = app.add_subcommand("evaluate", "Score a run against a gold TSV");
  auto* tune = app.add_subcommand("tune", "Grid search over algorithm parameters");
  auto* enhance = app.add_subcommand("enhance", "Report dictionary defects");
  auto* synonyms = app.add_subcommand("synonyms", "Rank synonyms of a word or sense");
  auto* toefl = app.add_subcommand("toefl", "Answer multiple-choice synonym questions");
  auto* graph_dump = app.add_subcommand("graph-dump", "Write the noisy graph");
  for (auto* cmd : {disambiguate, evaluate, tune, enhance, synonyms, toefl, graph_dump}) add_shared(cmd, o);

  evaluate->add_option("--gold", o.gold, "Gold TSV")->required();
  tune->add_option("--gold", o.gold, "Gold TSV")->required();
  enhance->add_option("--type", o.type, "Only report this issue type");
  synonyms->add_option("--level", o.level, "sense|word")->capture_default_str();
  synonyms->add_option("--word", o.word, "Query lemma");
  synonyms->add_option("--pos", o.pos, "Part of speech of --word")->capture_default_str();
  synonyms->add_option("--lang", o.lang, "Language of --word (default: source language)");
  synonyms->add_option("--sense", o.sense, "Only this sense of --word");
  synonyms->add_option("--queries", o.queries, "Query TSV: lang lemma pos sense|- [gold,...]");
  synonyms->add_option("--k", o.ks, "Report precision@K for these K")->delimiter(',');
  toefl->add_option("--questions", o.questions, "Question TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*disambiguate) cmd_disambiguate(o);
    if (*evaluate) cmd_evaluate(o);
    if (*tune) cmd_tune(o);
    if (*enhance) cmd_enhance(o);
    if (*synonyms) cmd_synonyms(o);
    if (*toefl) cmd_toefl(o);
    if (*graph_dump) cmd_graph_dump(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const cqc::Error& e) {
    const auto kind = e.kind();
    const bool config = kind == cqc::ErrorKind::illegal_config || kind == cqc::ErrorKind::invalid_argument;
    std::cerr << (config ? "configuration error: " : "input error: ") << e.what() << '\n';
    return config ? kConfigError : kInputError;
  }
  return 0;
}
