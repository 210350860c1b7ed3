#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

namespace {

using namespace cqc;
using cqc::testing::load_fixture;
using cqc::testing::pattern_holds;

struct Detected {
  Dictionary dict;
  NoisyGraph g;
  DictionaryDisambiguation cqc;
  std::vector<Issue> issues;

  explicit Detected(const char* name)
      : dict(load_fixture(name)),
        g(build_noisy_graph(dict)),
        cqc(disambiguate_dictionary(g, dict, SearchConfig{})),
        issues(detect_issues(dict, g, cqc.mappings)) {}
};

TEST(Enhancer, SixPatternFixture) {
  const Detected run("enhancer_six.json");
  ASSERT_EQ(run.issues.size(), 6u);
  std::set<IssueType> types;
  for (const auto& issue : run.issues) {
    types.insert(issue.type);
    EXPECT_TRUE(pattern_holds(run.dict, issue)) << to_string(issue.type) << " " << issue.explanation;
    if (is_structural(issue.type)) {
      EXPECT_EQ(issue.confidence, 0.0);
    }
  }
  EXPECT_EQ(types.size(), 6u);
}

TEST(Enhancer, ExpectedInstances) {
  const Detected run("enhancer_six.json");
  std::map<IssueType, const Issue*> by_type;
  for (const auto& issue : run.issues) by_type[issue.type] = &issue;
  EXPECT_EQ(by_type.at(IssueType::misalignment)->src, "buy#n#1");
  EXPECT_EQ(by_type.at(IssueType::misalignment)->dst, "compera#n#1");
  EXPECT_EQ(by_type.at(IssueType::partial_alignment)->dst, "insect repellent");
  EXPECT_EQ(by_type.at(IssueType::missing_lemma)->dst, "persisting");
  EXPECT_EQ(by_type.at(IssueType::use_of_reference)->via, "tesserino#n#1");
  EXPECT_EQ(by_type.at(IssueType::use_of_reference)->dst, "tessera#n#1");
  EXPECT_EQ(by_type.at(IssueType::use_of_variant)->via, "acknowledgment");
  EXPECT_EQ(by_type.at(IssueType::inconsistent_spelling)->via, "hair-dryer");
  // buy -> compera -> purchase -> acquisto -> buy is a 4-cycle.
  EXPECT_GT(by_type.at(IssueType::misalignment)->confidence, 0.0);
  EXPECT_NEAR(by_type.at(IssueType::use_of_variant)->confidence, std::exp(-2.0), 1e-12);
}

TEST(Enhancer, RankingPutsScoredIssuesFirst) {
  const Detected run("enhancer_six.json");
  const auto report = rank_issues(run.issues);
  ASSERT_EQ(report.issues.size(), 6u);
  bool seen_zero = false;
  for (const auto& issue : report.issues) {
    if (issue.confidence == 0.0) seen_zero = true;
    if (seen_zero) {
      EXPECT_EQ(issue.confidence, 0.0);
    }
  }
  for (std::size_t i = 1; i < report.issues.size(); ++i) {
    EXPECT_GE(report.issues[i - 1].confidence, report.issues[i].confidence);
  }
  EXPECT_GT(report.issues.front().confidence, 0.0);
  EXPECT_FALSE(report.has_high_scores);
}

TEST(Enhancer, CleanDictionaryHasNoIssues) {
  const Detected run("clean.json");
  EXPECT_TRUE(run.issues.empty());
}

TEST(Enhancer, IssuesAreUnique) {
  for (const char* name : {"enhancer_six.json", "language.json", "play.json", "phoneme.json"}) {
    const Detected run(name);
    std::set<std::tuple<IssueType, std::string, std::string, std::string>> keys;
    for (const auto& issue : run.issues) {
      EXPECT_TRUE(keys.insert(issue.key()).second) << name;
    }
  }
}

TEST(Enhancer, SyntheticIssuesSatisfyTheirPredicates) {
  const auto synth = cqc::testing::synthetic_dictionary(12);
  const auto g = build_noisy_graph(synth.dict);
  const auto run = disambiguate_dictionary(g, synth.dict, SearchConfig{});
  const auto issues = detect_issues(synth.dict, g, run.mappings);
  EXPECT_FALSE(issues.empty());
  for (const auto& issue : issues) {
    EXPECT_EQ(issue.type, IssueType::misalignment);
    EXPECT_TRUE(pattern_holds(synth.dict, issue)) << issue.explanation;
  }
}

TEST(Enhancer, ReportFormat) {
  Issue high{IssueType::misalignment, {0, 0}, "x", "a#n#1", "-", "x#n#1", 0.5, "a#n#1 -> x#n#1"};
  Issue zero{IssueType::missing_lemma, {0, 0}, "y", "a#n#1", "-", "y", 0.0, "a#n#1 -> 'y'"};
  const auto report = rank_issues({zero, high});
  EXPECT_TRUE(report.has_high_scores);
  std::ostringstream out;
  write_issue_tsv(out, report);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("# note:", 0), 0u);
  std::getline(lines, line);
  EXPECT_EQ(line, "type\tconfidence\tsrc\tvia\tdst\texplanation");
  std::getline(lines, line);
  EXPECT_EQ(line, "misalignment\t0.5000\ta#n#1\t-\tx#n#1\ta#n#1 -> x#n#1");
}

TEST(Enhancer, Helpers) {
  EXPECT_EQ(spelling_key("Hair-Dryer"), "hairdryer");
  EXPECT_EQ(spelling_key("hair dryer"), "hairdryer");
  EXPECT_EQ(compound_head("insect repellent"), "repellent");
  EXPECT_EQ(compound_head("repellent"), "");
  for (auto t : kAllIssueTypes) {
    EXPECT_EQ(parse_issue_type(to_string(t)), t);
  }
  EXPECT_FALSE(parse_issue_type("typo"));
}

TEST(Enhancer, ReversePartialAlignment) {
  // The source is the compound; its translation lists only the head.
  const auto dict = parse_dictionary(R"({"source_lang":"en","target_lang":"it","entries":[
    {"lemma":"insect repellent","pos":"n","lang":"en","senses":[{"id":"1","translations":["insettifugo"]}]},
    {"lemma":"insettifugo","pos":"n","lang":"it","senses":[{"id":"1","translations":["repellent"]}]},
    {"lemma":"repellent","pos":"n","lang":"en","senses":[{"id":"1","translations":["insettifugo"]}]}]})");
  const auto g = build_noisy_graph(dict);
  const auto run = disambiguate_dictionary(g, dict, SearchConfig{});
  const auto issues = detect_issues(dict, g, run.mappings);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].type, IssueType::partial_alignment);
  EXPECT_EQ(issues[0].dst, "repellent");
  EXPECT_TRUE(pattern_holds(dict, issues[0]));
}

}  // namespace
