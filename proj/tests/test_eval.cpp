#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <string>
#include <vector>

#include "seqgen/corpus.hpp"
#include "mutants.hpp"

using namespace seqgen;
using eval::ErrorClass;
using testing::kMcpRef;
using testing::kSessionRef;
using testing::kTensorRef;
using testing::replace_once;

namespace {

// A hand-written reference program plus its captured oracle; mutants are
// graded against it.
struct Fixture {
  ScenarioCatalog catalog;
  std::string source;
  OracleRecord oracle;
  std::uint64_t seed;
};

Fixture make_fixture(const std::string& scenario, const std::string& source, std::uint64_t seed) {
  Fixture f{scenario_by_name(scenario), source, {}, seed};
  f.oracle = capture_oracle(parse_candidate(source), f.catalog, seed);
  REQUIRE(f.oracle.taken.completed());
  return f;
}

eval::EvalVerdict grade(const Fixture& f, const std::string& candidate) {
  return eval::evaluate(candidate, f.catalog, {}, f.seed, f.oracle);
}

void check_mutants(const Fixture& f, const std::vector<testing::LabeledMutant>& mutants) {
  REQUIRE(mutants.size() == 10);
  int syntax = 0, execution = 0, result = 0;
  for (const auto& m : mutants) {
    auto v = grade(f, m.text);
    INFO(m.label);
    REQUIRE_FALSE(v.pass);
    REQUIRE(v.error_class.has_value());
    REQUIRE(*v.error_class == m.want);
    switch (m.want) {
      case ErrorClass::Syntax: ++syntax; break;
      case ErrorClass::Execution: ++execution; break;
      case ErrorClass::Result: ++result; break;
    }
  }
  REQUIRE(syntax == 2);
  REQUIRE(execution == 3);
  REQUIRE(result == 5);
}

}  // namespace

TEST_CASE("the reference source grades as a pass against its own oracle") {
  for (auto&& [scenario, src, seed] :
       {std::tuple{"tensor", kTensorRef, std::uint64_t{5}},
        std::tuple{"session", kSessionRef, std::uint64_t{7}},
        std::tuple{"mcp", kMcpRef, std::uint64_t{9}}}) {
    DYNAMIC_SECTION(scenario) {
      auto f = make_fixture(scenario, src, seed);
      auto v = grade(f, f.source);
      INFO(v.detail);
      REQUIRE(v.pass);
      REQUIRE_FALSE(v.error_class.has_value());
    }
  }
}

TEST_CASE("hand-labeled mutants are classified exactly") {
  for (const auto& suite : testing::mutant_suites()) {
    DYNAMIC_SECTION(suite.scenario) {
      auto f = make_fixture(suite.scenario, suite.reference, suite.seed);
      check_mutants(f, suite.mutants);
    }
  }
}

TEST_CASE("classification picks the earliest failing stage") {
  auto f = make_fixture("tensor", kTensorRef, 5);

  // broken syntax AND a would-be runtime problem: syntax wins
  auto v1 = grade(f, "r1 = frobnicate(t=x9\nRESULT = [r1]\n");
  REQUIRE(*v1.error_class == ErrorClass::Syntax);

  // parses, fails at runtime, and would also return the wrong thing: execution wins
  auto v2 = grade(f, "r1 = frobnicate(t=x0)\nRESULT = [r1]\n");
  REQUIRE(*v2.error_class == ErrorClass::Execution);

  // parses and runs, wrong output: result
  auto v3 = grade(f, replace_once(f.source, "RESULT = [r5]", "RESULT = [r3]"));
  REQUIRE(*v3.error_class == ErrorClass::Result);
}

TEST_CASE("candidates may rename private intermediates") {
  auto f = make_fixture("tensor", kTensorRef, 5);
  const std::string renamed =
      "x0 = tensor([2, 3], [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])\n"
      "y1 = transpose(t=x0, dim0=0, dim1=1)\n"
      "y2 = reshape(t=y1, shape=[6])\n"
      "y3 = unsqueeze(t=y2, dim=0)\n"
      "y4 = cat(a=y3, b=y3, dim=0)\n"
      "y5 = linear(t=y4, out_features=3)\n"
      "RESULT = [y5]\n";
  auto v = grade(f, renamed);
  INFO(v.detail);
  REQUIRE(v.pass);

  // ...but a name shared with the reference must carry the same value
  auto shared = replace_once(f.source, "RESULT = [r5]", "r2 = unsqueeze(t=r2, dim=1)\nRESULT = [r5]");
  auto bad = grade(f, shared);
  REQUIRE_FALSE(bad.pass);
  REQUIRE(*bad.error_class == ErrorClass::Result);
  REQUIRE(bad.detail.find("r2") != std::string::npos);
}

TEST_CASE("fenced candidate text is unwrapped before grading") {
  auto f = make_fixture("tensor", kTensorRef, 5);
  auto v = grade(f, "```\n" + f.source + "```\n");
  REQUIRE(v.pass);
}

TEST_CASE("split oracles grade both initializations") {
  // find a forked campaign entry and check that a branch-dependent mutation
  // of the *else* path fails even though the default run matches
  auto cfg = CampaignConfig{};
  cfg.scenario = "session";
  cfg.programs_per_scenario = 40;
  cfg.seed = 2;
  auto result = run_campaign(cfg);
  const auto& catalog = scenario_by_name("session");

  bool exercised = false;
  for (const auto& e : result.entries) {
    if (!e.split || e.dead_branch || !e.oracle.flipped) continue;
    // the entry's own source passes both runs
    auto self = eval::evaluate(e.source, catalog, e.init, e.seed, e.oracle);
    INFO(e.id << ": " << self.detail);
    REQUIRE(self.pass);

    // drop the else branch: default run still matches, flipped run must not
    auto p = e.ir;
    for (auto& s : p.stmts) {
      if (auto* f = std::get_if<IfStmt>(&s)) {
        f->else_body.clear();
        f->else_body.push_back(ResultStmt{});
      }
    }
    auto v = eval::evaluate(render_source(p), catalog, e.init, e.seed, e.oracle);
    REQUIRE_FALSE(v.pass);
    REQUIRE(*v.error_class == ErrorClass::Result);
    REQUIRE(v.detail.find("flipped run") != std::string::npos);
    exercised = true;
    break;
  }
  REQUIRE(exercised);
}

TEST_CASE("aggregation arithmetic and serialization") {
  using eval::TaskVerdict;
  std::vector<TaskVerdict> verdicts = {
      {"a-0", "alpha", eval::EvalVerdict::passed()},
      {"a-1", "alpha", eval::EvalVerdict::failed(ErrorClass::Result, "RESULT[0] mismatch")},
      {"b-0", "beta", eval::EvalVerdict::passed()},
      {"b-1", "beta", eval::EvalVerdict::failed(ErrorClass::Syntax, "line 1")},
      {"b-2", "beta", eval::EvalVerdict::failed(ErrorClass::Result, "backend state mismatch")},
  };
  auto rep = eval::aggregate(verdicts);
  REQUIRE(rep.total == 5);
  REQUIRE(rep.passes == 2);
  REQUIRE(rep.pass_at_1().has_value());
  REQUIRE(*rep.pass_at_1() == Catch::Approx(0.4));
  REQUIRE(rep.per_scenario.at("alpha") == std::pair<int, int>{1, 2});
  REQUIRE(rep.per_scenario.at("beta") == std::pair<int, int>{1, 3});
  REQUIRE(rep.per_error_class.at("result") == 2);
  REQUIRE(rep.per_error_class.at("syntax") == 1);
  REQUIRE(rep.per_error_class.count("execution") == 0);

  auto j = eval::report_to_json(rep);
  REQUIRE(j.at("total") == 5);
  REQUIRE(j.at("passes") == 2);
  REQUIRE(j.at("pass_at_1").get<double>() == Catch::Approx(0.4));
  REQUIRE(j.at("per_scenario").at("alpha").at("pass_at_1").get<double>() == Catch::Approx(0.5));
  REQUIRE(j.at("per_error_class").at("result") == 2);

  auto jv = eval::verdict_to_json(verdicts[1]);
  REQUIRE(jv.at("id") == "a-1");
  REQUIRE(jv.at("class") == "result");
  REQUIRE(jv.at("detail") == "RESULT[0] mismatch");
  REQUIRE(eval::verdict_to_json(verdicts[0]).at("class") == "pass");

  // an empty evaluation has no pass rate
  auto empty = eval::aggregate({});
  REQUIRE(empty.total == 0);
  REQUIRE_FALSE(empty.pass_at_1().has_value());
  REQUIRE(eval::report_to_json(empty).at("pass_at_1").is_null());
}

TEST_CASE("campaigns produce self-contained sequential entries") {
  for (const auto& name : scenario_names()) {
    DYNAMIC_SECTION(name) {
      CampaignConfig cfg;
      cfg.scenario = name;
      cfg.programs_per_scenario = 12;
      cfg.seed = 3;
      auto result = run_campaign(cfg);
      REQUIRE(result.skipped.empty());
      REQUIRE(result.entries.size() == 12);
      for (int i = 0; i < 12; ++i) {
        const auto& e = result.entries[static_cast<std::size_t>(i)];
        REQUIRE(e.id == entry_id(name, i));
        REQUIRE(e.scenario == name);
        REQUIRE(e.seed == derive_seed(3, static_cast<std::uint64_t>(i)));
        REQUIRE(e.source == render_source(e.ir));
        REQUIRE(e.split == e.ir.has_split());
        REQUIRE(e.dead_branch == e.oracle.dead_branch);
        REQUIRE_FALSE(e.instruction.has_value());  // translate off
        REQUIRE(e.transcript.is_null());

        const auto init = e.ir.init_block();
        REQUIRE(e.init.size() == init.size());
        for (const auto* d : init) {
          REQUIRE(e.init.count(d->name) == 1);
          REQUIRE(approx_equal(e.init.at(d->name), d->value, 0.0));
        }
      }
    }
  }
}

TEST_CASE("translated campaigns attach instructions and transcripts") {
  CampaignConfig cfg;
  cfg.scenario = "tensor";
  cfg.programs_per_scenario = 6;
  cfg.seed = 4;
  cfg.translate = true;  // default template provider
  auto result = run_campaign(cfg);
  REQUIRE(result.entries.size() == 6);
  for (const auto& e : result.entries) {
    REQUIRE(e.instruction.has_value());
    REQUIRE_FALSE(e.instruction->empty());
    REQUIRE(e.transcript.at("outcome") == "accepted");
    REQUIRE_FALSE(e.needs_review);
    REQUIRE(*e.instruction == translation::template_instruction(e.ir));
  }
}

TEST_CASE("corpus files round-trip byte for byte") {
  CampaignConfig cfg;
  cfg.scenario = "session";
  cfg.programs_per_scenario = 8;
  cfg.seed = 6;
  cfg.translate = true;
  auto corpus = corpus_of(cfg, run_campaign(cfg));

  auto text = corpus_to_text(corpus);
  auto back = corpus_from_text(text);
  REQUIRE(corpus_to_text(back) == text);
  REQUIRE(back.schema_version == kCorpusSchemaVersion);
  REQUIRE(back.entries.size() == corpus.entries.size());
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    REQUIRE(back.entries[i].id == corpus.entries[i].id);
    REQUIRE(program_equal(back.entries[i].ir, corpus.entries[i].ir, 0.0));
    REQUIRE(back.entries[i].instruction == corpus.entries[i].instruction);
  }

  // config embeds faithfully, including non-default values
  CampaignConfig other;
  other.scenario = "mcp";
  other.coverage = CoverageMode::Adjacent;
  other.enable_split = false;
  other.seed = 123456789;
  other.translate = true;
  other.provider = "http";
  auto rt = campaign_config_from_json(campaign_config_to_json(other));
  REQUIRE(rt.scenario == other.scenario);
  REQUIRE(rt.coverage == other.coverage);
  REQUIRE(rt.enable_split == other.enable_split);
  REQUIRE(rt.seed == other.seed);
  REQUIRE(rt.translate == other.translate);
  REQUIRE(rt.provider == other.provider);
}

TEST_CASE("corpus evaluation pairs candidates by id and reports the rest missing") {
  CampaignConfig cfg;
  cfg.scenario = "tensor";
  cfg.programs_per_scenario = 6;
  cfg.seed = 8;
  auto corpus = corpus_of(cfg, run_campaign(cfg));
  REQUIRE(corpus.entries.size() == 6);

  std::map<std::string, std::string> candidates;
  candidates[corpus.entries[0].id] = corpus.entries[0].source;  // pass
  candidates[corpus.entries[1].id] = "r1 = broken(\n";          // syntax
  auto run = evaluate_corpus(corpus, candidates);
  REQUIRE(run.verdicts.size() == 2);
  REQUIRE(run.missing.size() == 4);
  REQUIRE(run.verdicts[0].verdict.pass);
  REQUIRE_FALSE(run.verdicts[1].verdict.pass);
  REQUIRE(*run.verdicts[1].verdict.error_class == ErrorClass::Syntax);

  auto rep = eval::aggregate(run.verdicts);
  REQUIRE(rep.total == 2);
  REQUIRE(rep.passes == 1);
  REQUIRE(*rep.pass_at_1() == Catch::Approx(0.5));
}

TEST_CASE("every entry of a translated campaign is graded pass against itself") {
  for (const auto& name : scenario_names()) {
    CampaignConfig cfg;
    cfg.scenario = name;
    cfg.programs_per_scenario = 12;
    cfg.seed = 11;
    auto corpus = corpus_of(cfg, run_campaign(cfg));
    std::map<std::string, std::string> candidates;
    for (const auto& e : corpus.entries) candidates[e.id] = e.source;
    auto run = evaluate_corpus(corpus, candidates);
    REQUIRE(run.missing.empty());
    auto rep = eval::aggregate(run.verdicts);
    REQUIRE(rep.total == 12);
    REQUIRE(rep.passes == 12);
    REQUIRE(*rep.pass_at_1() == 1.0);
  }
}
