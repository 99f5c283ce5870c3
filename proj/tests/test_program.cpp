#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "seqgen/builder.hpp"
#include "seqgen/parser.hpp"
#include "seqgen/render.hpp"
#include "seqgen/scenarios.hpp"

using namespace seqgen;

TEST_CASE("rendering is byte-stable") {
  auto catalog = tensor_scenario::build();
  FrequencyRecorder rec;
  Rng rng(21);
  auto out = build_program(catalog, rec, rng, 21);
  auto s1 = render_source(out.program);
  auto s2 = render_source(out.program);
  REQUIRE(s1 == s2);
  REQUIRE_FALSE(s1.empty());

  // parse -> render again reproduces the bytes
  auto reparsed = parse_candidate(s1);
  REQUIRE(render_source(reparsed) == s1);
}

TEST_CASE("render then parse is the identity on generated corpora") {
  int total = 0;
  for (const auto& name : scenario_names()) {
    auto catalog = scenario_by_name(name);
    FrequencyRecorder rec;
    Rng rng(77);
    for (std::uint64_t seed = 0; seed < 180; ++seed) {
      BuildConfig cfg;
      if (seed % 3 == 1) cfg.enable_split = false;
      if (seed % 3 == 2) cfg.n_steps = 3;
      auto out = build_program(catalog, rec, rng, seed, cfg);
      auto back = parse_candidate(render_source(out.program));
      if (!program_equal(back, out.program, 0.0)) {
        INFO(name << " seed " << seed << "\n" << render_source(out.program));
        REQUIRE(program_equal(back, out.program, 0.0));
      }
      ++total;
    }
  }
  REQUIRE(total == 540);

  // plus a split-heavy sample so both branches exercise the round trip
  int split_seen = 0;
  auto catalog = session_scenario::build();
  FrequencyRecorder rec;
  Rng rng(78);
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto out = build_program(catalog, rec, rng, seed + 1000);
    auto back = parse_candidate(render_source(out.program));
    REQUIRE(program_equal(back, out.program, 0.0));
    if (out.program.has_split()) ++split_seen;
    ++total;
  }
  REQUIRE(total >= 600);
  REQUIRE(split_seen > 0);
}

TEST_CASE("program IR survives a json round trip") {
  for (const auto& name : scenario_names()) {
    DYNAMIC_SECTION(name) {
      auto catalog = scenario_by_name(name);
      FrequencyRecorder rec;
      Rng rng(13);
      for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto out = build_program(catalog, rec, rng, seed);
        auto j = program_to_json(out.program);
        auto back = program_from_json(j);
        REQUIRE(program_equal(back, out.program, 0.0));
        // canonical dumps agree byte-for-byte as well
        REQUIRE(canonical_dump(program_to_json(back)) == canonical_dump(j));
      }
    }
  }
}

TEST_CASE("a well-formed linear program parses to its five calls") {
  const std::string src =
      "x0 = tensor([2, 2], [1.0, 2.0, 3.0, 4.0])\n"
      "r1 = reshape(t=x0, shape0=4)\n"
      "r2 = linear(t=r1, out_features=3)\n"
      "r3 = transpose(t=r2, d0=0, d1=1)\n"
      "r4 = unsqueeze(t=r3, dim=0)\n"
      "r5 = cat(t1=r4, t2=r4)\n"
      "RESULT = [r5]\n";
  auto p = parse_candidate(src);
  REQUIRE(p.stmts.size() == 7);
  REQUIRE(p.init_block().size() == 1);
  REQUIRE_FALSE(p.has_split());
  auto paths = program_paths(p);
  REQUIRE(paths.size() == 1);
  REQUIRE(paths[0].calls.size() == 5);
  REQUIRE(paths[0].result_names == std::vector<std::string>{"r5"});
}

TEST_CASE("parse errors carry line and column") {
  SECTION("unbalanced brace") {
    const std::string src =
        "cond0 = 1\n"
        "if cond0 == 1 {\n"
        "  r1 = get_session(id=h0)\n"
        "RESULT = [r1]\n";  // never closes the if
    try {
      parse_candidate(src);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.line >= 4);
      REQUIRE(std::string(e.what()).find("line") != std::string::npos);
    }
  }
  SECTION("unexpected character") {
    try {
      parse_candidate("r1 = reshape(t=x0; shape0=4)\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.line == 1);
      REQUIRE(e.col > 1);
    }
  }
  SECTION("unterminated string") {
    REQUIRE_THROWS_AS(parse_candidate("x = \"oops\n"), ParseError);
  }
  SECTION("reserved words cannot name variables") {
    REQUIRE_THROWS_AS(parse_candidate("tensor = search_voices(query=\"calm\")\n"), ParseError);
    REQUIRE_THROWS_AS(parse_candidate("dim = 1\n"), ParseError);
  }
  SECTION("RESULT entries must be names") {
    REQUIRE_THROWS_AS(parse_candidate("RESULT = [1]\n"), ParseError);
  }
}

TEST_CASE("structural rules: one split, no nesting") {
  const std::string two_splits =
      "c = 1\n"
      "if c == 1 {\nRESULT = []\n} else {\nRESULT = []\n}\n"
      "if c == 1 {\nRESULT = []\n} else {\nRESULT = []\n}\n";
  REQUIRE_THROWS_AS(parse_candidate(two_splits), ParseError);

  const std::string nested =
      "c = 1\n"
      "if c == 1 {\n"
      "  if c == 1 {\nRESULT = []\n} else {\nRESULT = []\n}\n"
      "} else {\nRESULT = []\n}\n";
  REQUIRE_THROWS_AS(parse_candidate(nested), ParseError);

  const std::string one_split =
      "c = 1\n"
      "if c == 1 {\nRESULT = []\n} else {\nRESULT = []\n}\n";
  auto p = parse_candidate(one_split);
  REQUIRE(p.has_split());
  REQUIRE(p.split()->cond.lhs == "c");
  REQUIRE(p.split()->cond.dim == -1);
}

TEST_CASE("dim conditions parse both ways") {
  const std::string src =
      "cond0 = 2\n"
      "t0 = tensor([2, 3], [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])\n"
      "if dim(t0, 0) == cond0 {\nRESULT = []\n} else {\nRESULT = []\n}\n";
  auto p = parse_candidate(src);
  const auto* f = p.split();
  REQUIRE(f != nullptr);
  REQUIRE(f->cond.lhs == "t0");
  REQUIRE(f->cond.dim == 0);
  REQUIRE(f->cond.rhs.is_ref());
  REQUIRE(f->cond.rhs.ref() == "cond0");
  REQUIRE(render_source(parse_candidate(render_source(p))) == render_source(p));
}

TEST_CASE("every literal kind survives the DSL round trip") {
  Program p;
  p.stmts.push_back(DeclStmt{"a", Value(std::int64_t{-42})});
  p.stmts.push_back(DeclStmt{"b", Value(2.0)});
  p.stmts.push_back(DeclStmt{"c", Value(-0.5)});
  p.stmts.push_back(DeclStmt{"d", Value(1e-7)});
  p.stmts.push_back(DeclStmt{"e", Value("tab\t\"quoted\"\nline")});
  p.stmts.push_back(DeclStmt{"f", Value(true)});
  p.stmts.push_back(DeclStmt{"g", Value(false)});
  p.stmts.push_back(DeclStmt{"h", Value(Tensor{{2, 2}, {1.0, -2.5, 0.25, 3.0}})});
  p.stmts.push_back(DeclStmt{"i", Value(Tensor{{0}, {}})});
  p.stmts.push_back(DeclStmt{"j", Value(Handle{"audio:tts", 3})});
  p.stmts.push_back(DeclStmt{"k", Value(Record{{"key", Value(std::int64_t{1})},
                                               {"nested", Value(List{Value("x"), Value(2.5)})}})});
  p.stmts.push_back(DeclStmt{"l", Value(List{})});
  p.stmts.push_back(ResultStmt{});

  auto src = render_source(p);
  auto back = parse_candidate(src);
  REQUIRE(program_equal(back, p, 0.0));
  REQUIRE(render_source(back) == src);
}

TEST_CASE("comments and loose whitespace are tolerated") {
  const std::string src =
      "# seeded constants\n"
      "x0   =  7\n"
      "\n"
      "r1 = get_session( id = x0 )  # lookup\n"
      "RESULT=[ r1 ]\n";
  auto p = parse_candidate(src);
  REQUIRE(p.stmts.size() == 3);
  auto paths = program_paths(p);
  REQUIRE(paths[0].calls.size() == 1);
  REQUIRE(paths[0].calls[0]->api == "get_session");
  REQUIRE(paths[0].result_names == std::vector<std::string>{"r1"});
}

TEST_CASE("code fences are stripped before parsing") {
  REQUIRE(strip_code_fence("```\nx = 1\n```") == "x = 1\n");
  REQUIRE(strip_code_fence("```python\nx = 1\n```\n") == "x = 1\n");
  REQUIRE(strip_code_fence("x = 1\n") == "x = 1\n");
  REQUIRE(strip_code_fence("``` unclosed\nx = 1\n") == "``` unclosed\nx = 1\n");
  const std::string wrapped = "Here you go:\n```\nr1 = play_audio(audio=a0)\nRESULT = [r1]\n```";
  auto p = parse_candidate(strip_code_fence(wrapped));
  REQUIRE(program_paths(p)[0].calls.size() == 1);
}
