#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "naive_tensor.hpp"
#include "seqgen/scenarios.hpp"

using namespace seqgen;

namespace {

// Applies one candidate on the generation schema and mirrors it on a backend,
// returning both produced values (schema var value, backend return).
std::pair<Value, Value> mirror_step(StateSchema& schema, MockBackend& backend,
                                    const Candidate& cand, int step, std::uint64_t seed) {
  std::vector<NamedValue> args;
  for (const auto& a : cand.bindings) {
    args.push_back({a.param, a.is_ref() ? schema.at(a.ref()).value : a.literal()});
  }
  auto produced = apply_transition(schema, *cand.transition, cand.bindings,
                                   EffectContext{step, seed});
  Value backend_value = backend.call(cand.transition->name, args);
  Value schema_value = produced.produced.empty() ? Value() : schema.at(produced.produced[0]).value;
  return {schema_value, backend_value};
}

}  // namespace

// ---------------------------------------------------------------------------
// Session scenario.
// ---------------------------------------------------------------------------

TEST_CASE("session: create then get returns the created row") {
  auto cat = scenario_by_name("session");
  auto backend = cat.make_backend(99);

  Record payload{{"name", Value("alpha")}};
  auto h = backend->call("create_session", {{"source", Value("cbioportal")},
                                            {"type", Value("main")},
                                            {"payload", Value(payload)}});
  REQUIRE(h.is_handle());
  auto row = backend->call("get_session", {{"id", h}});
  REQUIRE(row.is_record());
  const auto& rec = row.as_record();
  REQUIRE(rec.at("source").as_text() == "cbioportal");
  REQUIRE(rec.at("type").as_text() == "main");
  REQUIRE(rec.at("version").as_int() == 1);
  REQUIRE(approx_equal(rec.at("payload"), Value(payload)));
  REQUIRE(rec.at("id").as_handle() == h.as_handle());
}

TEST_CASE("session: create, delete, then list excludes the deleted item") {
  auto cat = scenario_by_name("session");
  // Find a seed with zero pre-existing sessions so counts are exact.
  std::uint64_t seed = 0;
  while (!session_scenario::seed_rows(seed).empty()) ++seed;
  auto backend = cat.make_backend(seed);

  auto mk = [&](const char* src, const char* ty) {
    return backend->call("create_session", {{"source", Value(src)},
                                            {"type", Value(ty)},
                                            {"payload", Value(Record{{"k", Value(1)}})}});
  };
  auto a = mk("genie", "main");
  auto b = mk("genie", "main");
  backend->call("delete_session", {{"id", a}});

  auto lst = backend->call("list_sessions", {{"source", Value("genie")}, {"type", Value("main")}});
  REQUIRE(lst.is_list());
  REQUIRE(lst.as_list().size() == 1);
  REQUIRE(lst.as_list()[0].as_handle() == b.as_handle());

  REQUIRE_THROWS_AS(backend->call("get_session", {{"id", a}}), BackendError);
  REQUIRE_THROWS_AS(backend->call("update_session",
                                  {{"id", a}, {"payload", Value(Record{{"k", Value(2)}})}}),
                    BackendError);
}

TEST_CASE("session: update bumps version and replaces payload in the dump") {
  auto cat = scenario_by_name("session");
  std::uint64_t seed = 0;
  while (!session_scenario::seed_rows(seed).empty()) ++seed;
  auto backend = cat.make_backend(seed);

  auto a = backend->call("create_session", {{"source", Value("cbioportal")},
                                            {"type", Value("settings")},
                                            {"payload", Value(Record{{"v", Value(1)}})}});
  backend->call("create_session", {{"source", Value("cbioportal")},
                                   {"type", Value("settings")},
                                   {"payload", Value(Record{{"v", Value(2)}})}});
  Record newp{{"v", Value(99)}};
  auto new_version = backend->call("update_session", {{"id", a}, {"payload", Value(newp)}});
  REQUIRE(new_version.as_int() == 2);

  auto dump = backend->dump();
  REQUIRE(dump.at("sessions").size() == 2);
  auto first = value_from_json(dump.at("sessions")[0]);
  REQUIRE(approx_equal(first.as_record().at("payload"), Value(newp)));
  REQUIRE(first.as_record().at("version").as_int() == 2);
}

TEST_CASE("session: initializer mirrors the backend's seeded rows") {
  auto cat = scenario_by_name("session");
  for (std::uint64_t seed : {11u, 23u, 37u, 41u, 53u}) {
    Rng rng(seed);
    auto init = cat.initialize(rng, seed);
    auto backend = cat.make_backend(seed);
    // Same partitions in the same creation order on both sides.
    REQUIRE(init.schema.creation_log() == backend->creation_log());
    // Schema rows equal backend rows.
    auto rows = session_scenario::seed_rows(seed);
    REQUIRE(init.schema.remote_count() == rows.size());
    auto dump = backend->dump();
    REQUIRE(dump.at("sessions").size() == rows.size());
  }
}

TEST_CASE("session: empty store excludes get/update/delete from the candidate set") {
  auto cat = scenario_by_name("session");
  std::uint64_t seed = 0;
  while (!session_scenario::seed_rows(seed).empty()) ++seed;
  Rng rng(7);
  auto init = cat.initialize(rng, seed);
  Trace trace(init.schema);

  auto cands = valid_transitions(init.schema, trace, cat);
  std::set<std::string> apis;
  for (const auto& c : cands) apis.insert(c.transition->name);
  REQUIRE(apis.count("create_session") == 1);
  REQUIRE(apis.count("list_sessions") == 1);
  REQUIRE(apis.count("get_session") == 0);
  REQUIRE(apis.count("update_session") == 0);
  REQUIRE(apis.count("delete_session") == 0);
}

TEST_CASE("session: deletion kills the handle var and its row mirror") {
  auto cat = scenario_by_name("session");
  std::uint64_t seed = 0;
  while (session_scenario::seed_rows(seed).size() != 1) ++seed;
  Rng rng(5);
  auto init = cat.initialize(rng, seed);
  auto schema = init.schema;
  auto remote_before = schema.remote_count();

  const auto* sid = schema.find_by_name("sid0");
  REQUIRE(sid != nullptr);
  const VarId sid_id = sid->id;  // apply() may grow the var table; pointer goes stale
  const auto* del = cat.find("delete_session");
  REQUIRE(del != nullptr);
  apply_transition(schema, *del, {{"id", sid_id}}, EffectContext{1, seed});

  REQUIRE_FALSE(schema.at(sid_id).live);
  REQUIRE(schema.remote_count() == remote_before - 1);
  // No session candidates remain for get/update/delete.
  REQUIRE(session_scenario::live_session_vars(schema).empty());
}

// ---------------------------------------------------------------------------
// Tensor scenario.
// ---------------------------------------------------------------------------

TEST_CASE("tensor: reshape enumeration matches element count, never identity") {
  Tensor t{{2, 6}, std::vector<double>(12, 0.0)};
  auto targets = tensor_scenario::reshape_targets(t);
  auto has = [&](std::vector<std::int64_t> s) {
    return std::find(targets.begin(), targets.end(), s) != targets.end();
  };
  REQUIRE(has({4, 3}));
  REQUIRE_FALSE(has({12}));  // per-dim cap is 8, so the rank-1 reshape is out
  REQUIRE(has({3, 4}));
  REQUIRE_FALSE(has({5, 3}));  // wrong element count
  REQUIRE_FALSE(has({2, 6}));  // identity excluded
  for (const auto& s : targets) {
    std::int64_t n = 1;
    for (auto d : s) {
      REQUIRE(d >= 1);
      REQUIRE(d <= 8);
      n *= d;
    }
    REQUIRE(n == 12);
    REQUIRE(s.size() <= 4);
  }
}

TEST_CASE("tensor: conv2d shape arithmetic") {
  Tensor x{{2, 3, 8, 8}, std::vector<double>(2 * 3 * 8 * 8, 0.5)};
  auto y = tensor_math::conv2d(x, 4, 3, 1, 0, 7);
  REQUIRE(y.shape == std::vector<std::int64_t>{2, 4, 6, 6});
  REQUIRE(tensor_math::conv_out_dim(8, 3, 1, 0) == 6);
  REQUIRE(tensor_math::conv_out_dim(8, 3, 2, 1) == 4);
}

TEST_CASE("tensor: shape errors raise ShapeMismatch") {
  Tensor x{{2, 6}, std::vector<double>(12, 1.0)};
  REQUIRE_THROWS_WITH(tensor_math::reshape(x, {5, 3}),
                      Catch::Matchers::StartsWith("ShapeMismatch"));
  REQUIRE_THROWS_WITH(tensor_math::conv2d(x, 2, 3, 1, 0, 1),
                      Catch::Matchers::StartsWith("ShapeMismatch"));  // not 4-D
  Tensor a{{2, 3}, std::vector<double>(6, 0.0)};
  Tensor b{{3, 3}, std::vector<double>(9, 0.0)};
  REQUIRE_THROWS_WITH(tensor_math::cat(a, b, 1), Catch::Matchers::StartsWith("ShapeMismatch"));
  REQUIRE_NOTHROW(tensor_math::cat(a, b, 0));
  Tensor small{{1, 1, 2, 2}, std::vector<double>(4, 0.0)};
  REQUIRE_THROWS_WITH(tensor_math::conv2d(small, 1, 3, 1, 0, 1),
                      Catch::Matchers::StartsWith("ShapeMismatch"));  // kernel larger than input
}

TEST_CASE("tensor: linear matches the independent naive oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor x;
    auto rank = rng.uniform_int(1, 3);
    for (int d = 0; d < rank; ++d) x.shape.push_back(rng.uniform_int(1, 5));
    x.data.resize(static_cast<std::size_t>(x.numel()));
    for (auto& v : x.data) v = rng.uniform_real(-2.0, 2.0);
    auto out_features = rng.uniform_int(1, 8);
    auto seed = rng.next_u64();

    auto got = tensor_math::linear(x, out_features, seed);
    auto want = naive::linear(x, out_features, seed);
    REQUIRE(got.shape == want.shape);
    for (std::size_t i = 0; i < want.data.size(); ++i)
      REQUIRE_THAT(got.data[i], Catch::Matchers::WithinAbs(want.data[i], 1e-6));
  }
}

TEST_CASE("tensor: conv2d matches the independent naive oracle") {
  Rng rng(4048);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor x;
    x.shape = {rng.uniform_int(1, 2), rng.uniform_int(1, 3), rng.uniform_int(3, 6),
               rng.uniform_int(3, 6)};
    x.data.resize(static_cast<std::size_t>(x.numel()));
    for (auto& v : x.data) v = rng.uniform_real(-2.0, 2.0);
    auto oc = rng.uniform_int(1, 4);
    auto k = rng.coin() ? 3 : 1;
    auto s = rng.coin() ? 2 : 1;
    auto p = rng.coin() ? 1 : 0;
    auto seed = rng.next_u64();

    auto got = tensor_math::conv2d(x, oc, k, s, p, seed);
    auto want = naive::conv2d(x, oc, k, s, p, seed);
    REQUIRE(got.shape == want.shape);
    for (std::size_t i = 0; i < want.data.size(); ++i)
      REQUIRE_THAT(got.data[i], Catch::Matchers::WithinAbs(want.data[i], 1e-6));
  }
}

TEST_CASE("tensor: transpose and cat match the coordinate-space oracle") {
  Rng rng(515);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor x;
    auto rank = rng.uniform_int(2, 4);
    for (int d = 0; d < rank; ++d) x.shape.push_back(rng.uniform_int(1, 4));
    x.data.resize(static_cast<std::size_t>(x.numel()));
    for (auto& v : x.data) v = rng.uniform_real(-1.0, 1.0);

    auto d0 = rng.uniform_int(0, rank - 1);
    auto d1 = rng.uniform_int(0, rank - 1);
    if (d0 == d1) continue;
    if (d0 > d1) std::swap(d0, d1);
    auto got = tensor_math::transpose(x, d0, d1);
    auto want = naive::transpose(x, d0, d1);
    REQUIRE(got.shape == want.shape);
    REQUIRE(got.data == want.data);

    auto dim = rng.uniform_int(0, rank - 1);
    auto got_cat = tensor_math::cat(x, x, dim);
    auto want_cat = naive::cat(x, x, dim);
    REQUIRE(got_cat.shape == want_cat.shape);
    REQUIRE(got_cat.data == want_cat.data);
  }
}

TEST_CASE("tensor: unsqueeze inserts a size-1 dim preserving data") {
  Tensor x{{2, 3}, {1, 2, 3, 4, 5, 6}};
  auto y = tensor_math::unsqueeze(x, 1);
  REQUIRE(y.shape == std::vector<std::int64_t>{2, 1, 3});
  REQUIRE(y.data == x.data);
  auto z = tensor_math::unsqueeze(x, 2);
  REQUIRE(z.shape == std::vector<std::int64_t>{2, 3, 1});
}

TEST_CASE("tensor: weights depend on seed and layer key") {
  Tensor x{{2, 3}, {1, 2, 3, 4, 5, 6}};
  auto a = tensor_math::linear(x, 4, 1);
  auto b = tensor_math::linear(x, 4, 1);
  auto c = tensor_math::linear(x, 4, 2);
  REQUIRE(a.data == b.data);  // same seed: identical weights
  REQUIRE(a.data != c.data);  // different seed: different weights
}

// ---------------------------------------------------------------------------
// MCP scenario.
// ---------------------------------------------------------------------------

TEST_CASE("mcp: search matches substrings over the fixed registry") {
  auto cat = scenario_by_name("mcp");
  auto backend = cat.make_backend(1);

  auto calm = backend->call("search_voices", {{"query", Value("calm")}});
  REQUIRE(calm.as_list().size() == 2);  // Aria and Dana
  REQUIRE(calm.as_list()[0].as_handle() == Handle{"voice", 0});
  REQUIRE(calm.as_list()[1].as_handle() == Handle{"voice", 3});

  auto male = backend->call("search_voices", {{"query", Value("male")}});
  REQUIRE(male.as_list().size() == 2);  // Brian and Callum tags; "female" absent

  auto by_name = backend->call("search_voices", {{"query", Value("brian")}});
  REQUIRE(by_name.as_list().size() == 1);  // case-insensitive name match
  REQUIRE(by_name.as_list()[0].as_handle() == Handle{"voice", 1});
}

TEST_CASE("mcp: speech_to_text recovers text_to_speech input") {
  auto cat = scenario_by_name("mcp");
  auto backend = cat.make_backend(1);
  auto audio = backend->call("text_to_speech", {{"text", Value("hello world")},
                                                {"voice", Value(Handle{"voice", 2})},
                                                {"stability", Value(0.5)},
                                                {"speed", Value(1.0)}});
  REQUIRE(audio.is_handle());
  REQUIRE(audio.as_handle().kind == "audio:tts");
  auto text = backend->call("speech_to_text", {{"audio", audio}});
  REQUIRE(text.as_text() == "hello world");
}

TEST_CASE("mcp: outbound call logs the designated voice and mints a recording") {
  auto cat = scenario_by_name("mcp");
  auto backend = cat.make_backend(1);
  auto call = backend->call("make_outbound_call", {{"phone", Value("+15550100")},
                                                   {"voice", Value(Handle{"voice", 4})},
                                                   {"text", Value("pick up")}});
  const auto& rec = call.as_record();
  REQUIRE(rec.at("voice").as_handle() == Handle{"voice", 4});
  REQUIRE(rec.at("id").as_handle().kind == "call");
  REQUIRE(rec.at("recording").as_handle().kind == "audio:call");

  auto dump = backend->dump();
  REQUIRE(dump.at("calls").size() == 1);
  auto logged = value_from_json(dump.at("calls")[0]);
  REQUIRE(logged.as_record().at("voice").as_handle() == Handle{"voice", 4});

  // The recording is transcribable like any other audio object.
  auto text = backend->call("speech_to_text", {{"audio", rec.at("recording")}});
  REQUIRE(text.as_text() == "pick up");
}

TEST_CASE("mcp: unknown handles raise the scenario's error classes") {
  auto cat = scenario_by_name("mcp");
  auto backend = cat.make_backend(1);
  REQUIRE_THROWS_WITH(backend->call("play_audio", {{"audio", Value(Handle{"audio:tts", 9})}}),
                      Catch::Matchers::StartsWith("AudioNotFound"));
  REQUIRE_THROWS_WITH(backend->call("speech_to_text", {{"audio", Value(Handle{"audio:tts", 9})}}),
                      Catch::Matchers::StartsWith("AudioNotFound"));
  REQUIRE_THROWS_WITH(backend->call("text_to_speech", {{"text", Value("x")},
                                                       {"voice", Value(Handle{"voice", 77})},
                                                       {"stability", Value(0.5)},
                                                       {"speed", Value(1.0)}}),
                      Catch::Matchers::StartsWith("VoiceNotFound"));
  REQUIRE_THROWS_WITH(backend->call("make_outbound_call", {{"phone", Value("+15550100")},
                                                           {"voice", Value("not a handle")},
                                                           {"text", Value("x")}}),
                      Catch::Matchers::StartsWith("VoiceNotFound"));
}

TEST_CASE("mcp: play_audio appends to the playback log") {
  auto cat = scenario_by_name("mcp");
  auto backend = cat.make_backend(1);
  auto audio = backend->call("text_to_sound_effects", {{"text", Value("rain")},
                                                       {"duration", Value(2)}});
  auto ev = backend->call("play_audio", {{"audio", audio}});
  REQUIRE(ev.as_record().at("played").as_handle() == audio.as_handle());
  backend->call("play_audio", {{"audio", audio}});
  REQUIRE(backend->dump().at("plays").size() == 2);
}

TEST_CASE("mcp: initializer mints the full registry on both sides") {
  auto cat = scenario_by_name("mcp");
  Rng rng(31);
  auto init = cat.initialize(rng, 31);
  auto backend = cat.make_backend(31);
  REQUIRE(init.schema.creation_log().size() == 5);
  REQUIRE(init.schema.creation_log() == backend->creation_log());
  // 1..3 texts and 1..2 voice vars, all init-role locals.
  int texts = 0, voices = 0;
  for (const auto* v : init.schema.live_locals()) {
    REQUIRE(v->producer.is_init());
    if (v->value.is_text()) ++texts;
    if (v->value.is_handle()) ++voices;
  }
  REQUIRE((texts >= 1 && texts <= 3));
  REQUIRE((voices >= 1 && voices <= 2));
}

// ---------------------------------------------------------------------------
// Cross-scenario properties.
// ---------------------------------------------------------------------------

TEST_CASE("transition names are unique and documented") {
  for (const auto& name : scenario_names()) {
    auto cat = scenario_by_name(name);
    std::set<std::string> names;
    for (const auto& t : cat.transitions) {
      REQUIRE(names.insert(t.name).second);
      REQUIRE_FALSE(t.doc.empty());
      REQUIRE_FALSE(t.params.empty());
    }
  }
  REQUIRE(scenario_by_name("session").size() == 5);
  REQUIRE(scenario_by_name("tensor").size() == 6);
  REQUIRE(scenario_by_name("mcp").size() == 6);
  REQUIRE_THROWS_AS(scenario_by_name("nope"), CorpusError);
}

TEST_CASE("applicability implies execution success: 10k fuzzed steps per scenario") {
  for (const auto& name : scenario_names()) {
    Rng rng(derive_seed(777, name.size()));
    int steps_done = 0;
    int episode = 0;
    while (steps_done < 10000) {
      auto cat = scenario_by_name(name);
      auto seed = derive_seed(1234, episode++);
      Rng init_rng(seed);
      auto init = cat.initialize(init_rng, seed);
      auto backend = cat.make_backend(seed);
      auto schema = init.schema;
      Trace trace(schema);

      for (int k = 1; k <= 8 && steps_done < 10000; ++k) {
        auto cands = valid_transitions(schema, trace, cat);
        REQUIRE_FALSE(cands.empty());
        const auto& cand = cands[rng.uniform_index(cands.size())];

        std::pair<Value, Value> got;
        REQUIRE_NOTHROW((got = mirror_step(schema, *backend, cand, k, seed)));
        // Generation-side value and backend value agree (same allocator
        // discipline on both sides makes even handles exactly equal here).
        REQUIRE(approx_equal(got.first, got.second));

        TraceStep s;
        s.index = k;
        s.transition = cand.transition->name;
        s.bindings = cand.bindings;
        s.fingerprint = param_fingerprint(cand.bindings);
        trace.push(std::move(s));
        ++steps_done;
      }
    }
  }
}
