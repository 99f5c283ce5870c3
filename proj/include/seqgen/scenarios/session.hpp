#pragma once

#include <memory>
#include <string>
#include <vector>

#include "seqgen/scenario.hpp"

namespace seqgen {
namespace session_scenario {

inline const std::vector<std::string>& sources() {
  static const std::vector<std::string> v = {"cbioportal", "genie"};
  return v;
}

inline const std::vector<std::string>& types() {
  static const std::vector<std::string> v = {"main", "virtual_study", "settings"};
  return v;
}

inline std::string handle_kind(const std::string& source, const std::string& type) {
  return "session:" + source + ":" + type;
}

// (source, type) pairs the generator actually emits; the backend accepts the
// full cross product.
inline const std::vector<std::pair<std::string, std::string>>& combo_pool() {
  static const std::vector<std::pair<std::string, std::string>> v = {
      {"cbioportal", "main"}, {"genie", "virtual_study"}, {"cbioportal", "settings"}};
  return v;
}

inline std::string handle_repr(const Handle& h) {
  return h.kind + "#" + std::to_string(h.serial);
}

// Small varied payload records; shared by initializer payload vars and
// seed-row payloads.
inline Value make_payload(Rng& rng) {
  static const std::vector<std::string> names = {"alpha", "beta", "gamma", "delta"};
  static const std::vector<std::string> notes = {"draft", "review", "final", "archived"};
  static const std::vector<std::string> owners = {"amy", "raj", "kim"};
  static const std::vector<std::string> tags = {"tumor", "clinical", "panel", "wgs"};

  Record rec;
  rec["name"] = Value(names[rng.uniform_index(names.size())]);
  if (rng.coin()) rec["note"] = Value(notes[rng.uniform_index(notes.size())]);
  if (rng.coin()) rec["count"] = Value(rng.uniform_int(0, 99));
  if (rng.coin()) {
    List l;
    l.push_back(Value(tags[rng.uniform_index(tags.size())]));
    if (rng.coin()) l.push_back(Value(tags[rng.uniform_index(tags.size())]));
    rec["tags"] = Value(std::move(l));
  }
  return Value(std::move(rec));
}

// Sessions that exist before the program runs. Derived from the run seed
// alone (not the shared rng stream) so the backend can mint the identical
// rows independently.
struct SeedRow {
  std::string source;
  std::string type;
  Value payload;
};

inline std::vector<SeedRow> seed_rows(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x5e551011u));
  const auto n = rng.uniform_int(0, 3);
  std::vector<SeedRow> rows;
  for (std::int64_t i = 0; i < n; ++i) {
    SeedRow r;
    r.source = sources()[rng.uniform_index(sources().size())];
    r.type = types()[rng.uniform_index(types().size())];
    r.payload = make_payload(rng);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Value make_row(const Handle& h, const std::string& source, const std::string& type,
                      const Value& payload, std::int64_t version) {
  Record rec;
  rec["id"] = Value(h);
  rec["source"] = Value(source);
  rec["type"] = Value(type);
  rec["payload"] = payload;
  rec["version"] = Value(version);
  return Value(std::move(rec));
}

inline bool is_session_handle(const Value& v) {
  return v.is_handle() && v.as_handle().kind.rfind("session:", 0) == 0;
}

// The schema's Remote mirror row for a session handle, or nullptr if deleted.
inline const StateVar* find_row(const StateSchema& schema, const Handle& h) {
  for (const auto& v : schema.vars()) {
    if (!v.live || v.role != VarRole::Remote || !v.value.is_record()) continue;
    const auto& rec = v.value.as_record();
    auto it = rec.find("id");
    if (it != rec.end() && it->second.is_handle() && it->second.as_handle() == h) return &v;
  }
  return nullptr;
}

// Live local handle vars whose session row still exists.
inline std::vector<const StateVar*> live_session_vars(const StateSchema& schema) {
  std::vector<const StateVar*> out;
  for (const auto* v : schema.live_locals()) {
    if (is_session_handle(v->value) && find_row(schema, v->value.as_handle())) out.push_back(v);
  }
  return out;
}

inline std::vector<const StateVar*> live_record_vars(const StateSchema& schema) {
  std::vector<const StateVar*> out;
  for (const auto* v : schema.live_locals())
    if (v->value.is_record()) out.push_back(v);
  return out;
}

inline ScenarioCatalog build() {
  ScenarioCatalog cat;
  cat.name = "session";

  // ---- create_session ----
  {
    TransitionSpec t;
    t.name = "create_session";
    t.params = {{"source", ParamKind::Literal},
                {"type", ParamKind::Literal},
                {"payload", ParamKind::StateRef}};
    t.doc =
        "create_session(source, type, payload) stores a new session and returns its handle. "
        "source is one of \"cbioportal\" or \"genie\"; type is one of \"main\", "
        "\"virtual_study\" or \"settings\"; payload is any record variable. The stored row is "
        "{id, source, type, payload, version: 1}.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* p : live_record_vars(schema))
        for (const auto& [s, ty] : combo_pool())
          out.push_back({{"source", Value(s)}, {"type", Value(ty)}, {"payload", p->id}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& source = b[0].literal().as_text();
      const auto& type = b[1].literal().as_text();
      const auto& payload = schema.at(b[2].ref()).value;
      auto h = schema.alloc_handle(handle_kind(source, type));
      auto row = make_row(h, source, type, payload, 1);
      auto sid = schema.add("sid" + std::to_string(schema.next_id()), Value(h), Origin{ctx.step},
                            VarRole::Local, "create_session");
      schema.add("_row" + std::to_string(schema.next_id()), std::move(row), Origin{ctx.step},
                 VarRole::Remote, "create_session");
      return EffectResult{{sid}};
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- list_sessions ----
  {
    TransitionSpec t;
    t.name = "list_sessions";
    t.params = {{"source", ParamKind::Literal}, {"type", ParamKind::Literal}};
    t.doc =
        "list_sessions(source, type) returns the handles of all stored sessions matching both "
        "fields, oldest first.";
    t.enumerate = [](const StateSchema&, const Trace&) {
      std::vector<Bindings> out;
      for (const auto& [s, ty] : combo_pool())
        out.push_back({{"source", Value(s)}, {"type", Value(ty)}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& source = b[0].literal().as_text();
      const auto& type = b[1].literal().as_text();
      List hits;
      for (const auto& v : schema.vars()) {
        if (!v.live || v.role != VarRole::Remote || !v.value.is_record()) continue;
        const auto& rec = v.value.as_record();
        if (rec.at("source").as_text() == source && rec.at("type").as_text() == type)
          hits.push_back(rec.at("id"));
      }
      auto id = schema.add("lst" + std::to_string(schema.next_id()), Value(std::move(hits)),
                           Origin{ctx.step}, VarRole::Local, "list_sessions");
      return EffectResult{{id}};
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- get_session ----
  {
    TransitionSpec t;
    t.name = "get_session";
    t.params = {{"id", ParamKind::StateRef}};
    t.doc =
        "get_session(id) returns the stored row {id, source, type, payload, version} for a live "
        "session handle. Raises NotFound if the session was deleted or never existed.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* v : live_session_vars(schema)) out.push_back({{"id", v->id}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& h = schema.at(b[0].ref()).value.as_handle();
      const auto* row = find_row(schema, h);
      if (!row) throw BackendError("NotFound: no live session for handle " + handle_repr(h));
      auto id = schema.add("rec" + std::to_string(schema.next_id()), row->value, Origin{ctx.step},
                           VarRole::Local, "get_session");
      return EffectResult{{id}};
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- update_session ----
  {
    TransitionSpec t;
    t.name = "update_session";
    t.params = {{"id", ParamKind::StateRef}, {"payload", ParamKind::StateRef}};
    t.doc =
        "update_session(id, payload) replaces a live session's payload, increments its version, "
        "and returns the new version number. Raises NotFound if the session was deleted or "
        "never existed.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* v : live_session_vars(schema))
        for (const auto* p : live_record_vars(schema))
          out.push_back({{"id", v->id}, {"payload", p->id}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      auto& sid_var = schema.at(b[0].ref());
      const auto& h = sid_var.value.as_handle();
      const auto& payload = schema.at(b[1].ref()).value;
      const auto* row = find_row(schema, h);
      if (!row) throw BackendError("NotFound: no live session for handle " + handle_repr(h));
      auto& row_var = schema.at(row->id);
      auto rec = row_var.value.as_record();
      rec["payload"] = payload;
      const auto new_version = rec["version"].as_int() + 1;
      rec["version"] = Value(new_version);
      row_var.value = Value(std::move(rec));
      row_var.last_writer = "update_session";
      // The handle names the stored object, so the update also rewrites the
      // handle var's provenance for data-dependency pairing.
      sid_var.last_writer = "update_session";
      auto id = schema.add("ver" + std::to_string(schema.next_id()), Value(new_version),
                           Origin{ctx.step}, VarRole::Local, "update_session");
      return EffectResult{{id}};
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- delete_session ----
  {
    TransitionSpec t;
    t.name = "delete_session";
    t.params = {{"id", ParamKind::StateRef}};
    t.doc =
        "delete_session(id) removes a live session and returns true. The handle becomes dead: "
        "any later get/update/delete on it raises NotFound.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* v : live_session_vars(schema)) out.push_back({{"id", v->id}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& h = schema.at(b[0].ref()).value.as_handle();
      const auto* row = find_row(schema, h);
      if (!row) throw BackendError("NotFound: no live session for handle " + handle_repr(h));
      schema.kill(row->id);
      schema.kill(b[0].ref());
      auto id = schema.add("ok" + std::to_string(schema.next_id()), Value(true), Origin{ctx.step},
                           VarRole::Local, "delete_session");
      return EffectResult{{id}};
    };
    cat.transitions.push_back(std::move(t));
  }

  cat.initialize = [](Rng& rng, std::uint64_t seed) {
    InitState init;
    // Pre-existing sessions mirror into the schema as a handle var plus a
    // Remote row; their decls render as handle literals.
    auto rows = seed_rows(seed);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto h = init.schema.alloc_handle(handle_kind(rows[i].source, rows[i].type));
      init.schema.add("sid" + std::to_string(i), Value(h), Origin{0});
      init.schema.add("_row" + std::to_string(i),
                      make_row(h, rows[i].source, rows[i].type, rows[i].payload, 1), Origin{0},
                      VarRole::Remote);
    }
    const auto npayload = rng.uniform_int(1, 3);
    for (std::int64_t i = 0; i < npayload; ++i)
      init.schema.add("payload" + std::to_string(i), make_payload(rng), Origin{0});
    return init;
  };

  cat.make_backend = [](std::uint64_t seed) -> std::unique_ptr<MockBackend> {
    class Backend : public MockBackend {
     public:
      explicit Backend(std::uint64_t seed) {
        for (const auto& r : seed_rows(seed)) {
          auto h = mint_.mint(handle_kind(r.source, r.type));
          rows_.push_back({h, make_row(h, r.source, r.type, r.payload, 1), true});
        }
      }

      Value call(const std::string& api, const std::vector<NamedValue>& args) override {
        if (api == "create_session") {
          const auto& source = text_arg(args, "source");
          const auto& type = text_arg(args, "type");
          const auto& payload = req(args, "payload");
          if (!payload.is_record())
            throw BackendError("TypeError: parameter 'payload' must be a record");
          auto h = mint_.mint(handle_kind(source, type));
          rows_.push_back({h, make_row(h, source, type, payload, 1), true});
          return Value(h);
        }
        if (api == "list_sessions") {
          const auto& source = text_arg(args, "source");
          const auto& type = text_arg(args, "type");
          List hits;
          for (const auto& r : rows_) {
            if (!r.live) continue;
            const auto& rec = r.row.as_record();
            if (rec.at("source").as_text() == source && rec.at("type").as_text() == type)
              hits.push_back(rec.at("id"));
          }
          return Value(std::move(hits));
        }
        if (api == "get_session") return slot(handle_arg(args, "id")).row;
        if (api == "update_session") {
          auto& r = slot(handle_arg(args, "id"));
          const auto& payload = req(args, "payload");
          if (!payload.is_record())
            throw BackendError("TypeError: parameter 'payload' must be a record");
          auto rec = r.row.as_record();
          rec["payload"] = payload;
          const auto new_version = rec["version"].as_int() + 1;
          rec["version"] = Value(new_version);
          r.row = Value(std::move(rec));
          return Value(new_version);
        }
        if (api == "delete_session") {
          slot(handle_arg(args, "id")).live = false;
          return Value(true);
        }
        throw BackendError("unknown api '" + api + "'");
      }

      json dump() const override {
        json sessions = json::array();
        for (const auto& r : rows_)
          if (r.live) sessions.push_back(value_to_json(r.row));
        return json{{"sessions", sessions}};
      }

      const std::vector<Handle>& creation_log() const override { return mint_.log(); }

     private:
      struct Row {
        Handle handle;
        Value row;
        bool live;
      };

      static const Value* find(const std::vector<NamedValue>& args, const char* name) {
        for (const auto& a : args)
          if (a.name == name) return &a.value;
        return nullptr;
      }
      static const Value& req(const std::vector<NamedValue>& args, const char* name) {
        const auto* v = find(args, name);
        if (!v) throw BackendError(std::string("missing parameter '") + name + "'");
        return *v;
      }
      static const std::string& text_arg(const std::vector<NamedValue>& args, const char* name) {
        const auto& v = req(args, name);
        if (!v.is_text())
          throw BackendError(std::string("TypeError: parameter '") + name + "' must be text");
        return v.as_text();
      }
      static Handle handle_arg(const std::vector<NamedValue>& args, const char* name) {
        const auto& v = req(args, name);
        if (!v.is_handle())
          throw BackendError(std::string("NotFound: parameter '") + name +
                             "' is not a session handle");
        return v.as_handle();
      }

      Row& slot(const Handle& h) {
        for (auto& r : rows_)
          if (r.live && r.handle == h) return r;
        throw BackendError("NotFound: no live session for handle " + handle_repr(h));
      }

      HandleMint mint_;
      std::vector<Row> rows_;
    };
    return std::make_unique<Backend>(seed);
  };

  return cat;
}

}  // namespace session_scenario
}  // namespace seqgen
