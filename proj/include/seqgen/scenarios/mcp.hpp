#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <memory>
#include <string>
#include <vector>

#include "seqgen/scenario.hpp"

namespace seqgen {
namespace mcp_scenario {

// Fixed five-voice registry; serial i of kind "voice" is kVoices[i].
struct VoiceDef {
  const char* name;
  const char* tag1;
  const char* tag2;
};

inline constexpr std::array<VoiceDef, 5> kVoices = {{
    {"Aria", "calm", "narration"},
    {"Brian", "deep", "male"},
    {"Callum", "energetic", "male"},
    {"Dana", "calm", "support"},
    {"Eli", "whisper", "asmr"},
}};

// Literal rosters the generator draws from. Deliberately small: every extra
// literal multiplies the candidate count of init-consuming calls and starves
// the chain-consuming ones. Backends accept the full documented domains.
inline const std::vector<std::string>& query_pool() {
  static const std::vector<std::string> v = {"calm", "male", "whisper"};
  return v;
}

inline const std::vector<double>& stability_pool() {
  static const std::vector<double> v = {0.25, 0.9};
  return v;
}

inline const std::vector<double>& speed_pool() {
  static const std::vector<double> v = {0.5, 1.0, 1.5};
  return v;
}

inline const std::vector<std::string>& phone_pool() {
  static const std::vector<std::string> v = {"+15550100", "+15550147"};
  return v;
}

inline const std::vector<std::string>& text_pool() {
  static const std::vector<std::string> v = {
      "The quick brown fox jumps over the lazy dog.",
      "Your appointment is confirmed for tomorrow.",
      "Welcome to the support line.",
      "All systems are operational.",
      "Please hold while we connect you.",
  };
  return v;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool voice_matches(const VoiceDef& v, const std::string& query) {
  auto q = lower(query);
  for (const auto* field : {v.name, v.tag1, v.tag2})
    if (lower(field).find(q) != std::string::npos) return true;
  return false;
}

inline std::string voice_repr(const Handle& h) {
  return h.kind + "#" + std::to_string(h.serial);
}

inline bool is_voice_handle(const Value& v) {
  return v.is_handle() && v.as_handle().kind == "voice";
}

inline bool is_audio_handle(const Value& v) {
  return v.is_handle() && v.as_handle().kind.rfind("audio:", 0) == 0;
}

// Schema-side mirror of a produced audio object; holds the transcript that
// speech_to_text recovers at generation time.
inline const Value* find_audio_row(const StateSchema& schema, const Handle& h) {
  for (const auto& v : schema.vars()) {
    if (v.role != VarRole::Remote || !v.value.is_record()) continue;
    const auto& rec = v.value.as_record();
    auto it = rec.find("id");
    if (it != rec.end() && it->second.is_handle() && it->second.as_handle() == h) return &v.value;
  }
  return nullptr;
}

inline std::vector<const StateVar*> live_text_vars(const StateSchema& schema) {
  std::vector<const StateVar*> out;
  for (const auto* v : schema.live_locals())
    if (v->value.is_text()) out.push_back(v);
  return out;
}

inline std::vector<const StateVar*> live_voice_vars(const StateSchema& schema) {
  std::vector<const StateVar*> out;
  for (const auto* v : schema.live_locals())
    if (is_voice_handle(v->value)) out.push_back(v);
  return out;
}

inline std::vector<const StateVar*> live_audio_vars(const StateSchema& schema) {
  std::vector<const StateVar*> out;
  for (const auto* v : schema.live_locals())
    if (is_audio_handle(v->value)) out.push_back(v);
  return out;
}

inline ScenarioCatalog build() {
  ScenarioCatalog cat;
  cat.name = "mcp";

  // ---- search_voices ----
  {
    TransitionSpec t;
    t.name = "search_voices";
    t.params = {{"query", ParamKind::Literal}};
    t.doc =
        "search_voices(query) returns the handles of voices whose name or tags contain the query "
        "as a case-insensitive substring, in registry order. The registry is fixed: voice#0 Aria "
        "(calm, narration), voice#1 Brian (deep, male), voice#2 Callum (energetic, male), "
        "voice#3 Dana (calm, support), voice#4 Eli (whisper, asmr).";
    t.enumerate = [](const StateSchema&, const Trace&) {
      std::vector<Bindings> out;
      for (const auto& q : query_pool()) out.push_back({{"query", Value(q)}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& q = b[0].literal().as_text();
      List hits;
      for (std::size_t i = 0; i < kVoices.size(); ++i)
        if (voice_matches(kVoices[i], q))
          hits.push_back(Value(Handle{"voice", static_cast<std::int64_t>(i)}));
      auto id = schema.add("vlist" + std::to_string(schema.next_id()), Value(std::move(hits)),
                           Origin{ctx.step}, VarRole::Local, "search_voices");
      return EffectResult{{id}};
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- text_to_speech ----
  {
    TransitionSpec t;
    t.name = "text_to_speech";
    t.params = {{"text", ParamKind::StateRef},
                {"voice", ParamKind::StateRef},
                {"stability", ParamKind::Literal},
                {"speed", ParamKind::Literal}};
    t.doc =
        "text_to_speech(text, voice, stability, speed) synthesizes speech for a text variable "
        "with a voice handle and returns a new audio handle. stability is a float in [0, 1]; "
        "speed is one of 0.5, 1.0, 1.5. Raises VoiceNotFound for an unknown voice.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* tx : live_text_vars(schema))
        for (const auto* vo : live_voice_vars(schema))
          for (double st : stability_pool())
            for (double sp : speed_pool())
              out.push_back({{"text", tx->id},
                             {"voice", vo->id},
                             {"stability", Value(st)},
                             {"speed", Value(sp)}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& text = schema.at(b[0].ref()).value;
      const auto& voice = schema.at(b[1].ref()).value;
      auto h = schema.alloc_handle("audio:tts");
      Record row;
      row["id"] = Value(h);
      row["type"] = Value("tts");
      row["text"] = text;
      row["voice"] = voice;
      row["stability"] = b[2].literal();
      row["speed"] = b[3].literal();
      auto id = schema.add("audio" + std::to_string(schema.next_id()), Value(h), Origin{ctx.step},
                           VarRole::Local, "text_to_speech");
      schema.add("_audio" + std::to_string(schema.next_id()), Value(std::move(row)),
                 Origin{ctx.step}, VarRole::Remote, "text_to_speech");
      return EffectResult{{id}};
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- speech_to_text ----
  {
    TransitionSpec t;
    t.name = "speech_to_text";
    t.params = {{"audio", ParamKind::StateRef}};
    t.doc =
        "speech_to_text(audio) transcribes an audio handle back to text: for synthesized speech "
        "it recovers the original text exactly. Raises AudioNotFound for an unknown handle.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* v : live_audio_vars(schema)) out.push_back({{"audio", v->id}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& h = schema.at(b[0].ref()).value.as_handle();
      const auto* row = find_audio_row(schema, h);
      if (!row) throw BackendError("AudioNotFound: " + voice_repr(h));
      auto id = schema.add("text" + std::to_string(schema.next_id()),
                           row->as_record().at("text"), Origin{ctx.step}, VarRole::Local,
                           "speech_to_text");
      return EffectResult{{id}};
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- text_to_sound_effects ----
  {
    TransitionSpec t;
    t.name = "text_to_sound_effects";
    t.params = {{"text", ParamKind::StateRef}, {"duration", ParamKind::Literal}};
    t.doc =
        "text_to_sound_effects(text, duration) renders a sound effect described by a text "
        "variable and returns a new audio handle. duration is an int between 1 and 5 seconds.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* tx : live_text_vars(schema))
        for (std::int64_t d : {std::int64_t{1}, std::int64_t{3}})
          out.push_back({{"text", tx->id}, {"duration", Value(d)}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& text = schema.at(b[0].ref()).value;
      auto h = schema.alloc_handle("audio:sfx");
      Record row;
      row["id"] = Value(h);
      row["type"] = Value("sfx");
      row["text"] = text;
      row["duration"] = b[1].literal();
      auto id = schema.add("audio" + std::to_string(schema.next_id()), Value(h), Origin{ctx.step},
                           VarRole::Local, "text_to_sound_effects");
      schema.add("_audio" + std::to_string(schema.next_id()), Value(std::move(row)),
                 Origin{ctx.step}, VarRole::Remote, "text_to_sound_effects");
      return EffectResult{{id}};
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- play_audio ----
  {
    TransitionSpec t;
    t.name = "play_audio";
    t.params = {{"audio", ParamKind::StateRef}};
    t.doc =
        "play_audio(audio) plays an audio handle, appends it to the playback log, and returns "
        "the playback event {played: handle}. Raises AudioNotFound for an unknown handle.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* v : live_audio_vars(schema)) out.push_back({{"audio", v->id}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& h = schema.at(b[0].ref()).value.as_handle();
      if (!find_audio_row(schema, h)) throw BackendError("AudioNotFound: " + voice_repr(h));
      Record ev;
      ev["played"] = Value(h);
      auto id = schema.add("play" + std::to_string(schema.next_id()), Value(std::move(ev)),
                           Origin{ctx.step}, VarRole::Local, "play_audio");
      return EffectResult{{id}};
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- make_outbound_call ----
  {
    TransitionSpec t;
    t.name = "make_outbound_call";
    t.params = {{"phone", ParamKind::Literal},
                {"voice", ParamKind::StateRef},
                {"text", ParamKind::StateRef}};
    t.doc =
        "make_outbound_call(phone, voice, text) places a call that speaks a text variable with "
        "the given voice handle. It mints a call handle plus a recording audio handle and "
        "returns the call record {id, phone, voice, recording}. Raises VoiceNotFound for an "
        "unknown voice.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto& ph : phone_pool())
        for (const auto* vo : live_voice_vars(schema))
          for (const auto* tx : live_text_vars(schema))
            out.push_back({{"phone", Value(ph)}, {"voice", vo->id}, {"text", tx->id}});
      return out;
    };
    t.apply = [](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& phone = b[0].literal();
      const auto& voice = schema.at(b[1].ref()).value;
      const auto& text = schema.at(b[2].ref()).value;
      auto ch = schema.alloc_handle("call");
      auto rh = schema.alloc_handle("audio:call");
      Record arow;
      arow["id"] = Value(rh);
      arow["type"] = Value("call");
      arow["text"] = text;
      arow["voice"] = voice;
      arow["phone"] = phone;
      Record callrec;
      callrec["id"] = Value(ch);
      callrec["phone"] = phone;
      callrec["voice"] = voice;
      callrec["recording"] = Value(rh);
      auto id = schema.add("call" + std::to_string(schema.next_id()), Value(std::move(callrec)),
                           Origin{ctx.step}, VarRole::Local, "make_outbound_call");
      schema.add("_audio" + std::to_string(schema.next_id()), Value(std::move(arow)),
                 Origin{ctx.step}, VarRole::Remote, "make_outbound_call");
      return EffectResult{{id}};
    };
    cat.transitions.push_back(std::move(t));
  }

  cat.initialize = [](Rng& rng, std::uint64_t) {
    InitState init;
    // The registry's five voice handles are minted up front on both sides so
    // creation logs align; vars reference a rng-chosen subset.
    for (std::size_t i = 0; i < kVoices.size(); ++i) init.schema.alloc_handle("voice");

    const auto ntext = rng.uniform_int(1, 2);
    std::vector<std::size_t> text_idx;
    while (static_cast<std::int64_t>(text_idx.size()) < ntext) {
      auto i = rng.uniform_index(text_pool().size());
      if (std::find(text_idx.begin(), text_idx.end(), i) == text_idx.end()) text_idx.push_back(i);
    }
    for (std::size_t k = 0; k < text_idx.size(); ++k)
      init.schema.add("text" + std::to_string(k), Value(text_pool()[text_idx[k]]), Origin{0});

    const auto nvoice = rng.uniform_int(1, 2);
    std::vector<std::size_t> voice_idx;
    while (static_cast<std::int64_t>(voice_idx.size()) < nvoice) {
      auto i = rng.uniform_index(kVoices.size());
      if (std::find(voice_idx.begin(), voice_idx.end(), i) == voice_idx.end())
        voice_idx.push_back(i);
    }
    for (std::size_t k = 0; k < voice_idx.size(); ++k)
      init.schema.add("voice" + std::to_string(k),
                      Value(Handle{"voice", static_cast<std::int64_t>(voice_idx[k])}), Origin{0});
    return init;
  };

  cat.make_backend = [](std::uint64_t) -> std::unique_ptr<MockBackend> {
    class Backend : public MockBackend {
     public:
      Backend() {
        for (std::size_t i = 0; i < kVoices.size(); ++i) mint_.mint("voice");
      }

      Value call(const std::string& api, const std::vector<NamedValue>& args) override {
        if (api == "search_voices") {
          const auto& q = text_arg(args, "query");
          List hits;
          for (std::size_t i = 0; i < kVoices.size(); ++i)
            if (voice_matches(kVoices[i], q))
              hits.push_back(Value(Handle{"voice", static_cast<std::int64_t>(i)}));
          return Value(std::move(hits));
        }
        if (api == "text_to_speech") {
          auto v = voice_arg(args, "voice");
          auto h = mint_.mint("audio:tts");
          Record row;
          row["id"] = Value(h);
          row["type"] = Value("tts");
          row["text"] = req(args, "text");
          row["voice"] = Value(v);
          row["stability"] = req(args, "stability");
          row["speed"] = req(args, "speed");
          audio_.push_back(Value(std::move(row)));
          return Value(h);
        }
        if (api == "speech_to_text") {
          const auto& row = audio_row(handle_arg(args, "audio"));
          return row.as_record().at("text");
        }
        if (api == "text_to_sound_effects") {
          auto h = mint_.mint("audio:sfx");
          Record row;
          row["id"] = Value(h);
          row["type"] = Value("sfx");
          row["text"] = req(args, "text");
          row["duration"] = req(args, "duration");
          audio_.push_back(Value(std::move(row)));
          return Value(h);
        }
        if (api == "play_audio") {
          auto h = handle_arg(args, "audio");
          audio_row(h);  // existence check
          plays_.push_back(Value(h));
          Record ev;
          ev["played"] = Value(h);
          return Value(std::move(ev));
        }
        if (api == "make_outbound_call") {
          auto v = voice_arg(args, "voice");
          auto ch = mint_.mint("call");
          auto rh = mint_.mint("audio:call");
          Record arow;
          arow["id"] = Value(rh);
          arow["type"] = Value("call");
          arow["text"] = req(args, "text");
          arow["voice"] = Value(v);
          arow["phone"] = req(args, "phone");
          audio_.push_back(Value(std::move(arow)));
          Record callrec;
          callrec["id"] = Value(ch);
          callrec["phone"] = req(args, "phone");
          callrec["voice"] = Value(v);
          callrec["recording"] = Value(rh);
          calls_.push_back(Value(callrec));
          return Value(std::move(callrec));
        }
        throw BackendError("unknown api '" + api + "'");
      }

      json dump() const override {
        json audio = json::array(), calls = json::array(), plays = json::array();
        for (const auto& a : audio_) audio.push_back(value_to_json(a));
        for (const auto& c : calls_) calls.push_back(value_to_json(c));
        for (const auto& p : plays_) plays.push_back(value_to_json(p));
        return json{{"audio", audio}, {"calls", calls}, {"plays", plays}};
      }

      const std::vector<Handle>& creation_log() const override { return mint_.log(); }

     private:
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
      static Handle voice_arg(const std::vector<NamedValue>& args, const char* name) {
        const auto& v = req(args, name);
        if (!is_voice_handle(v) ||
            v.as_handle().serial >= static_cast<std::int64_t>(kVoices.size()) ||
            v.as_handle().serial < 0)
          throw BackendError(std::string("VoiceNotFound: parameter '") + name +
                             "' is not a registered voice");
        return v.as_handle();
      }
      static Handle handle_arg(const std::vector<NamedValue>& args, const char* name) {
        const auto& v = req(args, name);
        if (!v.is_handle())
          throw BackendError(std::string("AudioNotFound: parameter '") + name +
                             "' is not an audio handle");
        return v.as_handle();
      }

      const Value& audio_row(const Handle& h) const {
        for (const auto& a : audio_) {
          const auto& rec = a.as_record();
          if (rec.at("id").as_handle() == h) return a;
        }
        throw BackendError("AudioNotFound: " + voice_repr(h));
      }

      HandleMint mint_;
      std::vector<Value> audio_;
      std::vector<Value> calls_;
      std::vector<Value> plays_;
    };
    return std::make_unique<Backend>();
  };

  return cat;
}

}  // namespace mcp_scenario
}  // namespace seqgen
