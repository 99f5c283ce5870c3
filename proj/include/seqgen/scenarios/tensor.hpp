#pragma once

#include <memory>
#include <string>
#include <vector>

#include "seqgen/scenarios/tensor_math.hpp"

namespace seqgen {
namespace tensor_scenario {

// Growth caps keep five-step traces cheap: initial tensors have at most
// kInitNumelCap elements and no op may produce more than kNumelCap.
constexpr std::int64_t kInitNumelCap = 64;
constexpr std::int64_t kNumelCap = 2048;
constexpr std::int64_t kMaxRank = 6;

inline const Value* tensor_value(const StateSchema& schema, VarId id) {
  const auto* v = schema.find(id);
  return v && v->value.is_tensor() ? &v->value : nullptr;
}

inline std::vector<const StateVar*> live_tensors(const StateSchema& schema) {
  std::vector<const StateVar*> out;
  for (const auto* v : schema.live_locals())
    if (v->value.is_tensor()) out.push_back(v);
  return out;
}

// Target shapes for reshape: rank 1..4, dims 1..8, matching element count,
// excluding the identity target. Lexicographic order.
inline void enum_shapes(std::int64_t remaining, int depth, std::vector<std::int64_t>& cur,
                        std::vector<std::vector<std::int64_t>>& out) {
  if (!cur.empty() && remaining == 1) out.push_back(cur);
  if (depth == 4) return;
  for (std::int64_t d = 1; d <= 8; ++d) {
    if (remaining % d != 0) continue;
    cur.push_back(d);
    enum_shapes(remaining / d, depth + 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<std::int64_t>> reshape_targets(const Tensor& t) {
  std::vector<std::vector<std::int64_t>> all;
  std::vector<std::int64_t> cur;
  enum_shapes(t.numel(), 0, cur, all);
  std::vector<std::vector<std::int64_t>> out;
  for (auto& s : all)
    if (s != t.shape) out.push_back(std::move(s));
  return out;
}

inline Value shape_literal(const std::vector<std::int64_t>& shape) {
  List l;
  for (auto d : shape) l.push_back(Value(d));
  return Value(std::move(l));
}

inline std::vector<std::int64_t> shape_from_literal(const Value& v) {
  std::vector<std::int64_t> out;
  if (!v.is_list()) throw BackendError("ShapeMismatch: reshape shape must be a list of ints");
  for (const auto& e : v.as_list()) {
    if (!e.is_int()) throw BackendError("ShapeMismatch: reshape shape must be a list of ints");
    out.push_back(e.as_int());
  }
  return out;
}

inline std::string tensor_doc(const char* text) { return text; }

inline ScenarioCatalog build() {
  ScenarioCatalog cat;
  cat.name = "tensor";

  auto add_tensor_var = [](StateSchema& schema, Tensor t, int step, const std::string& writer) {
    auto name = "t" + std::to_string(schema.next_id());
    auto id = schema.add(std::move(name), Value(std::move(t)), Origin{step}, VarRole::Local, writer);
    return EffectResult{{id}};
  };

  // ---- reshape ----
  {
    TransitionSpec t;
    t.name = "reshape";
    t.params = {{"t", ParamKind::StateRef}, {"shape", ParamKind::Literal}};
    t.doc =
        "reshape(t, shape) returns a tensor with the same elements laid out in the given shape. "
        "The shape is a list of positive ints whose product must equal t's element count.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* v : live_tensors(schema)) {
        for (const auto& target : reshape_targets(v->value.as_tensor())) {
          out.push_back({{"t", v->id}, {"shape", shape_literal(target)}});
        }
      }
      return out;
    };
    t.apply = [add_tensor_var](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& src = schema.at(b[0].ref()).value.as_tensor();
      auto out = tensor_math::reshape(src, shape_from_literal(b[1].literal()));
      return add_tensor_var(schema, std::move(out), ctx.step, "reshape");
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- cat ----
  {
    TransitionSpec t;
    t.name = "cat";
    t.params = {{"a", ParamKind::StateRef}, {"b", ParamKind::StateRef}, {"dim", ParamKind::Literal}};
    t.doc =
        "cat(a, b, dim) concatenates two tensors of equal rank along dimension dim; all other "
        "dimensions must match. Returns the combined tensor.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      auto tensors = live_tensors(schema);
      for (const auto* a : tensors) {
        for (const auto* b : tensors) {
          if (a->id == b->id) continue;
          const auto& ta = a->value.as_tensor();
          const auto& tb = b->value.as_tensor();
          if (ta.shape.size() != tb.shape.size()) continue;
          if (ta.numel() + tb.numel() > kNumelCap) continue;
          for (std::int64_t d = 0; d < static_cast<std::int64_t>(ta.shape.size()); ++d) {
            bool ok = true;
            for (std::int64_t k = 0; k < static_cast<std::int64_t>(ta.shape.size()); ++k)
              if (k != d && ta.shape[k] != tb.shape[k]) ok = false;
            if (ok) out.push_back({{"a", a->id}, {"b", b->id}, {"dim", Value(d)}});
          }
        }
      }
      return out;
    };
    t.apply = [add_tensor_var](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& ta = schema.at(b[0].ref()).value.as_tensor();
      const auto& tb = schema.at(b[1].ref()).value.as_tensor();
      auto out = tensor_math::cat(ta, tb, b[2].literal().as_int());
      return add_tensor_var(schema, std::move(out), ctx.step, "cat");
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- transpose ----
  {
    TransitionSpec t;
    t.name = "transpose";
    t.params = {{"t", ParamKind::StateRef}, {"dim0", ParamKind::Literal}, {"dim1", ParamKind::Literal}};
    t.doc = "transpose(t, dim0, dim1) swaps two dimensions of a tensor of rank >= 2.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* v : live_tensors(schema)) {
        const auto rank = static_cast<std::int64_t>(v->value.as_tensor().shape.size());
        for (std::int64_t d0 = 0; d0 < rank; ++d0)
          for (std::int64_t d1 = d0 + 1; d1 < rank; ++d1)
            out.push_back({{"t", v->id}, {"dim0", Value(d0)}, {"dim1", Value(d1)}});
      }
      return out;
    };
    t.apply = [add_tensor_var](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& src = schema.at(b[0].ref()).value.as_tensor();
      auto out = tensor_math::transpose(src, b[1].literal().as_int(), b[2].literal().as_int());
      return add_tensor_var(schema, std::move(out), ctx.step, "transpose");
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- unsqueeze ----
  {
    TransitionSpec t;
    t.name = "unsqueeze";
    t.params = {{"t", ParamKind::StateRef}, {"dim", ParamKind::Literal}};
    t.doc = "unsqueeze(t, dim) inserts a size-1 dimension at position dim (0..rank inclusive).";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* v : live_tensors(schema)) {
        const auto rank = static_cast<std::int64_t>(v->value.as_tensor().shape.size());
        if (rank >= kMaxRank) continue;
        for (std::int64_t d = 0; d <= rank; ++d)
          out.push_back({{"t", v->id}, {"dim", Value(d)}});
      }
      return out;
    };
    t.apply = [add_tensor_var](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& src = schema.at(b[0].ref()).value.as_tensor();
      auto out = tensor_math::unsqueeze(src, b[1].literal().as_int());
      return add_tensor_var(schema, std::move(out), ctx.step, "unsqueeze");
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- linear ----
  {
    TransitionSpec t;
    t.name = "linear";
    t.params = {{"t", ParamKind::StateRef}, {"out_features", ParamKind::Literal}};
    t.doc =
        "linear(t, out_features) applies a dense layer along the last dimension: the weight "
        "matrix and bias are derived deterministically from (in_features, out_features) and the "
        "run seed. out_features ranges over 1..8.";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* v : live_tensors(schema)) {
        const auto& tv = v->value.as_tensor();
        if (tv.shape.empty()) continue;
        const std::int64_t rows = tv.numel() / tv.shape.back();
        for (std::int64_t o = 1; o <= 8; ++o) {
          if (rows * o > kNumelCap) continue;
          out.push_back({{"t", v->id}, {"out_features", Value(o)}});
        }
      }
      return out;
    };
    t.apply = [add_tensor_var](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& src = schema.at(b[0].ref()).value.as_tensor();
      auto out = tensor_math::linear(src, b[1].literal().as_int(), ctx.seed);
      return add_tensor_var(schema, std::move(out), ctx.step, "linear");
    };
    cat.transitions.push_back(std::move(t));
  }

  // ---- conv2d ----
  {
    TransitionSpec t;
    t.name = "conv2d";
    t.params = {{"t", ParamKind::StateRef},
                {"out_channels", ParamKind::Literal},
                {"kernel", ParamKind::Literal},
                {"stride", ParamKind::Literal},
                {"padding", ParamKind::Literal}};
    t.doc =
        "conv2d(t, out_channels, kernel, stride, padding) convolves a 4-D (N,C,H,W) tensor with "
        "a square kernel; weights and bias are derived deterministically from the layer "
        "dimensions and the run seed. out_channels in 1..4, kernel in {1,3}, stride in {1,2}, "
        "padding in {0,1}; the spatial output H' = floor((H + 2*padding - kernel)/stride) + 1 "
        "must be at least 1 (and likewise for W').";
    t.enumerate = [](const StateSchema& schema, const Trace&) {
      std::vector<Bindings> out;
      for (const auto* v : live_tensors(schema)) {
        const auto& tv = v->value.as_tensor();
        if (tv.shape.size() != 4) continue;
        const std::int64_t N = tv.shape[0], H = tv.shape[2], W = tv.shape[3];
        for (std::int64_t oc = 1; oc <= 4; ++oc) {
          for (std::int64_t k : {1, 3}) {
            for (std::int64_t s : {1, 2}) {
              for (std::int64_t p : {0, 1}) {
                if (H + 2 * p < k || W + 2 * p < k) continue;
                const auto ho = tensor_math::conv_out_dim(H, k, s, p);
                const auto wo = tensor_math::conv_out_dim(W, k, s, p);
                if (ho < 1 || wo < 1 || N * oc * ho * wo > kNumelCap) continue;
                out.push_back({{"t", v->id},
                               {"out_channels", Value(oc)},
                               {"kernel", Value(k)},
                               {"stride", Value(s)},
                               {"padding", Value(p)}});
              }
            }
          }
        }
      }
      return out;
    };
    t.apply = [add_tensor_var](StateSchema& schema, const Bindings& b, const EffectContext& ctx) {
      const auto& src = schema.at(b[0].ref()).value.as_tensor();
      auto out = tensor_math::conv2d(src, b[1].literal().as_int(), b[2].literal().as_int(),
                                     b[3].literal().as_int(), b[4].literal().as_int(), ctx.seed);
      return add_tensor_var(schema, std::move(out), ctx.step, "conv2d");
    };
    cat.transitions.push_back(std::move(t));
  }

  // Initializer: 2..4 tensors, rank 2..4, dims 1..8, capped element count.
  // Initial values live in the program text as decls, so nothing here needs
  // seed-keyed replication on the backend side.
  cat.initialize = [](Rng& rng, std::uint64_t) {
    InitState init;
    const int count = static_cast<int>(rng.uniform_int(2, 4));
    for (int i = 0; i < count; ++i) {
      Tensor t;
      while (true) {
        t.shape.clear();
        const int rank = static_cast<int>(rng.uniform_int(2, 4));
        for (int d = 0; d < rank; ++d) t.shape.push_back(rng.uniform_int(1, 8));
        if (t.numel() <= kInitNumelCap) break;
      }
      t.data.resize(static_cast<std::size_t>(t.numel()));
      for (auto& x : t.data) x = rng.uniform_real(-1.0, 1.0);
      auto name = "t" + std::to_string(init.schema.next_id());
      init.schema.add(std::move(name), Value(std::move(t)), Origin{0});
    }
    return init;
  };

  cat.make_backend = [](std::uint64_t seed) -> std::unique_ptr<MockBackend> {
    // Pure computation scenario: no remote state, so the dump stays empty and
    // grading rests on RESULT values and execution errors.
    class Backend : public MockBackend {
     public:
      explicit Backend(std::uint64_t seed) : seed_(seed) {}

      Value call(const std::string& api, const std::vector<NamedValue>& args) override {
        auto tensor_arg = [&](const char* name) -> const Tensor& {
          const auto* v = find(args, name);
          if (!v || !v->is_tensor())
            throw BackendError(std::string("ShapeMismatch: parameter '") + name +
                               "' must be a tensor");
          return v->as_tensor();
        };
        auto int_arg = [&](const char* name) {
          const auto* v = find(args, name);
          if (!v || !v->is_int())
            throw BackendError(std::string("ShapeMismatch: parameter '") + name +
                               "' must be an int");
          return v->as_int();
        };
        if (api == "reshape")
          return Value(tensor_math::reshape(tensor_arg("t"), shape_from_literal(req(args, "shape"))));
        if (api == "cat") return Value(tensor_math::cat(tensor_arg("a"), tensor_arg("b"), int_arg("dim")));
        if (api == "transpose")
          return Value(tensor_math::transpose(tensor_arg("t"), int_arg("dim0"), int_arg("dim1")));
        if (api == "unsqueeze") return Value(tensor_math::unsqueeze(tensor_arg("t"), int_arg("dim")));
        if (api == "linear") return Value(tensor_math::linear(tensor_arg("t"), int_arg("out_features"), seed_));
        if (api == "conv2d")
          return Value(tensor_math::conv2d(tensor_arg("t"), int_arg("out_channels"), int_arg("kernel"),
                                           int_arg("stride"), int_arg("padding"), seed_));
        throw BackendError("unknown api '" + api + "'");
      }

      json dump() const override { return json::object(); }
      const std::vector<Handle>& creation_log() const override { return log_; }

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

      std::uint64_t seed_;
      std::vector<Handle> log_;
    };
    return std::make_unique<Backend>(seed);
  };

  return cat;
}

}  // namespace tensor_scenario
}  // namespace seqgen
