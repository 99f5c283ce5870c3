#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqgen/common.hpp"
#include "seqgen/value.hpp"

namespace seqgen {

using VarId = std::int32_t;

// Where a state variable came from: the initializer, or a 1-based trace step.
struct Origin {
  int step = 0;  // 0 means the initializer
  bool is_init() const { return step == 0; }
  friend bool operator==(const Origin& a, const Origin& b) { return a.step == b.step; }
};

// Pair-transition producer name used when a consumed var has no producing
// transition (it came from initialization).
inline const std::string kInitSentinel = "INIT";

enum class VarRole {
  Local,   // a program variable: renderable, bindable, RESULT-eligible
  Remote,  // a mirrored backend item (e.g. a stored session row): tracked only
};

struct StateVar {
  VarId id = 0;
  std::string name;
  Value value;
  Origin producer;
  bool live = true;
  VarRole role = VarRole::Local;
  // Name of the transition that last wrote this var; empty means the
  // initializer. Drives data-dependency pair computation.
  std::string last_writer;
};

// Ordered collection of state variables plus the handle allocator. Copyable by
// value; the program builder forks it at split points. Ids are never reused
// within one lineage, and a forked else-branch bumps next_id past the
// if-branch's high-water mark so names stay unique program-wide.
class StateSchema {
 public:
  VarId add(std::string name, Value value, Origin producer, VarRole role = VarRole::Local,
            std::string last_writer = {}) {
    StateVar v;
    v.id = next_id_++;
    v.name = std::move(name);
    v.value = std::move(value);
    v.producer = producer;
    v.role = role;
    v.last_writer = std::move(last_writer);
    vars_.push_back(std::move(v));
    return vars_.back().id;
  }

  const StateVar* find(VarId id) const {
    for (const auto& v : vars_)
      if (v.id == id) return &v;
    return nullptr;
  }

  StateVar* find(VarId id) {
    for (auto& v : vars_)
      if (v.id == id) return &v;
    return nullptr;
  }

  const StateVar* find_by_name(const std::string& name) const {
    for (const auto& v : vars_)
      if (v.name == name) return &v;
    return nullptr;
  }

  const StateVar& at(VarId id) const {
    const auto* v = find(id);
    if (!v) throw UnknownVar("no state variable with id " + std::to_string(id));
    return *v;
  }

  StateVar& at(VarId id) {
    auto* v = find(id);
    if (!v) throw UnknownVar("no state variable with id " + std::to_string(id));
    return *v;
  }

  void kill(VarId id) {
    if (auto* v = find(id)) v->live = false;
  }

  // Insertion order == creation order == id order.
  const std::vector<StateVar>& vars() const { return vars_; }

  std::vector<const StateVar*> live_vars() const {
    std::vector<const StateVar*> out;
    for (const auto& v : vars_)
      if (v.live) out.push_back(&v);
    return out;
  }

  std::vector<const StateVar*> live_locals() const {
    std::vector<const StateVar*> out;
    for (const auto& v : vars_)
      if (v.live && v.role == VarRole::Local) out.push_back(&v);
    return out;
  }

  VarId next_id() const { return next_id_; }
  void bump_next_id(VarId id) { next_id_ = std::max(next_id_, id); }

  // Mints a handle in the given partition and logs the creation. The
  // interpreter-side backend allocates through the same discipline, so a
  // handle's (kind, serial) matches across generation and execution for
  // identical call sequences.
  Handle alloc_handle(const std::string& kind) {
    auto serial = handle_counters_[kind]++;
    creation_log_.push_back(Handle{kind, serial});
    return Handle{kind, serial};
  }

  const std::vector<Handle>& creation_log() const { return creation_log_; }

  // Count of live Remote vars, i.e. the schema's mirror of backend item count.
  std::size_t remote_count() const {
    std::size_t n = 0;
    for (const auto& v : vars_)
      if (v.live && v.role == VarRole::Remote) ++n;
    return n;
  }

 private:
  std::vector<StateVar> vars_;
  VarId next_id_ = 0;
  std::map<std::string, std::int64_t> handle_counters_;
  std::vector<Handle> creation_log_;
};

// Value of a named var after all applied effects; the accessor face of ending
// state composition.
inline const Value& ending_state(const StateSchema& schema, VarId id) {
  return schema.at(id).value;
}

}  // namespace seqgen
