#pragma once

#include <string>
#include <vector>

#include "seqgen/scenarios/mcp.hpp"
#include "seqgen/scenarios/session.hpp"
#include "seqgen/scenarios/tensor.hpp"

namespace seqgen {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> v = {"session", "tensor", "mcp"};
  return v;
}

inline ScenarioCatalog scenario_by_name(const std::string& name) {
  if (name == "session") return session_scenario::build();
  if (name == "tensor") return tensor_scenario::build();
  if (name == "mcp") return mcp_scenario::build();
  throw CorpusError("unknown scenario '" + name + "' (expected session, tensor, or mcp)");
}

}  // namespace seqgen
