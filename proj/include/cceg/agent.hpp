#pragma once

#include <optional>

#include "cceg/floor_plan.hpp"

namespace cceg {

struct Agent {
  int id = 0;
  Coord pos;
  bool compliant = false;  // follows sign guidance; fixed at spawn
  std::optional<ExitId> target;
  std::optional<int> evacuated_at;  // step index at which the agent left

  bool evacuated() const { return evacuated_at.has_value(); }

  friend bool operator==(const Agent&, const Agent&) = default;
};

struct PaMessage {
  ExitId blocked_exit = 1;
  ExitId designated_exit = 7;

  friend bool operator==(const PaMessage&, const PaMessage&) = default;
};

}  // namespace cceg
