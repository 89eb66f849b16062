#pragma once

#include <cstdint>
#include <limits>

namespace sobograph {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

}  // namespace sobograph
