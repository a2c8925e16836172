#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "offload/config.hpp"
#include "offload/game_env.hpp"
#include "offload/learners.hpp"

namespace offload {

/// One action per user.
using Assignment = std::vector<Action>;

/// Gateway-side allocation with full channel knowledge.
///
/// Users are served in order of decreasing task size (ties by user index).
/// Each user takes whichever still-free (channel, power) pair gives it the
/// lowest interference-free slot cost, or stays Local when nothing beats
/// local execution. A decodable offload is only admitted while the summed
/// edge demand stays within one slot of edge capacity, so the result is
/// collision-free and never overloads the edge.
Assignment centralized_allocate(const SimConfig& config, std::span<const UserProfile> users,
                                const SlotDraw& draw);

/// Uniform pick over the whole catalog, Local included.
std::size_t random_policy(const ActionCatalog& catalog, Rng& rng);

}  // namespace offload
