#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "offload/config.hpp"
#include "offload/core_model.hpp"

namespace offload {

/// One sub-channel of one radio access technology.
struct ChannelId
{
  std::size_t rat = 0;
  std::size_t subchannel = 0;

  auto operator<=>(const ChannelId&) const = default;
};

struct Local
{
  bool operator==(const Local&) const = default;
};

struct Offload
{
  ChannelId channel;
  double power_w = 0.0;

  bool operator==(const Offload&) const = default;
};

/// A user's decision for one slot: run the task locally (zero transmit
/// power) or send it over a sub-channel at one of the RAT's power levels.
using Action = std::variant<Local, Offload>;

inline const Offload* as_offload(const Action& action)
{
  return std::get_if<Offload>(&action);
}

/// Throws ConfigError if the action does not exist under `config`.
void validate(const Action& action, const SimConfig& config);

/// The three observation bits of a user: whether it transmitted, whether the
/// gateway decoded it, and the gateway's broadcast capacity flag.
struct LocalState
{
  static constexpr std::size_t kCount = 8;

  bool transmitted = false;
  bool received = false;
  bool capacity_ok = true;

  std::size_t index() const
  {
    return (transmitted ? 4u : 0u) + (received ? 2u : 0u) + (capacity_ok ? 1u : 0u);
  }

  static LocalState from_index(std::size_t index)
  {
    return LocalState{(index & 4u) != 0, (index & 2u) != 0, (index & 1u) != 0};
  }

  static LocalState initial() { return LocalState{false, false, true}; }

  bool operator==(const LocalState&) const = default;
};

/// Per-slot power gains, one per (user, channel), channels flattened RAT-major.
class GainMatrix
{
 public:
  GainMatrix() = default;
  GainMatrix(std::size_t users, const std::vector<RatSpec>& rats);

  double at(std::size_t user, ChannelId channel) const;
  double& at(std::size_t user, ChannelId channel);

  std::size_t users() const { return users_; }
  std::size_t channels() const { return channels_; }
  std::size_t flat_channel(ChannelId channel) const;

 private:
  std::size_t users_ = 0;
  std::size_t channels_ = 0;
  std::vector<std::size_t> rat_offset_;
  std::vector<double> gains_;
};

/// Everything nature draws at the start of a slot.
struct SlotDraw
{
  std::vector<Task> tasks;
  GainMatrix gains;
};

enum class RewardBranch
{
  kLocal,          // local execution
  kOffloaded,      // decoded, edge has capacity
  kEdgeOverload,   // decoded, edge over capacity, pays the waiting penalty
  kFailed,         // SINR below threshold, pays the failure penalty
};

struct UserOutcome
{
  Action action;
  Task task;
  double sinr_linear = 0.0;
  double rate_bps = 0.0;
  RewardBranch branch = RewardBranch::kLocal;
  std::optional<CostBreakdown> local;
  std::optional<CostBreakdown> edge;
  std::optional<CostBreakdown> transmission;
  double penalty = 0.0;
  double reward = 0.0;  // a cost: lower is better
  LocalState next_state;

  /// Energy summed over the cost components that apply to the branch.
  double energy_j() const;
  double delay_s() const;
};

using Occupancy = std::map<ChannelId, std::vector<std::size_t>>;

struct SlotOutcome
{
  std::vector<UserOutcome> users;
  double w_all_cycles = 0.0;
  bool capacity_ok = true;
  Occupancy occupancy;  // only channels with at least one transmitter
};

/// Cycles demanded from the edge by offloaders whose SINR met their RAT's
/// threshold.
double compute_w_all(std::span<const Action> actions, std::span<const Task> tasks,
                     std::span<const double> sinrs, const SimConfig& config);

/// Resolves one slot: interference, SINR, rates, costs, rewards and next
/// observations. Pure; `step` is this plus bookkeeping.
SlotOutcome resolve_slot(const SimConfig& config, std::span<const UserProfile> users,
                         const SlotDraw& draw, std::span<const Action> actions);

/// Draws the fixed user population (distances and CPUs) of a deployment.
std::vector<UserProfile> sample_users(const SimConfig& config, std::uint64_t seed);

/// The multi-user offloading game. The user population is drawn once from the
/// config seed; `reset` reseeds the per-slot task and channel processes.
/// Each user owns its own task and gain streams, so a user's draws do not
/// depend on how many other users exist.
class GameEnv
{
 public:
  explicit GameEnv(SimConfig config);

  std::vector<LocalState> reset(std::uint64_t seed);

  /// Samples this slot's tasks and gains; idempotent until the next `step`.
  const SlotDraw& begin_slot();

  /// Resolves the joint action against the current slot's draw, drawing it
  /// first if `begin_slot` was not called, then advances the slot counter.
  SlotOutcome step(std::span<const Action> joint_actions);

  const SimConfig& config() const { return config_; }
  const std::vector<UserProfile>& users() const { return users_; }
  const std::vector<LocalState>& states() const { return states_; }
  std::size_t slot() const { return slot_; }

 private:
  SimConfig config_;
  std::vector<UserProfile> users_;
  std::vector<Rng> task_rngs_;
  std::vector<Rng> gain_rngs_;
  std::vector<LocalState> states_;
  std::optional<SlotDraw> pending_;
  std::size_t slot_ = 0;
};

}  // namespace offload
