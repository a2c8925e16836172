#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "offload/baselines.hpp"
#include "offload/config.hpp"
#include "offload/game_env.hpp"
#include "offload/learners.hpp"

namespace offload {

/// One user's view of one slot. rat/subchannel are -1 for Local.
struct TraceRecord
{
  std::size_t slot = 0;
  std::size_t user = 0;
  std::size_t state_index = 0;
  std::size_t action_index = 0;
  std::uint64_t task_bits = 0;
  double deadline_s = 0.0;  // logged only
  double reward = 0.0;
  double energy_j = 0.0;
  double delay_s = 0.0;
  double sinr_linear = 0.0;
  long rat = -1;
  long subchannel = -1;
  bool capacity_ok = true;

  bool operator==(const TraceRecord&) const = default;
};

struct TrainResult
{
  std::vector<QTable> tables;
  std::vector<TraceRecord> trace;  // slot-major, users in order
  double final_alpha = 0.0;
};

/// Starting value of every entry in `user`'s table: config.learning.q_init
/// when set, otherwise the discounted cost of always computing locally with a
/// mean-sized task. The latter makes untried actions look exactly as good as
/// staying local, so early ties still resolve to Local.
double initial_q_value(const SimConfig& config, const UserProfile& user);

/// Independent learners: every slot each agent picks an epsilon-greedy action
/// from its own table, the joint action is resolved, and each agent applies a
/// TD update with its own reward. The learning rate steps once per slot.
TrainResult train(const SimConfig& config);

struct RunSummary
{
  std::string scheme;
  std::size_t users = 0;
  std::size_t slots = 0;
  std::uint64_t seed = 0;       // master seed of the deployment
  std::uint64_t env_seed = 0;   // seed the slot processes were reset with
  double c_ave = 0.0;           // mean cost per user per slot
  std::vector<double> per_user_cost;
  std::vector<double> fleet_series;    // mean cost over users, per slot
  std::vector<double> moving_average;  // of fleet_series
  std::size_t collisions = 0;          // (slot, channel) pairs with >= 2 transmitters
  std::map<std::size_t, std::size_t> occupancy_histogram;  // occupants -> (slot, channel) pairs
  Occupancy final_occupancy;           // snapshot of the last slot
  std::size_t final_offloaders = 0;
  double final_alpha = 0.0;
  std::vector<TraceRecord> trace;
};

/// Aggregates a slot-major trace of `config.num_users` users per slot.
RunSummary summarize(std::span<const TraceRecord> trace, const SimConfig& config,
                     std::string scheme);

/// Chooses the joint action for a slot given the environment and its draw.
using JointPolicy = std::function<Assignment(const GameEnv&, const SlotDraw&)>;

/// Runs `policy` for `slots` slots on the deployment described by `config`,
/// with the slot processes reset to `env_seed`.
RunSummary run_policy(const SimConfig& config, std::size_t slots, std::uint64_t env_seed,
                      const JointPolicy& policy, std::string scheme);

/// Seed shared by every scheme evaluated on one deployment.
std::uint64_t evaluation_seed(const SimConfig& config);

/// Greedy execution of trained tables. Throws ConfigError when the table
/// count differs from the user count.
RunSummary evaluate(std::span<const QTable> tables, const SimConfig& config, std::size_t slots);
RunSummary evaluate_random(const SimConfig& config, std::size_t slots);
RunSummary evaluate_centralized(const SimConfig& config, std::size_t slots);

struct ComparisonRow
{
  std::size_t users = 0;
  std::string scheme;
  double c_ave = 0.0;
  double tracked_user_cost = 0.0;
  std::size_t collisions = 0;
  std::size_t final_offloaders = 0;
};

inline constexpr const char* kCentralized = "Centralized";
inline constexpr const char* kLearned = "IL-MA-Q";
inline constexpr const char* kRandom = "Random";

/// Trains per user count and evaluates the three schemes on identical draws.
std::vector<ComparisonRow> compare(const SimConfig& config, std::span<const std::size_t> user_counts);

struct EpsilonSweepRow
{
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double tracked_tail_cost = 0.0;
  double fleet_tail_cost = 0.0;
  double tracked_tail_drift = 0.0;  // over the last 2 * tail slots
  double fleet_tail_drift = 0.0;
  std::vector<double> tracked_moving_average;
  std::vector<double> fleet_moving_average;
};

/// Trains once per (epsilon, seed); seeds are config.seed .. config.seed + seeds - 1.
std::vector<EpsilonSweepRow> sweep_epsilon(const SimConfig& config,
                                           std::span<const double> epsilons, std::size_t seeds,
                                           std::size_t tail = 1000);

// Series helpers.

/// Trailing mean; the first window - 1 entries average the available prefix.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

/// Per-slot costs of one user, in slot order.
std::vector<double> user_cost_series(std::span<const TraceRecord> trace, std::size_t user);

/// Per-slot mean cost over all users.
std::vector<double> fleet_cost_series(std::span<const TraceRecord> trace, std::size_t users);

/// Mean of the last `tail` entries (all entries if fewer).
double tail_mean(std::span<const double> series, std::size_t tail);

/// Least-squares slope over the last `tail` entries, times the tail length,
/// divided by the tail mean: the relative drift across the tail.
double tail_relative_drift(std::span<const double> series, std::size_t tail);

// Output files. CSVs begin with a "# " line recording the seeds.

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace,
                     const SimConfig& config);
void write_convergence_csv(std::ostream& out, std::span<const TraceRecord> trace,
                           const SimConfig& config);
void write_summary_csv(std::ostream& out, std::span<const RunSummary> runs,
                       const SimConfig& config);
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows,
                          const SimConfig& config);
void write_sweep_csv(std::ostream& out, std::span<const EpsilonSweepRow> rows,
                     const SimConfig& config);

std::string seed_header(const SimConfig& config);

}  // namespace offload
