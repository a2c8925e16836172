#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "offload/core_model.hpp"
#include "offload/game_env.hpp"

namespace offload {

/// Every action a user can take, indexed. Index 0 is Local; offload actions
/// follow RAT-major, then sub-channel, then power level.
class ActionCatalog
{
 public:
  explicit ActionCatalog(const std::vector<RatSpec>& rats);

  std::size_t size() const { return actions_.size(); }
  const Action& action(std::size_t index) const { return actions_.at(index); }
  const std::vector<Action>& actions() const { return actions_; }

  /// Inverse of `action`; throws std::out_of_range for actions not in the catalog.
  std::size_t index_of(const Action& action) const;

 private:
  std::vector<Action> actions_;
  std::vector<std::size_t> rat_offset_;
  std::vector<std::size_t> subchannels_;
  std::vector<std::vector<double>> power_levels_;
};

/// Expected discounted cost per (state, action), with visit counts.
class QTable
{
 public:
  QTable(std::size_t num_states, std::size_t num_actions, double initial = 0.0);
  /// A table over the eight observation states of a user.
  static QTable for_agent(std::size_t num_actions, double initial = 0.0)
  {
    return QTable(LocalState::kCount, num_actions, initial);
  }

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }

  double value(std::size_t state, std::size_t action) const;
  void set_value(std::size_t state, std::size_t action, double value);
  std::uint64_t visits(std::size_t state, std::size_t action) const;
  void set_visits(std::size_t state, std::size_t action, std::uint64_t visits);

  std::span<const double> row(std::size_t state) const;

  bool operator==(const QTable&) const = default;

 private:
  std::size_t index(std::size_t state, std::size_t action) const;

  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<double> values_;
  std::vector<std::uint64_t> visits_;
};

/// Geometric learning-rate decay from alpha_ini that reaches alpha_end after
/// `episodes` steps.
class LearningSchedule
{
 public:
  LearningSchedule(double alpha_ini, double alpha_end, std::size_t episodes);

  double alpha() const { return alpha_; }
  double factor() const { return factor_; }
  std::size_t steps() const { return steps_; }

  /// Advances one step and returns the new rate.
  double step();

 private:
  double alpha_ini_;
  double alpha_end_;
  std::size_t episodes_;
  double factor_;
  double alpha_;
  std::size_t steps_ = 0;
};

/// Lowest index among the minimal entries.
std::size_t argmin(std::span<const double> values);

/// Epsilon-greedy over costs: with probability 1 - epsilon the argmin,
/// otherwise a uniformly random index. Draws nothing when epsilon is 0.
std::size_t select_action(std::span<const double> qrow, double epsilon, Rng& rng);

/// Cost-minimizing TD update:
///   Q(s,a) += alpha * (reward + lambda * min_a' Q(s',a') - Q(s,a))
void q_update(QTable& table, std::size_t state, std::size_t action, double reward,
              std::size_t next_state, double alpha, double lambda);

/// Argmin action for every state.
std::vector<std::size_t> greedy_policy(const QTable& table);

// Text format: header line, then "agent_id,state_index,action_index,q_value,visits"
// per entry, values at 17 significant digits.
void write_qtables(std::ostream& out, std::span<const QTable> tables);
std::vector<QTable> read_qtables(std::istream& in);

}  // namespace offload
