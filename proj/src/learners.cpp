#include "offload/learners.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace offload {

ActionCatalog::ActionCatalog(const std::vector<RatSpec>& rats)
{
  actions_.emplace_back(Local{});
  for (std::size_t r = 0; r < rats.size(); ++r) {
    rat_offset_.push_back(actions_.size());
    subchannels_.push_back(rats[r].num_subchannels);
    power_levels_.push_back(rats[r].power_levels_w);
    for (std::size_t m = 0; m < rats[r].num_subchannels; ++m) {
      for (double power : rats[r].power_levels_w) {
        actions_.emplace_back(Offload{ChannelId{r, m}, power});
      }
    }
  }
}

std::size_t ActionCatalog::index_of(const Action& action) const
{
  const Offload* offload = as_offload(action);
  if (offload == nullptr) {
    return 0;
  }
  const std::size_t r = offload->channel.rat;
  if (r >= rat_offset_.size()) {
    throw std::out_of_range("action RAT not in catalog");
  }
  const auto& levels = power_levels_[r];
  const auto level = std::find(levels.begin(), levels.end(), offload->power_w);
  if (level == levels.end() || offload->channel.subchannel >= subchannels_[r]) {
    throw std::out_of_range("action not in catalog");
  }
  return rat_offset_[r] + offload->channel.subchannel * levels.size() +
         static_cast<std::size_t>(level - levels.begin());
}

QTable::QTable(std::size_t num_states, std::size_t num_actions, double initial)
    : num_states_(num_states),
      num_actions_(num_actions),
      values_(num_states * num_actions, initial),
      visits_(num_states * num_actions, 0)
{
  if (num_states == 0 || num_actions == 0) {
    throw std::invalid_argument("Q table needs at least one state and one action");
  }
}

std::size_t QTable::index(std::size_t state, std::size_t action) const
{
  if (state >= num_states_ || action >= num_actions_) {
    throw std::out_of_range("Q table index out of range");
  }
  return state * num_actions_ + action;
}

double QTable::value(std::size_t state, std::size_t action) const
{
  return values_[index(state, action)];
}

void QTable::set_value(std::size_t state, std::size_t action, double value)
{
  values_[index(state, action)] = value;
}

std::uint64_t QTable::visits(std::size_t state, std::size_t action) const
{
  return visits_[index(state, action)];
}

void QTable::set_visits(std::size_t state, std::size_t action, std::uint64_t visits)
{
  visits_[index(state, action)] = visits;
}

std::span<const double> QTable::row(std::size_t state) const
{
  return std::span<const double>(values_).subspan(index(state, 0), num_actions_);
}

LearningSchedule::LearningSchedule(double alpha_ini, double alpha_end, std::size_t episodes)
    : alpha_ini_(alpha_ini), alpha_end_(alpha_end), episodes_(episodes), alpha_(alpha_ini)
{
  if (!(alpha_end_ > 0.0 && alpha_end_ <= alpha_ini_ && alpha_ini_ <= 1.0)) {
    throw std::invalid_argument("learning rates must satisfy 0 < alpha_end <= alpha_ini <= 1");
  }
  factor_ = episodes_ == 0
                ? 1.0
                : std::pow(alpha_end_ / alpha_ini_, 1.0 / static_cast<double>(episodes_));
}

double LearningSchedule::step()
{
  alpha_ *= factor_;
  ++steps_;
  return alpha_;
}

std::size_t argmin(std::span<const double> values)
{
  return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) -
                                  values.begin());
}

std::size_t select_action(std::span<const double> qrow, double epsilon, Rng& rng)
{
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::uniform_int_distribution<std::size_t> pick(0, qrow.size() - 1);
      return pick(rng);
    }
  }
  return argmin(qrow);
}

void q_update(QTable& table, std::size_t state, std::size_t action, double reward,
              std::size_t next_state, double alpha, double lambda)
{
  const auto next = table.row(next_state);
  const double target = reward + lambda * *std::min_element(next.begin(), next.end());
  const double current = table.value(state, action);
  table.set_value(state, action, current + alpha * (target - current));
  table.set_visits(state, action, table.visits(state, action) + 1);
}

std::vector<std::size_t> greedy_policy(const QTable& table)
{
  std::vector<std::size_t> policy(table.num_states());
  for (std::size_t s = 0; s < table.num_states(); ++s) {
    policy[s] = argmin(table.row(s));
  }
  return policy;
}

void write_qtables(std::ostream& out, std::span<const QTable> tables)
{
  out << "agent_id,state_index,action_index,q_value,visits\n";
  const auto precision = out.precision(17);
  for (std::size_t agent = 0; agent < tables.size(); ++agent) {
    const QTable& t = tables[agent];
    for (std::size_t s = 0; s < t.num_states(); ++s) {
      for (std::size_t a = 0; a < t.num_actions(); ++a) {
        out << agent << ',' << s << ',' << a << ',' << t.value(s, a) << ',' << t.visits(s, a)
            << '\n';
      }
    }
  }
  out.precision(precision);
}

std::vector<QTable> read_qtables(std::istream& in)
{
  struct Entry
  {
    std::size_t agent, state, action;
    double value;
    std::uint64_t visits;
  };

  std::string line;
  if (!std::getline(in, line) || line != "agent_id,state_index,action_index,q_value,visits") {
    throw std::runtime_error("qtables: missing or malformed header");
  }
  std::vector<Entry> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::istringstream fields(line);
    Entry e{};
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    fields >> e.agent >> c1 >> e.state >> c2 >> e.action >> c3 >> e.value >> c4 >> e.visits;
    if (!fields || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || !std::isfinite(e.value)) {
      throw std::runtime_error("qtables: malformed record on line " + std::to_string(line_no));
    }
    entries.push_back(e);
  }

  std::size_t agents = 0, states = 0, actions = 0;
  for (const auto& e : entries) {
    agents = std::max(agents, e.agent + 1);
    states = std::max(states, e.state + 1);
    actions = std::max(actions, e.action + 1);
  }
  std::vector<QTable> tables(agents, QTable(std::max<std::size_t>(states, 1),
                                            std::max<std::size_t>(actions, 1)));
  for (const auto& e : entries) {
    tables[e.agent].set_value(e.state, e.action, e.value);
    tables[e.agent].set_visits(e.state, e.action, e.visits);
  }
  return tables;
}

}  // namespace offload
