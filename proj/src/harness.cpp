#include "offload/harness.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace offload {

namespace {

TraceRecord make_record(std::size_t slot, std::size_t user, const LocalState& state,
                        const UserOutcome& outcome, const ActionCatalog& catalog,
                        bool capacity_ok)
{
  TraceRecord r;
  r.slot = slot;
  r.user = user;
  r.state_index = state.index();
  r.action_index = catalog.index_of(outcome.action);
  r.task_bits = outcome.task.size_bits;
  r.deadline_s = outcome.task.deadline_s;
  r.reward = outcome.reward;
  r.energy_j = outcome.energy_j();
  r.delay_s = outcome.delay_s();
  r.sinr_linear = outcome.sinr_linear;
  if (const Offload* offload = as_offload(outcome.action)) {
    r.rat = static_cast<long>(offload->channel.rat);
    r.subchannel = static_cast<long>(offload->channel.subchannel);
  }
  r.capacity_ok = capacity_ok;
  return r;
}

}  // namespace

double initial_q_value(const SimConfig& config, const UserProfile& user)
{
  const auto& learning = config.learning;
  if (learning.q_init) {
    return *learning.q_init;
  }
  Task mean_task;
  mean_task.size_bits = config.task_bits_min + (config.task_bits_max - config.task_bits_min) / 2;
  mean_task.deadline_s = 0.5 * (config.deadline_s_min + config.deadline_s_max);
  const double per_slot =
      local_execution_cost(mean_task, user, config.cycles_per_bit, config.beta).cost;
  return per_slot / (1.0 - learning.lambda);
}

TrainResult train(const SimConfig& config)
{
  validate(config);
  GameEnv env(config);
  const ActionCatalog catalog(config.rats);
  const std::size_t n = config.num_users;
  const auto& learning = config.learning;

  TrainResult result;
  for (std::size_t i = 0; i < n; ++i) {
    result.tables.push_back(QTable::for_agent(catalog.size(), initial_q_value(config, env.users()[i])));
  }
  result.trace.reserve(learning.episodes * n);

  std::vector<Rng> explore;
  explore.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    explore.emplace_back(derive_seed(config.seed, SeedStream::kExploration, i));
  }

  LearningSchedule schedule(learning.alpha_ini, learning.alpha_end, learning.episodes);
  std::vector<std::size_t> chosen(n);
  Assignment joint(n);

  for (std::size_t slot = 0; slot < learning.episodes; ++slot) {
    const std::vector<LocalState> states = env.states();
    for (std::size_t i = 0; i < n; ++i) {
      chosen[i] = select_action(result.tables[i].row(states[i].index()), learning.epsilon,
                                explore[i]);
      joint[i] = catalog.action(chosen[i]);
    }
    const SlotOutcome outcome = env.step(joint);
    for (std::size_t i = 0; i < n; ++i) {
      const UserOutcome& u = outcome.users[i];
      q_update(result.tables[i], states[i].index(), chosen[i], u.reward, u.next_state.index(),
               schedule.alpha(), learning.lambda);
      result.trace.push_back(make_record(slot, i, states[i], u, catalog, outcome.capacity_ok));
    }
    schedule.step();
  }
  result.final_alpha = schedule.alpha();
  return result;
}

std::uint64_t evaluation_seed(const SimConfig& config)
{
  return derive_seed(config.seed, SeedStream::kEvaluation);
}

RunSummary summarize(std::span<const TraceRecord> trace, const SimConfig& config,
                     std::string scheme)
{
  const std::size_t n = config.num_users;
  const std::size_t slots = n == 0 ? 0 : trace.size() / n;
  const std::size_t channels = config.total_channels();

  RunSummary summary;
  summary.scheme = std::move(scheme);
  summary.users = n;
  summary.slots = slots;
  summary.seed = config.seed;
  summary.env_seed = config.seed;
  summary.per_user_cost.assign(n, 0.0);
  summary.fleet_series.assign(slots, 0.0);

  double total = 0.0;
  for (const auto& r : trace) {
    summary.per_user_cost[r.user] += r.reward;
    summary.fleet_series[r.slot] += r.reward;
    total += r.reward;
  }
  for (auto& cost : summary.per_user_cost) {
    cost = slots == 0 ? 0.0 : cost / static_cast<double>(slots);
  }
  for (auto& cost : summary.fleet_series) {
    cost /= static_cast<double>(n);
  }
  summary.c_ave = slots == 0 ? 0.0 : total / static_cast<double>(slots * n);
  summary.moving_average = moving_average(summary.fleet_series, config.ma_window);

  for (std::size_t slot = 0; slot < slots; ++slot) {
    Occupancy occupancy;
    for (const auto& r : trace.subspan(slot * n, n)) {
      if (r.rat >= 0) {
        occupancy[ChannelId{static_cast<std::size_t>(r.rat), static_cast<std::size_t>(r.subchannel)}]
            .push_back(r.user);
      }
    }
    summary.occupancy_histogram[0] += channels - occupancy.size();
    for (const auto& [channel, occupants] : occupancy) {
      ++summary.occupancy_histogram[occupants.size()];
      if (occupants.size() >= 2) {
        ++summary.collisions;
      }
    }
    if (slot + 1 == slots) {
      summary.final_offloaders = 0;
      for (const auto& [channel, occupants] : occupancy) {
        summary.final_offloaders += occupants.size();
      }
      summary.final_occupancy = std::move(occupancy);
    }
  }
  return summary;
}

RunSummary run_policy(const SimConfig& config, std::size_t slots, std::uint64_t env_seed,
                      const JointPolicy& policy, std::string scheme)
{
  GameEnv env(config);
  env.reset(env_seed);
  const ActionCatalog catalog(config.rats);
  const std::size_t n = config.num_users;

  std::vector<TraceRecord> trace;
  trace.reserve(slots * n);
  for (std::size_t slot = 0; slot < slots; ++slot) {
    const std::vector<LocalState> states = env.states();
    const SlotDraw& draw = env.begin_slot();
    const Assignment joint = policy(env, draw);
    const SlotOutcome outcome = env.step(joint);
    for (std::size_t i = 0; i < n; ++i) {
      trace.push_back(make_record(slot, i, states[i], outcome.users[i], catalog,
                                  outcome.capacity_ok));
    }
  }

  RunSummary summary = summarize(trace, config, std::move(scheme));
  summary.env_seed = env_seed;
  summary.trace = std::move(trace);
  return summary;
}

RunSummary evaluate(std::span<const QTable> tables, const SimConfig& config, std::size_t slots)
{
  if (tables.size() != config.num_users) {
    throw ConfigError("qtables", "have " + std::to_string(tables.size()) + " tables for " +
                                     std::to_string(config.num_users) + " users");
  }
  const ActionCatalog catalog(config.rats);
  for (const auto& table : tables) {
    if (table.num_actions() != catalog.size() || table.num_states() != LocalState::kCount) {
      throw ConfigError("qtables", "table shape does not match the action catalog");
    }
  }
  const JointPolicy greedy = [&](const GameEnv& env, const SlotDraw&) {
    Assignment joint;
    joint.reserve(tables.size());
    for (std::size_t i = 0; i < tables.size(); ++i) {
      joint.push_back(catalog.action(argmin(tables[i].row(env.states()[i].index()))));
    }
    return joint;
  };
  return run_policy(config, slots, evaluation_seed(config), greedy, kLearned);
}

RunSummary evaluate_random(const SimConfig& config, std::size_t slots)
{
  const ActionCatalog catalog(config.rats);
  std::vector<Rng> rngs;
  for (std::size_t i = 0; i < config.num_users; ++i) {
    rngs.emplace_back(derive_seed(config.seed, SeedStream::kRandomPolicy, i));
  }
  const JointPolicy random = [&](const GameEnv&, const SlotDraw&) {
    Assignment joint;
    joint.reserve(rngs.size());
    for (auto& rng : rngs) {
      joint.push_back(catalog.action(random_policy(catalog, rng)));
    }
    return joint;
  };
  return run_policy(config, slots, evaluation_seed(config), random, kRandom);
}

RunSummary evaluate_centralized(const SimConfig& config, std::size_t slots)
{
  const JointPolicy central = [](const GameEnv& env, const SlotDraw& draw) {
    return centralized_allocate(env.config(), env.users(), draw);
  };
  return run_policy(config, slots, evaluation_seed(config), central, kCentralized);
}

std::vector<ComparisonRow> compare(const SimConfig& config, std::span<const std::size_t> user_counts)
{
  std::vector<ComparisonRow> rows;
  for (std::size_t users : user_counts) {
    SimConfig c = config;
    c.num_users = users;
    if (c.tracked_user >= users) {
      c.tracked_user = 0;
    }
    validate(c);
    const TrainResult trained = train(c);
    const RunSummary runs[] = {
        evaluate_centralized(c, c.eval_slots),
        evaluate(trained.tables, c, c.eval_slots),
        evaluate_random(c, c.eval_slots),
    };
    for (const auto& run : runs) {
      rows.push_back(ComparisonRow{users, run.scheme, run.c_ave, run.per_user_cost[c.tracked_user],
                                   run.collisions, run.final_offloaders});
    }
  }
  return rows;
}

std::vector<EpsilonSweepRow> sweep_epsilon(const SimConfig& config,
                                           std::span<const double> epsilons, std::size_t seeds,
                                           std::size_t tail)
{
  std::vector<EpsilonSweepRow> rows;
  for (double epsilon : epsilons) {
    for (std::size_t k = 0; k < seeds; ++k) {
      SimConfig c = config;
      c.learning.epsilon = epsilon;
      c.seed = config.seed + k;
      const TrainResult trained = train(c);
      const auto tracked = user_cost_series(trained.trace, c.tracked_user);
      const auto fleet = fleet_cost_series(trained.trace, c.num_users);
      EpsilonSweepRow row;
      row.epsilon = epsilon;
      row.seed = c.seed;
      row.tracked_tail_cost = tail_mean(tracked, tail);
      row.fleet_tail_cost = tail_mean(fleet, tail);
      row.tracked_moving_average = moving_average(tracked, c.ma_window);
      row.tracked_tail_drift = tail_relative_drift(row.tracked_moving_average, 2 * tail);
      row.fleet_moving_average = moving_average(fleet, c.ma_window);
      row.fleet_tail_drift = tail_relative_drift(row.fleet_moving_average, 2 * tail);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window)
{
  window = std::max<std::size_t>(window, 1);
  std::vector<double> out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    const std::size_t begin = t + 1 >= window ? t + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = begin; k <= t; ++k) {
      sum += series[k];
    }
    out[t] = sum / static_cast<double>(t + 1 - begin);
  }
  return out;
}

std::vector<double> user_cost_series(std::span<const TraceRecord> trace, std::size_t user)
{
  std::vector<double> out;
  for (const auto& r : trace) {
    if (r.user == user) {
      out.push_back(r.reward);
    }
  }
  return out;
}

std::vector<double> fleet_cost_series(std::span<const TraceRecord> trace, std::size_t users)
{
  std::vector<double> out(users == 0 ? 0 : trace.size() / users, 0.0);
  for (const auto& r : trace) {
    out[r.slot] += r.reward;
  }
  for (auto& v : out) {
    v /= static_cast<double>(users);
  }
  return out;
}

double tail_mean(std::span<const double> series, std::size_t tail)
{
  if (series.empty()) {
    return 0.0;
  }
  const auto part = series.last(std::min(tail, series.size()));
  return std::accumulate(part.begin(), part.end(), 0.0) / static_cast<double>(part.size());
}

double tail_relative_drift(std::span<const double> series, std::size_t tail)
{
  const auto part = series.last(std::min(tail, series.size()));
  const double n = static_cast<double>(part.size());
  if (part.size() < 2) {
    return 0.0;
  }
  const double x_mean = (n - 1.0) / 2.0;
  const double y_mean = std::accumulate(part.begin(), part.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < part.size(); ++k) {
    const double dx = static_cast<double>(k) - x_mean;
    sxy += dx * (part[k] - y_mean);
    sxx += dx * dx;
  }
  return (sxy / sxx) * n / y_mean;
}

std::string seed_header(const SimConfig& config)
{
  std::ostringstream out;
  out << "# seed=" << config.seed << " eval_seed=" << evaluation_seed(config)
      << " splitter=splitmix64 users=" << config.num_users
      << " episodes=" << config.learning.episodes << " epsilon=" << config.learning.epsilon;
  return out.str();
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace,
                     const SimConfig& config)
{
  out << seed_header(config) << '\n';
  out << "slot,user,state_index,action_index,task_bits,deadline_s,reward,energy_j,delay_s,"
         "sinr_linear,rat,subchannel,capacity_ok\n";
  const auto precision = out.precision(17);
  for (const auto& r : trace) {
    out << r.slot << ',' << r.user << ',' << r.state_index << ',' << r.action_index << ','
        << r.task_bits << ',' << r.deadline_s << ',' << r.reward << ',' << r.energy_j << ','
        << r.delay_s << ',' << r.sinr_linear << ',' << r.rat << ',' << r.subchannel << ',' << (r.capacity_ok ? 1 : 0) << '\n';
  }
  out.precision(precision);
}

void write_convergence_csv(std::ostream& out, std::span<const TraceRecord> trace,
                           const SimConfig& config)
{
  const auto tracked = moving_average(user_cost_series(trace, config.tracked_user), config.ma_window);
  const auto fleet = moving_average(fleet_cost_series(trace, config.num_users), config.ma_window);
  out << seed_header(config) << '\n';
  out << "slot,user_" << config.tracked_user << "_ma,fleet_ma\n";
  const auto precision = out.precision(10);
  for (std::size_t t = 0; t < fleet.size(); ++t) {
    out << t << ',' << tracked[t] << ',' << fleet[t] << '\n';
  }
  out.precision(precision);
}

void write_summary_csv(std::ostream& out, std::span<const RunSummary> runs,
                       const SimConfig& config)
{
  out << seed_header(config) << '\n';
  out << "scheme,users,slots,env_seed,c_ave,tracked_user_cost,collisions,final_offloaders,"
         "final_alpha\n";
  const auto precision = out.precision(10);
  for (const auto& run : runs) {
    const double tracked =
        config.tracked_user < run.per_user_cost.size() ? run.per_user_cost[config.tracked_user] : 0.0;
    out << run.scheme << ',' << run.users << ',' << run.slots << ',' << run.env_seed << ','
        << run.c_ave << ',' << tracked << ',' << run.collisions << ',' << run.final_offloaders
        << ',' << run.final_alpha << '\n';
  }
  out.precision(precision);
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows,
                          const SimConfig& config)
{
  out << seed_header(config) << '\n';
  out << "users,scheme,c_ave,tracked_user_cost,collisions,final_offloaders\n";
  const auto precision = out.precision(10);
  for (const auto& r : rows) {
    out << r.users << ',' << r.scheme << ',' << r.c_ave << ',' << r.tracked_user_cost << ','
        << r.collisions << ',' << r.final_offloaders << '\n';
  }
  out.precision(precision);
}

void write_sweep_csv(std::ostream& out, std::span<const EpsilonSweepRow> rows,
                     const SimConfig& config)
{
  out << seed_header(config) << '\n';
  out << "epsilon,seed,tracked_tail_cost,fleet_tail_cost,tracked_tail_drift,fleet_tail_drift\n";
  const auto precision = out.precision(10);
  for (const auto& r : rows) {
    out << r.epsilon << ',' << r.seed << ',' << r.tracked_tail_cost << ',' << r.fleet_tail_cost
        << ',' << r.tracked_tail_drift << ',' << r.fleet_tail_drift << '\n';
  }
  out.precision(precision);
}

}  // namespace offload
