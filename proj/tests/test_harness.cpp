#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "offload/harness.hpp"

using namespace offload;

namespace {

SimConfig small_config(std::size_t users = 5, std::size_t slots = 300)
{
  SimConfig c = default_config();
  c.num_users = users;
  c.learning.episodes = slots;
  c.eval_slots = 100;
  c.ma_window = 20;
  return c;
}

// Reward rebuilt from a logged record: energy + beta * delay plus whichever
// penalty the logged bits imply.
double recompute_reward(const TraceRecord& r, const SimConfig& c)
{
  double penalty = 0.0;
  if (r.rat >= 0) {
    const bool decoded =
        r.sinr_linear >= c.rats[static_cast<std::size_t>(r.rat)].sinr_threshold_linear;
    if (!decoded) {
      penalty = c.varpi;
    } else if (!r.capacity_ok) {
      penalty = c.omega;
    }
  }
  return r.energy_j + c.beta * r.delay_s + penalty;
}

}  // namespace

TEST(Series, MovingAverageHandExample)
{
  const std::vector<double> series = {0.0, 10.0};
  EXPECT_EQ(moving_average(series, 2), (std::vector<double>{0.0, 5.0}));
  const std::vector<double> longer = {1, 2, 3, 4, 5};
  EXPECT_EQ(moving_average(longer, 3), (std::vector<double>{1.0, 1.5, 2.0, 3.0, 4.0}));
}

TEST(Series, TailHelpers)
{
  std::vector<double> line(100);
  for (std::size_t k = 0; k < line.size(); ++k) {
    line[k] = 10.0 + 0.5 * static_cast<double>(k);
  }
  EXPECT_DOUBLE_EQ(tail_mean(line, 10), 10.0 + 0.5 * 94.5);
  // slope 0.5 over 20 samples, tail mean 10 + 0.5 * 89.5
  EXPECT_NEAR(tail_relative_drift(line, 20), 0.5 * 20.0 / (10.0 + 0.5 * 89.5), 1e-12);
  const std::vector<double> flat(50, 3.0);
  EXPECT_EQ(tail_relative_drift(flat, 50), 0.0);
}

TEST(InitialValue, ExplicitOrLocalBaseline)
{
  SimConfig c = small_config();
  UserProfile u;
  u.cpu_hz = 8e8;
  c.learning.q_init = 4.0;
  EXPECT_EQ(initial_q_value(c, u), 4.0);
  c.learning.q_init.reset();
  Task mean_task;
  mean_task.size_bits = 2'005'000;
  const double per_slot = local_execution_cost(mean_task, u, 500.0, 5.0).cost;
  EXPECT_NEAR(initial_q_value(c, u), per_slot / 0.1, 1e-9 * per_slot);
}

TEST(Train, TraceShapeAndRecomputableRewards)
{
  const SimConfig c = small_config();
  const TrainResult result = train(c);
  ASSERT_EQ(result.tables.size(), c.num_users);
  ASSERT_EQ(result.trace.size(), c.num_users * c.learning.episodes);
  EXPECT_NEAR(result.final_alpha, 0.001, 1e-12);
  for (std::size_t k = 0; k < result.trace.size(); ++k) {
    const auto& r = result.trace[k];
    EXPECT_EQ(r.slot, k / c.num_users);
    EXPECT_EQ(r.user, k % c.num_users);
    EXPECT_NEAR(r.reward, recompute_reward(r, c), 1e-9 * r.reward);
    EXPECT_EQ(r.rat < 0, r.action_index == 0);
    EXPECT_GE(r.task_bits, c.task_bits_min);
    EXPECT_LE(r.task_bits, c.task_bits_max);
    EXPECT_GE(r.deadline_s, c.deadline_s_min);
    EXPECT_LE(r.deadline_s, c.deadline_s_max);
  }
  const RunSummary summary = summarize(result.trace, c, "train");
  double sum = 0.0;
  for (const auto& r : result.trace) {
    sum += r.reward;
  }
  const double mean = sum / static_cast<double>(result.trace.size());
  EXPECT_NEAR(summary.c_ave, mean, 1e-9 * mean);
}

TEST(Train, StatesFollowFromPreviousOutcome)
{
  const SimConfig c = small_config(4, 200);
  const TrainResult result = train(c);
  for (std::size_t i = 0; i < c.num_users; ++i) {
    EXPECT_EQ(result.trace[i].state_index, LocalState::initial().index());
  }
  for (std::size_t k = c.num_users; k < result.trace.size(); ++k) {
    const auto& prev = result.trace[k - c.num_users];
    const LocalState s = LocalState::from_index(result.trace[k].state_index);
    EXPECT_EQ(s.transmitted, prev.rat >= 0);
    EXPECT_EQ(s.capacity_ok, prev.capacity_ok);
    if (prev.rat >= 0) {
      EXPECT_EQ(s.received, prev.sinr_linear >= c.rats[static_cast<std::size_t>(prev.rat)].sinr_threshold_linear);
    } else {
      EXPECT_FALSE(s.received);
    }
  }
}

TEST(Train, Deterministic)
{
  const SimConfig c = small_config();
  const TrainResult a = train(c);
  const TrainResult b = train(c);
  EXPECT_TRUE(a.trace == b.trace);
  EXPECT_TRUE(a.tables == b.tables);
  SimConfig other = c;
  other.seed = 2;
  EXPECT_FALSE(train(other).trace == a.trace);
}

TEST(Train, PureExploitationFollowsArgmin)
{
  SimConfig c = small_config(3, 400);
  c.learning.epsilon = 0.0;
  c.learning.q_init = 0.0;
  const TrainResult result = train(c);
  // replay the updates and check every choice was the argmin at that moment
  std::vector<QTable> tables(c.num_users, QTable::for_agent(ActionCatalog(c.rats).size()));
  LearningSchedule schedule(c.learning.alpha_ini, c.learning.alpha_end, c.learning.episodes);
  for (std::size_t slot = 0; slot < c.learning.episodes; ++slot) {
    for (std::size_t i = 0; i < c.num_users; ++i) {
      const auto& r = result.trace[slot * c.num_users + i];
      ASSERT_EQ(r.action_index, argmin(tables[i].row(r.state_index))) << "slot " << slot;
      const std::size_t next = result.trace.size() > (slot + 1) * c.num_users
                                   ? result.trace[(slot + 1) * c.num_users + i].state_index
                                   : 0;
      if (slot + 1 < c.learning.episodes) {
        q_update(tables[i], r.state_index, r.action_index, r.reward, next, schedule.alpha(),
                 c.learning.lambda);
      }
    }
    schedule.step();
  }
}

TEST(Train, SingleUserLearnsLocalWhenOffloadIsDominated)
{
  SimConfig c = default_config();
  c.num_users = 1;
  c.rats = {make_rat("WiFi", 5e6, -160.0, 10.0, 1, 1.0, 1.0, 1)};
  c.learning.episodes = 3000;
  c.learning.q_init = 0.0;
  const TrainResult result = train(c);
  EXPECT_EQ(greedy_policy(result.tables[0])[LocalState::initial().index()], 0u);
}

TEST(Evaluate, ZeroTablesKeepEveryoneLocal)
{
  const SimConfig c = small_config(6);
  const std::vector<QTable> zeros(c.num_users, QTable::for_agent(ActionCatalog(c.rats).size()));
  const RunSummary run = evaluate(zeros, c, 50);
  EXPECT_EQ(run.collisions, 0u);
  EXPECT_EQ(run.final_offloaders, 0u);
  GameEnv env(c);
  env.reset(evaluation_seed(c));
  double sum = 0.0;
  for (int slot = 0; slot < 50; ++slot) {
    const auto& draw = env.begin_slot();
    for (std::size_t i = 0; i < c.num_users; ++i) {
      sum += local_execution_cost(draw.tasks[i], env.users()[i], c.cycles_per_bit, c.beta).cost;
    }
    env.step(std::vector<Action>(c.num_users, Local{}));
  }
  EXPECT_NEAR(run.c_ave, sum / (50.0 * static_cast<double>(c.num_users)), 1e-9 * run.c_ave);
}

TEST(Evaluate, RejectsMismatchedTables)
{
  const SimConfig c = small_config(3);
  const std::vector<QTable> two(2, QTable::for_agent(70));
  EXPECT_THROW(evaluate(two, c, 10), ConfigError);
  const std::vector<QTable> narrow(3, QTable::for_agent(5));
  EXPECT_THROW(evaluate(narrow, c, 10), ConfigError);
}

TEST(Evaluate, SchemesSeeIdenticalDraws)
{
  const SimConfig c = small_config(4);
  const RunSummary a = evaluate_random(c, 30);
  const RunSummary b = evaluate_centralized(c, 30);
  EXPECT_EQ(a.env_seed, b.env_seed);
  // identical sampled tasks show up as identical local costs for users who stayed local in both
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    if (a.trace[k].rat < 0 && b.trace[k].rat < 0) {
      EXPECT_EQ(a.trace[k].reward, b.trace[k].reward);
    }
  }
}

TEST(Summary, OccupancyBookkeeping)
{
  const SimConfig c = small_config(8);
  const RunSummary run = evaluate_random(c, 40);
  std::size_t pairs = 0;
  std::size_t users_on_air = 0;
  std::size_t collisions = 0;
  for (const auto& [occupants, count] : run.occupancy_histogram) {
    pairs += count;
    users_on_air += occupants * count;
    collisions += occupants >= 2 ? count : 0;
  }
  EXPECT_EQ(pairs, 40u * c.total_channels());
  EXPECT_EQ(collisions, run.collisions);
  std::size_t offloads = 0;
  for (const auto& r : run.trace) {
    offloads += r.rat >= 0;
  }
  EXPECT_EQ(users_on_air, offloads);
}

TEST(Compare, SingleUserWithDominatedOffloading)
{
  SimConfig c = small_config(1, 2000);
  c.eval_slots = 200;
  const std::vector<std::size_t> counts = {1};
  const auto rows = compare(c, counts);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].scheme, kCentralized);
  EXPECT_EQ(rows[1].scheme, kLearned);
  EXPECT_EQ(rows[2].scheme, kRandom);
  EXPECT_NEAR(rows[1].c_ave, rows[0].c_ave, 1e-9 * rows[0].c_ave);
  EXPECT_GT(rows[2].c_ave, rows[0].c_ave);
}

TEST(Output, CsvHeadersCarrySeeds)
{
  const SimConfig c = small_config(2, 30);
  const TrainResult result = train(c);
  std::ostringstream trace;
  write_trace_csv(trace, result.trace, c);
  std::istringstream lines(trace.str());
  std::string first;
  std::string second;
  std::getline(lines, first);
  std::getline(lines, second);
  EXPECT_EQ(first.rfind("# seed=1 eval_seed=", 0), 0u);
  EXPECT_NE(first.find("splitter=splitmix64"), std::string::npos);
  EXPECT_EQ(second, "slot,user,state_index,action_index,task_bits,deadline_s,reward,energy_j,"
                    "delay_s,sinr_linear,rat,subchannel,capacity_ok");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    ++rows;
  }
  EXPECT_EQ(rows, result.trace.size());

  std::ostringstream convergence;
  write_convergence_csv(convergence, result.trace, c);
  EXPECT_NE(convergence.str().find("slot,user_0_ma,fleet_ma\n"), std::string::npos);
}
