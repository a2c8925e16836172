// Command-line front end: train, eval, compare, sweep-epsilon.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "offload/config.hpp"
#include "offload/harness.hpp"
#include "offload/learners.hpp"

namespace fs = std::filesystem;
using namespace offload;

namespace {

struct Options
{
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> users;
  std::optional<std::size_t> slots;
  std::vector<double> epsilons;
  std::string out_dir = "out";
  std::size_t seeds = 5;
  std::string qtables;
};

SimConfig base_config(const Options& opt)
{
  SimConfig config = opt.config_path.empty() ? default_config() : load_config(opt.config_path);
  if (opt.seed) {
    config.seed = *opt.seed;
  }
  if (!opt.users.empty()) {
    config.num_users = opt.users.front();
  }
  if (opt.epsilons.size() == 1) {
    config.learning.epsilon = opt.epsilons.front();
  }
  if (config.tracked_user >= config.num_users) {
    config.tracked_user = 0;
  }
  validate(config);
  return config;
}

std::ofstream open_output(const Options& opt, const std::string& name)
{
  fs::create_directories(opt.out_dir);
  const fs::path path = fs::path(opt.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  std::cout << "wrote " << path.string() << '\n';
  return out;
}

int run_train(const Options& opt)
{
  SimConfig config = base_config(opt);
  if (opt.slots) {
    config.learning.episodes = *opt.slots;
  }
  const TrainResult result = train(config);
  {
    auto out = open_output(opt, "trace.csv");
    write_trace_csv(out, result.trace, config);
  }
  {
    auto out = open_output(opt, "qtables.txt");
    write_qtables(out, result.tables);
  }
  {
    auto out = open_output(opt, "convergence.csv");
    write_convergence_csv(out, result.trace, config);
  }
  RunSummary summary = summarize(result.trace, config, "train");
  summary.final_alpha = result.final_alpha;
  {
    auto out = open_output(opt, "summary.csv");
    write_summary_csv(out, std::span(&summary, 1), config);
  }
  std::cout << "C_ave over training: " << summary.c_ave << '\n';
  return 0;
}

int run_eval(const Options& opt)
{
  SimConfig config = base_config(opt);
  const std::size_t slots = opt.slots.value_or(config.eval_slots);
  const fs::path tables_path =
      opt.qtables.empty() ? fs::path(opt.out_dir) / "qtables.txt" : fs::path(opt.qtables);
  std::ifstream in(tables_path);
  if (!in) {
    throw ConfigError("--qtables", "cannot open " + tables_path.string());
  }
  const std::vector<QTable> tables = read_qtables(in);
  const std::vector<RunSummary> runs = {
      evaluate(tables, config, slots),
      evaluate_centralized(config, slots),
      evaluate_random(config, slots),
  };
  auto out = open_output(opt, "summary.csv");
  write_summary_csv(out, runs, config);
  for (const auto& run : runs) {
    std::cout << run.scheme << ": C_ave=" << run.c_ave << " collisions=" << run.collisions
              << " final offloaders=" << run.final_offloaders << '\n';
  }
  return 0;
}

int run_compare(const Options& opt)
{
  SimConfig config = base_config(opt);
  if (opt.slots) {
    config.learning.episodes = *opt.slots;
  }
  std::vector<std::size_t> counts = opt.users;
  if (counts.empty()) {
    counts = {15, 21, 27, 33};
  }
  const auto rows = compare(config, counts);
  auto out = open_output(opt, "summary.csv");
  write_comparison_csv(out, rows, config);
  for (const auto& r : rows) {
    std::cout << r.users << " users, " << r.scheme << ": C_ave=" << r.c_ave << '\n';
  }
  return 0;
}

int run_sweep(const Options& opt)
{
  SimConfig config = base_config(opt);
  if (opt.slots) {
    config.learning.episodes = *opt.slots;
  }
  std::vector<double> epsilons = opt.epsilons;
  if (epsilons.size() <= 1) {
    epsilons = {0.1, 0.2, 0.5, 0.9};
  }
  const auto rows = sweep_epsilon(config, epsilons, opt.seeds);
  {
    auto out = open_output(opt, "summary.csv");
    write_sweep_csv(out, rows, config);
  }
  // convergence.csv: seed-averaged moving average of the tracked user, one column per epsilon
  auto out = open_output(opt, "convergence.csv");
  out << seed_header(config) << '\n' << "slot";
  for (double e : epsilons) {
    out << ",epsilon_" << e;
  }
  out << '\n';
  const std::size_t length = config.learning.episodes;
  for (std::size_t t = 0; t < length; ++t) {
    out << t;
    for (double e : epsilons) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& r : rows) {
        if (r.epsilon == e) {
          sum += r.tracked_moving_average[t];
          ++count;
        }
      }
      out << ',' << sum / static_cast<double>(count);
    }
    out << '\n';
  }
  for (const auto& r : rows) {
    std::cout << "epsilon=" << r.epsilon << " seed=" << r.seed
              << " tracked tail cost=" << r.tracked_tail_cost << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Multi-user computation offloading with independent Q-learners"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", opt.seed, "master seed");
    cmd->add_option("--out-dir", opt.out_dir, "output directory");
  };

  auto* train_cmd = app.add_subcommand("train", "train the independent learners");
  add_common(train_cmd);
  train_cmd->add_option("--users", opt.users, "number of users")->expected(1);
  train_cmd->add_option("--slots", opt.slots, "training slots");
  train_cmd->add_option("--epsilon", opt.epsilons, "exploration rate")->expected(1);

  auto* eval_cmd = app.add_subcommand("eval", "greedy evaluation of trained tables with baselines");
  add_common(eval_cmd);
  eval_cmd->add_option("--users", opt.users, "number of users")->expected(1);
  eval_cmd->add_option("--slots", opt.slots, "evaluation slots");
  eval_cmd->add_option("--qtables", opt.qtables, "tables file (default <out-dir>/qtables.txt)");

  auto* compare_cmd = app.add_subcommand("compare", "Centralized vs IL-MA-Q vs Random");
  add_common(compare_cmd);
  compare_cmd->add_option("--users", opt.users, "user counts")->expected(1, 64);
  compare_cmd->add_option("--slots", opt.slots, "training slots per count");
  compare_cmd->add_option("--epsilon", opt.epsilons, "exploration rate")->expected(1);

  auto* sweep_cmd = app.add_subcommand("sweep-epsilon", "convergence under several exploration rates");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--users", opt.users, "number of users")->expected(1);
  sweep_cmd->add_option("--slots", opt.slots, "training slots");
  sweep_cmd->add_option("--epsilon", opt.epsilons, "exploration rates")->expected(2, 64);
  sweep_cmd->add_option("--seeds", opt.seeds, "seeds per rate")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      return run_train(opt);
    }
    if (eval_cmd->parsed()) {
      return run_eval(opt);
    }
    if (compare_cmd->parsed()) {
      return run_compare(opt);
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(opt);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
