#include "offload/game_env.hpp"

#include <algorithm>
#include <string>

namespace offload {

void validate(const Action& action, const SimConfig& config)
{
  const Offload* offload = as_offload(action);
  if (offload == nullptr) {
    return;
  }
  if (offload->channel.rat >= config.rats.size()) {
    throw ConfigError("action.rat", "no RAT with index " + std::to_string(offload->channel.rat));
  }
  const RatSpec& rat = config.rats[offload->channel.rat];
  if (offload->channel.subchannel >= rat.num_subchannels) {
    throw ConfigError("action.subchannel",
                      rat.name + " has no sub-channel " + std::to_string(offload->channel.subchannel));
  }
  const auto& levels = rat.power_levels_w;
  if (std::find(levels.begin(), levels.end(), offload->power_w) == levels.end()) {
    throw ConfigError("action.power_w", "not a power level of " + rat.name);
  }
}

GainMatrix::GainMatrix(std::size_t users, const std::vector<RatSpec>& rats) : users_(users)
{
  for (const auto& rat : rats) {
    rat_offset_.push_back(channels_);
    channels_ += rat.num_subchannels;
  }
  gains_.assign(users_ * channels_, 0.0);
}

std::size_t GainMatrix::flat_channel(ChannelId channel) const
{
  return rat_offset_.at(channel.rat) + channel.subchannel;
}

double GainMatrix::at(std::size_t user, ChannelId channel) const
{
  return gains_.at(user * channels_ + flat_channel(channel));
}

double& GainMatrix::at(std::size_t user, ChannelId channel)
{
  return gains_.at(user * channels_ + flat_channel(channel));
}

double UserOutcome::energy_j() const
{
  double total = 0.0;
  for (const auto* part : {&local, &edge, &transmission}) {
    if (*part) {
      total += (*part)->energy_j;
    }
  }
  return total;
}

double UserOutcome::delay_s() const
{
  double total = 0.0;
  for (const auto* part : {&local, &edge, &transmission}) {
    if (*part) {
      total += (*part)->delay_s;
    }
  }
  return total;
}

double compute_w_all(std::span<const Action> actions, std::span<const Task> tasks,
                     std::span<const double> sinrs, const SimConfig& config)
{
  double cycles = 0.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const Offload* offload = as_offload(actions[i]);
    if (offload == nullptr) {
      continue;
    }
    if (sinrs[i] >= config.rats[offload->channel.rat].sinr_threshold_linear) {
      cycles += static_cast<double>(tasks[i].size_bits) * config.cycles_per_bit;
    }
  }
  return cycles;
}

SlotOutcome resolve_slot(const SimConfig& config, std::span<const UserProfile> users,
                         const SlotDraw& draw, std::span<const Action> actions)
{
  const std::size_t n = actions.size();
  SlotOutcome out;
  out.users.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    if (const Offload* offload = as_offload(actions[i])) {
      out.occupancy[offload->channel].push_back(i);
    }
  }

  std::vector<double> sinrs(n, 0.0);
  std::vector<Interferer> interferers;
  for (const auto& [channel, occupants] : out.occupancy) {
    const RatSpec& rat = config.rats[channel.rat];
    for (std::size_t i : occupants) {
      interferers.clear();
      for (std::size_t z : occupants) {
        if (z != i) {
          interferers.push_back({draw.gains.at(z, channel), as_offload(actions[z])->power_w});
        }
      }
      sinrs[i] = sinr(as_offload(actions[i])->power_w, draw.gains.at(i, channel), rat.noise_w,
                      interferers);
    }
  }

  out.w_all_cycles = compute_w_all(actions, draw.tasks, sinrs, config);
  out.capacity_ok = out.w_all_cycles <= config.edge.capacity_cycles();

  for (std::size_t i = 0; i < n; ++i) {
    UserOutcome& u = out.users[i];
    u.action = actions[i];
    u.task = draw.tasks[i];
    const Offload* offload = as_offload(actions[i]);
    if (offload == nullptr) {
      u.branch = RewardBranch::kLocal;
      u.local = local_execution_cost(u.task, users[i], config.cycles_per_bit, config.beta);
      u.reward = u.local->cost;
      u.next_state = LocalState{false, false, out.capacity_ok};
      continue;
    }

    const RatSpec& rat = config.rats[offload->channel.rat];
    u.sinr_linear = sinrs[i];
    u.rate_bps = transmission_rate(rat.bandwidth_hz, u.sinr_linear);
    u.transmission = transmission_cost(u.task, offload->power_w, u.rate_bps,
                                       config.edge.slot_s, config.beta);
    if (u.sinr_linear >= rat.sinr_threshold_linear) {
      u.edge = edge_execution_cost(u.task, config.edge, config.cycles_per_bit, config.beta);
      if (out.capacity_ok) {
        u.branch = RewardBranch::kOffloaded;
      } else {
        u.branch = RewardBranch::kEdgeOverload;
        u.penalty = config.omega;
      }
      u.reward = u.edge->cost + u.transmission->cost + u.penalty;
      u.next_state = LocalState{true, true, out.capacity_ok};
    } else {
      u.branch = RewardBranch::kFailed;
      u.penalty = config.varpi;
      u.reward = u.transmission->cost + u.penalty;
      u.next_state = LocalState{true, false, out.capacity_ok};
    }
  }
  return out;
}

std::vector<UserProfile> sample_users(const SimConfig& config, std::uint64_t seed)
{
  std::vector<UserProfile> users;
  users.reserve(config.num_users);
  for (std::size_t i = 0; i < config.num_users; ++i) {
    Rng rng(derive_seed(seed, SeedStream::kProfiles, i));
    std::normal_distribution<double> distance(config.distance_mean_m, config.distance_sd_m);
    std::uniform_real_distribution<double> cpu(config.user_cpu_hz_min, config.user_cpu_hz_max);
    UserProfile user;
    user.id = i;
    do {
      user.distance_m = distance(rng);
    } while (user.distance_m <= 0.0);
    user.cpu_hz = config.user_cpu_hz_min == config.user_cpu_hz_max ? config.user_cpu_hz_min
                                                                    : cpu(rng);
    user.energy_per_cycle_j = config.user_energy_per_cycle_j;
    users.push_back(user);
  }
  return users;
}

GameEnv::GameEnv(SimConfig config) : config_(std::move(config))
{
  validate(config_);
  users_ = sample_users(config_, config_.seed);
  reset(config_.seed);
}

std::vector<LocalState> GameEnv::reset(std::uint64_t seed)
{
  const std::size_t n = config_.num_users;
  task_rngs_.clear();
  gain_rngs_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    task_rngs_.emplace_back(derive_seed(seed, SeedStream::kTasks, i));
    gain_rngs_.emplace_back(derive_seed(seed, SeedStream::kGains, i));
  }
  states_.assign(n, LocalState::initial());
  pending_.reset();
  slot_ = 0;
  return states_;
}

const SlotDraw& GameEnv::begin_slot()
{
  if (pending_) {
    return *pending_;
  }
  const std::size_t n = config_.num_users;
  SlotDraw draw;
  draw.tasks.reserve(n);
  draw.gains = GainMatrix(n, config_.rats);
  std::uniform_int_distribution<std::uint64_t> bits(config_.task_bits_min, config_.task_bits_max);
  std::uniform_real_distribution<double> deadline(config_.deadline_s_min, config_.deadline_s_max);
  for (std::size_t i = 0; i < n; ++i) {
    Task task;
    task.size_bits = bits(task_rngs_[i]);
    task.deadline_s = deadline(task_rngs_[i]);
    draw.tasks.push_back(task);
    for (std::size_t r = 0; r < config_.rats.size(); ++r) {
      for (std::size_t m = 0; m < config_.rats[r].num_subchannels; ++m) {
        draw.gains.at(i, ChannelId{r, m}) =
            sample_channel_gain(gain_rngs_[i], users_[i].distance_m, config_.fading);
      }
    }
  }
  pending_ = std::move(draw);
  return *pending_;
}

SlotOutcome GameEnv::step(std::span<const Action> joint_actions)
{
  if (joint_actions.size() != config_.num_users) {
    throw ConfigError("joint_actions", "expected " + std::to_string(config_.num_users) +
                                           " actions, got " +
                                           std::to_string(joint_actions.size()));
  }
  for (const auto& action : joint_actions) {
    validate(action, config_);
  }
  begin_slot();
  SlotOutcome outcome = resolve_slot(config_, users_, *pending_, joint_actions);
  for (std::size_t i = 0; i < outcome.users.size(); ++i) {
    states_[i] = outcome.users[i].next_state;
  }
  pending_.reset();
  ++slot_;
  return outcome;
}

}  // namespace offload
