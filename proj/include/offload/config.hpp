#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "offload/core_model.hpp"

namespace offload {

/// Raised for invalid configuration; `key()` names the offending setting.
class ConfigError : public std::runtime_error
{
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key))
  {
  }

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct LearningParams
{
  double lambda = 0.9;       // discount factor
  double alpha_ini = 0.9;
  double alpha_end = 0.001;
  double epsilon = 0.2;      // constant exploration rate
  std::size_t episodes = 10000;  // training slots
  // Initial value of every Q entry; unset means the per-user discounted cost
  // of always computing locally.
  std::optional<double> q_init;
};

/// Full description of one simulated network and its training run.
/// Defaults reproduce the reference LoRa + WiFi deployment.
struct SimConfig
{
  std::size_t num_users = 30;
  std::vector<RatSpec> rats;
  EdgeProfile edge;
  FadingModel fading;
  double beta = 5.0;             // weight of delay against energy
  double cycles_per_bit = 500.0;

  std::uint64_t task_bits_min = 10'000;
  std::uint64_t task_bits_max = 4'000'000;
  double deadline_s_min = 0.5;
  double deadline_s_max = 2.0;

  double distance_mean_m = 1000.0;
  double distance_sd_m = 3.0;
  double user_cpu_hz_min = 5e8;
  double user_cpu_hz_max = 1e9;
  double user_energy_per_cycle_j = 1e-8;

  double omega = 5.0;   // waiting penalty when the edge is overloaded
  double varpi = 20.0;  // penalty for a transmission the gateway cannot decode

  LearningParams learning;

  std::uint64_t seed = 1;
  std::size_t tracked_user = 0;
  std::size_t ma_window = 200;
  std::size_t eval_slots = 1000;

  std::size_t total_channels() const;
};

/// Parameters of a RAT given the way they are usually tabulated: noise as a
/// density in dBm/Hz over the band, threshold in dB, and a power range split
/// into evenly spaced levels.
RatSpec make_rat(std::string name, double bandwidth_hz, double noise_density_dbm_hz,
                 double sinr_threshold_db, std::size_t subchannels, double power_min_w,
                 double power_max_w, std::size_t power_levels);

RatSpec default_lora();
RatSpec default_wifi();
SimConfig default_config();

/// Throws ConfigError on the first violated invariant.
void validate(const SimConfig& config);

/// Reads a JSON config file. Keys not present keep their defaults; unknown
/// keys are rejected.
SimConfig load_config(const std::filesystem::path& path);
SimConfig parse_config(const std::string& json_text);

// Seed splitting. A master seed expands into independent child seeds, one per
// (stream, index) pair, through a SplitMix64 finalizer.
enum class SeedStream : std::uint64_t
{
  kProfiles = 1,
  kTasks = 2,
  kGains = 3,
  kExploration = 4,
  kEvaluation = 5,
  kRandomPolicy = 6,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, SeedStream stream, std::uint64_t index = 0);

}  // namespace offload
