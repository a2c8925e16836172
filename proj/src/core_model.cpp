#include "offload/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace offload {

namespace {

void require(bool condition, const char* what)
{
  if (!condition) {
    throw std::invalid_argument(what);
  }
}

CostBreakdown weighted(double energy_j, double delay_s, double beta)
{
  return CostBreakdown{energy_j, delay_s, energy_j + beta * delay_s};
}

// Uniform variate strictly inside (0, 1).
double open_unit(Rng& rng)
{
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(rng() >> 11) + 0.5) * kScale;
}

}  // namespace

void validate(const Task& task)
{
  require(task.size_bits >= 1, "task size must be at least one bit");
  require(task.deadline_s > 0.0, "task deadline must be positive");
}

void validate(const UserProfile& user)
{
  require(user.distance_m > 0.0, "user distance must be positive");
  require(user.cpu_hz > 0.0, "user cpu frequency must be positive");
  require(user.energy_per_cycle_j > 0.0, "user energy per cycle must be positive");
}

void validate(const EdgeProfile& edge)
{
  require(edge.cpu_hz > 0.0, "edge cpu frequency must be positive");
  require(edge.energy_per_cycle_j > 0.0, "edge energy per cycle must be positive");
  require(edge.slot_s > 0.0, "slot duration must be positive");
}

void validate(const RatSpec& rat)
{
  require(rat.bandwidth_hz > 0.0, "RAT bandwidth must be positive");
  require(rat.noise_w > 0.0, "RAT noise power must be positive");
  require(rat.sinr_threshold_linear > 0.0, "RAT SINR threshold must be positive");
  require(rat.num_subchannels >= 1, "RAT needs at least one sub-channel");
  require(!rat.power_levels_w.empty(), "RAT needs at least one power level");
  double previous = 0.0;
  for (double p : rat.power_levels_w) {
    require(p > previous, "RAT power levels must be positive and strictly increasing");
    previous = p;
  }
}

void validate(const FadingModel& fading)
{
  require(fading.rayleigh_scale > 0.0, "Rayleigh scale must be positive");
  require(fading.pathloss_exponent > 0.0, "path-loss exponent must be positive");
}

CostBreakdown local_execution_cost(const Task& task, const UserProfile& user,
                                   double cycles_per_bit, double beta)
{
  const double cycles = static_cast<double>(task.size_bits) * cycles_per_bit;
  return weighted(cycles * user.energy_per_cycle_j, cycles / user.cpu_hz, beta);
}

CostBreakdown edge_execution_cost(const Task& task, const EdgeProfile& edge,
                                  double cycles_per_bit, double beta)
{
  const double cycles = static_cast<double>(task.size_bits) * cycles_per_bit;
  return weighted(cycles * edge.energy_per_cycle_j, cycles / edge.cpu_hz, beta);
}

double sinr(double power_w, double gain, double noise_w,
            std::span<const Interferer> interferers)
{
  if (power_w == 0.0) {
    return 0.0;
  }
  double denominator = noise_w;
  for (const auto& z : interferers) {
    denominator += z.gain * z.power_w;
  }
  return power_w * gain / denominator;
}

double transmission_rate(double bandwidth_hz, double sinr_linear)
{
  return bandwidth_hz * std::log2(1.0 + sinr_linear);
}

CostBreakdown transmission_cost(const Task& task, double power_w, double rate_bps,
                                double slot_s, double beta)
{
  double delay = slot_s;
  if (rate_bps > 0.0) {
    delay = std::min(static_cast<double>(task.size_bits) / rate_bps, slot_s);
  }
  return weighted(power_w * delay, delay, beta);
}

double sample_channel_gain(Rng& rng, double distance_m, const FadingModel& fading)
{
  // amplitude^2 of Rayleigh(s) is exponential with mean 2 s^2
  const double s = fading.rayleigh_scale;
  const double power_gain = -2.0 * s * s * std::log(open_unit(rng));
  return power_gain * std::pow(distance_m, -fading.pathloss_exponent);
}

double dbm_to_watts(double dbm)
{
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double db_to_linear(double db)
{
  return std::pow(10.0, db / 10.0);
}

}  // namespace offload
