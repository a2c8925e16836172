#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace offload {

// Every stochastic component draws from its own 64-bit Mersenne Twister.
using Rng = std::mt19937_64;

// One computation job generated at a user in one slot.
struct Task
{
  std::uint64_t size_bits = 1;
  double deadline_s = 1.0;  // recorded, never enforced
};

struct UserProfile
{
  std::size_t id = 0;
  double distance_m = 1000.0;
  double cpu_hz = 1e9;
  double energy_per_cycle_j = 1e-8;
};

struct EdgeProfile
{
  double cpu_hz = 1e10;
  double energy_per_cycle_j = 1e-7;
  double slot_s = 1.0;

  /// Cycles the edge server can execute within one slot.
  double capacity_cycles() const { return cpu_hz * slot_s; }
};

/// A radio access technology: its sub-channels share bandwidth, noise floor,
/// decoding threshold and the set of nonzero transmit powers a user may pick.
struct RatSpec
{
  std::string name;
  double bandwidth_hz = 0.0;
  double noise_w = 0.0;
  double sinr_threshold_linear = 0.0;
  std::size_t num_subchannels = 0;
  std::vector<double> power_levels_w;  // strictly increasing, all > 0
};

struct CostBreakdown
{
  double energy_j = 0.0;
  double delay_s = 0.0;
  double cost = 0.0;
};

struct FadingModel
{
  double rayleigh_scale = 3.0;
  double pathloss_exponent = 2.5;
};

struct Interferer
{
  double gain = 0.0;
  double power_w = 0.0;
};

// Invariant checks; each throws std::invalid_argument describing the violation.
void validate(const Task& task);
void validate(const UserProfile& user);
void validate(const EdgeProfile& edge);
void validate(const RatSpec& rat);
void validate(const FadingModel& fading);

/// Energy, delay and weighted cost of executing `task` on the user's own CPU.
CostBreakdown local_execution_cost(const Task& task, const UserProfile& user,
                                   double cycles_per_bit, double beta);

/// Energy, delay and weighted cost of executing `task` on the edge server.
CostBreakdown edge_execution_cost(const Task& task, const EdgeProfile& edge,
                                  double cycles_per_bit, double beta);

/// Received SINR of a transmission at `power_w` over a channel with power gain
/// `gain`. `interferers` must hold only co-channel transmitters.
double sinr(double power_w, double gain, double noise_w,
            std::span<const Interferer> interferers);

/// Shannon rate in bits/s.
double transmission_rate(double bandwidth_hz, double sinr_linear);

/// Uplink cost of sending `task`. The airtime is clamped to one slot, so a
/// zero or very low rate costs a full slot of transmit energy and delay.
CostBreakdown transmission_cost(const Task& task, double power_w, double rate_bps,
                                double slot_s, double beta);

/// Block-fading power gain: Rayleigh amplitude squared times distance path loss.
double sample_channel_gain(Rng& rng, double distance_m, const FadingModel& fading);

double dbm_to_watts(double dbm);
double db_to_linear(double db);

}  // namespace offload
