#include "offload/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace offload {

Assignment centralized_allocate(const SimConfig& config, std::span<const UserProfile> users,
                                const SlotDraw& draw)
{
  const std::size_t n = draw.tasks.size();
  Assignment assignment(n, Local{});

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return draw.tasks[a].size_bits > draw.tasks[b].size_bits;
  });

  std::set<ChannelId> taken;
  double w_all = 0.0;
  const double capacity = config.edge.capacity_cycles();

  for (std::size_t i : order) {
    const Task& task = draw.tasks[i];
    const double cycles = static_cast<double>(task.size_bits) * config.cycles_per_bit;
    double best = local_execution_cost(task, users[i], config.cycles_per_bit, config.beta).cost;
    const double edge_cost =
        edge_execution_cost(task, config.edge, config.cycles_per_bit, config.beta).cost;
    bool best_loads_edge = false;

    for (std::size_t r = 0; r < config.rats.size(); ++r) {
      const RatSpec& rat = config.rats[r];
      for (std::size_t m = 0; m < rat.num_subchannels; ++m) {
        const ChannelId channel{r, m};
        if (taken.contains(channel)) {
          continue;
        }
        const double gain = draw.gains.at(i, channel);
        for (double power : rat.power_levels_w) {
          const double gamma = sinr(power, gain, rat.noise_w, {});
          const double rate = transmission_rate(rat.bandwidth_hz, gamma);
          const double tx = transmission_cost(task, power, rate, config.edge.slot_s, config.beta).cost;
          const bool decoded = gamma >= rat.sinr_threshold_linear;
          if (decoded && w_all + cycles > capacity) {
            continue;
          }
          const double cost = decoded ? edge_cost + tx : tx + config.varpi;
          if (cost < best) {
            best = cost;
            assignment[i] = Offload{channel, power};
            best_loads_edge = decoded;
          }
        }
      }
    }

    if (const Offload* chosen = as_offload(assignment[i])) {
      taken.insert(chosen->channel);
      if (best_loads_edge) {
        w_all += cycles;
      }
    }
  }
  return assignment;
}

std::size_t random_policy(const ActionCatalog& catalog, Rng& rng)
{
  std::uniform_int_distribution<std::size_t> pick(0, catalog.size() - 1);
  return pick(rng);
}

}  // namespace offload
