#include "offload/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace offload {

using nlohmann::json;

std::size_t SimConfig::total_channels() const
{
  std::size_t n = 0;
  for (const auto& rat : rats) {
    n += rat.num_subchannels;
  }
  return n;
}

RatSpec make_rat(std::string name, double bandwidth_hz, double noise_density_dbm_hz,
                 double sinr_threshold_db, std::size_t subchannels, double power_min_w,
                 double power_max_w, std::size_t power_levels)
{
  RatSpec rat;
  rat.name = std::move(name);
  rat.bandwidth_hz = bandwidth_hz;
  rat.noise_w = dbm_to_watts(noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz));
  rat.sinr_threshold_linear = db_to_linear(sinr_threshold_db);
  rat.num_subchannels = subchannels;
  if (power_levels == 1) {
    rat.power_levels_w = {power_max_w};
  } else {
    for (std::size_t k = 0; k < power_levels; ++k) {
      rat.power_levels_w.push_back(power_min_w + (power_max_w - power_min_w) *
                                                     static_cast<double>(k) /
                                                     static_cast<double>(power_levels - 1));
    }
  }
  return rat;
}

RatSpec default_lora()
{
  return make_rat("LoRa", 1.25e5, -174.0, -15.0, 10, 0.05, 0.3, 3);
}

RatSpec default_wifi()
{
  return make_rat("WiFi", 5e6, -160.0, 10.0, 13, 0.1, 1.0, 3);
}

SimConfig default_config()
{
  SimConfig config;
  config.rats = {default_lora(), default_wifi()};
  return config;
}

namespace {

void check(bool condition, const char* key, const char* message)
{
  if (!condition) {
    throw ConfigError(key, message);
  }
}

}  // namespace

void validate(const SimConfig& c)
{
  check(c.num_users >= 1, "users", "need at least one user");
  check(!c.rats.empty(), "rats", "need at least one radio access technology");
  for (std::size_t r = 0; r < c.rats.size(); ++r) {
    try {
      validate(c.rats[r]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("rats[" + std::to_string(r) + "]", e.what());
    }
  }
  try {
    validate(c.edge);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("edge", e.what());
  }
  try {
    validate(c.fading);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("fading", e.what());
  }
  check(c.beta >= 0.0, "beta", "must be non-negative");
  check(c.cycles_per_bit > 0.0, "cycles_per_bit", "must be positive");
  check(c.task_bits_min >= 1, "task_bits_min", "must be at least 1");
  check(c.task_bits_max >= c.task_bits_min, "task_bits_max", "must be >= task_bits_min");
  check(c.deadline_s_min > 0.0, "deadline_s_min", "must be positive");
  check(c.deadline_s_max >= c.deadline_s_min, "deadline_s_max", "must be >= deadline_s_min");
  check(c.distance_mean_m > 0.0, "distance_mean_m", "must be positive");
  check(c.distance_sd_m >= 0.0, "distance_sd_m", "must be non-negative");
  check(c.user_cpu_hz_min > 0.0, "user_cpu_hz_min", "must be positive");
  check(c.user_cpu_hz_max >= c.user_cpu_hz_min, "user_cpu_hz_max", "must be >= user_cpu_hz_min");
  check(c.user_energy_per_cycle_j > 0.0, "user_energy_per_cycle_j", "must be positive");
  check(c.omega >= 0.0, "omega", "must be non-negative");
  check(c.varpi >= 0.0, "varpi", "must be non-negative");
  const auto& l = c.learning;
  check(l.lambda >= 0.0 && l.lambda < 1.0, "lambda", "must lie in [0, 1)");
  check(l.alpha_ini > 0.0 && l.alpha_ini <= 1.0, "alpha_ini", "must lie in (0, 1]");
  check(l.alpha_end > 0.0 && l.alpha_end <= l.alpha_ini, "alpha_end", "must lie in (0, alpha_ini]");
  check(!l.q_init || std::isfinite(*l.q_init), "q_init", "must be finite");
  check(l.epsilon >= 0.0 && l.epsilon <= 1.0, "epsilon", "must lie in [0, 1]");
  check(c.tracked_user < c.num_users, "tracked_user", "must name an existing user");
  check(c.ma_window >= 1, "ma_window", "must be at least 1");
}

namespace {

template <typename T>
T read_value(const json& value, const std::string& key)
{
  try {
    if constexpr (std::is_unsigned_v<T>) {
      if (value.is_number_unsigned()) {
        return value.get<T>();
      }
      // accept 1e4-style literals when they are whole numbers
      if (value.is_number_float() && value.get<double>() >= 0.0 &&
          std::floor(value.get<double>()) == value.get<double>()) {
        return static_cast<T>(value.get<double>());
      }
      throw ConfigError(key, "expected a non-negative integer");
    } else {
      return value.get<T>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

RatSpec parse_rat(const json& node, const std::string& prefix)
{
  if (!node.is_object()) {
    throw ConfigError(prefix, "expected an object");
  }
  static const std::vector<std::string> kRequired = {
      "name", "bandwidth_hz", "noise_density_dbm_hz", "sinr_threshold_db",
      "subchannels", "power_min_w", "power_max_w", "power_levels"};
  for (const auto& [key, value] : node.items()) {
    if (std::find(kRequired.begin(), kRequired.end(), key) == kRequired.end()) {
      throw ConfigError(prefix + "." + key, "unknown key");
    }
  }
  for (const auto& key : kRequired) {
    if (!node.contains(key)) {
      throw ConfigError(prefix + "." + key, "missing");
    }
  }
  auto field = [&](const char* key) { return prefix + "." + key; };
  const auto levels = read_value<std::size_t>(node["power_levels"], field("power_levels"));
  if (levels == 0) {
    throw ConfigError(field("power_levels"), "must be at least 1");
  }
  return make_rat(read_value<std::string>(node["name"], field("name")),
                  read_value<double>(node["bandwidth_hz"], field("bandwidth_hz")),
                  read_value<double>(node["noise_density_dbm_hz"], field("noise_density_dbm_hz")),
                  read_value<double>(node["sinr_threshold_db"], field("sinr_threshold_db")),
                  read_value<std::size_t>(node["subchannels"], field("subchannels")),
                  read_value<double>(node["power_min_w"], field("power_min_w")),
                  read_value<double>(node["power_max_w"], field("power_max_w")), levels);
}

}  // namespace

SimConfig parse_config(const std::string& json_text)
{
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", e.what());
  }
  if (!root.is_object()) {
    throw ConfigError("<file>", "top level must be an object");
  }

  SimConfig c = default_config();
  using Setter = std::function<void(const json&, const std::string&)>;
  auto num = [](double& target) -> Setter {
    return [&target](const json& v, const std::string& k) { target = read_value<double>(v, k); };
  };
  auto count = [](std::size_t& target) -> Setter {
    return [&target](const json& v, const std::string& k) { target = read_value<std::size_t>(v, k); };
  };
  auto u64 = [](std::uint64_t& target) -> Setter {
    return [&target](const json& v, const std::string& k) { target = read_value<std::uint64_t>(v, k); };
  };

  const std::map<std::string, Setter> setters = {
      {"users", count(c.num_users)},
      {"seed", u64(c.seed)},
      {"rats",
       [&c](const json& v, const std::string& k) {
         if (!v.is_array()) {
           throw ConfigError(k, "expected an array");
         }
         c.rats.clear();
         for (std::size_t r = 0; r < v.size(); ++r) {
           c.rats.push_back(parse_rat(v[r], k + "[" + std::to_string(r) + "]"));
         }
       }},
      {"edge_cpu_hz", num(c.edge.cpu_hz)},
      {"edge_energy_per_cycle_j", num(c.edge.energy_per_cycle_j)},
      {"slot_s", num(c.edge.slot_s)},
      {"rayleigh_scale", num(c.fading.rayleigh_scale)},
      {"pathloss_exponent", num(c.fading.pathloss_exponent)},
      {"beta", num(c.beta)},
      {"cycles_per_bit", num(c.cycles_per_bit)},
      {"task_bits_min", u64(c.task_bits_min)},
      {"task_bits_max", u64(c.task_bits_max)},
      {"deadline_s_min", num(c.deadline_s_min)},
      {"deadline_s_max", num(c.deadline_s_max)},
      {"distance_mean_m", num(c.distance_mean_m)},
      {"distance_sd_m", num(c.distance_sd_m)},
      {"user_cpu_hz_min", num(c.user_cpu_hz_min)},
      {"user_cpu_hz_max", num(c.user_cpu_hz_max)},
      {"user_energy_per_cycle_j", num(c.user_energy_per_cycle_j)},
      {"omega", num(c.omega)},
      {"varpi", num(c.varpi)},
      {"lambda", num(c.learning.lambda)},
      {"alpha_ini", num(c.learning.alpha_ini)},
      {"alpha_end", num(c.learning.alpha_end)},
      {"epsilon", num(c.learning.epsilon)},
      {"episodes", count(c.learning.episodes)},
      {"q_init",
       [&c](const json& v, const std::string& k) {
         if (v.is_string() && v.get<std::string>() == "local") {
           c.learning.q_init.reset();
         } else {
           c.learning.q_init = read_value<double>(v, k);
         }
       }},
      {"tracked_user", count(c.tracked_user)},
      {"ma_window", count(c.ma_window)},
      {"eval_slots", count(c.eval_slots)},
  };

  for (const auto& [key, value] : root.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError(key, "unknown key");
    }
    it->second(value, key);
  }
  validate(c);
  return c;
}

SimConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("--config", "cannot open " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, SeedStream stream, std::uint64_t index)
{
  return splitmix64(splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(stream)) ^ index);
}

}  // namespace offload
