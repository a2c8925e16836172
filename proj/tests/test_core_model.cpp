#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "offload/config.hpp"
#include "offload/core_model.hpp"

using namespace offload;

namespace {

constexpr double kRel = 1e-9;

void expect_rel(double actual, double expected, double rel = kRel)
{
  EXPECT_NEAR(actual, expected, std::abs(expected) * rel) << "expected " << expected;
}

UserProfile reference_user()
{
  UserProfile u;
  u.cpu_hz = 1e9;
  u.energy_per_cycle_j = 1e-8;
  return u;
}

Task task_of(std::uint64_t bits)
{
  Task t;
  t.size_bits = bits;
  return t;
}

void expect_consistent(const CostBreakdown& c, double beta)
{
  EXPECT_GE(c.energy_j, 0.0);
  EXPECT_GE(c.delay_s, 0.0);
  EXPECT_GE(c.cost, 0.0);
  EXPECT_NEAR(c.cost, c.energy_j + beta * c.delay_s, 4 * std::numeric_limits<double>::epsilon() * c.cost);
}

}  // namespace

TEST(LocalCost, MegabitTask)
{
  const auto c = local_execution_cost(task_of(1'000'000), reference_user(), 500.0, 5.0);
  expect_rel(c.energy_j, 5.0);
  expect_rel(c.delay_s, 0.5);
  expect_rel(c.cost, 7.5);
}

TEST(LocalCost, SingleBit)
{
  const auto c = local_execution_cost(task_of(1), reference_user(), 500.0, 5.0);
  expect_rel(c.energy_j, 5e-6);
  expect_rel(c.delay_s, 5e-7);
  expect_rel(c.cost, 7.5e-6);
}

TEST(LocalCost, DelayScalesInverselyWithCpuEnergyDoesNot)
{
  Rng rng(7);
  std::uniform_real_distribution<double> cpu(1e8, 5e9);
  for (int trial = 0; trial < 200; ++trial) {
    UserProfile a = reference_user();
    UserProfile b = reference_user();
    a.cpu_hz = cpu(rng);
    b.cpu_hz = cpu(rng);
    const Task t = task_of(1 + rng() % 4'000'000);
    const auto ca = local_execution_cost(t, a, 500.0, 5.0);
    const auto cb = local_execution_cost(t, b, 500.0, 5.0);
    EXPECT_EQ(ca.energy_j, cb.energy_j);
    expect_rel(ca.delay_s * a.cpu_hz, cb.delay_s * b.cpu_hz, 1e-12);
    expect_consistent(ca, 5.0);
  }
}

TEST(EdgeCost, MegabitTask)
{
  const auto c = edge_execution_cost(task_of(1'000'000), EdgeProfile{}, 500.0, 5.0);
  expect_rel(c.energy_j, 50.0);
  expect_rel(c.delay_s, 0.05);
  expect_rel(c.cost, 50.25);
}

TEST(EdgeCost, DelayIsLocalDelayTimesCpuRatio)
{
  const Task t = task_of(1'000'000);
  const auto local = local_execution_cost(t, reference_user(), 500.0, 5.0);
  const auto edge = edge_execution_cost(t, EdgeProfile{}, 500.0, 5.0);
  expect_rel(edge.delay_s / local.delay_s, 0.1);
}

TEST(Sinr, NoInterferers)
{
  expect_rel(sinr(0.1, 1e-9, 5e-13, {}), 200.0);
}

TEST(Sinr, OneEqualInterferer)
{
  const std::vector<Interferer> z = {{1e-9, 0.1}};
  expect_rel(sinr(0.1, 1e-9, 5e-13, z), 1e-10 / (5e-13 + 1e-10));
  EXPECT_NEAR(sinr(0.1, 1e-9, 5e-13, z), 0.99502, 1e-5);
}

TEST(Sinr, MonotoneInOwnAndInterfererPower)
{
  Rng rng(11);
  std::uniform_real_distribution<double> power(0.01, 2.0);
  std::uniform_real_distribution<double> log_gain(-12.0, -6.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double g = std::pow(10.0, log_gain(rng));
    const double noise = 5e-13;
    std::vector<Interferer> z = {{std::pow(10.0, log_gain(rng)), power(rng)},
                                 {std::pow(10.0, log_gain(rng)), power(rng)}};
    const double p = power(rng);
    const double base = sinr(p, g, noise, z);
    EXPECT_GT(sinr(p * 1.5, g, noise, z), base);
    auto louder = z;
    louder[1].power_w *= 1.5;
    EXPECT_LT(sinr(p, g, noise, louder), base);
    EXPECT_LE(base, sinr(p, g, noise, std::span(z).first(1)));
  }
}

TEST(Rate, WifiAtSinr200)
{
  const double r = transmission_rate(5e6, 200.0);
  expect_rel(r, 5e6 * std::log2(201.0));
  EXPECT_NEAR(r, 3.826e7, 1e4);
}

TEST(Rate, NonNegativeIncreasingAndLinearInBandwidth)
{
  EXPECT_EQ(transmission_rate(5e6, 0.0), 0.0);
  double previous = -1.0;
  for (double g = 0.0; g < 1000.0; g += 0.37) {
    const double r = transmission_rate(1.25e5, g);
    EXPECT_GE(r, 0.0);
    EXPECT_GT(r, previous);
    previous = r;
    expect_rel(transmission_rate(3.0 * 1.25e5, g), 3.0 * r, 1e-12);
  }
}

TEST(TransmissionCost, MegabitOverWifi)
{
  const double rate = transmission_rate(5e6, 200.0);
  const auto c = transmission_cost(task_of(1'000'000), 0.1, rate, 1.0, 5.0);
  expect_rel(c.delay_s, 1e6 / rate);
  expect_rel(c.energy_j, 0.1 * 1e6 / rate);
  EXPECT_NEAR(c.delay_s, 0.02614, 1e-5);
  EXPECT_NEAR(c.energy_j, 2.614e-3, 1e-6);
  EXPECT_NEAR(c.cost, 0.1333, 1e-4);
  expect_consistent(c, 5.0);
}

TEST(TransmissionCost, ZeroRateCostsAFullSlot)
{
  const auto c = transmission_cost(task_of(1'000'000), 0.1, 0.0, 1.0, 5.0);
  expect_rel(c.delay_s, 1.0);
  expect_rel(c.energy_j, 0.1);
  expect_rel(c.cost, 5.1);
}

TEST(TransmissionCost, DelayNeverExceedsSlot)
{
  Rng rng(3);
  std::uniform_real_distribution<double> log_rate(0.0, 9.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Task t = task_of(1 + rng() % 4'000'000);
    const auto c = transmission_cost(t, 0.3, std::pow(10.0, log_rate(rng)), 1.0, 5.0);
    EXPECT_LE(c.delay_s, 1.0);
    expect_consistent(c, 5.0);
  }
}

TEST(ChannelGain, ReproducibleWithFixedSeed)
{
  Rng a(99);
  Rng b(99);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_channel_gain(a, 1000.0, FadingModel{}), sample_channel_gain(b, 1000.0, FadingModel{}));
  }
}

TEST(ChannelGain, MonteCarloMeanMatchesRayleighSquared)
{
  Rng rng(2024);
  const double d = 1000.0;
  const FadingModel fading;
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double h = sample_channel_gain(rng, d, fading);
    ASSERT_GT(h, 0.0);
    sum += h;
  }
  const double expected = 2.0 * 3.0 * 3.0 * std::pow(d, -2.5);
  EXPECT_NEAR(expected, 5.692e-7, 1e-10);
  EXPECT_NEAR(sum / n, expected, 0.02 * expected);
}

TEST(Units, NoiseFloorsAndThresholds)
{
  const double lora_noise = dbm_to_watts(-174.0 + 10.0 * std::log10(1.25e5));
  const double wifi_noise = dbm_to_watts(-160.0 + 10.0 * std::log10(5e6));
  expect_rel(lora_noise, std::pow(10.0, (-174.0 + 10.0 * std::log10(1.25e5) - 30.0) / 10.0));
  EXPECT_NEAR(lora_noise, 4.98e-16, 0.01e-16);
  EXPECT_NEAR(wifi_noise, 5.0e-13, 0.01e-13);
  expect_rel(db_to_linear(10.0), 10.0);
  expect_rel(db_to_linear(-15.0), std::pow(10.0, -1.5));
  EXPECT_NEAR(db_to_linear(-15.0), 0.03162, 1e-5);
  expect_rel(default_lora().noise_w, lora_noise);
  expect_rel(default_wifi().noise_w, wifi_noise);
}

TEST(Validation, RejectsBrokenProfiles)
{
  EXPECT_THROW(validate(task_of(0)), std::invalid_argument);
  Task t = task_of(10);
  t.deadline_s = 0.0;
  EXPECT_THROW(validate(t), std::invalid_argument);
  UserProfile u = reference_user();
  u.energy_per_cycle_j = 0.0;
  EXPECT_THROW(validate(u), std::invalid_argument);
  EdgeProfile e;
  e.cpu_hz = 0.0;
  EXPECT_THROW(validate(e), std::invalid_argument);
  RatSpec r = default_wifi();
  r.power_levels_w = {0.5, 0.5};
  EXPECT_THROW(validate(r), std::invalid_argument);
  r = default_wifi();
  r.num_subchannels = 0;
  EXPECT_THROW(validate(r), std::invalid_argument);
  FadingModel f;
  f.rayleigh_scale = 0.0;
  EXPECT_THROW(validate(f), std::invalid_argument);
  EXPECT_NO_THROW(validate(default_lora()));
}
