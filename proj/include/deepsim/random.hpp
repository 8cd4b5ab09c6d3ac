#pragma once
// Seeded random streams and the distribution samplers the models need.
//
// A RandomStream is a value type addressing the Philox4x32-10 block cipher:
// counter = [draw index lo, draw index hi, scenario index, replication index],
// key     = [master seed lo 32, master seed hi 32].
// Streams with distinct (scenario, replication) coordinates never overlap,
// and the draw sequence depends only on the key material, never on thread
// schedule. Ensemble code keys streams by (seed, scenario, replication) and
// deliberately NOT by policy, so policy comparisons share identical draws
// (common random numbers).

#include <cstdint>

#include "deepsim/errors.hpp"
#include "deepsim/philox.hpp"

namespace deepsim {

// Replication coordinate reserved for auxiliary streams (scenario sampling,
// frozen input sequences) that must not collide with simulation rows.
inline constexpr std::uint32_t aux_replication_index = 0xFFFFFFFFu;

// Scenario coordinates of the named auxiliary streams.
inline constexpr std::uint32_t aux_stream_frozen_inputs = 0;
inline constexpr std::uint32_t aux_stream_scenario_sampler = 1;

// Inverse of the standard normal CDF, algorithm AS 241 routine PPND16
// (Wichura 1988), accurate to ~1e-16 relative over (0, 1).
double normal_quantile(double p);

class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint32_t scenario_index,
               std::uint32_t replication_index)
      : key_{static_cast<std::uint32_t>(master_seed),
             static_cast<std::uint32_t>(master_seed >> 32)},
        scenario_(scenario_index),
        replication_(replication_index) {}

  std::uint64_t master_seed() const {
    return (std::uint64_t{key_[1]} << 32) | key_[0];
  }
  std::uint32_t scenario_index() const { return scenario_; }
  std::uint32_t replication_index() const { return replication_; }

  // One Philox block per draw; words 0..1 form the 64-bit output.
  std::uint64_t next_u64() {
    const PhiloxCounter ctr{static_cast<std::uint32_t>(counter_),
                            static_cast<std::uint32_t>(counter_ >> 32),
                            scenario_, replication_};
    ++counter_;
    const PhiloxCounter out = philox4x32_10(ctr, key_);
    return (std::uint64_t{out[1]} << 32) | out[0];
  }

  // Uniform on the open interval (0, 1): 53 random bits centered in their
  // stratum, so the value is never exactly 0 or 1 and the normal quantile
  // below never returns an infinity.
  double next_uniform() {
    const std::uint64_t bits53 = next_u64() >> 11;
    return (static_cast<double>(bits53) + 0.5) * 0x1.0p-53;
  }

  // One uniform per normal draw (inverse-CDF method). A fixed draw count per
  // sample is what keeps parallel policies aligned on common random numbers;
  // rejection-style samplers would consume policy-dependent amounts.
  double next_normal(double mean, double std_dev) {
    if (std_dev < 0.0) throw NegativeStd(std_dev);
    return mean + std_dev * normal_quantile(next_uniform());
  }

  double next_normal_clamped(double mean, double std_dev, double floor) {
    const double draw = next_normal(mean, std_dev);
    return draw < floor ? floor : draw;
  }

  // Index in [0, n). Truncation bias is below 2^-40 for the small n used
  // here and costs exactly one draw, unlike rejection schemes.
  std::uint64_t next_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_uniform() * static_cast<double>(n));
  }

 private:
  PhiloxKey key_;
  std::uint32_t scenario_;
  std::uint32_t replication_;
  std::uint64_t counter_ = 0;
};

// Moments of the log-normal variate itself, not of the underlying normal.
struct LogNormalSpec {
  double mean = 1.0;
  double std_dev = 0.0;
};

struct LogNormalUnderlying {
  double mu;
  double sigma;
};

// Moment matching: mu = ln(mean^2 / sqrt(mean^2 + std^2)),
// sigma = sqrt(ln(1 + std^2 / mean^2)). Guarantees
// exp(mu + sigma^2 / 2) == mean to ~1e-12 relative.
LogNormalUnderlying lognormal_underlying(const LogNormalSpec& spec);

// Strictly positive draw with the requested variate moments. Always consumes
// exactly one uniform, including the degenerate std_dev == 0 case, so draw
// counts stay policy-independent.
double sample_lognormal(RandomStream& stream, const LogNormalSpec& spec);

// max(floor, N(mean, std_dev^2)) in one draw.
double sample_normal_clamped(RandomStream& stream, double mean, double std_dev,
                             double floor);

}  // namespace deepsim
