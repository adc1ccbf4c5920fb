#pragma once

// Deterministic random number plumbing. Every uniform draw in the project comes from
// a xoshiro256++ engine seeded through a splitmix64 hash of (master seed, replication
// index, stream role). Replications therefore own independent streams that do not
// depend on execution order, which is what makes multi-threaded Monte Carlo runs
// bit-reproducible.

#include <cstdint>
#include <vector>

namespace giicov {

// Identifies one logical stream: a Monte Carlo replication draws several independent
// streams (observed shocks, simulated shocks, covariates, ...) told apart by role.
struct SeedSpec {
  std::uint64_t master = 0;
  std::uint64_t replication = 0;
  std::uint64_t role = 0;
};

// Stream roles used by the simulators. Plain integers on purpose: models that need an
// extra stream (the queue draws service and arrival times separately) pick the next
// free slot.
namespace stream_role {
inline constexpr std::uint64_t observed_shock = 0; // u_it behind the observed sample
inline constexpr std::uint64_t observed_x = 1;     // observed covariate draws
inline constexpr std::uint64_t sim_shock = 2;      // u_it^r used inside the criterion
inline constexpr std::uint64_t sim_x = 3;          // covariate draws for latent periods
inline constexpr std::uint64_t observed_aux = 4;   // second observed stream (queue arrivals)
inline constexpr std::uint64_t sim_aux = 5;        // second simulated stream

// Simulation replication r uses roles strided by 8, so draws for replication r are
// identical whether the run asks for R = 10 or R = 300 paths: adding replications
// extends the set of streams without reshuffling existing ones.
inline constexpr std::uint64_t for_replication(std::uint64_t base, int r) {
  return base + 8 * static_cast<std::uint64_t>(r);
}
} // namespace stream_role

// xoshiro256++ 1.0. Small, fast, passes BigCrush; state is seeded from SeedSpec via
// splitmix64 so that nearby seeds give unrelated streams.
class Xoshiro256pp {
public:
  explicit Xoshiro256pp(const SeedSpec& seed);

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1): 53-bit mantissa draw, with the endpoint 0
  // redrawn so downstream inverse CDFs never see 0 or 1.
  double next_double();

private:
  std::uint64_t s_[4];
};

// Uniform draws for a panel simulator: n units, t_len periods per unit, r_len
// simulation replications. Element (i,t,r) is deterministic in (seed, i, t, r) and
// independent of the order anything else is drawn in.
class UniformPanel {
public:
  UniformPanel() = default;
  UniformPanel(const SeedSpec& seed, int n, int t_len, int r_len);

  double operator()(int i, int t, int r) const {
    return u_[(static_cast<std::size_t>(i) * t_len_ + t) * r_len_ + r];
  }

  int n() const { return n_; }
  int t_len() const { return t_len_; }
  int r_len() const { return r_len_; }
  bool empty() const { return u_.empty(); }

private:
  int n_ = 0;
  int t_len_ = 0;
  int r_len_ = 0;
  std::vector<double> u_;
};

} // namespace giicov
