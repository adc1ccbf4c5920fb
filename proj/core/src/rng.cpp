#include "giicov/rng.hpp"

namespace giicov {

namespace {

// splitmix64 step (Steele, Lea, Flood 2014). Used only to expand seeds.
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

Xoshiro256pp::Xoshiro256pp(const SeedSpec& seed) {
  // Chain the three seed components through splitmix64 so that any change in any
  // component reshuffles the whole state, then expand into the four state words.
  std::uint64_t h = 0x6a09e667f3bcc909ULL; // sqrt(2) fraction bits, an arbitrary anchor
  h = splitmix64(h ^= seed.master);
  h = splitmix64(h ^= seed.replication);
  h = splitmix64(h ^= seed.role);
  for (auto& w : s_) w = splitmix64(h);
  // All-zero state is the one forbidden xoshiro state; the splitmix64 expansion cannot
  // produce four zero words from any input, so no check is needed here.
}

std::uint64_t Xoshiro256pp::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256pp::next_double() {
  for (;;) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u; // (x>>11)*2^-53 < 1 always; only the 0 endpoint needs a redraw
  }
}

UniformPanel::UniformPanel(const SeedSpec& seed, int n, int t_len, int r_len)
    : n_(n), t_len_(t_len), r_len_(r_len) {
  u_.resize(static_cast<std::size_t>(n) * t_len * r_len);
  Xoshiro256pp rng(seed);
  for (auto& v : u_) v = rng.next_double();
}

} // namespace giicov
