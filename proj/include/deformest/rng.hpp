#pragma once

#include <cstdint>
#include <string_view>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace deformest {

// Recorded in every report so a run can be reproduced bit for bit.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64";

// Salt xor-ed into a stream seed to obtain the independent excitation stream.
inline constexpr std::uint64_t kExcitationSalt = 0x5bd1e9955bd1e995ULL;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for stream `stream_id` of a master seed. Distinct ids give
// statistically independent mt19937_64 states.
inline constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream_id) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  double normal() { return normal_(engine_); }

  Rng split(std::uint64_t stream_id) const { return Rng(split_seed(seed_, stream_id)); }

 private:
  std::uint64_t seed_;
  boost::random::mt19937_64 engine_;
  boost::random::uniform_01<double> uniform_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace deformest
