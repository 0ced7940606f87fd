#include "plap/rng.hpp"

namespace plap {

std::uint64_t Rng::splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(seed) ^ splitmix64(stream + 1) * 0xd1b54a32d192ed03ULL);
}

std::uint64_t Rng::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

Point Rng::normal_vector(int dim) {
  Point v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal_(engine_);
  return v;
}

}  // namespace plap
