#include "sgmtl/rng.hpp"

#include <cmath>
#include <cstring>

namespace sgmtl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(splitmix64(seed) ^ salt);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt_a, std::uint64_t salt_b) {
  return splitmix64(mix_seed(seed, salt_a) ^ splitmix64(salt_b));
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t basis) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = basis;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t fnv1a(const std::string& text) { return fnv1a(text.data(), text.size()); }

double Rng::uniform() {
  // 53 random bits -> [0, 1) with full double precision.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
  // Rejection sampling to kill modulo bias.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

Eigen::VectorXd Rng::normal_vector(Eigen::Index size) {
  Eigen::VectorXd out(size);
  for (Eigen::Index i = 0; i < size; ++i) out[i] = normal();
  return out;
}

Eigen::MatrixXd Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd out(rows, cols);
  // Row-major fill order so the stream does not depend on Eigen's storage.
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = normal();
  return out;
}

Eigen::VectorXd Rng::simplex_uniform(Eigen::Index size) {
  Eigen::VectorXd out(size);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < size; ++i) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    out[i] = -std::log(u);
    sum += out[i];
  }
  return out / sum;
}

std::vector<int> Rng::permutation(int size) {
  std::vector<int> perm(size);
  for (int i = 0; i < size; ++i) perm[i] = i;
  for (int i = size - 1; i > 0; --i) {
    const int j = static_cast<int>(uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace sgmtl
