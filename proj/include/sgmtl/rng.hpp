#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>

// Deterministic random number utilities. All sampling goes through an
// explicit mt19937_64 engine plus hand-rolled transforms (Box-Muller for
// normals) so that streams are bit-identical across platforms and standard
// library versions; std::normal_distribution is deliberately avoided.
namespace sgmtl {

// SplitMix64 finalizer; used to derive well-separated child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt_a, std::uint64_t salt_b);

// FNV-1a hash of a byte string; doubles as the dataset fingerprint primitive
// and as a stable way to fold task ids into seeds.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t basis = 0xcbf29ce484222325ull);
std::uint64_t fnv1a(const std::string& text);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform();
  // Uniform integer on [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound);
  // Standard normal via Box-Muller (caches the second variate).
  double normal();

  Eigen::VectorXd normal_vector(Eigen::Index size);
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);
  // Uniform draw from the probability simplex in `size` dimensions
  // (normalized exponentials).
  Eigen::VectorXd simplex_uniform(Eigen::Index size);
  // Fisher-Yates shuffle of 0..size-1.
  std::vector<int> permutation(int size);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace sgmtl
