#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace ofdm {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using CMatrixX = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using CVectorX = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

using cd = std::complex<double>;
using CMatrixXd = CMatrixX<double>;
using CVectorXd = CVectorX<double>;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

using Rng = std::mt19937_64;

using Bits = std::vector<std::uint8_t>;

// Splitmix64 finalizer; used to derive independent per-worker seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return mix_seed(mix_seed(mix_seed(root) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace ofdm
