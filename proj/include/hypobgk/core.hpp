#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hypobgk {

using Real = double;
using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr Real kPi = 3.14159265358979323846;

/// Simulation left the admissible state region (density or pressure
/// became nonpositive). Carries the last time at which the state was valid.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(const std::string& what, Real last_valid_time)
      : std::runtime_error(what), last_valid_time_(last_valid_time) {}
  Real last_valid_time() const { return last_valid_time_; }

 private:
  Real last_valid_time_;
};

/// A Lyapunov matrix could not be constructed or verified.
class CertificationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Truncated spectral resolution is insufficient for the requested run.
class ResolutionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thread cap for embarrassingly parallel loops, from HYPOBGK_THREADS.
inline int max_threads() {
  static const int cached = [] {
    if (const char* env = std::getenv("HYPOBGK_THREADS")) {
      const int n = std::atoi(env);
      if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
  }();
  return cached;
}

/// Runs fn(i) for i in [0, count), on at most max_threads() threads.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int threads = std::min(max_threads(), count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Shortest round-trippable decimal form of a double. Used everywhere a
/// number is written to CSV/JSON so identical runs produce identical bytes.
inline std::string format_double(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Deterministic uniform variates built directly from mt19937_64 output,
/// independent of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  Real uniform() { return static_cast<Real>(gen_() >> 11) * 0x1.0p-53; }
  /// Uniform on [-1, 1).
  Real symmetric() { return 2.0 * uniform() - 1.0; }
  Real uniform(Real lo, Real hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t raw() { return gen_(); }

  static constexpr const char* algorithm() { return "mt19937_64"; }

 private:
  std::mt19937_64 gen_;
};

inline Real least_eigenvalue(const CMat& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline CMat hermitize(const CMat& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace hypobgk
