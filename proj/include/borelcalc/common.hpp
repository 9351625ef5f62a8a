#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace borelcalc {

using cx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Error with a stable machine-readable kind. The CLI maps kinds onto the
// error object printed on stderr; library callers can switch on kind().
class error : public std::runtime_error {
 public:
  error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

inline bool is_finite(cx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// splitmix64. Deterministic sample points for representation cross-checks and
// probe-based invariants; never seeded from the clock.
class detrng {
 public:
  explicit detrng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (next() >> 11) * 0x1.0p-53;
  }

  // uniform on the closed disc |z| <= radius
  cx disc(double radius) {
    double r = radius * std::sqrt(uniform(0.0, 1.0));
    double th = uniform(0.0, 2.0 * pi);
    return {r * std::cos(th), r * std::sin(th)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace borelcalc
