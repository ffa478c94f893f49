#ifndef SIGREC_CORE_HPP
#define SIGREC_CORE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace sigrec {

using Vec2 = std::array<double, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

using ScalarField = std::function<double(Vec2)>;
using VectorField = std::function<Vec2(Vec2)>;

// Error hierarchy: invalid_argument reuses std; the rest carry a stage tag.
class data_error : public std::runtime_error {
public:
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

class solver_error : public std::runtime_error {
public:
  solver_error(const std::string& msg, double residual)
      : std::runtime_error(msg), achieved_residual(residual) {}
  double achieved_residual;
};

class unsupported_error : public std::runtime_error {
public:
  explicit unsupported_error(const std::string& msg) : std::runtime_error(msg) {}
};

// splitmix64: counter-based generator used where draws must be keyed by
// position rather than draw order, so parallel evaluation stays deterministic.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// uniform in [-1, 1) from a (seed, key) pair
inline double uniform_pm1(std::uint64_t seed, std::uint64_t key) {
  const std::uint64_t z = splitmix64(splitmix64(seed ^ 0x5851F42D4C957F2Dull) ^ key);
  return 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace sigrec

#endif
