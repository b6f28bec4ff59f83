#pragma once

#include <optional>
#include <string>

namespace slgeo {

/// p/q in lowest terms with q > 0.
struct Rational {
  long num = 0;
  long den = 1;

  Rational() = default;
  Rational(long p, long q);

  /// Accepts "p/q" or a bare integer "p".
  static Rational parse(const std::string& text);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  bool operator==(const Rational&) const = default;
};

/// Closest continued-fraction convergent to x with denominator <= max_den,
/// provided it is within tol of x.
std::optional<Rational> recognize_rational(double x, long max_den = 64, double tol = 1e-9);

}  // namespace slgeo
