#include "slgeo/rational.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "slgeo/error.hpp"

namespace slgeo {

namespace {

long parse_long(const std::string& s, const std::string& whole) {
  long v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || b == e) throw DomainError("bad rational '" + whole + "'");
  return v;
}

}  // namespace

Rational::Rational(long p, long q) {
  if (q == 0) throw DomainError("rational with zero denominator");
  if (q < 0) p = -p, q = -q;
  const long g = std::gcd(p, q);
  num = p / g;
  den = q / g;
}

Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_long(text, text), 1);
  return Rational(parse_long(text.substr(0, slash), text), parse_long(text.substr(slash + 1), text));
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::optional<Rational> recognize_rational(double x, long max_den, double tol) {
  if (!std::isfinite(x)) return std::nullopt;
  // Convergents h_n/k_n of the continued fraction of x.
  long h_prev = 1, h = static_cast<long>(std::floor(x));
  long k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  std::optional<Rational> best;
  for (int iter = 0; iter < 64; ++iter) {
    if (k > max_den) break;
    if (std::abs(x - static_cast<double>(h) / static_cast<double>(k)) <= tol) {
      best = Rational(h, k);
      break;
    }
    if (frac < 1e-15) break;
    const double inv = 1.0 / frac;
    const long digit = static_cast<long>(std::floor(inv));
    frac = inv - std::floor(inv);
    const long h_next = digit * h + h_prev;
    const long k_next = digit * k + k_prev;
    h_prev = h, k_prev = k;
    h = h_next, k = k_next;
  }
  return best;
}

}  // namespace slgeo
