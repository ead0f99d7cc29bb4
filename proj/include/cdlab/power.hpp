#pragma once

#include <cmath>
#include <utility>

namespace cdlab {

/// |x|^q evaluated in the solver's inner loops. Exponents that are multiples
/// of 1/4 (q = 1.25, 1.5, 1.75, 2, ...) use square roots instead of pow.
class PowerLaw {
 public:
  explicit PowerLaw(double q) : q_(q) {
    const double k = 4.0 * q;
    if (k == std::round(k) && k >= 4.0 && k <= 16.0) quarters_ = static_cast<int>(k);
  }

  double exponent() const noexcept { return q_; }

  /// Calls fn with a callable double(double) computing |x|^q for x >= 0;
  /// lets loops be instantiated once per exponent class.
  template <typename Fn>
  decltype(auto) dispatch(Fn&& fn) const {
    switch (quarters_) {
      case 5: return fn([](double x) { return x * std::sqrt(std::sqrt(x)); });
      case 6: return fn([](double x) { return x * std::sqrt(x); });
      case 7: return fn([](double x) { const double r = std::sqrt(x); return x * r * std::sqrt(r); });
      case 8: return fn([](double x) { return x * x; });
      case 10: return fn([](double x) { return x * x * std::sqrt(x); });
      case 12: return fn([](double x) { return x * x * x; });
      default: {
        const double q = q_;
        return fn([q](double x) { return std::pow(x, q); });
      }
    }
  }

  double operator()(double x) const {
    return dispatch([x](auto f) { return f(std::abs(x)); });
  }

 private:
  double q_;
  int quarters_ = 0;
};

}  // namespace cdlab
