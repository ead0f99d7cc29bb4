#include "cdlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cdlab/error.hpp"

namespace cdlab {

namespace {

// Neumaier summation; snapshot diagnostics compare sums at the 1e-12 level.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

bool boundary_exceeds(const Field& f, double tol) {
  const auto& v = f.values;
  return !v.empty() && (std::abs(v.front()) > tol || std::abs(v.back()) > tol);
}

}  // namespace

Grid1D::Grid1D(double x_min, double x_max, std::size_t n) {
  if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_min < x_max))
    throw Error(ErrorKind::Configuration, "grid requires finite x_min < x_max");
  if (n < 8) throw Error(ErrorKind::Configuration, "grid requires at least 8 cells");
  x_min_ = x_min;
  x_max_ = x_max;
  n_ = n;
  dx_ = (x_max - x_min) / static_cast<double>(n);
}

Grid1D Grid1D::from_spacing(double x_min, double dx, std::size_t n) {
  if (!(dx > 0.0) || !std::isfinite(dx) || !std::isfinite(x_min))
    throw Error(ErrorKind::Configuration, "grid spacing must be positive and finite");
  if (n < 8) throw Error(ErrorKind::Configuration, "grid requires at least 8 cells");
  Grid1D g;
  g.x_min_ = x_min;
  g.dx_ = dx;
  g.n_ = n;
  g.x_max_ = x_min + static_cast<double>(n) * dx;
  return g;
}

Norm parse_norm(std::string_view text) {
  if (text == "1" || text == "L1") return Norm::L1;
  if (text == "2" || text == "L2") return Norm::L2;
  if (text == "inf" || text == "infinity" || text == "Linf") return Norm::Linf;
  throw Error(ErrorKind::Configuration,
              "unsupported norm '" + std::string(text) + "' (expected 1, 2 or inf)");
}

std::string_view to_string(Norm p) {
  switch (p) {
    case Norm::L1: return "1";
    case Norm::L2: return "2";
    case Norm::Linf: return "inf";
  }
  return "?";
}

double norm_exponent(Norm p) {
  switch (p) {
    case Norm::L1: return 1.0;
    case Norm::L2: return 2.0;
    case Norm::Linf: return std::numeric_limits<double>::infinity();
  }
  return 1.0;
}

void validate(const Field& f) {
  if (f.values.size() != f.grid.n())
    throw Error(ErrorKind::InvalidField, "value count " + std::to_string(f.values.size()) +
                                             " does not match grid size " +
                                             std::to_string(f.grid.n()));
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (!std::isfinite(f.values[i]))
      throw Error(ErrorKind::InvalidField, "non-finite value at cell " + std::to_string(i));
  }
}

double quadrature(const Field& f) {
  validate(f);
  CompensatedSum s;
  for (double v : f.values) s.add(v);
  // sum * width / n rather than sum * dx: exact for constants.
  return s.value() * f.grid.width() / static_cast<double>(f.grid.n());
}

MomentResult first_moment(const Field& f, const Tolerances& tol) {
  validate(f);
  CompensatedSum s;
  for (std::size_t i = 0; i < f.values.size(); ++i) s.add(f.grid.center(i) * f.values[i]);
  return {s.value() * f.grid.dx(), boundary_exceeds(f, tol.far_field)};
}

Primitive cumulative_primitive(const Field& f, const Tolerances& tol) {
  validate(f);
  Primitive out{Field{f.grid, std::vector<double>(f.values.size()), f.time}, true};
  const double dx = f.grid.dx();
  CompensatedSum running;
  double l1 = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    running.add(f.values[i]);
    out.field.values[i] = dx * running.value();
    l1 += std::abs(f.values[i]);
  }
  const double mass = out.field.values.empty() ? 0.0 : out.field.values.back();
  out.zero_mass = std::abs(mass) <= tol.mass_relative * dx * l1;
  return out;
}

double lp_norm(std::span<const double> values, double dx, Norm p) {
  switch (p) {
    case Norm::L1: {
      CompensatedSum s;
      for (double v : values) s.add(std::abs(v));
      return dx * s.value();
    }
    case Norm::L2: {
      CompensatedSum s;
      for (double v : values) s.add(v * v);
      return std::sqrt(dx * s.value());
    }
    case Norm::Linf: {
      double m = 0.0;
      for (double v : values) m = std::max(m, std::abs(v));
      return m;
    }
  }
  throw Error(ErrorKind::Configuration, "unsupported norm");
}

double lp_norm(const Field& f, Norm p) {
  validate(f);
  return lp_norm(f.values, f.grid.dx(), p);
}

Field resample(const Field& f, const Grid1D& target, const Tolerances& tol) {
  validate(f);
  const Grid1D& src = f.grid;
  Field out{target, std::vector<double>(target.n(), 0.0), f.time};

  const double offset = (src.x_min() - target.x_min()) / target.dx();
  const double shift = std::round(offset);
  const bool aligned = std::abs(src.dx() - target.dx()) <= 1e-12 * src.dx() &&
                       std::abs(offset - shift) <= 1e-9;

  if (aligned) {
    const auto k = static_cast<long long>(shift);
    for (std::size_t i = 0; i < src.n(); ++i) {
      const long long j = static_cast<long long>(i) + k;
      if (j < 0 || j >= static_cast<long long>(target.n())) {
        if (std::abs(f.values[i]) > tol.far_field)
          throw Error(ErrorKind::SupportClipping,
                      "cell at x=" + std::to_string(src.center(i)) + " lies outside the target grid");
        continue;
      }
      out.values[static_cast<std::size_t>(j)] = f.values[i];
    }
    return out;
  }

  // General case: overlap-weighted averages of the piecewise-constant source.
  const double hs = src.dx();
  const double ht = target.dx();
  for (std::size_t i = 0; i < src.n(); ++i) {
    const double a = src.x_min() + static_cast<double>(i) * hs;
    const double b = a + hs;
    const double lo = std::max(a, target.x_min());
    const double hi = std::min(b, target.x_max());
    const double covered = std::max(0.0, hi - lo);
    if (covered < hs * (1.0 - 1e-12) && std::abs(f.values[i]) > tol.far_field)
      throw Error(ErrorKind::SupportClipping,
                  "cell at x=" + std::to_string(src.center(i)) + " lies outside the target grid");
    if (covered <= 0.0) continue;
    const auto j0 = static_cast<std::size_t>(std::max(0.0, std::floor((lo - target.x_min()) / ht)));
    for (std::size_t j = j0; j < target.n(); ++j) {
      const double c = target.x_min() + static_cast<double>(j) * ht;
      if (c >= hi) break;
      const double overlap = std::min(hi, c + ht) - std::max(lo, c);
      if (overlap > 0.0) out.values[j] += f.values[i] * overlap / ht;
    }
  }
  return out;
}

}  // namespace cdlab
