#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cdlab {

/// Uniform cell-centered mesh on [x_min, x_max] with n cells.
class Grid1D {
 public:
  /// The unit interval with 8 cells.
  Grid1D() = default;
  /// Throws Configuration unless x_min < x_max and n >= 8.
  Grid1D(double x_min, double x_max, std::size_t n);

  /// Mesh with an exact spacing; used when extending a grid cell by cell.
  static Grid1D from_spacing(double x_min, double dx, std::size_t n);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double width() const noexcept { return x_max_ - x_min_; }
  std::size_t n() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }

  double center(std::size_t i) const noexcept {
    return x_min_ + (static_cast<double>(i) + 0.5) * dx_;
  }
  /// Right interface of cell i, where the cumulative primitive lives.
  double right_edge(std::size_t i) const noexcept {
    return x_min_ + static_cast<double>(i + 1) * dx_;
  }

  bool same_as(const Grid1D& other) const noexcept {
    return n_ == other.n_ && x_min_ == other.x_min_ && x_max_ == other.x_max_;
  }

 private:
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  double dx_ = 0.125;
  std::size_t n_ = 8;
};

/// Cell averages of a scalar function (u or its primitive U) at one time.
struct Field {
  Grid1D grid;
  std::vector<double> values;
  double time = 0.0;
};

struct Tolerances {
  /// Absolute bound on |u| at the two outermost cells.
  double far_field = 1e-10;
  /// "Zero mass" means |mass| <= mass_relative * ||u||_1.
  double mass_relative = 1e-9;
};

enum class Norm { L1, L2, Linf };

/// Accepts "1", "2", "inf" (also "infinity", "Linf").
Norm parse_norm(std::string_view text);
std::string_view to_string(Norm p);
/// The exponent p as a number; infinity for Linf.
double norm_exponent(Norm p);

/// Samples `fn` at the cell centers.
template <typename Fn>
Field sample(const Grid1D& grid, double time, Fn&& fn) {
  Field f{grid, std::vector<double>(grid.n()), time};
  for (std::size_t i = 0; i < grid.n(); ++i) f.values[i] = fn(grid.center(i));
  return f;
}

/// Throws InvalidField on a length mismatch or a non-finite entry.
void validate(const Field& f);

double quadrature(const Field& f);

struct MomentResult {
  double value = 0.0;
  /// Outermost cells exceed the far-field tolerance; the moment is unreliable.
  bool boundary_warning = false;
};

MomentResult first_moment(const Field& f, const Tolerances& tol = {});

struct Primitive {
  /// U_j = dx * sum_{i<=j} u_i, the primitive at the right edge of cell j.
  Field field;
  bool zero_mass = true;
};

Primitive cumulative_primitive(const Field& f, const Tolerances& tol = {});

double lp_norm(const Field& f, Norm p);
double lp_norm(std::span<const double> values, double dx, Norm p);

/// Conservative remap of cell averages onto `target`. Aligned grids with the
/// same spacing are copied exactly. Throws SupportClipping when a cell above
/// the far-field tolerance falls outside the target domain.
Field resample(const Field& f, const Grid1D& target, const Tolerances& tol = {});

}  // namespace cdlab
