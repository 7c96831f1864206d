#pragma once

#include "stencil_lab/expr.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace stencil_lab {

/// Finite set of nonzero integer step vectors Lambda_1 with per-vector
/// weights tau_lambda in [0,1] and the gradient weight tau_0 in [0,1].
struct Stencil {
  std::vector<std::vector<int>> vectors;
  std::vector<double> tau;
  double tau0 = 0.0;

  int dim() const;
  std::size_t size() const { return vectors.size(); }
  /// Index of `v` in `vectors`, or nullopt.
  std::optional<std::size_t> index_of(std::span<const int> v) const;
  /// Index of -vectors[i], or nullopt.
  std::optional<std::size_t> negation_index(std::size_t i) const;
  /// True when Lambda_1 = -Lambda_1 as a set.
  bool symmetric_set() const;
  /// Throws ValidationError: empty set, zero vector, duplicate vector,
  /// mixed dimensions, tau outside [0,1].
  void validate() const;
};

enum class DomainKind { box, periodic };

/// Uniform lattice of spacing h over an axis-aligned box. A box domain
/// includes both endpoints per axis; a periodic domain identifies upper
/// with lower and keeps points in [lower, upper). Period compatibility of
/// coefficient expressions on periodic domains is the caller's
/// responsibility. Off-lattice evaluation is out of scope: grid functions
/// live on lattice points only.
class Domain {
public:
  Domain(DomainKind kind, std::vector<double> lower, std::vector<double> upper,
         double h);

  DomainKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(lower_.size()); }
  double h() const { return h_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  /// Lattice points per axis.
  const std::vector<int>& extents() const { return extents_; }
  std::size_t size() const { return size_; }

  std::size_t flat_index(std::span<const int> multi) const;
  std::vector<int> multi_index(std::size_t flat) const;
  void point(std::size_t flat, std::span<double> out) const;
  std::vector<double> point(std::size_t flat) const;

  bool operator==(const Domain& other) const = default;

private:
  DomainKind kind_;
  std::vector<double> lower_, upper_;
  double h_;
  std::vector<int> extents_;
  std::vector<std::size_t> strides_; // row-major, last axis fastest
  std::size_t size_;
};

/// Per-axis index margins of the interior set: a point is interior when
/// every stencil shift stays inside the box. Periodic domains have zero
/// margins.
struct Margins {
  std::vector<int> lo, hi;
};

Margins interior_margins(const Domain& domain, const Stencil& stencil);
Margins unit_margins(const Domain& domain);
Margins max_margins(const Margins& a, const Margins& b);
/// Box shrunk by the margins (no-op for periodic). Throws ValidationError
/// when no interior point remains.
Domain shrink(const Domain& domain, const Margins& m);

/// Values on the lattice points of a domain, with an optional time label.
class GridFunction {
public:
  explicit GridFunction(Domain domain, double fill = 0.0);

  const Domain& domain() const { return domain_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  std::optional<double> time() const { return time_; }
  void set_time(double t) { time_ = t; }

  /// Samples an expression at every lattice point.
  static GridFunction sample(const Expression& e, const Domain& domain, double t);

private:
  Domain domain_;
  std::vector<double> values_;
  std::optional<double> time_;
};

/// Calls fn(multi, flat) over all indices in row-major order, optionally
/// restricted by margins.
void for_each_index(const Domain& domain,
                    const std::function<void(std::span<const int>, std::size_t)>& fn);
void for_each_interior(const Domain& domain, const Margins& m,
                       const std::function<void(std::span<const int>, std::size_t)>& fn);

/// u(. + h*lambda). Periodic: same domain, wrapped. Box: result lives on the
/// box shrunk so the source point stays inside; throws when that is empty.
GridFunction shift(const GridFunction& u, std::span<const int> lambda);
/// Forward difference quotient (u(x+h*lambda) - u(x)) / h, on the same
/// (shrunk for box) domain as shift.
GridFunction delta(const GridFunction& u, std::span<const int> lambda);
/// Symmetric second difference (u(x+h*lambda) - 2u(x) + u(x-h*lambda)) / h^2.
GridFunction delta2(const GridFunction& u, std::span<const int> lambda);
/// Central difference gradient, one component per axis, all on the
/// unit-shrunk (box) or full (periodic) domain.
std::vector<GridFunction> central_gradient(const GridFunction& u);
/// sqrt(sum_lambda |tau_lambda * delta_lambda u|^2) on the interior domain.
GridFunction gradient_functional_U(const GridFunction& u, const Stencil& stencil);

double sup_norm(const GridFunction& u);
/// Values of u at the lattice points of `sub`, which must be a compatible
/// sub-lattice (spacing an integer multiple of u's up to roundoff, integer
/// offset, every sub point inside u's box).
GridFunction restrict_to(const GridFunction& u, const Domain& sub);
/// Max abs difference; domains must have equal extents.
double max_abs_diff(const GridFunction& a, const GridFunction& b);

} // namespace stencil_lab
