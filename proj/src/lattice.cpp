#include "stencil_lab/lattice.hpp"

#include "stencil_lab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stencil_lab {

namespace {

std::string vec_to_string(std::span<const int> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

} // namespace

int Stencil::dim() const {
  return vectors.empty() ? 0 : static_cast<int>(vectors.front().size());
}

std::optional<std::size_t> Stencil::index_of(std::span<const int> v) const {
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != v.size()) continue;
    if (std::equal(v.begin(), v.end(), vectors[i].begin())) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Stencil::negation_index(std::size_t i) const {
  std::vector<int> neg(vectors[i].size());
  for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = -vectors[i][k];
  return index_of(neg);
}

bool Stencil::symmetric_set() const {
  for (std::size_t i = 0; i < vectors.size(); ++i)
    if (!negation_index(i)) return false;
  return true;
}

void Stencil::validate() const {
  if (vectors.empty()) throw ValidationError("stencil: Lambda_1 is empty");
  if (tau.size() != vectors.size())
    throw ValidationError("stencil: tau size does not match vector count");
  const std::size_t d = vectors.front().size();
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& v = vectors[i];
    if (v.size() != d)
      throw ValidationError("stencil: mixed vector dimensions");
    if (std::all_of(v.begin(), v.end(), [](int c) { return c == 0; }))
      throw ValidationError("stencil: 0 is not allowed in Lambda_1");
    for (std::size_t j = i + 1; j < vectors.size(); ++j)
      if (vectors[j].size() == d &&
          std::equal(v.begin(), v.end(), vectors[j].begin()))
        throw ValidationError("stencil: duplicate vector " + vec_to_string(v));
    if (!(tau[i] >= 0.0 && tau[i] <= 1.0))
      throw ValidationError("stencil: tau for " + vec_to_string(v) +
                            " must lie in [0,1]");
  }
  if (!(tau0 >= 0.0 && tau0 <= 1.0))
    throw ValidationError("stencil: tau0 must lie in [0,1]");
}

Domain::Domain(DomainKind kind, std::vector<double> lower,
               std::vector<double> upper, double h)
    : kind_(kind), lower_(std::move(lower)), upper_(std::move(upper)), h_(h) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw ValidationError("domain: lower/upper must be non-empty and match");
  if (!(h_ > 0.0)) throw ValidationError("domain: h must be positive");
  extents_.resize(lower_.size());
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    double len = upper_[k] - lower_[k];
    if (!(len > 0.0))
      throw ValidationError("domain: upper must exceed lower on every axis");
    double ratio = len / h_;
    long n = std::lround(ratio);
    if (n < 1 || std::fabs(ratio - static_cast<double>(n)) > 1e-6 * std::max(1.0, ratio))
      throw ValidationError("domain: extent on axis " + std::to_string(k + 1) +
                            " is not an integer multiple of h");
    extents_[k] = static_cast<int>(kind_ == DomainKind::box ? n + 1 : n);
  }
  strides_.resize(extents_.size());
  std::size_t s = 1;
  for (std::size_t k = extents_.size(); k-- > 0;) {
    strides_[k] = s;
    s *= static_cast<std::size_t>(extents_[k]);
  }
  size_ = s;
}

std::size_t Domain::flat_index(std::span<const int> multi) const {
  std::size_t f = 0;
  for (std::size_t k = 0; k < multi.size(); ++k)
    f += static_cast<std::size_t>(multi[k]) * strides_[k];
  return f;
}

std::vector<int> Domain::multi_index(std::size_t flat) const {
  std::vector<int> m(extents_.size());
  for (std::size_t k = 0; k < extents_.size(); ++k) {
    m[k] = static_cast<int>(flat / strides_[k]);
    flat %= strides_[k];
  }
  return m;
}

void Domain::point(std::size_t flat, std::span<double> out) const {
  for (std::size_t k = 0; k < extents_.size(); ++k) {
    auto i = flat / strides_[k];
    flat %= strides_[k];
    out[k] = lower_[k] + h_ * static_cast<double>(i);
  }
}

std::vector<double> Domain::point(std::size_t flat) const {
  std::vector<double> p(extents_.size());
  point(flat, p);
  return p;
}

Margins interior_margins(const Domain& domain, const Stencil& stencil) {
  Margins m;
  m.lo.assign(domain.dim(), 0);
  m.hi.assign(domain.dim(), 0);
  if (domain.kind() == DomainKind::periodic) return m;
  for (const auto& lam : stencil.vectors)
    for (int k = 0; k < domain.dim(); ++k) {
      m.lo[k] = std::max(m.lo[k], -lam[static_cast<std::size_t>(k)]);
      m.hi[k] = std::max(m.hi[k], lam[static_cast<std::size_t>(k)]);
    }
  return m;
}

Margins unit_margins(const Domain& domain) {
  Margins m;
  int v = domain.kind() == DomainKind::periodic ? 0 : 1;
  m.lo.assign(domain.dim(), v);
  m.hi.assign(domain.dim(), v);
  return m;
}

Margins max_margins(const Margins& a, const Margins& b) {
  Margins m = a;
  for (std::size_t k = 0; k < m.lo.size(); ++k) {
    m.lo[k] = std::max(m.lo[k], b.lo[k]);
    m.hi[k] = std::max(m.hi[k], b.hi[k]);
  }
  return m;
}

Domain shrink(const Domain& domain, const Margins& m) {
  if (domain.kind() == DomainKind::periodic) return domain;
  std::vector<double> lo = domain.lower(), up = domain.upper();
  for (int k = 0; k < domain.dim(); ++k) {
    auto ku = static_cast<std::size_t>(k);
    lo[ku] += domain.h() * m.lo[ku];
    up[ku] -= domain.h() * m.hi[ku];
    if (domain.extents()[ku] - m.lo[ku] - m.hi[ku] < 1)
      throw ValidationError("shift exits box: no interior point remains on axis " +
                            std::to_string(k + 1));
  }
  return Domain(DomainKind::box, std::move(lo), std::move(up), domain.h());
}

GridFunction::GridFunction(Domain domain, double fill)
    : domain_(std::move(domain)), values_(domain_.size(), fill) {}

GridFunction GridFunction::sample(const Expression& e, const Domain& domain,
                                  double t) {
  GridFunction g(domain);
  std::vector<double> x(static_cast<std::size_t>(domain.dim()));
  for (std::size_t i = 0; i < domain.size(); ++i) {
    domain.point(i, x);
    g[i] = e.evaluate(t, x);
  }
  g.set_time(t);
  return g;
}

void for_each_index(const Domain& domain,
                    const std::function<void(std::span<const int>, std::size_t)>& fn) {
  Margins m;
  m.lo.assign(domain.dim(), 0);
  m.hi.assign(domain.dim(), 0);
  for_each_interior(domain, m, fn);
}

void for_each_interior(const Domain& domain, const Margins& m,
                       const std::function<void(std::span<const int>, std::size_t)>& fn) {
  const auto& ext = domain.extents();
  const auto d = static_cast<std::size_t>(domain.dim());
  std::vector<int> idx(d);
  for (std::size_t k = 0; k < d; ++k) {
    idx[k] = m.lo[k];
    if (idx[k] > ext[k] - 1 - m.hi[k]) return; // empty interior
  }
  for (;;) {
    fn(idx, domain.flat_index(idx));
    std::size_t k = d;
    while (k-- > 0) {
      if (++idx[k] <= ext[k] - 1 - m.hi[k]) break;
      idx[k] = m.lo[k];
      if (k == 0) return;
    }
  }
}

namespace {

// Flat index of idx + lam with periodic wrapping.
std::size_t wrapped_neighbor(const Domain& dom, std::span<const int> idx,
                             std::span<const int> lam) {
  std::vector<int> nb(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    int n = dom.extents()[k];
    int v = (idx[k] + lam[k]) % n;
    if (v < 0) v += n;
    nb[k] = v;
  }
  return dom.flat_index(nb);
}

} // namespace

GridFunction shift(const GridFunction& u, std::span<const int> lambda) {
  const Domain& dom = u.domain();
  if (static_cast<int>(lambda.size()) != dom.dim())
    throw ValidationError("shift: lambda dimension mismatch");
  if (dom.kind() == DomainKind::periodic) {
    GridFunction out(dom);
    for_each_index(dom, [&](std::span<const int> idx, std::size_t flat) {
      out[flat] = u[wrapped_neighbor(dom, idx, lambda)];
    });
    if (u.time()) out.set_time(*u.time());
    return out;
  }
  Margins m;
  m.lo.resize(static_cast<std::size_t>(dom.dim()));
  m.hi.resize(static_cast<std::size_t>(dom.dim()));
  for (std::size_t k = 0; k < m.lo.size(); ++k) {
    m.lo[k] = std::max(0, -lambda[k]);
    m.hi[k] = std::max(0, lambda[k]);
  }
  Domain sub = shrink(dom, m);
  GridFunction out(sub);
  std::vector<int> src(static_cast<std::size_t>(dom.dim()));
  for_each_index(sub, [&](std::span<const int> idx, std::size_t flat) {
    for (std::size_t k = 0; k < src.size(); ++k)
      src[k] = idx[k] + m.lo[k] + lambda[k];
    out[flat] = u[dom.flat_index(src)];
  });
  if (u.time()) out.set_time(*u.time());
  return out;
}

GridFunction delta(const GridFunction& u, std::span<const int> lambda) {
  GridFunction shifted = shift(u, lambda);
  GridFunction base = restrict_to(u, shifted.domain());
  const double inv_h = 1.0 / u.domain().h();
  for (std::size_t i = 0; i < shifted.size(); ++i)
    shifted[i] = (shifted[i] - base[i]) * inv_h;
  return shifted;
}

GridFunction delta2(const GridFunction& u, std::span<const int> lambda) {
  const Domain& dom = u.domain();
  if (static_cast<int>(lambda.size()) != dom.dim())
    throw ValidationError("delta2: lambda dimension mismatch");
  Margins m;
  m.lo.resize(static_cast<std::size_t>(dom.dim()));
  m.hi.resize(static_cast<std::size_t>(dom.dim()));
  for (std::size_t k = 0; k < m.lo.size(); ++k)
    m.lo[k] = m.hi[k] = dom.kind() == DomainKind::periodic ? 0 : std::abs(lambda[k]);
  Domain sub = shrink(dom, m);
  GridFunction out(sub);
  const double inv_h2 = 1.0 / (dom.h() * dom.h());
  std::vector<int> plus(static_cast<std::size_t>(dom.dim()));
  std::vector<int> minus(plus.size());
  std::vector<int> center(plus.size());
  for_each_index(sub, [&](std::span<const int> idx, std::size_t flat) {
    if (dom.kind() == DomainKind::periodic) {
      std::vector<int> neg(lambda.size());
      for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = -lambda[k];
      double up = u[wrapped_neighbor(dom, idx, lambda)];
      double um = u[wrapped_neighbor(dom, idx, neg)];
      out[flat] = (up - 2.0 * u[dom.flat_index(idx)] + um) * inv_h2;
      return;
    }
    for (std::size_t k = 0; k < plus.size(); ++k) {
      center[k] = idx[k] + m.lo[k];
      plus[k] = center[k] + lambda[k];
      minus[k] = center[k] - lambda[k];
    }
    out[flat] = (u[dom.flat_index(plus)] - 2.0 * u[dom.flat_index(center)] +
                 u[dom.flat_index(minus)]) *
                inv_h2;
  });
  if (u.time()) out.set_time(*u.time());
  return out;
}

std::vector<GridFunction> central_gradient(const GridFunction& u) {
  const Domain& dom = u.domain();
  Margins m = unit_margins(dom);
  Domain sub = shrink(dom, m);
  std::vector<GridFunction> grad;
  const double inv_2h = 1.0 / (2.0 * dom.h());
  for (int axis = 0; axis < dom.dim(); ++axis) {
    GridFunction g(sub);
    std::vector<int> e(static_cast<std::size_t>(dom.dim()), 0);
    e[static_cast<std::size_t>(axis)] = 1;
    std::vector<int> plus(e.size()), minus(e.size());
    for_each_index(sub, [&](std::span<const int> idx, std::size_t flat) {
      if (dom.kind() == DomainKind::periodic) {
        std::vector<int> ne(e.size());
        for (std::size_t k = 0; k < e.size(); ++k) ne[k] = -e[k];
        g[flat] = (u[wrapped_neighbor(dom, idx, e)] -
                   u[wrapped_neighbor(dom, idx, ne)]) *
                  inv_2h;
        return;
      }
      for (std::size_t k = 0; k < e.size(); ++k) {
        plus[k] = idx[k] + m.lo[k] + e[k];
        minus[k] = idx[k] + m.lo[k] - e[k];
      }
      g[flat] = (u[dom.flat_index(plus)] - u[dom.flat_index(minus)]) * inv_2h;
    });
    if (u.time()) g.set_time(*u.time());
    grad.push_back(std::move(g));
  }
  return grad;
}

GridFunction gradient_functional_U(const GridFunction& u, const Stencil& stencil) {
  const Domain& dom = u.domain();
  Margins m = interior_margins(dom, stencil);
  Domain sub = shrink(dom, m);
  GridFunction out(sub);
  const double inv_h = 1.0 / dom.h();
  std::vector<int> nb(static_cast<std::size_t>(dom.dim()));
  for_each_index(sub, [&](std::span<const int> idx, std::size_t flat) {
    double sum = 0.0;
    for (std::size_t li = 0; li < stencil.size(); ++li) {
      const auto& lam = stencil.vectors[li];
      double here, there;
      if (dom.kind() == DomainKind::periodic) {
        here = u[dom.flat_index(idx)];
        there = u[wrapped_neighbor(dom, idx, lam)];
      } else {
        for (std::size_t k = 0; k < nb.size(); ++k) nb[k] = idx[k] + m.lo[k];
        here = u[dom.flat_index(nb)];
        for (std::size_t k = 0; k < nb.size(); ++k) nb[k] += lam[k];
        there = u[dom.flat_index(nb)];
      }
      double d = stencil.tau[li] * (there - here) * inv_h;
      sum += d * d;
    }
    out[flat] = std::sqrt(sum);
  });
  if (u.time()) out.set_time(*u.time());
  return out;
}

double sup_norm(const GridFunction& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s = std::max(s, std::fabs(u[i]));
  return s;
}

GridFunction restrict_to(const GridFunction& u, const Domain& sub) {
  const Domain& dom = u.domain();
  if (sub == dom) return u;
  const double ratio = sub.h() / dom.h();
  const long stride = std::lround(ratio);
  if (stride < 1 ||
      std::fabs(ratio - static_cast<double>(stride)) > 1e-9 * ratio)
    throw ValidationError(
        "restrict_to: sub-lattice spacing is not an integer multiple");
  std::vector<int> offset(static_cast<std::size_t>(dom.dim()));
  for (int k = 0; k < dom.dim(); ++k) {
    auto ku = static_cast<std::size_t>(k);
    double r = (sub.lower()[ku] - dom.lower()[ku]) / dom.h();
    long o = std::lround(r);
    if (std::fabs(r - static_cast<double>(o)) > 1e-6)
      throw ValidationError("restrict_to: sub-lattice offset is not integral");
    if (o < 0 || o + stride * (sub.extents()[ku] - 1) >= dom.extents()[ku])
      throw ValidationError("restrict_to: sub-lattice leaves the box");
    offset[ku] = static_cast<int>(o);
  }
  GridFunction out(sub);
  std::vector<int> src(offset.size());
  const int s = static_cast<int>(stride);
  for_each_index(sub, [&](std::span<const int> idx, std::size_t flat) {
    for (std::size_t k = 0; k < src.size(); ++k)
      src[k] = s * idx[k] + offset[k];
    out[flat] = u[dom.flat_index(src)];
  });
  if (u.time()) out.set_time(*u.time());
  return out;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  if (a.domain().extents() != b.domain().extents())
    throw ValidationError("max_abs_diff: grid extents differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s = std::max(s, std::fabs(a[i] - b[i]));
  return s;
}

} // namespace stencil_lab
