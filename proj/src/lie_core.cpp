#include "berezin/lie_core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "berezin/errors.hpp"

namespace berezin {

Weight::Weight(std::initializer_list<double> l) : labels(static_cast<Eigen::Index>(l.size())) {
  Eigen::Index i = 0;
  for (double v : l) labels[i++] = v;
}

IntegralDominant is_integral_dominant(const Weight& w) {
  IntegralDominant r{true, true};
  for (Eigen::Index i = 0; i < w.labels.size(); ++i) {
    const double v = w.labels[i];
    if (!std::isfinite(v) || std::abs(v - std::round(v)) > 1e-12) r.integral = false;
    if (!(v >= -1e-12)) r.dominant = false;
  }
  return r;
}

RootSystem build_root_system(std::string_view series, int rank) {
  if (series != "A")
    throw ConfigError("unsupported root-system series '" + std::string(series) +
                      "' (only A is implemented)");
  if (rank < 1 || rank > 8)
    throw ConfigError("unsupported rank " + std::to_string(rank) +
                      " for series A (1..8)");

  RootSystem rs;
  rs.series_label = "A";
  rs.rank = rank;
  rs.cartan_matrix = Eigen::MatrixXi::Zero(rank, rank);
  for (int i = 0; i < rank; ++i) {
    rs.cartan_matrix(i, i) = 2;
    if (i + 1 < rank) rs.cartan_matrix(i, i + 1) = rs.cartan_matrix(i + 1, i) = -1;
  }
  // Simply laced with (alpha,alpha) = 2: (omega_i, omega_j) = (C^{-1})_{ij}.
  rs.gram = rs.cartan_matrix.cast<double>().inverse();
  rs.gram = 0.5 * (rs.gram + rs.gram.transpose()).eval();

  for (int i = 0; i < rank; ++i) {
    Root r;
    r.labels = rs.cartan_matrix.row(i).transpose();
    r.simple_coeffs = Eigen::VectorXi::Unit(rank, i);
    rs.simple_roots.push_back(r);
  }

  // Grow positive roots height by height with the alpha_i-string rule
  // q = p - <beta, alpha_i^vee>.
  auto contains = [&](const Eigen::VectorXi& c) {
    return std::any_of(rs.positive_roots.begin(), rs.positive_roots.end(),
                       [&](const Root& r) { return r.simple_coeffs == c; });
  };
  rs.positive_roots = rs.simple_roots;
  for (std::size_t head = 0; head < rs.positive_roots.size(); ++head) {
    const Root beta = rs.positive_roots[head];
    for (int i = 0; i < rank; ++i) {
      int p = 0;
      Eigen::VectorXi c = beta.simple_coeffs;
      while (true) {
        c[i] -= 1;
        if ((c.array() < 0).any() || c.isZero() || !contains(c)) break;
        ++p;
      }
      const int q = p - beta.labels[i];
      if (q <= 0) continue;
      Root next;
      next.simple_coeffs = beta.simple_coeffs + Eigen::VectorXi::Unit(rank, i);
      if (contains(next.simple_coeffs)) continue;
      next.labels = beta.labels + rs.simple_roots[i].labels;
      rs.positive_roots.push_back(next);
    }
  }
  std::stable_sort(rs.positive_roots.begin(), rs.positive_roots.end(),
                   [](const Root& a, const Root& b) { return a.height() < b.height(); });

  rs.delta = RVector::Zero(rank);
  for (const Root& r : rs.positive_roots) rs.delta += 0.5 * r.labels.cast<double>();
  return rs;
}

int CartanWeylBasis::root_index(const Eigen::VectorXi& c) const {
  for (int r = 0; r < num_roots(); ++r)
    if (roots[r].simple_coeffs == c) return r;
  return -1;
}

CMatrix CartanWeylBasis::defining(const RVector& x) const {
  CMatrix m = CMatrix::Zero(defining_dim, defining_dim);
  for (int b = 0; b < dim(); ++b)
    if (x[b] != 0.0) m += x[b] * basis[b];
  return m;
}

RVector CartanWeylBasis::expand(const CMatrix& m) const {
  RVector v(dim());
  for (int a = 0; a < dim(); ++a) v[a] = -(basis[a] * m).trace().real();
  return gram_inverse * v;
}

RVector CartanWeylBasis::bracket(const RVector& x, const RVector& y) const {
  const CMatrix mx = defining(x), my = defining(y);
  return expand(mx * my - my * mx);
}

RMatrix CartanWeylBasis::ad(const RVector& x) const {
  RMatrix out(dim(), dim());
  for (int b = 0; b < dim(); ++b) out.col(b) = bracket(x, unit(b));
  return out;
}

CVector CartanWeylBasis::root_vector_real(int r) const {
  const int p = num_positive();
  const int pos = r < p ? r : r - p;
  CVector v = CVector::Zero(dim());
  v[index_a(pos)] = 0.5;
  v[index_s(pos)] = r < p ? -0.5 * kI : 0.5 * kI;
  return v;
}

CartanWeylBasis build_cartan_weyl(const RootSystem& rs) {
  CartanWeylBasis cw;
  cw.root_system = rs;
  const int n = rs.rank;
  const int dim = n + 1;
  cw.defining_dim = dim;
  const int p = static_cast<int>(rs.positive_roots.size());

  auto unit = [dim](int i, int j) {
    CMatrix m = CMatrix::Zero(dim, dim);
    m(i, j) = 1.0;
    return m;
  };

  for (int j = 0; j < n; ++j) cw.h.push_back(unit(j, j) - unit(j + 1, j + 1));

  cw.roots = rs.positive_roots;
  for (const Root& r : rs.positive_roots) {
    Root neg;
    neg.labels = -r.labels;
    neg.simple_coeffs = -r.simple_coeffs;
    cw.roots.push_back(neg);
  }

  // Positive root vectors: simple ones are matrix units, the rest are built
  // from extraspecial pairs (smallest simple index), which fixes N > 0 there.
  cw.e.assign(2 * p, CMatrix());
  cw.decomposition.assign(p, {-1, -1});
  for (int r = 0; r < p; ++r) {
    const Root& gamma = rs.positive_roots[r];
    if (gamma.height() == 1) {
      int i = 0;
      while (gamma.simple_coeffs[i] != 1) ++i;
      cw.e[r] = unit(i, i + 1);
      continue;
    }
    bool found = false;
    for (int i = 0; i < n && !found; ++i) {
      Eigen::VectorXi c = gamma.simple_coeffs - Eigen::VectorXi::Unit(n, i);
      if ((c.array() < 0).any()) continue;
      int beta = -1;
      for (int s = 0; s < r; ++s)
        if (rs.positive_roots[s].simple_coeffs == c) beta = s;
      if (beta < 0) continue;
      const CMatrix& ea = cw.e[i];  // simple roots come first
      const CMatrix comm = ea * cw.e[beta] - cw.e[beta] * ea;
      cw.e[r] = comm / comm.norm();
      cw.decomposition[r] = {i, beta};
      found = true;
    }
    if (!found) throw NumericalError("root without simple decomposition");
  }
  for (int r = 0; r < p; ++r) cw.e[r + p] = -cw.e[r].adjoint();

  for (int a = 0; a < 2 * p; ++a) {
    for (int b = 0; b < 2 * p; ++b) {
      if (a == b || cw.negative_of(a) == b) continue;
      const Eigen::VectorXi s = cw.roots[a].simple_coeffs + cw.roots[b].simple_coeffs;
      const int c = cw.root_index(s);
      if (c < 0) continue;
      const CMatrix comm = cw.e[a] * cw.e[b] - cw.e[b] * cw.e[a];
      const cplx num = (cw.e[c].adjoint() * comm).trace();
      const double den = cw.e[c].squaredNorm();
      cw.structure_constants[{a, b}] = (num / den).real();
    }
  }

  const int cdim = n + 2 * p;
  for (int j = 0; j < n; ++j) {
    cw.basis.push_back(-kI * cw.h[j]);
    CVector c = CVector::Zero(cdim);
    c[j] = -kI;
    cw.basis_complex.push_back(c);
  }
  for (int r = 0; r < p; ++r) {
    cw.basis.push_back(cw.e[r] + cw.e[r + p]);
    CVector ca = CVector::Zero(cdim);
    ca[n + r] = 1.0;
    ca[n + r + p] = 1.0;
    cw.basis_complex.push_back(ca);

    cw.basis.push_back(kI * (cw.e[r] - cw.e[r + p]));
    CVector cs = CVector::Zero(cdim);
    cs[n + r] = kI;
    cs[n + r + p] = -kI;
    cw.basis_complex.push_back(cs);
  }

  const int d = static_cast<int>(cw.basis.size());
  cw.gram.resize(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) cw.gram(a, b) = -(cw.basis[a] * cw.basis[b]).trace().real();
  cw.gram_inverse = cw.gram.inverse();
  return cw;
}

long long weyl_dimension(const RootSystem& rs, const Weight& lambda, int k) {
  const auto id = is_integral_dominant(lambda);
  if (lambda.rank() != rs.rank) throw DomainError("weight rank mismatch");
  if (!id.integral || !id.dominant)
    throw DomainError("weyl_dimension requires a dominant integral weight");
  if (k < 0) throw DomainError("weyl_dimension requires k >= 0");
  const RVector mu = lambda.labels * static_cast<double>(k) + rs.delta;
  __int128 num = 1, den = 1;
  for (const Root& a : rs.positive_roots) {
    const RVector al = a.labels.cast<double>();
    num *= static_cast<long long>(std::llround(rs.inner(mu, al)));
    den *= static_cast<long long>(std::llround(rs.inner(rs.delta, al)));
  }
  if (den == 0 || num % den != 0) throw NumericalError("non-integral Weyl dimension");
  return static_cast<long long>(num / den);
}

OrbitDimension orbit_dimension(const RootSystem& rs, const Weight& lambda) {
  if (lambda.rank() != rs.rank) throw DomainError("weight rank mismatch");
  OrbitDimension out;
  int zero = 0;
  for (std::size_t i = 0; i < rs.positive_roots.size(); ++i) {
    const double ip = rs.inner(lambda, rs.positive_roots[i]);
    if (std::abs(ip) > 1e-12)
      out.support.push_back(static_cast<int>(i));
    else
      ++zero;
  }
  out.dimension = rs.dim_algebra() - rs.rank - 2 * zero;
  return out;
}

std::vector<Weight> weyl_group_orbit(const RootSystem& rs, const Weight& w) {
  auto key = [](const RVector& v) {
    std::vector<long long> k(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) k[i] = std::llround(v[i] * 1e9);
    return k;
  };
  std::set<std::vector<long long>> seen;
  std::vector<Weight> out{w};
  seen.insert(key(w.labels));
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (int i = 0; i < rs.rank; ++i) {
      const RVector& mu = out[head].labels;
      RVector next = mu - mu[i] * rs.simple_roots[i].labels.cast<double>();
      if (seen.insert(key(next)).second) out.emplace_back(next);
    }
  }
  return out;
}

}  // namespace berezin
