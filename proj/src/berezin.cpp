#include "berezin/berezin.hpp"

#include <Eigen/QR>
#include <cmath>
#include <functional>
#include <random>

#include "berezin/errors.hpp"

namespace berezin {

Quantizer::Quantizer(const Irrep& rep, const QuadratureRule& q, int degree)
    : rep_(&rep), rule_(&q), moments_(q, &rep, degree) {
  if (q.lambda.labels != rep.lambda.labels) throw DomainError("Quantizer: rule and rep differ in lambda");
}

BerezinOperator Quantizer::quantize(const OrbitFunction& f) const {
  BerezinOperator op;
  op.k = rep_->k;
  op.function = f.describe();
  op.quadrature = rule_->scheme;
  const double d = rep_->dimension;
  if (f.is_polynomial() && f.degree() <= moments_.degree()) {
    op.matrix = d * moments_.integrate(f);
  } else {
    if (!f.right_invariant() && rule_->right_invariant)
      throw DomainError("quantize: rule collapses the stabilizer fiber but f is not right invariant");
    CMatrix acc = CMatrix::Zero(rep_->dimension, rep_->dimension);
    visit_nodes(*rule_, rep_, [&](const NodeView& v) {
      const double c = v.weight * f.at_node(v);
      if (c != 0.0) acc.noalias() += c * (*v.vector) * v.vector->adjoint();
    });
    op.matrix = d * acc;
  }
  op.asymmetry = op.matrix.size() ? (op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  op.matrix = 0.5 * (op.matrix + op.matrix.adjoint()).eval();
  return op;
}

BerezinOperator quantize(const Irrep& rep, const OrbitFunction& f, const QuadratureRule& q) {
  const Quantizer qz(rep, q, f.is_polynomial() ? f.degree() : 0);
  return qz.quantize(f);
}

cplx covariant_symbol(const CMatrix& a, const Irrep& rep, const OrbitPoint& sigma) {
  if (!sigma.source) throw DomainError("covariant_symbol: orbit point without a group element");
  const CVector v = group_unitary(rep, *sigma.source) * rep.hw_vector;
  return v.dot(a * v);
}

OrbitFunction poisson_bracket(const Quantizer& qz, const OrbitFunction& f, const OrbitFunction& g,
                              PoissonSign sign) {
  const CartanWeylBasis& cw = *qz.rep().cw;
  if (f.is_polynomial() && g.is_polynomial()) return poisson_polynomial(cw, f, g, sign);
  // poisson_general realizes the bracket of the strictness theorem; the
  // flipped convention is its negative.
  const double s = sign == PoissonSign::flipped ? -1.0 : 1.0;
  const QuadratureRule& q = qz.rule();
  std::vector<double> table(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    table[i] = s * poisson_general(cw, q.lambda, f, g, q.node(i));
  return OrbitFunction::tabulated(std::move(table));
}

double dirac_defect(const Quantizer& qz, const OrbitFunction& f, const OrbitFunction& g,
                    PoissonSign sign) {
  const CMatrix qf = qz(f), qg = qz(g);
  const CMatrix qb = qz(poisson_bracket(qz, f, g, sign));
  const double k = qz.rep().k;
  return operator_norm(kI * k * (qf * qg - qg * qf) - qb);
}

double jordan_defect(const Quantizer& qz, const OrbitFunction& f, const OrbitFunction& g) {
  const CMatrix qf = qz(f), qg = qz(g);
  return operator_norm(0.5 * (qf * qg + qg * qf) - qz(f * g));
}

double product_defect(const Quantizer& qz, const OrbitFunction& f, const OrbitFunction& g) {
  const CMatrix qf = qz(f), qg = qz(g);
  return operator_norm(qf * qg - qz(f * g));
}

double sup_norm(const CartanWeylBasis& cw, const Weight& lambda, const OrbitFunction& f,
                int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const RVector th0 = base_point(cw, lambda).theta;
  struct Cand {
    double v;
    GroupElement x;
  };
  std::vector<Cand> best;
  const std::size_t keep = 6;
  for (int i = 0; i < samples; ++i) {
    GroupElement x = haar_random_element(cw, rng);
    const double v = std::abs(f.on_orbit(coadjoint_act(cw, defining_unitary(cw, x), th0)));
    if (best.size() < keep || v > best.back().v) {
      best.push_back({v, std::move(x)});
      std::sort(best.begin(), best.end(), [](const Cand& a, const Cand& b) { return a.v > b.v; });
      if (best.size() > keep) best.pop_back();
    }
  }
  double top = best.empty() ? 0.0 : best.front().v;
  for (Cand& c : best) {
    CMatrix u = defining_unitary(cw, c.x);
    double v = c.v;
    for (double h = 0.1; h > 1e-9; h *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (int b = 0; b < cw.dim(); ++b)
          for (double sgn : {1.0, -1.0}) {
            const CMatrix u2 = u * expm_anti_hermitian(cw.basis[b], sgn * h);
            const double v2 = std::abs(f.on_orbit(coadjoint_act(cw, u2, th0)));
            if (v2 > v) {
              v = v2;
              u = u2;
              improved = true;
            }
          }
      }
    }
    top = std::max(top, v);
  }
  return top;
}

double norm_gap(const Quantizer& qz, const OrbitFunction& f, std::optional<double> sup) {
  const double s = sup ? *sup : sup_norm(*qz.rep().cw, qz.rep().lambda, f);
  return s - operator_norm(qz(f));
}

double equivariance_defect(const Quantizer& qz, const OrbitFunction& f, const GroupElement& x) {
  const CartanWeylBasis& cw = *qz.rep().cw;
  const CMatrix u = group_unitary(qz.rep(), x);
  const CMatrix lhs = qz(f.transformed(adjoint_matrix(cw, x)));
  const CMatrix rhs = u * qz(f) * u.adjoint();
  return operator_norm(lhs - rhs);
}

std::vector<OrbitFunction> polynomial_family(const CartanWeylBasis& cw, int degree) {
  std::vector<OrbitFunction> out{OrbitFunction::constant(1.0)};
  const int n = cw.dim();
  std::vector<int> idx;
  std::function<void(int)> rec = [&](int start) {
    if (!idx.empty()) {
      std::vector<RVector> xs;
      for (int b : idx) xs.push_back(cw.unit(b));
      out.push_back(OrbitFunction::product(xs));
    }
    if (static_cast<int>(idx.size()) == degree) return;
    for (int b = start; b < n; ++b) {
      idx.push_back(b);
      rec(b);
      idx.pop_back();
    }
  };
  rec(0);
  return out;
}

int completeness_rank(const Quantizer& qz, const std::vector<OrbitFunction>& family) {
  const int d = qz.rep().dimension;
  CMatrix cols(d * d, static_cast<Eigen::Index>(family.size()));
  for (std::size_t i = 0; i < family.size(); ++i) {
    const CMatrix q = qz(family[i]);
    cols.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const CVector>(q.data(), d * d);
  }
  return numerical_rank(cols, 1e-9);
}

GrowthFit dimension_growth(const RootSystem& rs, const Weight& lambda, const std::vector<int>& ks) {
  if (ks.size() < 3) throw DomainError("dimension_growth: at least three levels required");
  GrowthFit fit;
  fit.expected = orbit_dimension(rs, lambda).dimension / 2.0;
  const Eigen::Index n = static_cast<Eigen::Index>(ks.size());
  RMatrix a(n, 3);
  RVector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = ks[i];
    if (k < 1) throw DomainError("dimension_growth: levels must be positive");
    const long long d = weyl_dimension(rs, lambda, k);
    fit.k.push_back(k);
    fit.d.push_back(d);
    a(i, 0) = 1.0;
    a(i, 1) = std::log(static_cast<double>(k));
    a(i, 2) = 1.0 / k;
    y[i] = std::log(static_cast<double>(d));
  }
  const RVector beta = a.colPivHouseholderQr().solve(y);
  fit.exponent = beta[1];
  const RVector lx = a.col(1);
  const double mx = lx.mean(), my = y.mean();
  const double sxy = ((lx.array() - mx) * (y.array() - my)).sum();
  const double sxx = (lx.array() - mx).square().sum();
  const double syy = (y.array() - my).square().sum();
  fit.exponent_plain = sxx > 0 ? sxy / sxx : 0.0;
  fit.r2_plain = (sxx > 0 && syy > 0) ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace berezin
