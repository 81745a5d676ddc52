#include "berezin/coherent.hpp"

#include <cmath>
#include <numbers>

#include "berezin/errors.hpp"

namespace berezin {

CoherentState coherent_state(const Irrep& rep, const GroupElement& x) {
  CoherentState s;
  s.rep = &rep;
  s.x = x;
  s.vector = group_unitary(rep, x) * rep.hw_vector;
  s.orbit_point = coadjoint_act(*rep.cw, x, base_point(*rep.cw, rep.lambda));
  return s;
}

double transition_probability(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DomainError("transition_probability: size mismatch");
  return std::norm(a.dot(b));
}

double transition_probability(const CoherentState& a, const CoherentState& b) {
  return transition_probability(a.vector, b.vector);
}

double check_normalization(const MomentTensor& moments, const CVector& psi) {
  const CMatrix one = moments.integrate(OrbitFunction::constant(1.0));
  return static_cast<double>(moments.rep_dimension()) * psi.dot(one * psi).real();
}

double check_normalization(const Irrep& rep, const QuadratureRule& q, const CVector& psi) {
  return check_normalization(MomentTensor(q, &rep, 0), psi);
}

double gilmore_check(const Irrep& rep_k, const Irrep& rep_1, const GroupElement& x) {
  if (rep_k.lambda.labels != rep_1.lambda.labels || rep_1.k != 1)
    throw DomainError("gilmore_check: representations must share lambda, second at level 1");
  const cplx a = rep_k.hw_vector.dot(group_unitary(rep_k, x) * rep_k.hw_vector);
  const cplx b = rep_1.hw_vector.dot(group_unitary(rep_1, x) * rep_1.hw_vector);
  return std::abs(a - std::pow(b, rep_k.k));
}

double subgroup_average(const CartanWeylBasis& cw, const Weight& lambda, const OrbitFunction& f,
                        int nodes) {
  const RootSystem& rs = cw.root_system;
  const int n = cw.rank();
  std::vector<int> orth;
  for (int p = 0; p < cw.num_positive(); ++p)
    if (std::abs(rs.inner(lambda, rs.positive_roots[p])) < 1e-12) orth.push_back(p);
  if (orth.size() > 1 && !lambda.is_zero())
    throw DomainError("subgroup_average: stabilizer with more than one root is not supported");

  // torus part: trapezoid in every H_j; one SU(2) factor for an orthogonal root
  std::vector<QuadratureAxis> axes;
  for (int j = 0; j < n; ++j) {
    QuadratureAxis a;
    a.generator = cw.unit(j);
    for (int i = 0; i < nodes; ++i) {
      a.nodes.push_back(2.0 * std::numbers::pi * i / nodes);
      a.weights.push_back(1.0 / nodes);
    }
    axes.push_back(a);
  }
  if (lambda.is_zero()) {
    QuadratureRule q = build_quadrature(
        std::shared_ptr<const CartanWeylBasis>(&cw, [](const CartanWeylBasis*) {}), lambda, 0,
        nodes / 2, QuadratureOptions{false, false});
    double s = 0.0;
    visit_nodes(q, nullptr, [&](const NodeView& v) { s += v.weight * f.at_node(v); });
    return s;
  }
  if (!orth.empty()) {
    const int p = orth.front();
    const RVector coroot = rs.positive_roots[p].simple_coeffs.cast<double>();
    RVector h = RVector::Zero(cw.dim());
    h.head(n) = coroot;
    std::vector<double> x, w;
    gauss_legendre(nodes, x, w);
    QuadratureAxis t1, s, t2;
    t1.generator = t2.generator = h;
    s.generator = cw.unit(cw.index_a(p));
    for (int i = 0; i < nodes; ++i) {
      t1.nodes.push_back(2.0 * std::numbers::pi * i / nodes);
      t1.weights.push_back(1.0 / nodes);
      s.nodes.push_back(0.5 * std::acos(x[i]));
      s.weights.push_back(0.5 * w[i]);
    }
    t2 = t1;
    t2.generator = h;
    axes.push_back(t1);
    axes.push_back(s);
    axes.push_back(t2);
  }
  QuadratureRule q;
  q.cw = std::shared_ptr<const CartanWeylBasis>(&cw, [](const CartanWeylBasis*) {});
  q.lambda = lambda;
  q.right_invariant = false;
  q.scheme = "stabilizer";
  q.axes = std::move(axes);
  double s = 0.0;
  visit_nodes(q, nullptr, [&](const NodeView& v) { s += v.weight * f.at_node(v); });
  return s;
}

DuffieldResult duffield_concentration(const Irrep& rep_1, const std::vector<int>& ks,
                                      const OrbitFunction& f, int f_degree) {
  if (rep_1.k != 1) throw DomainError("duffield_concentration: level-one representation required");
  const CartanWeylBasis& cw = *rep_1.cw;
  DuffieldResult out;
  out.subgroup_average = subgroup_average(cw, rep_1.lambda, f);
  QuadratureOptions opts;
  opts.right_invariant = f.right_invariant();
  for (int k : ks) {
    const QuadratureRule q = build_quadrature(rep_1.cw, rep_1.lambda, k, f_degree, opts);
    const double d = static_cast<double>(weyl_dimension(cw.root_system, rep_1.lambda, k));
    double mu = 0.0;
    visit_nodes(q, &rep_1, [&](const NodeView& v) {
      const double p = std::norm(rep_1.hw_vector.dot(*v.vector));
      mu += v.weight * std::pow(p, k) * f.at_node(v);
    });
    mu *= d;
    out.k.push_back(k);
    out.mu.push_back(mu);
    out.gap.push_back(std::abs(mu - out.subgroup_average));
  }
  return out;
}

double kernel_localization(const Irrep& rep, const GroupElement& y, const OrbitFunction& f,
                           const QuadratureRule& q) {
  const CVector vy = group_unitary(rep, y) * rep.hw_vector;
  const double d = rep.dimension;
  if (f.is_polynomial()) {
    const MomentTensor mt(q, &rep, f.degree());
    return d * vy.dot(mt.integrate(f) * vy).real();
  }
  double s = 0.0;
  visit_nodes(q, &rep, [&](const NodeView& v) {
    s += v.weight * std::norm(vy.dot(*v.vector)) * f.at_node(v);
  });
  return d * s;
}

cplx overlap_action(const Irrep& rep_1, const GroupElement& x) {
  const cplx ov = rep_1.hw_vector.dot(group_unitary(rep_1, x) * rep_1.hw_vector);
  if (std::abs(ov) < 1e-14) throw DomainError("overlap_action: vanishing overlap");
  return -std::log(ov);
}

}  // namespace berezin
