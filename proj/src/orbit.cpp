#include "berezin/orbit.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "berezin/errors.hpp"

namespace berezin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

RVector augmented(const RVector& x, double head) {
  RVector a(x.size() + 1);
  a[0] = head;
  a.tail(x.size()) = x;
  return a;
}

}  // namespace

OrbitPoint base_point(const CartanWeylBasis& cw, const Weight& lambda) {
  if (lambda.rank() != cw.rank()) throw DomainError("base_point: weight rank mismatch");
  OrbitPoint p;
  p.theta = RVector::Zero(cw.dim());
  p.theta.head(cw.rank()) = lambda.labels;
  p.source = GroupElement::identity();
  return p;
}

RMatrix adjoint_matrix(const CartanWeylBasis& cw, const GroupElement& x) {
  const CMatrix u = defining_unitary(cw, x);
  RMatrix ad(cw.dim(), cw.dim());
  for (int b = 0; b < cw.dim(); ++b) ad.col(b) = cw.expand(u * cw.basis[b] * u.adjoint());
  return ad;
}

CMatrix functional_matrix(const CartanWeylBasis& cw, const RVector& theta) {
  return cw.defining(cw.gram_inverse * theta);
}

RVector coadjoint_act(const CartanWeylBasis& cw, const CMatrix& u, const RVector& theta) {
  const CMatrix z = u * functional_matrix(cw, theta) * u.adjoint();
  RVector out(cw.dim());
  for (int b = 0; b < cw.dim(); ++b) out[b] = -(z * cw.basis[b]).trace().real();
  return out;
}

OrbitPoint coadjoint_act(const CartanWeylBasis& cw, const GroupElement& x,
                         const OrbitPoint& theta) {
  OrbitPoint out;
  out.theta = coadjoint_act(cw, defining_unitary(cw, x), theta.theta);
  if (theta.source) out.source = x * *theta.source;
  return out;
}

RVector orbit_invariants(const CartanWeylBasis& cw, const RVector& theta) {
  const CMatrix iz = kI * functional_matrix(cw, theta);
  const int n = cw.rank();
  RVector inv(n);
  CMatrix pw = iz;
  for (int p = 2; p <= n + 1; ++p) {
    pw = pw * iz;
    inv[p - 2] = pw.trace().real();
  }
  return inv;
}

double quadratic_casimir(const CartanWeylBasis& cw, const RVector& theta) {
  return theta.dot(cw.gram_inverse * theta);
}

bool on_orbit(const CartanWeylBasis& cw, const Weight& lambda, const RVector& theta,
              double tol) {
  const RVector a = orbit_invariants(cw, base_point(cw, lambda).theta);
  const RVector b = orbit_invariants(cw, theta);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
}

OrbitPoint momentum_map(const Irrep& rep, const CVector& psi, int k) {
  if (psi.size() != rep.dimension) throw DomainError("momentum_map: vector size mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-8) throw DomainError("momentum_map: vector is not a unit vector");
  const int kk = k > 0 ? k : rep.k;
  OrbitPoint p;
  p.theta.resize(rep.cw->dim());
  for (int b = 0; b < rep.cw->dim(); ++b)
    p.theta[b] = (kI * psi.dot(rep.basis_matrices[b] * psi)).real() / kk;
  return p;
}

double sign_factor(PoissonSign s) { return s == PoissonSign::flipped ? 1.0 : -1.0; }

PoissonSign parse_sign(std::string_view name) {
  if (name == "theorem") return PoissonSign::theorem;
  if (name == "liepbr") return PoissonSign::liepbr;
  if (name == "flipped") return PoissonSign::flipped;
  throw ConfigError("unknown sign convention '" + std::string(name) + "'");
}

std::string to_string(PoissonSign s) {
  switch (s) {
    case PoissonSign::theorem: return "theorem";
    case PoissonSign::liepbr: return "liepbr";
    case PoissonSign::flipped: return "flipped";
  }
  return "theorem";
}

double poisson_linear(const CartanWeylBasis& cw, const RVector& x, const RVector& y,
                      const RVector& theta, PoissonSign sign) {
  return sign_factor(sign) * theta.dot(cw.bracket(x, y));
}

// ---------------------------------------------------------------- functions

OrbitFunction OrbitFunction::constant(double c) {
  OrbitFunction f;
  f.terms_.push_back({c, {}});
  return f;
}

OrbitFunction OrbitFunction::linear(const RVector& x) {
  OrbitFunction f;
  f.terms_.push_back({1.0, {x}});
  return f;
}

OrbitFunction OrbitFunction::product(const std::vector<RVector>& xs, double c) {
  OrbitFunction f;
  f.terms_.push_back({c, xs});
  return f;
}

OrbitFunction OrbitFunction::polynomial(std::vector<Monomial> terms) {
  OrbitFunction f;
  f.terms_ = std::move(terms);
  return f;
}

OrbitFunction OrbitFunction::group_coefficient(const CMatrix& c) {
  OrbitFunction f;
  f.kind_ = Kind::group_coefficient;
  f.coefficient_ = c;
  return f;
}

OrbitFunction OrbitFunction::tabulated(std::vector<double> values) {
  OrbitFunction f;
  f.kind_ = Kind::tabulated;
  f.table_ = std::move(values);
  return f;
}

OrbitFunction OrbitFunction::custom(Custom fn, std::string label) {
  OrbitFunction f;
  f.kind_ = Kind::custom;
  f.custom_ = std::move(fn);
  f.label_ = std::move(label);
  return f;
}

int OrbitFunction::degree() const {
  if (kind_ != Kind::polynomial) return -1;
  int d = 0;
  for (const Monomial& m : terms_) d = std::max(d, static_cast<int>(m.factors.size()));
  return d;
}

std::string OrbitFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::polynomial:
      os << "polynomial(terms=" << terms_.size() << ", degree=" << degree() << ")";
      break;
    case Kind::group_coefficient: os << "group_coefficient"; break;
    case Kind::tabulated: os << "tabulated(" << table_.size() << ")"; break;
    case Kind::custom: os << label_; break;
  }
  return os.str();
}

double OrbitFunction::on_orbit(const RVector& theta) const {
  if (kind_ == Kind::custom) return custom_(theta);
  if (kind_ != Kind::polynomial) throw DomainError("function has no orbit evaluator: " + describe());
  double s = 0.0;
  for (const Monomial& m : terms_) {
    double v = m.coefficient;
    for (const RVector& x : m.factors) v *= theta.dot(x);
    s += v;
  }
  return s;
}

double OrbitFunction::lift(const CartanWeylBasis& cw, const Weight& lambda,
                           const GroupElement& x) const {
  if (kind_ == Kind::tabulated) throw DomainError("tabulated function has no lift");
  const CMatrix u = defining_unitary(cw, x);
  if (kind_ == Kind::group_coefficient) return std::exp((coefficient_ * u).trace().real());
  return on_orbit(coadjoint_act(cw, u, base_point(cw, lambda).theta));
}

double OrbitFunction::at_node(const NodeView& node) const {
  switch (kind_) {
    case Kind::polynomial:
    case Kind::custom: return on_orbit(*node.theta);
    case Kind::group_coefficient: return std::exp((coefficient_ * *node.fund).trace().real());
    case Kind::tabulated:
      if (node.index >= table_.size()) throw DomainError("tabulated function: node index out of range");
      return table_[node.index];
  }
  return 0.0;
}

OrbitFunction OrbitFunction::operator+(const OrbitFunction& o) const {
  if (is_polynomial() && o.is_polynomial()) {
    OrbitFunction f = *this;
    f.terms_.insert(f.terms_.end(), o.terms_.begin(), o.terms_.end());
    return f;
  }
  if (kind_ == Kind::tabulated && o.kind_ == Kind::tabulated && table_.size() == o.table_.size()) {
    std::vector<double> t(table_.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = table_[i] + o.table_[i];
    return tabulated(std::move(t));
  }
  const bool orbit_a = kind_ == Kind::polynomial || kind_ == Kind::custom;
  const bool orbit_b = o.kind_ == Kind::polynomial || o.kind_ == Kind::custom;
  if (!orbit_a || !orbit_b) throw DomainError("cannot add " + describe() + " and " + o.describe());
  OrbitFunction a = *this, b = o;
  return custom([a, b](const RVector& th) { return a.on_orbit(th) + b.on_orbit(th); }, "sum");
}

OrbitFunction OrbitFunction::operator*(const OrbitFunction& o) const {
  if (is_polynomial() && o.is_polynomial()) {
    OrbitFunction f;
    for (const Monomial& a : terms_)
      for (const Monomial& b : o.terms_) {
        Monomial m{a.coefficient * b.coefficient, a.factors};
        m.factors.insert(m.factors.end(), b.factors.begin(), b.factors.end());
        f.terms_.push_back(std::move(m));
      }
    return f;
  }
  if (kind_ == Kind::tabulated && o.kind_ == Kind::tabulated && table_.size() == o.table_.size()) {
    std::vector<double> t(table_.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = table_[i] * o.table_[i];
    return tabulated(std::move(t));
  }
  const bool orbit_a = kind_ == Kind::polynomial || kind_ == Kind::custom;
  const bool orbit_b = o.kind_ == Kind::polynomial || o.kind_ == Kind::custom;
  if (!orbit_a || !orbit_b)
    throw DomainError("cannot multiply " + describe() + " and " + o.describe());
  OrbitFunction a = *this, b = o;
  return custom([a, b](const RVector& th) { return a.on_orbit(th) * b.on_orbit(th); }, "product");
}

OrbitFunction OrbitFunction::scaled(double s) const {
  OrbitFunction f = *this;
  switch (kind_) {
    case Kind::polynomial:
      for (Monomial& m : f.terms_) m.coefficient *= s;
      return f;
    case Kind::tabulated:
      for (double& v : f.table_) v *= s;
      return f;
    case Kind::custom: {
      OrbitFunction a = *this;
      return custom([a, s](const RVector& th) { return s * a.on_orbit(th); }, label_);
    }
    case Kind::group_coefficient: break;
  }
  throw DomainError("cannot scale " + describe());
}

OrbitFunction OrbitFunction::transformed(const RMatrix& ad) const {
  if (kind_ == Kind::polynomial) {
    OrbitFunction f = *this;
    for (Monomial& m : f.terms_)
      for (RVector& x : m.factors) x = ad * x;
    return f;
  }
  if (kind_ == Kind::custom) {
    OrbitFunction a = *this;
    const RMatrix adt = ad.transpose();
    return custom([a, adt](const RVector& th) { return a.on_orbit(adt * th); }, label_);
  }
  throw DomainError("cannot transform " + describe());
}

OrbitFunction poisson_polynomial(const CartanWeylBasis& cw, const OrbitFunction& f,
                                 const OrbitFunction& g, PoissonSign sign) {
  if (!f.is_polynomial() || !g.is_polynomial())
    throw DomainError("poisson_polynomial: polynomial arguments required");
  const double s = sign_factor(sign);
  std::vector<Monomial> out;
  for (const Monomial& a : f.terms())
    for (const Monomial& b : g.terms())
      for (std::size_t i = 0; i < a.factors.size(); ++i)
        for (std::size_t j = 0; j < b.factors.size(); ++j) {
          Monomial m{s * a.coefficient * b.coefficient, {}};
          m.factors.push_back(cw.bracket(a.factors[i], b.factors[j]));
          for (std::size_t q = 0; q < a.factors.size(); ++q)
            if (q != i) m.factors.push_back(a.factors[q]);
          for (std::size_t q = 0; q < b.factors.size(); ++q)
            if (q != j) m.factors.push_back(b.factors[q]);
          out.push_back(std::move(m));
        }
  if (out.empty()) out.push_back({0.0, {}});
  return OrbitFunction::polynomial(std::move(out));
}

double poisson_general(const CartanWeylBasis& cw, const Weight& lambda, const OrbitFunction& f,
                       const OrbitFunction& g, const GroupElement& x, double step) {
  auto deriv = [&](const OrbitFunction& fn, int b) {
    const RVector dir = cw.unit(b);
    auto val = [&](double t) { return fn.lift(cw, lambda, x * GroupElement::exp(t * dir)); };
    auto central = [&](double h) { return (val(h) - val(-h)) / (2.0 * h); };
    return (4.0 * central(step / 2.0) - central(step)) / 3.0;
  };
  const RootSystem& rs = cw.root_system;
  cplx total = 0.0;
  for (int p = 0; p < cw.num_positive(); ++p) {
    const double la = rs.inner(lambda, rs.positive_roots[p]);
    if (std::abs(la) < 1e-12) continue;
    const double fa = deriv(f, cw.index_a(p)), fs = deriv(f, cw.index_s(p));
    const double ga = deriv(g, cw.index_a(p)), gs = deriv(g, cw.index_s(p));
    const cplx f_pos = 0.5 * cplx(fa, -fs), f_neg = 0.5 * cplx(fa, fs);
    const cplx g_pos = 0.5 * cplx(ga, -gs), g_neg = 0.5 * cplx(ga, gs);
    total += f_pos * g_neg / la - f_neg * g_pos / la;
  }
  return (-kI * total).real();
}

// ---------------------------------------------------------------- quadrature

double weight_spread(const RootSystem& rs, const RVector& w, const RVector& c) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const Weight& mu : weyl_group_orbit(rs, Weight(w))) {
    const double v = mu.labels.dot(c);
    if (first) {
      lo = hi = v;
      first = false;
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

std::size_t QuadratureRule::size() const {
  std::size_t n = 1;
  for (const QuadratureAxis& a : axes) n *= a.nodes.size();
  return n;
}

double QuadratureRule::weight(std::size_t index) const {
  double w = 1.0;
  for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
    const std::size_t n = it->nodes.size();
    w *= it->weights[index % n];
    index /= n;
  }
  return w;
}

GroupElement QuadratureRule::node(std::size_t index) const {
  GroupElement x;
  x.factors.resize(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    const std::size_t n = axes[a].nodes.size();
    x.factors[a] = axes[a].nodes[index % n] * axes[a].generator;
    index /= n;
  }
  return x;
}

std::vector<GroupElement> QuadratureRule::nodes() const {
  std::vector<GroupElement> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(node(i));
  return out;
}

std::vector<double> QuadratureRule::weights() const {
  std::vector<double> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(weight(i));
  return out;
}

double QuadratureRule::weight_sum() const {
  double s = 1.0;
  for (const QuadratureAxis& a : axes) {
    double t = 0.0;
    for (double w : a.weights) t += w;
    s *= t;
  }
  return s;
}

namespace {

QuadratureAxis trapezoid_axis(const RVector& g, int n) {
  QuadratureAxis a;
  a.generator = g;
  a.kind = "trapezoid";
  for (int i = 0; i < n; ++i) {
    a.nodes.push_back(kTwoPi * i / n);
    a.weights.push_back(1.0 / n);
  }
  return a;
}

QuadratureAxis fixed_axis(const RVector& g) {
  QuadratureAxis a;
  a.generator = g;
  a.kind = "fixed";
  a.nodes = {0.0};
  a.weights = {1.0};
  return a;
}

/// s in [0, pi/2] with density sin(2s), Gauss-Legendre in u = cos(2s).
QuadratureAxis gauss_cos_axis(const RVector& g, int n) {
  QuadratureAxis a;
  a.generator = g;
  a.kind = "gauss-cos";
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  for (int i = 0; i < n; ++i) {
    a.nodes.push_back(0.5 * std::acos(x[i]));
    a.weights.push_back(0.5 * w[i]);
  }
  return a;
}

/// angle in [0, pi/2] with the given normalized density.
QuadratureAxis gauss_angle_axis(const RVector& g, int n, const std::function<double(double)>& rho) {
  QuadratureAxis a;
  a.generator = g;
  a.kind = "gauss-angle";
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const double half = std::numbers::pi / 4.0;
  for (int i = 0; i < n; ++i) {
    const double t = half * (1.0 + x[i]);
    a.nodes.push_back(t);
    a.weights.push_back(half * w[i] * rho(t));
  }
  return a;
}

struct AxisPlan {
  RVector generator;
  RVector coroot;   // torus-equivalent coefficients on the H_j
  std::string kind; // trapezoid | gauss-cos | gauss-angle
  int density = 0;  // 0: sin 2a, 1: 4 sin^3 a cos a
  bool fiber = false;
};

std::vector<AxisPlan> euler_plan(const CartanWeylBasis& cw) {
  const int dim = cw.dim();
  std::vector<AxisPlan> plan;
  if (cw.rank() == 1) {
    RVector c1 = RVector::Ones(1);
    plan.push_back({cw.unit(0), c1, "trapezoid", 0, false});
    plan.push_back({cw.unit(cw.index_a(0)), c1, "gauss-cos", 0, false});
    plan.push_back({cw.unit(0), c1, "trapezoid", 0, true});
    return plan;
  }
  if (cw.rank() == 2) {
    RVector g3 = cw.unit(0);
    RVector g8 = RVector::Zero(dim);
    g8[0] = 1.0;
    g8[1] = 2.0;
    RVector c3(2), c8(2), c13(2);
    c3 << 1.0, 0.0;
    c8 << 1.0, 2.0;
    c13 << 1.0, 1.0;
    plan.push_back({g3, c3, "trapezoid", 0, false});
    plan.push_back({cw.unit(cw.index_a(0)), c3, "gauss-angle", 0, false});
    plan.push_back({g3, c3, "trapezoid", 0, false});
    plan.push_back({cw.unit(cw.index_a(2)), c13, "gauss-angle", 1, false});
    plan.push_back({g3, c3, "trapezoid", 0, false});
    plan.push_back({cw.unit(cw.index_a(0)), c3, "gauss-angle", 0, false});
    plan.push_back({g3, c3, "trapezoid", 0, true});
    plan.push_back({g8, c8, "trapezoid", 0, true});
    return plan;
  }
  throw ConfigError("build_quadrature: no product rule for rank " + std::to_string(cw.rank()));
}

double adjoint_reach(const RootSystem& rs, const RVector& c) {
  double m = 0.0;
  for (const Root& r : rs.positive_roots) m = std::max(m, std::abs(r.labels.cast<double>().dot(c)));
  return m;
}

/// Automatic node count for one axis at level k and degree deg.
int auto_nodes(const RootSystem& rs, const Weight& lambda, const AxisPlan& a, int k, int deg,
               double scale) {
  const double spread = weight_spread(rs, lambda.labels * k, a.coroot);
  const double omega = spread + deg * adjoint_reach(rs, a.coroot);
  if (a.kind == "trapezoid") return static_cast<int>(std::lround(omega)) + 1;
  if (a.kind == "gauss-cos") {
    // polynomial degree in cos 2s is half the frequency budget
    return static_cast<int>(std::floor(omega / 4.0 + 1e-9)) + 1;
  }
  const double total = omega + (a.density == 0 ? 2.0 : 4.0);
  return static_cast<int>(std::ceil(scale * (0.35 * total + 14.0)));
}

}  // namespace

QuadratureRule build_quadrature(std::shared_ptr<const CartanWeylBasis> cw, const Weight& lambda,
                                int k_max, int f_degree, const QuadratureOptions& opts) {
  if (!cw) throw ConfigError("build_quadrature: missing Cartan-Weyl data");
  if (lambda.rank() != cw->rank()) throw DomainError("build_quadrature: weight rank mismatch");
  const auto id = is_integral_dominant(lambda);
  if (!id.integral || !id.dominant) throw DomainError("build_quadrature: weight must be dominant integral");
  if (k_max < 0 || f_degree < 0) throw ConfigError("build_quadrature: negative order");
  const RootSystem& rs = cw->root_system;
  const std::vector<AxisPlan> plan = euler_plan(*cw);

  QuadratureRule q;
  q.cw = cw;
  q.lambda = lambda;
  q.k_max = k_max;
  q.f_degree = f_degree;
  q.right_invariant = opts.right_invariant;
  q.scheme = cw->rank() == 1 ? "su2-euler" : "su3-euler";
  q.exactness_degree = static_cast<int>(std::lround(lambda.labels.sum())) * k_max + f_degree;

  std::vector<int> counts;
  for (const AxisPlan& a : plan) {
    if (a.fiber && opts.right_invariant) {
      q.axes.push_back(fixed_axis(a.generator));
      counts.push_back(1);
      continue;
    }
    int n = auto_nodes(rs, lambda, a, k_max, f_degree, opts.node_scale);
    if (opts.max_nodes > 0) n = std::min(n, opts.max_nodes);
    n = std::max(n, 1);
    counts.push_back(n);
    if (a.kind == "trapezoid") {
      q.axes.push_back(trapezoid_axis(a.generator, n));
    } else if (a.kind == "gauss-cos") {
      q.axes.push_back(gauss_cos_axis(a.generator, n));
    } else if (a.density == 0) {
      q.axes.push_back(gauss_angle_axis(a.generator, n, [](double t) { return std::sin(2.0 * t); }));
    } else {
      q.axes.push_back(gauss_angle_axis(a.generator, n, [](double t) {
        const double s = std::sin(t);
        return 4.0 * s * s * s * std::cos(t);
      }));
    }
  }
  if (q.scheme == "su2-euler") q.scheme += q.right_invariant ? "/gauss-cos" : "/gauss-cos/fiber";
  if (!opts.self_test) return q;

  // Orthogonality self-test at the largest level the frequency budget allows.
  double defect = std::abs(q.weight_sum() - 1.0);
  if (!lambda.is_zero() && k_max >= 1) {
    int extra = f_degree;
    for (const AxisPlan& a : plan) {
      const double s1 = weight_spread(rs, lambda.labels, a.coroot);
      if (s1 > 0) extra = std::min(extra, static_cast<int>(std::floor(f_degree * adjoint_reach(rs, a.coroot) / s1)));
    }
    int k_test = k_max + extra;
    if (extra > 0 && weyl_dimension(rs, lambda, k_test) > 400) k_test = k_max;
    const Irrep rep = build_irrep(cw, lambda, k_test);
    const MomentTensor mt(q, &rep, 0);
    const CMatrix one = static_cast<double>(rep.dimension) * mt.integrate(OrbitFunction::constant(1.0));
    defect = std::max(defect, (one - CMatrix::Identity(rep.dimension, rep.dimension)).cwiseAbs().maxCoeff());
  }
  if (f_degree >= 1) {
    const int deg = std::min(f_degree, 2);
    const MomentTensor mt(q, nullptr, deg);
    const RVector th0 = base_point(*cw, lambda).theta;
    const int n = cw->dim();
    for (int b = 0; b < n; ++b) {
      std::vector<int> idx(deg, 0);
      idx[0] = b + 1;
      defect = std::max(defect, std::abs(mt.slice(idx)(0, 0)));
    }
    if (deg == 2) {
      const double c = quadratic_casimir(*cw, th0) / n;
      for (int b = 0; b < n; ++b)
        for (int e = 0; e < n; ++e)
          defect = std::max(defect, std::abs(mt.slice({b + 1, e + 1})(0, 0) - c * cw->gram(b, e)));
    }
  }
  q.self_test_defect = defect;
  if (defect > opts.tolerance) {
    int suggested = -1;
    for (int k = k_max; k >= 0 && suggested < 0; --k) {
      bool ok = true;
      for (std::size_t a = 0; a < plan.size(); ++a) {
        if (plan[a].fiber && opts.right_invariant) continue;
        if (auto_nodes(rs, lambda, plan[a], k, f_degree, opts.node_scale) > counts[a]) ok = false;
      }
      if (ok) suggested = k;
    }
    std::ostringstream os;
    os << "quadrature self-test failed: orthogonality defect " << defect << " exceeds "
       << opts.tolerance << " (k_max=" << k_max << ", f_degree=" << f_degree
       << "); suggested k_max " << suggested << " or exactness degree " << q.exactness_degree;
    throw QuadratureError(os.str(), defect, suggested, q.exactness_degree);
  }
  return q;
}

// ---------------------------------------------------------------- enumeration

void visit_nodes(const QuadratureRule& q, const Irrep* rep,
                 const std::function<void(const NodeView&)>& fn) {
  const CartanWeylBasis& cw = *q.cw;
  const int na = static_cast<int>(q.axes.size());
  std::vector<std::vector<RMatrix>> co(na);
  std::vector<std::vector<CMatrix>> fund(na);
  std::vector<GeneratorSpectrum> spec(na);
  std::vector<std::size_t> stride(na, 1);
  for (int a = na - 1; a >= 0; --a) {
    const QuadratureAxis& ax = q.axes[a];
    if (a + 1 < na) stride[a] = stride[a + 1] * q.axes[a + 1].nodes.size();
    const CMatrix gdef = cw.defining(ax.generator);
    for (double t : ax.nodes) {
      const CMatrix u = expm_anti_hermitian(gdef, t);
      fund[a].push_back(u);
      RMatrix m(cw.dim(), cw.dim());
      for (int b = 0; b < cw.dim(); ++b) m.col(b) = coadjoint_act(cw, u, cw.unit(b));
      co[a].push_back(m);
    }
    if (rep) spec[a] = generator_spectrum(rep->dU(ax.generator));
  }

  RVector params = RVector::Zero(na);
  std::function<void(int, const CVector&, const RVector&, const CMatrix&, double, std::size_t)> rec =
      [&](int a, const CVector& v, const RVector& th, const CMatrix& f, double w, std::size_t idx) {
        const QuadratureAxis& ax = q.axes[a];
        for (std::size_t i = 0; i < ax.nodes.size(); ++i) {
          const double t = ax.nodes[i];
          params[a] = t;
          const CVector v2 = rep ? apply_flow(spec[a], t, v) : v;
          const RVector th2 = co[a][i] * th;
          const CMatrix f2 = fund[a][i] * f;
          const double w2 = w * ax.weights[i];
          const std::size_t idx2 = idx + i * stride[a];
          if (a == 0) {
            NodeView view;
            view.index = idx2;
            view.weight = w2;
            view.params = &params;
            view.theta = &th2;
            view.fund = &f2;
            view.vector = rep ? &v2 : nullptr;
            fn(view);
          } else {
            rec(a - 1, v2, th2, f2, w2, idx2);
          }
        }
      };
  const CVector psi = rep ? rep->hw_vector : CVector();
  const RVector th0 = base_point(cw, q.lambda).theta;
  if (na == 0) return;
  rec(na - 1, psi, th0, CMatrix::Identity(cw.defining_dim, cw.defining_dim), 1.0, 0);
}

// ---------------------------------------------------------------- moments

namespace {

struct AxisTransform {
  CMatrix w, winv;  // augmented coadjoint eigenbasis
  RVector nu;       // augmented frequencies
};

AxisTransform coadjoint_transform(const CartanWeylBasis& cw, const RVector& g) {
  Eigen::SelfAdjointEigenSolver<RMatrix> gs(cw.gram);
  const RMatrix half = gs.operatorSqrt(), half_inv = gs.operatorInverseSqrt();
  const RMatrix k = half * cw.ad(g) * half_inv;
  CMatrix ik = kI * k.cast<cplx>();
  ik = 0.5 * (ik + ik.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ik);
  const int n = cw.dim();
  AxisTransform t;
  t.w = CMatrix::Zero(n + 1, n + 1);
  t.winv = CMatrix::Zero(n + 1, n + 1);
  t.w(0, 0) = t.winv(0, 0) = 1.0;
  t.w.bottomRightCorner(n, n) = half.cast<cplx>() * es.eigenvectors();
  t.winv.bottomRightCorner(n, n) = es.eigenvectors().adjoint() * half_inv.cast<cplx>();
  t.nu = augmented(es.eigenvalues(), 0.0);
  return t;
}

void mode_transform(std::vector<CMatrix>& slices, int naug, int degree, int mode, const CMatrix& m) {
  std::size_t stride = 1;
  for (int q = mode + 1; q < degree; ++q) stride *= naug;
  const std::size_t block = stride * naug;
  std::vector<CMatrix> tmp(naug);
  for (std::size_t base = 0; base < slices.size(); base += block)
    for (std::size_t off = 0; off < stride; ++off) {
      for (int i = 0; i < naug; ++i) {
        tmp[i] = CMatrix::Zero(slices[0].rows(), slices[0].cols());
        for (int j = 0; j < naug; ++j) {
          const cplx c = m(i, j);
          if (c != cplx(0.0, 0.0)) tmp[i] += c * slices[base + off + j * stride];
        }
      }
      for (int i = 0; i < naug; ++i) slices[base + off + i * stride] = std::move(tmp[i]);
    }
}

}  // namespace

MomentTensor::MomentTensor(const QuadratureRule& q, const Irrep* rep, int degree)
    : degree_(degree) {
  const CartanWeylBasis& cw = *q.cw;
  if (degree < 0) throw DomainError("MomentTensor: negative degree");
  naug_ = cw.dim() + 1;
  d_ = rep ? rep->dimension : 1;
  std::size_t count = 1;
  for (int i = 0; i < degree; ++i) count *= naug_;

  const RVector a0 = augmented(base_point(cw, q.lambda).theta, 1.0);
  CMatrix p = CMatrix::Zero(d_, d_);
  p(0, 0) = 1.0;
  if (rep) p = rep->hw_vector * rep->hw_vector.adjoint();
  slices_.resize(count);
  for (std::size_t flat = 0; flat < count; ++flat) {
    double c = 1.0;
    std::size_t r = flat;
    for (int m = degree - 1; m >= 0; --m) {
      c *= a0[r % naug_];
      r /= naug_;
    }
    slices_[flat] = c * p;
  }

  std::map<std::vector<double>, std::pair<GeneratorSpectrum, AxisTransform>> cache;
  for (int a = static_cast<int>(q.axes.size()) - 1; a >= 0; --a) {
    const QuadratureAxis& ax = q.axes[a];
    if (ax.nodes.size() == 1 && ax.nodes[0] == 0.0) continue;
    const std::vector<double> key(ax.generator.data(), ax.generator.data() + ax.generator.size());
    auto it = cache.find(key);
    if (it == cache.end()) {
      GeneratorSpectrum s;
      if (rep) {
        s = generator_spectrum(rep->dU(ax.generator));
      } else {
        s.diagonal = true;
        s.mu = RVector::Zero(1);
      }
      it = cache.emplace(key, std::make_pair(std::move(s), coadjoint_transform(cw, ax.generator))).first;
    }
    const GeneratorSpectrum& spec = it->second.first;
    const AxisTransform& tr = it->second.second;

    for (int m = 0; m < degree; ++m) mode_transform(slices_, naug_, degree, m, tr.winv);
    if (!spec.diagonal)
      for (CMatrix& s : slices_) s = spec.vectors.adjoint() * s * spec.vectors;

    std::unordered_map<long long, cplx> memo;
    auto phase = [&](double omega) {
      const long long key2 = std::llround(omega * 1e6);
      auto f = memo.find(key2);
      if (f != memo.end()) return f->second;
      cplx acc = 0.0;
      for (std::size_t i = 0; i < ax.nodes.size(); ++i)
        acc += ax.weights[i] * std::polar(1.0, -omega * ax.nodes[i]);
      memo.emplace(key2, acc);
      return acc;
    };
    for (std::size_t flat = 0; flat < count; ++flat) {
      double nu = 0.0;
      std::size_t r = flat;
      for (int m = degree - 1; m >= 0; --m) {
        nu += tr.nu[r % naug_];
        r /= naug_;
      }
      CMatrix& s = slices_[flat];
      for (int col = 0; col < d_; ++col)
        for (int row = 0; row < d_; ++row)
          if (s(row, col) != cplx(0.0, 0.0)) s(row, col) *= phase(nu + spec.mu[row] - spec.mu[col]);
    }

    if (!spec.diagonal)
      for (CMatrix& s : slices_) s = spec.vectors * s * spec.vectors.adjoint();
    for (int m = 0; m < degree; ++m) mode_transform(slices_, naug_, degree, m, tr.w);
  }
}

const CMatrix& MomentTensor::slice(const std::vector<int>& index) const {
  if (static_cast<int>(index.size()) != degree_) throw DomainError("MomentTensor: index rank mismatch");
  std::size_t flat = 0;
  for (int i : index) flat = flat * naug_ + i;
  return slices_.at(flat);
}

CMatrix MomentTensor::integrate(const OrbitFunction& f) const {
  if (!f.is_polynomial() || f.degree() > degree_)
    throw DomainError("MomentTensor: function " + f.describe() + " exceeds degree " +
                      std::to_string(degree_));
  CMatrix out = CMatrix::Zero(d_, d_);
  const std::size_t count = slices_.size();
  for (const Monomial& term : f.terms()) {
    if (term.coefficient == 0.0) continue;
    std::vector<RVector> vecs;
    for (int m = 0; m < degree_; ++m)
      vecs.push_back(m < static_cast<int>(term.factors.size())
                         ? augmented(term.factors[m], 0.0)
                         : RVector::Unit(naug_, 0));
    for (std::size_t flat = 0; flat < count; ++flat) {
      double c = term.coefficient;
      std::size_t r = flat;
      for (int m = degree_ - 1; m >= 0 && c != 0.0; --m) {
        c *= vecs[m][r % naug_];
        r /= naug_;
      }
      if (c != 0.0) out += c * slices_[flat];
    }
  }
  return out;
}

// ---------------------------------------------------------------- FS form

double fs_pullback_ratio(const Irrep& rep, const OrbitPoint& sigma, const RVector& x,
                         const RVector& y, double step) {
  if (!sigma.source) throw DomainError("fs_pullback_ratio: orbit point without a group element");
  const CartanWeylBasis& cw = *rep.cw;
  const double kks = sigma.theta.dot(cw.bracket(x, y));
  if (std::abs(kks) < 1e-10) throw DomainError("fs_pullback_ratio: degenerate tangent pair");
  const CMatrix uy = group_unitary(rep, *sigma.source);
  const CVector psi0 = uy * rep.hw_vector;
  auto lift = [&](const RVector& dir, double t) {
    CVector v = expm_anti_hermitian(rep.dU(dir), t) * psi0;
    const cplx ov = psi0.dot(v);
    return CVector(v * (std::conj(ov) / std::abs(ov)));
  };
  auto tangent = [&](const RVector& dir) {
    CVector d = (lift(dir, step) - lift(dir, -step)) / (2.0 * step);
    return CVector(d - psi0.dot(d) * psi0);
  };
  const CVector tx = tangent(x), ty = tangent(y);
  const double fs = 2.0 * tx.dot(ty).imag();
  return fs / kks;
}

}  // namespace berezin
