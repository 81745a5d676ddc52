#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "berezin/irrep.hpp"

namespace berezin {

/// A point theta of g*, stored by its values theta(B_b) on the real basis.
struct OrbitPoint {
  RVector theta;
  std::optional<GroupElement> source;  // x with theta = Co(x) lambda
};

OrbitPoint base_point(const CartanWeylBasis& cw, const Weight& lambda);

/// Ad(x) as a real matrix on the real basis.
RMatrix adjoint_matrix(const CartanWeylBasis& cw, const GroupElement& x);

/// (Co(x) theta)(Y) = theta(Ad(x^-1) Y).
OrbitPoint coadjoint_act(const CartanWeylBasis& cw, const GroupElement& x,
                         const OrbitPoint& theta);
RVector coadjoint_act(const CartanWeylBasis& cw, const CMatrix& defining_u,
                      const RVector& theta);

/// The matrix Z in g with theta(Y) = -tr(Z Y).
CMatrix functional_matrix(const CartanWeylBasis& cw, const RVector& theta);

/// tr((iZ)^p) for p = 2 .. rank+1.
RVector orbit_invariants(const CartanWeylBasis& cw, const RVector& theta);
double quadratic_casimir(const CartanWeylBasis& cw, const RVector& theta);
bool on_orbit(const CartanWeylBasis& cw, const Weight& lambda, const RVector& theta,
              double tol = 1e-8);

/// theta(X) = i <psi, dU(X) psi> / k.  Throws DomainError for non-unit psi.
OrbitPoint momentum_map(const Irrep& rep, const CVector& psi, int k = 0);

enum class PoissonSign { theorem, liepbr, flipped };

/// Multiplier s with {f_X, f_Y}(theta) = s * theta([X, Y]).
double sign_factor(PoissonSign s);
PoissonSign parse_sign(std::string_view name);
std::string to_string(PoissonSign s);

double poisson_linear(const CartanWeylBasis& cw, const RVector& x, const RVector& y,
                      const RVector& theta, PoissonSign sign = PoissonSign::theorem);

struct NodeView;

struct Monomial {
  double coefficient = 1.0;
  std::vector<RVector> factors;  // product of theta(X_i)
};

/// A function on the orbit, carried together with its right-G_lambda
/// invariant lift to G.  Polynomials in the linear coordinates are the main
/// kind; group coefficients are functions on G only.
class OrbitFunction {
 public:
  enum class Kind { polynomial, group_coefficient, tabulated, custom };
  using Custom = std::function<double(const RVector& theta)>;

  static OrbitFunction constant(double c);
  static OrbitFunction linear(const RVector& x);
  static OrbitFunction product(const std::vector<RVector>& xs, double c = 1.0);
  static OrbitFunction polynomial(std::vector<Monomial> terms);
  /// exp(Re tr(C U_fund(x))).
  static OrbitFunction group_coefficient(const CMatrix& c);
  static OrbitFunction tabulated(std::vector<double> values);
  static OrbitFunction custom(Custom f, std::string label = "custom");

  Kind kind() const { return kind_; }
  bool is_polynomial() const { return kind_ == Kind::polynomial; }
  bool right_invariant() const { return kind_ != Kind::group_coefficient; }
  int degree() const;
  const std::vector<Monomial>& terms() const { return terms_; }
  const CMatrix& coefficient_matrix() const { return coefficient_; }
  const std::vector<double>& table() const { return table_; }
  std::string describe() const;

  /// f(theta); not defined for group coefficients or tables.
  double on_orbit(const RVector& theta) const;
  /// f_lambda(x).
  double lift(const CartanWeylBasis& cw, const Weight& lambda, const GroupElement& x) const;
  double at_node(const NodeView& node) const;

  OrbitFunction operator+(const OrbitFunction& o) const;
  OrbitFunction operator*(const OrbitFunction& o) const;
  OrbitFunction scaled(double a) const;
  /// f o Co(x^-1), given ad = Ad(x).
  OrbitFunction transformed(const RMatrix& ad) const;

 private:
  Kind kind_ = Kind::polynomial;
  std::vector<Monomial> terms_;
  CMatrix coefficient_;
  std::vector<double> table_;
  Custom custom_;
  std::string label_;
};

/// {f, g} for polynomial f, g, using {f_X, f_Y} = s f_[X,Y] and the Leibniz rule.
OrbitFunction poisson_polynomial(const CartanWeylBasis& cw, const OrbitFunction& f,
                                 const OrbitFunction& g, PoissonSign sign);

/// -i sum over roots alpha with (lambda, alpha) != 0 of
/// 1/(lambda, alpha) xi_alpha f xi_-alpha g at x, with left-invariant
/// derivatives by central differences and one Richardson step.
double poisson_general(const CartanWeylBasis& cw, const Weight& lambda,
                       const OrbitFunction& f, const OrbitFunction& g, const GroupElement& x,
                       double step = 1e-5);

/// One factor exp(t G) of a product quadrature rule.
struct QuadratureAxis {
  RVector generator;
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1
  std::string kind;             // "trapezoid", "gauss-cos", "gauss-angle", "fixed"
};

/// Product rule over x = exp(t_0 G_0) exp(t_1 G_1) ...  Node index is mixed
/// radix with axis 0 most significant.
struct QuadratureRule {
  std::string scheme;
  std::shared_ptr<const CartanWeylBasis> cw;
  Weight lambda;
  int k_max = 0;
  int f_degree = 0;
  int exactness_degree = 0;
  bool right_invariant = true;
  double self_test_defect = 0.0;
  std::vector<QuadratureAxis> axes;

  std::size_t size() const;
  double weight(std::size_t index) const;
  GroupElement node(std::size_t index) const;
  std::vector<GroupElement> nodes() const;
  std::vector<double> weights() const;
  double weight_sum() const;
};

struct QuadratureOptions {
  bool right_invariant = true;
  bool self_test = true;
  double node_scale = 1.0;  // multiplies the automatic node counts
  int max_nodes = 0;        // if > 0, caps every axis (used to force coarse rules)
  double tolerance = 1e-10;
};

/// Rule exact (to the self-test tolerance) for matrix coefficients of
/// U_{k lambda} (x) conj(U_{k lambda}) times degree-f_degree polynomials in the
/// orbit coordinates, k <= k_max.  Throws QuadratureError when the
/// orthogonality self-test fails.
QuadratureRule build_quadrature(std::shared_ptr<const CartanWeylBasis> cw, const Weight& lambda,
                                int k_max, int f_degree, const QuadratureOptions& opts = {});

/// Data available at one quadrature node.
struct NodeView {
  std::size_t index = 0;
  double weight = 0.0;
  const RVector* params = nullptr;  // t per axis
  const RVector* theta = nullptr;   // Co(x) lambda
  const CMatrix* fund = nullptr;    // defining-representation unitary
  const CVector* vector = nullptr;  // U(x) Psi, when a rep is supplied
};

/// Depth-first enumeration of every node, innermost factor first so partial
/// products are shared.
void visit_nodes(const QuadratureRule& q, const Irrep* rep,
                 const std::function<void(const NodeView&)>& fn);

/// Integrals T[b_1..b_D] = sum_i w_i theta^(b_1)...theta^(b_D) U(x_i) P U(x_i)^dagger
/// over augmented coordinates (1, theta), computed factor by factor in the
/// eigenbases of each one-parameter subgroup.  A null rep gives the scalar
/// moments of theta alone.
class MomentTensor {
 public:
  MomentTensor(const QuadratureRule& q, const Irrep* rep, int degree);

  int degree() const { return degree_; }
  int rep_dimension() const { return d_; }
  /// sum_i w_i f(theta_i) U P U^dagger, f polynomial of degree <= degree().
  CMatrix integrate(const OrbitFunction& f) const;
  const CMatrix& slice(const std::vector<int>& index) const;

 private:
  int naug_ = 0;
  int degree_ = 0;
  int d_ = 1;
  std::vector<CMatrix> slices_;
};

/// Fubini-Study 2-form on the tangent vectors of t -> U(exp(tX) y) Psi and
/// t -> U(exp(tY) y) Psi divided by sigma([X, Y]) at sigma = Co(y) lambda.
double fs_pullback_ratio(const Irrep& rep, const OrbitPoint& sigma, const RVector& x,
                         const RVector& y, double step = 1e-4);

/// max - min of <mu, c> over the Weyl orbit of w.
double weight_spread(const RootSystem& rs, const RVector& w, const RVector& c);

}  // namespace berezin
