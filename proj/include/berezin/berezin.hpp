#pragma once

#include <optional>
#include <string>
#include <vector>

#include "berezin/coherent.hpp"

namespace berezin {

struct BerezinOperator {
  CMatrix matrix;
  int k = 0;
  std::string function;
  std::string quadrature;
  double asymmetry = 0.0;  // max |Q - Q^dagger| before symmetrization
};

/// Q(f) = d * sum_i w_i f(x_i) P_i over a fixed rule.  Polynomial functions go
/// through a cached moment tensor; other kinds enumerate the nodes.
class Quantizer {
 public:
  Quantizer(const Irrep& rep, const QuadratureRule& q, int degree);

  const Irrep& rep() const { return *rep_; }
  const QuadratureRule& rule() const { return *rule_; }
  int degree() const { return moments_.degree(); }
  const MomentTensor& moments() const { return moments_; }

  BerezinOperator quantize(const OrbitFunction& f) const;
  CMatrix operator()(const OrbitFunction& f) const { return quantize(f).matrix; }

 private:
  const Irrep* rep_;
  const QuadratureRule* rule_;
  MomentTensor moments_;
};

BerezinOperator quantize(const Irrep& rep, const OrbitFunction& f, const QuadratureRule& q);

/// <q(sigma), A q(sigma)> with q(sigma) = U(y) Psi for sigma = Co(y) lambda.
cplx covariant_symbol(const CMatrix& a, const Irrep& rep, const OrbitPoint& sigma);

/// {f, g} as a function usable by the quantizer: analytic for polynomials,
/// tabulated at the rule nodes otherwise.
OrbitFunction poisson_bracket(const Quantizer& qz, const OrbitFunction& f, const OrbitFunction& g,
                              PoissonSign sign);

/// || i k [Q(f), Q(g)] - Q({f, g}) ||.
double dirac_defect(const Quantizer& qz, const OrbitFunction& f, const OrbitFunction& g,
                    PoissonSign sign = PoissonSign::theorem);
/// || (Q(f)Q(g) + Q(g)Q(f))/2 - Q(fg) ||.
double jordan_defect(const Quantizer& qz, const OrbitFunction& f, const OrbitFunction& g);
/// || Q(f)Q(g) - Q(fg) ||.
double product_defect(const Quantizer& qz, const OrbitFunction& f, const OrbitFunction& g);

/// sup |f| over the orbit: dense Haar sampling followed by coordinate refinement.
double sup_norm(const CartanWeylBasis& cw, const Weight& lambda, const OrbitFunction& f,
                int samples = 20000, std::uint64_t seed = 7);

/// ||f||_inf - ||Q(f)||.
double norm_gap(const Quantizer& qz, const OrbitFunction& f,
                std::optional<double> sup = std::nullopt);

/// || Q(f o Co(x^-1)) - U(x) Q(f) U(x)^dagger ||.
double equivariance_defect(const Quantizer& qz, const OrbitFunction& f, const GroupElement& x);

/// Constants plus all monomials in the basis coordinates theta_b up to degree.
std::vector<OrbitFunction> polynomial_family(const CartanWeylBasis& cw, int degree);

/// Rank of span{Q(f)} inside the d^2-dimensional matrix space.
int completeness_rank(const Quantizer& qz, const std::vector<OrbitFunction>& family);

struct GrowthFit {
  double exponent = 0.0;        // coefficient of log k in log d ~ c + p log k + a / k
  double exponent_plain = 0.0;  // plain least-squares slope of log d on log k
  double expected = 0.0;        // dim(O_lambda) / 2
  double r2_plain = 0.0;
  std::vector<int> k;
  std::vector<long long> d;
};

GrowthFit dimension_growth(const RootSystem& rs, const Weight& lambda, const std::vector<int>& ks);

}  // namespace berezin
