#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string_view>
#include <vector>

#include "berezin/lie_core.hpp"
#include "berezin/linalg.hpp"

namespace berezin {

/// x = Exp(X_0) Exp(X_1) ... Exp(X_{n-1}); each X_i is a real vector on the
/// real basis of g.  The empty chain is the identity.
struct GroupElement {
  std::vector<RVector> factors;

  static GroupElement identity() { return {}; }
  static GroupElement exp(RVector x) { return GroupElement{{std::move(x)}}; }
  static GroupElement axis(int dim, int b, double t) {
    return exp(RVector::Unit(dim, b) * t);
  }
  GroupElement operator*(const GroupElement& o) const;
  GroupElement inverse() const;
};

/// Unitary irreducible representation U_{k lambda} as explicit matrices in an
/// orthonormal weight basis.  Basis vector 0 is the highest-weight vector.
struct Irrep {
  std::shared_ptr<const CartanWeylBasis> cw;
  Weight lambda;           // base weight
  int k = 1;               // level
  Weight highest_weight;   // k * lambda
  int dimension = 0;
  std::vector<CMatrix> h_matrices;  // dU(H_j) = -i rho(h_j), anti-Hermitian
  std::vector<CMatrix> e_matrices;  // dU(E_alpha) for every root, cw->roots order
  std::vector<CMatrix> basis_matrices;  // dU(B_b) on the real basis
  CVector hw_vector;
  std::vector<Eigen::VectorXi> weight_labels;

  /// rho of complex basis element c (coroot h_c, or E_{c - rank}).
  CMatrix complex_generator(int c) const;
  /// dU(X) for a real X in the real basis.
  CMatrix dU(const RVector& x) const;
  CMatrix dU_basis(int b) const;
};

/// Builds U_{k lambda} by applying simple lowering operators level by level,
/// evaluating inner products through the commutation relations and keeping an
/// orthonormal basis of each weight space (null vectors below the relative
/// threshold are the quotient by the maximal submodule).
Irrep build_irrep(std::shared_ptr<const CartanWeylBasis> cw, const Weight& lambda,
                  int k = 1);

/// Fills basis_matrices from h_matrices and e_matrices.
void assemble_basis_matrices(Irrep& rep);

/// Shared Cartan-Weyl data for (series, rank).
std::shared_ptr<const CartanWeylBasis> make_cartan_weyl(std::string_view series,
                                                        int rank);

CMatrix group_unitary(const Irrep& rep, const GroupElement& x);
CMatrix defining_unitary(const CartanWeylBasis& cw, const GroupElement& x);

struct IrrepReport {
  double commutator_residual = 0.0;         // relative to generator scale
  double anti_hermiticity_residual = 0.0;   // over the real basis
  double adjoint_relation_residual = 0.0;   // dU(E_a)^dagger + dU(E_-a)
  double hw_cartan_residual = 0.0;          // dU(H_j) Psi + i k lambda(H_j) Psi
  double hw_raising_residual = 0.0;         // dU(E_a) Psi, a > 0
  double hw_expectation_residual = 0.0;     // <Psi, dU(E_a) Psi>, all a
  long long expected_dimension = 0;
  bool dimension_match = false;

  double max_residual() const;
};

IrrepReport verify_irrep(const Irrep& rep);

/// Haar-distributed element.  Ranks 1 and 2 use Euler-angle chains matching
/// the quadrature parametrization; larger ranks use a phase-corrected QR
/// sample of the defining group followed by a matrix logarithm.
GroupElement haar_random_element(const CartanWeylBasis& cw, std::mt19937_64& rng);
GroupElement haar_random_element(const CartanWeylBasis& cw, std::uint64_t seed);

/// Dimension of the commutant of a set of matrices, solved as the null space
/// of X -> [A, X] stacked over the generators.
int commutant_dimension(const std::vector<CMatrix>& generators);

bool irreducibility_check(const Irrep& rep);

/// Precomputed spectra of selected one-parameter subgroups of a fixed irrep,
/// so chains of axis factors act on vectors in O(d^2) per factor.
class GeneratorFlows {
 public:
  GeneratorFlows(const Irrep& rep, const std::vector<RVector>& generators);
  GeneratorFlows(const Irrep& rep, const std::vector<int>& axes);

  const Irrep& rep() const { return *rep_; }
  /// Index of a cached generator G with x = t G, or -1.
  int match(const RVector& x, double& t) const;
  const GeneratorSpectrum& spectrum(int i) const { return spectra_[i]; }
  const RVector& generator(int i) const { return generators_[i]; }
  std::size_t size() const { return generators_.size(); }

  CVector apply(const RVector& factor, const CVector& v) const;
  /// U(x) v.
  CVector apply(const GroupElement& x, const CVector& v) const;

 private:
  const Irrep* rep_;
  std::vector<RVector> generators_;
  std::vector<GeneratorSpectrum> spectra_;
};

}  // namespace berezin
