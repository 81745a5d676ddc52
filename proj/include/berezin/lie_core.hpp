#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "berezin/linalg.hpp"

namespace berezin {

/// A weight stored by its Dynkin labels (coordinates in the basis of
/// fundamental weights).  Labels are real so that non-integral input can be
/// represented and rejected.
struct Weight {
  RVector labels;

  Weight() = default;
  explicit Weight(RVector l) : labels(std::move(l)) {}
  Weight(std::initializer_list<double> l);

  int rank() const { return static_cast<int>(labels.size()); }
  Weight scaled(int k) const { return Weight(labels * static_cast<double>(k)); }
  bool is_zero() const { return labels.isZero(0.0); }
  /// Coordinates in the fundamental-weight basis (identical to the labels).
  const RVector& coords() const { return labels; }
};

struct IntegralDominant {
  bool integral = false;
  bool dominant = false;
};

IntegralDominant is_integral_dominant(const Weight& w);

struct Root {
  Eigen::VectorXi labels;         // Dynkin labels
  Eigen::VectorXi simple_coeffs;  // coefficients over the simple roots
  bool positive() const { return simple_coeffs.sum() > 0; }
  int height() const { return simple_coeffs.sum(); }
};

/// Root system of type A_n.  Immutable after construction.
struct RootSystem {
  std::string series_label;
  int rank = 0;
  Eigen::MatrixXi cartan_matrix;
  RMatrix gram;  // (omega_i, omega_j), long roots have (alpha,alpha) = 2
  std::vector<Root> simple_roots;
  std::vector<Root> positive_roots;  // sorted by height, simple roots first
  RVector delta;                     // labels of half the sum of positive roots

  double inner(const RVector& a, const RVector& b) const {
    return a.dot(gram * b);
  }
  double inner(const Weight& w, const Root& r) const {
    return inner(w.labels, r.labels.cast<double>());
  }
  int dim_algebra() const {
    return rank + 2 * static_cast<int>(positive_roots.size());
  }
};

RootSystem build_root_system(std::string_view series, int rank);

/// Cartan-Weyl data realized in the defining representation of sl(n+1).
///
/// Complex basis of g_C ("complex coordinates"): index j < rank is the
/// coroot h_j; index rank + r is E_{root r}, where roots are ordered as
/// positive_roots followed by their negatives in the same order.
///
/// Real basis {B_b} of the compact form g:  H_j = -i h_j (j < rank), then for
/// each positive root alpha the pair A_alpha = E_alpha + E_-alpha,
/// S_alpha = i (E_alpha - E_-alpha).
struct CartanWeylBasis {
  RootSystem root_system;
  int defining_dim = 0;

  std::vector<Root> roots;     // positive then negative
  std::vector<CMatrix> h;      // coroots, Hermitian
  std::vector<CMatrix> e;      // E_alpha for every root in `roots`
  std::map<std::pair<int, int>, double> structure_constants;  // N_{a,b}

  /// For non-simple positive roots gamma: (i, beta) with
  /// E_gamma = [E_{alpha_i}, E_beta] / N_{alpha_i,beta}; (-1,-1) for simple.
  std::vector<std::pair<int, int>> decomposition;

  std::vector<CMatrix> basis;          // B_b in the defining representation
  std::vector<CVector> basis_complex;  // B_b in complex coordinates
  RMatrix gram;                        // -tr(B_a B_b)
  RMatrix gram_inverse;

  int rank() const { return root_system.rank; }
  int num_positive() const {
    return static_cast<int>(root_system.positive_roots.size());
  }
  int num_roots() const { return static_cast<int>(roots.size()); }
  int dim() const { return static_cast<int>(basis.size()); }
  int complex_dim() const { return rank() + num_roots(); }

  int negative_of(int r) const {
    const int p = num_positive();
    return r < p ? r + p : r - p;
  }
  /// Index of the root with the given simple-root coefficients, or -1.
  int root_index(const Eigen::VectorXi& simple_coeffs) const;
  /// Real-basis indices of A_alpha and S_alpha for positive root p.
  int index_a(int p) const { return rank() + 2 * p; }
  int index_s(int p) const { return rank() + 2 * p + 1; }

  /// Anti-Hermitian defining-representation matrix of a real element.
  CMatrix defining(const RVector& x) const;
  /// Expansion of an anti-Hermitian traceless matrix in the real basis.
  RVector expand(const CMatrix& anti_hermitian) const;
  /// Lie bracket of real elements.
  RVector bracket(const RVector& x, const RVector& y) const;
  /// ad(X) as a real matrix on the real basis.
  RMatrix ad(const RVector& x) const;
  RVector unit(int b) const { return RVector::Unit(dim(), b); }

  /// E_alpha / E_-alpha expressed as complex combinations of the real basis.
  CVector root_vector_real(int r) const;
};

CartanWeylBasis build_cartan_weyl(const RootSystem& rs);

/// d_{k lambda} by the Weyl dimension formula.  Throws DomainError for a
/// non-dominant or non-integral weight.
long long weyl_dimension(const RootSystem& rs, const Weight& lambda, int k = 1);

struct OrbitDimension {
  int dimension = 0;
  std::vector<int> support;  // indices into positive_roots with (lambda,alpha) != 0
};

OrbitDimension orbit_dimension(const RootSystem& rs, const Weight& lambda);

/// Full Weyl-group orbit of a weight (closure under simple reflections).
std::vector<Weight> weyl_group_orbit(const RootSystem& rs, const Weight& w);

}  // namespace berezin
