#pragma once

#include <vector>

#include "berezin/orbit.hpp"

namespace berezin {

struct CoherentState {
  const Irrep* rep = nullptr;
  GroupElement x;
  CVector vector;        // U(x) Psi
  OrbitPoint orbit_point;  // Co(x) lambda
};

CoherentState coherent_state(const Irrep& rep, const GroupElement& x);

/// |<a, b>|^2 for unit vectors.
double transition_probability(const CVector& a, const CVector& b);
double transition_probability(const CoherentState& a, const CoherentState& b);

/// d * sum_i w_i p(q(x_i), psi).
double check_normalization(const Irrep& rep, const QuadratureRule& q, const CVector& psi);
double check_normalization(const MomentTensor& moments, const CVector& psi);

/// |<Psi_k, U_k(x) Psi_k> - <Psi_1, U_1(x) Psi_1>^k|.
double gilmore_check(const Irrep& rep_k, const Irrep& rep_1, const GroupElement& x);

struct DuffieldResult {
  std::vector<int> k;
  std::vector<double> mu;   // mu_k(f)
  std::vector<double> gap;  // |mu_k(f) - subgroup average|
  double subgroup_average = 0.0;
};

/// mu_k(f) = d_{k lambda} sum_i w_i |<Psi, U_1(x_i) Psi>|^{2k} f(x_i), using the
/// level-one representation only.
DuffieldResult duffield_concentration(const Irrep& rep_1, const std::vector<int>& ks,
                                      const OrbitFunction& f, int f_degree = 24);

/// Haar average of f over the stabilizer G_lambda.
double subgroup_average(const CartanWeylBasis& cw, const Weight& lambda, const OrbitFunction& f,
                        int nodes = 64);

/// d * sum_i w_i p(q(y), q(x_i)) f(sigma_i).
double kernel_localization(const Irrep& rep, const GroupElement& y, const OrbitFunction& f,
                           const QuadratureRule& q);

/// -log <Psi, U(x) Psi> on the principal branch.
cplx overlap_action(const Irrep& rep_1, const GroupElement& x);

}  // namespace berezin
