#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace berezin {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Spectral data of an anti-Hermitian generator A:  i*A = V diag(mu) V^dagger,
/// so that exp(t*A) = V diag(exp(-i*mu*t)) V^dagger.
struct GeneratorSpectrum {
  RVector mu;
  CMatrix vectors;
  bool diagonal = false;  // A was already diagonal; vectors is empty then
};

GeneratorSpectrum generator_spectrum(const CMatrix& anti_hermitian);

/// exp(t*A) for anti-Hermitian A; unitary to machine precision.
CMatrix expm_anti_hermitian(const CMatrix& a, double t = 1.0);

/// exp(t*A) v using a precomputed spectrum.
CVector apply_flow(const GeneratorSpectrum& s, double t, const CVector& v);

/// Largest singular value.  Hermitian / anti-Hermitian inputs use a
/// Hermitian eigensolve, anything else falls back to an SVD.
double operator_norm(const CMatrix& m);

/// max |M - M^dagger| entry.
double hermitian_residual(const CMatrix& m);

/// max |M^dagger M - 1| entry.
double unitarity_residual(const CMatrix& m);

/// Numerical rank of the columns of m (relative singular-value cutoff).
int numerical_rank(const CMatrix& m, double rel_tol);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace berezin
