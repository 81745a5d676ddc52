#include "berezin/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace berezin {

namespace {

bool is_diagonal(const CMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j && a(i, j) != cplx{0.0, 0.0}) return false;
  return true;
}

}  // namespace

GeneratorSpectrum generator_spectrum(const CMatrix& a) {
  GeneratorSpectrum s;
  if (is_diagonal(a)) {
    s.diagonal = true;
    s.mu = (kI * a.diagonal()).real();
    return s;
  }
  CMatrix h = kI * a;
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  s.mu = es.eigenvalues();
  s.vectors = es.eigenvectors();
  return s;
}

CVector apply_flow(const GeneratorSpectrum& s, double t, const CVector& v) {
  const Eigen::Index n = s.mu.size();
  CVector phase(n);
  for (Eigen::Index i = 0; i < n; ++i) phase[i] = std::polar(1.0, -s.mu[i] * t);
  if (s.diagonal) return phase.cwiseProduct(v);
  CVector c = s.vectors.adjoint() * v;
  return s.vectors * phase.cwiseProduct(c);
}

CMatrix expm_anti_hermitian(const CMatrix& a, double t) {
  const GeneratorSpectrum s = generator_spectrum(a);
  const Eigen::Index n = s.mu.size();
  CVector phase(n);
  for (Eigen::Index i = 0; i < n; ++i) phase[i] = std::polar(1.0, -s.mu[i] * t);
  if (s.diagonal) return phase.asDiagonal();
  return s.vectors * phase.asDiagonal() * s.vectors.adjoint();
}

double hermitian_residual(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_residual(const CMatrix& m) {
  return (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols()))
      .cwiseAbs()
      .maxCoeff();
}

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if (m.rows() == m.cols()) {
    if (hermitian_residual(m) <= 1e-13 * scale) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()),
                                                Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    const CMatrix ih = kI * m;
    if (hermitian_residual(ih) <= 1e-13 * scale) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (ih + ih.adjoint()),
                                                Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

int numerical_rank(const CMatrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

}  // namespace berezin
