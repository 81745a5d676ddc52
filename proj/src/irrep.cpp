#include "berezin/irrep.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "berezin/errors.hpp"

namespace berezin {

namespace {

using SparseC = Eigen::SparseMatrix<cplx>;

constexpr double kNullThreshold = 1e-8;
constexpr long long kMaxDimension = 20000;

SparseC to_sparse(const CMatrix& m) {
  SparseC s = m.sparseView(cplx(0.0, 0.0), 0.0);
  s.makeCompressed();
  return s;
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Complex coordinates (coroots, then root vectors) of a traceless matrix.
CVector complex_coords(const CartanWeylBasis& cw, const CMatrix& m) {
  const int n = cw.rank();
  CVector c = CVector::Zero(cw.complex_dim());
  CMatrix rest = m;
  for (int r = 0; r < cw.num_roots(); ++r) {
    const cplx coef = (cw.e[r].adjoint() * m).trace() / cw.e[r].squaredNorm();
    c[n + r] = coef;
    rest -= coef * cw.e[r];
  }
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) {
    acc += rest(j, j);
    c[j] = acc;
  }
  return c;
}

}  // namespace

GroupElement GroupElement::operator*(const GroupElement& o) const {
  GroupElement out = *this;
  out.factors.insert(out.factors.end(), o.factors.begin(), o.factors.end());
  return out;
}

GroupElement GroupElement::inverse() const {
  GroupElement out;
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) out.factors.push_back(-*it);
  return out;
}

CMatrix Irrep::complex_generator(int c) const {
  const int n = cw->rank();
  if (c < n) return kI * h_matrices[c];
  return e_matrices[c - n];
}

CMatrix Irrep::dU(const RVector& x) const {
  CMatrix m = CMatrix::Zero(dimension, dimension);
  for (int b = 0; b < x.size(); ++b)
    if (x[b] != 0.0) m += x[b] * basis_matrices[b];
  return m;
}

CMatrix Irrep::dU_basis(int b) const { return basis_matrices[b]; }

std::shared_ptr<const CartanWeylBasis> make_cartan_weyl(std::string_view series, int rank) {
  return std::make_shared<const CartanWeylBasis>(
      build_cartan_weyl(build_root_system(series, rank)));
}

Irrep build_irrep(std::shared_ptr<const CartanWeylBasis> cw, const Weight& lambda, int k) {
  if (!cw) throw ConfigError("build_irrep: missing Cartan-Weyl data");
  const RootSystem& rs = cw->root_system;
  const int n = rs.rank;
  if (lambda.rank() != n) throw DomainError("build_irrep: weight rank mismatch");
  const auto id = is_integral_dominant(lambda);
  if (!id.integral || !id.dominant)
    throw DomainError("build_irrep: weight must be dominant integral");
  if (k < 1) throw DomainError("build_irrep: k must be >= 1");

  const long long expected = weyl_dimension(rs, lambda, k);
  if (expected > kMaxDimension)
    throw ConfigError("build_irrep: dimension " + std::to_string(expected) + " too large");
  const int d = static_cast<int>(expected);

  std::vector<CMatrix> raise(n, CMatrix::Zero(d, d)), lower(n, CMatrix::Zero(d, d));
  std::vector<Eigen::VectorXi> wts;
  wts.reserve(d);
  Eigen::VectorXi top(n);
  for (int i = 0; i < n; ++i) top[i] = static_cast<int>(std::lround(lambda.labels[i] * k));
  wts.push_back(top);

  std::vector<int> start{0, 1};
  int count = 1;
  struct Cand {
    int i, b;
  };
  while (true) {
    const int level = static_cast<int>(start.size()) - 2;
    const int lo = start[level], hi = start[level + 1];
    const int plo = level > 0 ? start[level - 1] : 0, phi = lo;
    const int width = hi - lo;

    std::map<std::vector<int>, std::vector<Cand>> groups;
    for (int b = lo; b < hi; ++b)
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXi w = wts[b] - rs.simple_roots[i].labels;
        groups[std::vector<int>(w.data(), w.data() + n)].push_back({i, b});
      }

    // e_j f_i b = f_i e_j b + delta_ij <mu_b, h_i> b
    auto raised = [&](const Cand& c, int j) {
      CVector out = CVector::Zero(width);
      if (level > 0)
        out = lower[c.i].block(lo, plo, width, phi - plo) *
              raise[j].block(plo, c.b, phi - plo, 1);
      if (j == c.i) out[c.b - lo] += static_cast<double>(wts[c.b][c.i]);
      return out;
    };

    for (const auto& [key, cands] : groups) {
      const int m = static_cast<int>(cands.size());
      std::vector<CMatrix> r(n, CMatrix(width, m));
      for (int j = 0; j < n; ++j)
        for (int a = 0; a < m; ++a) r[j].col(a) = raised(cands[a], j);
      CMatrix gram(m, m);
      for (int a = 0; a < m; ++a)
        for (int a2 = 0; a2 < m; ++a2) gram(a, a2) = r[cands[a].i](cands[a].b - lo, a2);
      gram = 0.5 * (gram + gram.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
      const RVector& ev = es.eigenvalues();
      const double scale = std::max(1.0, ev.maxCoeff());
      if (ev.minCoeff() < -kNullThreshold * scale)
        throw NumericalError("build_irrep: Gram matrix not positive semidefinite (min eigenvalue " +
                             std::to_string(ev.minCoeff()) + ")");
      for (int q = m - 1; q >= 0; --q) {
        const double eps = ev[q];
        if (eps <= kNullThreshold * scale) continue;
        if (count >= d) throw NumericalError("build_irrep: more states than the Weyl dimension");
        const int idx = count++;
        Eigen::VectorXi w(n);
        for (int i = 0; i < n; ++i) w[i] = key[i];
        wts.push_back(w);
        const CVector u = es.eigenvectors().col(q);
        const double s = std::sqrt(eps);
        for (int j = 0; j < n; ++j) raise[j].block(lo, idx, width, 1) = r[j] * u / s;
        for (int a = 0; a < m; ++a) lower[cands[a].i](idx, cands[a].b) = s * std::conj(u[a]);
      }
    }
    if (count == hi) break;
    start.push_back(count);
  }
  if (count != d)
    throw NumericalError("build_irrep: constructed " + std::to_string(count) +
                         " states, Weyl dimension is " + std::to_string(d));

  Irrep rep;
  rep.cw = cw;
  rep.lambda = lambda;
  rep.k = k;
  rep.highest_weight = lambda.scaled(k);
  rep.dimension = d;
  rep.weight_labels = wts;
  for (int j = 0; j < n; ++j) {
    CMatrix h = CMatrix::Zero(d, d);
    for (int b = 0; b < d; ++b) h(b, b) = -kI * static_cast<double>(wts[b][j]);
    rep.h_matrices.push_back(h);
  }

  const int p = cw->num_positive();
  std::vector<SparseC> pos(p);
  rep.e_matrices.assign(2 * p, CMatrix());
  for (int r = 0; r < p; ++r) {
    const auto [i, beta] = cw->decomposition[r];
    if (i < 0) {
      rep.e_matrices[r] = raise[r];
    } else {
      const double nab = cw->structure_constants.at({i, beta});
      SparseC comm = pos[i] * pos[beta] - pos[beta] * pos[i];
      rep.e_matrices[r] = CMatrix(comm) / nab;
    }
    pos[r] = to_sparse(rep.e_matrices[r]);
  }
  for (int r = 0; r < p; ++r) {
    if (cw->decomposition[r].first < 0)
      rep.e_matrices[r + p] = -lower[r];
    else
      rep.e_matrices[r + p] = -rep.e_matrices[r].adjoint();
  }

  assemble_basis_matrices(rep);
  rep.hw_vector = CVector::Unit(d, 0);
  return rep;
}

void assemble_basis_matrices(Irrep& rep) {
  const CartanWeylBasis& cw = *rep.cw;
  const int d = rep.dimension;
  rep.basis_matrices.clear();
  for (int b = 0; b < cw.dim(); ++b) {
    CMatrix m = CMatrix::Zero(d, d);
    const CVector& c = cw.basis_complex[b];
    for (int q = 0; q < c.size(); ++q)
      if (c[q] != cplx(0.0, 0.0)) m += c[q] * rep.complex_generator(q);
    rep.basis_matrices.push_back(m);
  }
}

namespace {

bool torus_only(const CartanWeylBasis& cw, const RVector& x) {
  for (int b = cw.rank(); b < x.size(); ++b)
    if (x[b] != 0.0) return false;
  return true;
}

}  // namespace

CMatrix group_unitary(const Irrep& rep, const GroupElement& x) {
  CMatrix u = CMatrix::Identity(rep.dimension, rep.dimension);
  for (const RVector& f : x.factors) {
    if (torus_only(*rep.cw, f)) {
      const CVector diag = rep.dU(f).diagonal();
      for (int b = 0; b < rep.dimension; ++b) u.col(b) *= std::exp(diag[b]);
    } else {
      u = u * expm_anti_hermitian(rep.dU(f));
    }
  }
  return u;
}

CMatrix defining_unitary(const CartanWeylBasis& cw, const GroupElement& x) {
  CMatrix u = CMatrix::Identity(cw.defining_dim, cw.defining_dim);
  for (const RVector& f : x.factors) u = u * expm_anti_hermitian(cw.defining(f));
  return u;
}

double IrrepReport::max_residual() const {
  return std::max({commutator_residual, anti_hermiticity_residual, adjoint_relation_residual,
                   hw_cartan_residual, hw_raising_residual, hw_expectation_residual});
}

IrrepReport verify_irrep(const Irrep& rep) {
  const CartanWeylBasis& cw = *rep.cw;
  IrrepReport out;
  const int n = cw.rank();
  const int cd = cw.complex_dim();
  const int p = cw.num_positive();

  std::vector<SparseC> gens(cd);
  std::vector<CMatrix> defs(cd);
  double scale = 1.0;
  for (int c = 0; c < cd; ++c) {
    const CMatrix g = rep.complex_generator(c);
    scale = std::max(scale, max_abs(g));
    gens[c] = to_sparse(g);
    defs[c] = c < n ? cw.h[c] : cw.e[c - n];
  }
  double comm_res = 0.0;
  for (int a = 0; a < cd; ++a)
    for (int b = a + 1; b < cd; ++b) {
      const CVector coords = complex_coords(cw, defs[a] * defs[b] - defs[b] * defs[a]);
      SparseC lhs = gens[a] * gens[b] - gens[b] * gens[a];
      for (int c = 0; c < cd; ++c)
        if (std::abs(coords[c]) > 1e-14) lhs -= coords[c] * gens[c];
      double m = 0.0;
      for (int o = 0; o < lhs.outerSize(); ++o)
        for (SparseC::InnerIterator it(lhs, o); it; ++it) m = std::max(m, std::abs(it.value()));
      comm_res = std::max(comm_res, m);
    }
  out.commutator_residual = comm_res / (scale * scale);

  for (const CMatrix& m : rep.basis_matrices)
    out.anti_hermiticity_residual =
        std::max(out.anti_hermiticity_residual, max_abs(m + m.adjoint()));
  for (int r = 0; r < p; ++r)
    out.adjoint_relation_residual =
        std::max(out.adjoint_relation_residual,
                 max_abs(rep.e_matrices[r].adjoint() + rep.e_matrices[r + p]));

  const CVector& psi = rep.hw_vector;
  const RVector kl = rep.highest_weight.labels;
  for (int j = 0; j < n; ++j)
    out.hw_cartan_residual = std::max(
        out.hw_cartan_residual, (rep.h_matrices[j] * psi + kI * kl[j] * psi).norm());
  for (int r = 0; r < 2 * p; ++r) {
    const CVector v = rep.e_matrices[r] * psi;
    if (r < p) out.hw_raising_residual = std::max(out.hw_raising_residual, v.norm());
    out.hw_expectation_residual =
        std::max(out.hw_expectation_residual, std::abs(psi.dot(v)));
  }
  out.expected_dimension = weyl_dimension(cw.root_system, rep.lambda, rep.k);
  out.dimension_match = out.expected_dimension == rep.dimension;
  return out;
}

namespace {

double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

GroupElement qr_haar(const CartanWeylBasis& cw, std::mt19937_64& rng) {
  const int m = cw.defining_dim;
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix z(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) q.col(j) *= rr(j, j) / std::abs(rr(j, j));

  Eigen::ComplexEigenSolver<CMatrix> es(q);
  CMatrix v = es.eigenvectors();
  // q is normal: orthonormalize eigenvectors to guard against clustered phases
  Eigen::HouseholderQR<CMatrix> vq(v);
  v = vq.householderQ();
  const CVector ev = (v.adjoint() * q * v).diagonal();
  std::vector<double> phi(m);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += phi[i] = std::arg(ev[i]);
  const double mean = sum / m;
  CMatrix x = CMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i) x(i, i) = kI * (phi[i] - mean);
  return GroupElement::exp(cw.expand(v * x * v.adjoint()));
}

}  // namespace

GroupElement haar_random_element(const CartanWeylBasis& cw, std::mt19937_64& rng) {
  const int dim = cw.dim();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (cw.rank() == 1) {
    const double phi = uniform(rng, 0.0, two_pi);
    const double s = 0.5 * std::acos(1.0 - 2.0 * uniform(rng, 0.0, 1.0));
    const double psi = uniform(rng, 0.0, two_pi);
    return GroupElement::axis(dim, 0, phi) * GroupElement::axis(dim, cw.index_a(0), s) *
           GroupElement::axis(dim, 0, psi);
  }
  if (cw.rank() == 2) {
    const int a12 = cw.index_a(0), a13 = cw.index_a(2);
    RVector g8 = RVector::Zero(dim);
    g8[0] = 1.0;
    g8[1] = 2.0;
    const double a1 = uniform(rng, 0.0, two_pi);
    const double a2 = 0.5 * std::acos(1.0 - 2.0 * uniform(rng, 0.0, 1.0));
    const double a3 = uniform(rng, 0.0, two_pi);
    const double a4 = std::asin(std::pow(uniform(rng, 0.0, 1.0), 0.25));
    const double a5 = uniform(rng, 0.0, two_pi);
    const double a6 = 0.5 * std::acos(1.0 - 2.0 * uniform(rng, 0.0, 1.0));
    const double a7 = uniform(rng, 0.0, two_pi);
    const double a8 = uniform(rng, 0.0, two_pi);
    GroupElement x;
    x.factors = {RVector::Unit(dim, 0) * a1, RVector::Unit(dim, a12) * a2,
                 RVector::Unit(dim, 0) * a3, RVector::Unit(dim, a13) * a4,
                 RVector::Unit(dim, 0) * a5, RVector::Unit(dim, a12) * a6,
                 RVector::Unit(dim, 0) * a7, g8 * a8};
    return x;
  }
  return qr_haar(cw, rng);
}

GroupElement haar_random_element(const CartanWeylBasis& cw, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_random_element(cw, rng);
}

int commutant_dimension(const std::vector<CMatrix>& generators) {
  if (generators.empty()) return 0;
  const int d = static_cast<int>(generators.front().rows());
  const int d2 = d * d;
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix normal = CMatrix::Zero(d2, d2);
  for (const CMatrix& a : generators) {
    // vec(AX - XA) = (I (x) A - A^T (x) I) vec(X)
    CMatrix kmat = CMatrix::Zero(d2, d2);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) kmat.block(j * d, i * d, d, d) -= a(i, j) * id;
    for (int j = 0; j < d; ++j) kmat.block(j * d, j * d, d, d) += a;
    normal += kmat.adjoint() * kmat;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(normal);
  const RVector& ev = es.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 1e-300);
  int null = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] <= 1e-10 * top) ++null;
  return null;
}

bool irreducibility_check(const Irrep& rep) {
  const int cd = rep.cw->complex_dim();
  if (rep.dimension <= 24) {
    std::vector<CMatrix> gens;
    for (int c = 0; c < cd; ++c) gens.push_back(rep.complex_generator(c));
    return commutant_dimension(gens) == 1;
  }
  // Unitary reps are completely reducible, so the commutant is one
  // dimensional iff the joint kernel of the simple raising operators is.
  const int n = rep.cw->rank();
  CMatrix stack(n * rep.dimension, rep.dimension);
  for (int i = 0; i < n; ++i) stack.middleRows(i * rep.dimension, rep.dimension) = rep.e_matrices[i];
  const CMatrix g = stack.adjoint() * stack;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
  const RVector& ev = es.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 1e-300);
  int null = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] <= 1e-10 * top) ++null;
  return null == 1;
}

GeneratorFlows::GeneratorFlows(const Irrep& rep, const std::vector<RVector>& generators)
    : rep_(&rep), generators_(generators) {
  for (const RVector& g : generators_) spectra_.push_back(generator_spectrum(rep.dU(g)));
}

GeneratorFlows::GeneratorFlows(const Irrep& rep, const std::vector<int>& axes) : rep_(&rep) {
  for (int b : axes) {
    generators_.push_back(rep.cw->unit(b));
    spectra_.push_back(generator_spectrum(rep.dU_basis(b)));
  }
}

int GeneratorFlows::match(const RVector& x, double& t) const {
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const RVector& g = generators_[i];
    const double gg = g.squaredNorm();
    const double s = x.dot(g) / gg;
    if ((x - s * g).squaredNorm() <= 1e-28 * std::max(1.0, x.squaredNorm())) {
      t = s;
      return static_cast<int>(i);
    }
  }
  return -1;
}

CVector GeneratorFlows::apply(const RVector& factor, const CVector& v) const {
  double t = 0.0;
  const int i = match(factor, t);
  if (i >= 0) return apply_flow(spectra_[i], t, v);
  return apply_flow(generator_spectrum(rep_->dU(factor)), 1.0, v);
}

CVector GeneratorFlows::apply(const GroupElement& x, const CVector& v) const {
  CVector out = v;
  for (auto it = x.factors.rbegin(); it != x.factors.rend(); ++it) out = apply(*it, out);
  return out;
}

}  // namespace berezin
