// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance [--report]
// Exit status is nonzero when any criterion fails, unless --report is given.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "berezin/harness.hpp"

using namespace berezin;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

CVector random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  CVector v(d);
  for (int i = 0; i < d; ++i) v[i] = cplx(n(rng), n(rng));
  return v / v.norm();
}

RVector random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  RVector v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

struct Family {
  int rank;
  Weight lambda;
  std::vector<int> ks;
};

std::vector<Family> irrep_grid() {
  std::vector<Family> out;
  std::vector<int> a1k(32), a2k(8);
  for (int k = 1; k <= 32; ++k) a1k[k - 1] = k;
  for (int k = 1; k <= 8; ++k) a2k[k - 1] = k;
  for (int m = 1; m <= 8; ++m) out.push_back({1, Weight{double(m)}, a1k});
  out.push_back({2, Weight{1, 0}, a2k});
  out.push_back({2, Weight{1, 1}, a2k});
  return out;
}

std::string label(const Family& f, int k) {
  std::ostringstream s;
  s << "A" << f.rank << "(";
  for (Eigen::Index i = 0; i < f.lambda.labels.size(); ++i)
    s << (i ? "," : "") << f.lambda.labels[i];
  s << ") k=" << k;
  return s.str();
}

Outcome irrep_validity() {
  const auto t0 = Clock::now();
  double comm = 0, hw = 0;
  int count = 0, mismatched = 0;
  std::string worst;
  for (const Family& f : irrep_grid()) {
    const auto cw = make_cartan_weyl("A", f.rank);
    for (int k : f.ks) {
      const IrrepReport r = verify_irrep(build_irrep(cw, f.lambda, k));
      const double h = std::max({r.hw_cartan_residual, r.hw_raising_residual,
                                 r.hw_expectation_residual});
      if (r.commutator_residual > comm) {
        comm = r.commutator_residual;
        worst = label(f, k);
      }
      hw = std::max(hw, h);
      if (!r.dimension_match) ++mismatched;
      ++count;
    }
  }
  const double secs = seconds_since(t0);
  return {comm < 1e-9 && hw < 1e-10 && mismatched == 0 && secs < 60,
          std::to_string(count) + " irreps, commutator " + g(comm) + " (" + worst +
              "), highest weight " + g(hw) + ", dimension mismatches " +
              std::to_string(mismatched) + ", " + g(secs) + " s"};
}

Outcome gilmore() {
  std::mt19937_64 rng(101);
  double worst = 0;
  for (const Family& f : {Family{1, Weight{1}, {5}}, Family{2, Weight{1, 1}, {3}}}) {
    const auto cw = make_cartan_weyl("A", f.rank);
    const Irrep rk = build_irrep(cw, f.lambda, f.ks[0]), r1 = build_irrep(cw, f.lambda, 1);
    for (int t = 0; t < 100; ++t)
      worst = std::max(worst, gilmore_check(rk, r1, haar_random_element(*cw, rng)));
  }
  return {worst < 1e-8, "max residual " + g(worst) + " over 200 elements"};
}

Outcome normalization() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(102);
  double worst = 0;
  int count = 0;
  for (const Family& f : irrep_grid()) {
    const auto cw = make_cartan_weyl("A", f.rank);
    const QuadratureRule q = build_quadrature(cw, f.lambda, f.ks.back(), 0);
    for (int k : f.ks) {
      const Irrep rep = build_irrep(cw, f.lambda, k);
      const MomentTensor mt(q, &rep, 0);
      for (int t = 0; t < 20; ++t)
        worst = std::max(worst, std::abs(check_normalization(mt, random_unit(rep.dimension, rng)) - 1));
      ++count;
    }
  }
  return {worst < 1e-6, "max |value - 1| " + g(worst) + " over " + std::to_string(count) +
                            " levels x 20 states, " + g(seconds_since(t0)) + " s"};
}

Outcome momentum_map_inverse() {
  std::mt19937_64 rng(103);
  double worst = 0;
  for (const Family& f : {Family{1, Weight{1}, {8}}, Family{2, Weight{1, 1}, {3}}}) {
    const auto cw = make_cartan_weyl("A", f.rank);
    const Irrep rep = build_irrep(cw, f.lambda, f.ks[0]);
    const OrbitPoint b = base_point(*cw, f.lambda);
    for (int t = 0; t < 100; ++t) {
      const GroupElement x = haar_random_element(*cw, rng);
      const OrbitPoint j = momentum_map(rep, group_unitary(rep, x) * rep.hw_vector);
      worst = std::max(worst, (j.theta - coadjoint_act(*cw, x, b).theta).norm());
    }
  }
  return {worst < 1e-9, "max error " + g(worst) + " over 200 orbit points"};
}

Outcome positivity_and_norm() {
  std::mt19937_64 rng(104);
  double id = 0, min_eig = 1e300, bound = -1e300;
  int tested = 0;
  for (const Family& f : {Family{1, Weight{1}, {8}}, Family{2, Weight{1, 1}, {2}}}) {
    const auto cw = make_cartan_weyl("A", f.rank);
    const int k = f.ks[0];
    const Irrep rep = build_irrep(cw, f.lambda, k);
    const QuadratureRule q = build_quadrature(cw, f.lambda, k, 2);
    const Quantizer qz(rep, q, 2);
    id = std::max(id, (qz(OrbitFunction::constant(1)) - CMatrix::Identity(rep.dimension, rep.dimension)).norm());
    for (int t = 0; t < 10; ++t) {
      const OrbitFunction lin = OrbitFunction::linear(random_vector(cw->dim(), rng));
      // squares, and shifted linear functions bounded below by zero
      const double s = sup_norm(*cw, f.lambda, lin);
      const OrbitFunction nonneg = t % 2 ? lin * lin : lin + OrbitFunction::constant(s);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(qz(nonneg));
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
      bound = std::max(bound, operator_norm(qz(lin)) - s);
      ++tested;
    }
  }
  return {id < 1e-10 && min_eig >= -1e-10 && bound <= 1e-8,
          "|Q(1) - I| " + g(id) + ", min eigenvalue " + g(min_eig) + " over " +
              std::to_string(tested) + " nonnegative functions, max ||Q(f)|| - ||f|| " + g(bound)};
}

Outcome equivariance() {
  std::mt19937_64 rng(105);
  double worst = 0;
  const auto cw = make_cartan_weyl("A", 1);
  const Weight lambda{1};
  for (int k : {4, 8, 16, 32, 64}) {
    const Irrep rep = build_irrep(cw, lambda, k);
    const QuadratureRule q = build_quadrature(cw, lambda, k, 2);
    const Quantizer qz(rep, q, 2);
    const OrbitFunction f = OrbitFunction::product({cw->unit(1), cw->unit(2)}) +
                            OrbitFunction::linear(cw->unit(0));
    for (int t = 0; t < 20; ++t)
      worst = std::max(worst, equivariance_defect(qz, f, haar_random_element(*cw, rng)));
  }
  const auto cw2 = make_cartan_weyl("A", 2);
  for (const Weight& lambda2 : {Weight{1, 0}, Weight{1, 1}}) {
    const Irrep rep = build_irrep(cw2, lambda2, 2);
    const QuadratureRule q = build_quadrature(cw2, lambda2, 2, 2);
    const Quantizer qz(rep, q, 2);
    const OrbitFunction f = OrbitFunction::product({cw2->unit(2), cw2->unit(5)}) +
                            OrbitFunction::linear(cw2->unit(0));
    for (int t = 0; t < 20; ++t)
      worst = std::max(worst, equivariance_defect(qz, f, haar_random_element(*cw2, rng)));
  }
  return {worst < 1e-7, "max defect " + g(worst)};
}

ExperimentConfig a1_sweep_config(PoissonSign sign) {
  ExperimentConfig cfg;
  cfg.lambda = {1.0};
  cfg.k_values = {4, 8, 16, 32, 64};
  cfg.functions = {{{"kind", "linear"}, {"basis", 1}}, {{"kind", "linear"}, {"basis", 2}}};
  cfg.sign = sign;
  cfg.seed = 20240611;
  return cfg;
}

std::string fit_text(const SlopeFit* f) {
  if (!f) return "no fit";
  if (!f->fitted) return "unfitted (" + f->flag + ")";
  return "slope " + g(f->slope) + " r2 " + g(f->r2);
}

bool in_window(const SlopeFit* f) {
  return f && f->fitted && f->slope >= -1.3 && f->slope <= -0.7;
}

struct Sweeps {
  DefectReport theorem, flipped;
  double secs = 0;
};

Outcome dirac(const Sweeps& s) {
  const SlopeFit* t = s.theorem.fit("dirac_defect");
  const SlopeFit* f = s.flipped.fit("dirac_defect");
  const bool ok = in_window(t) && t->r2 > 0.98 && f && f->fitted && f->slope > -0.2 && s.secs < 300;
  return {ok, "theorem " + fit_text(t) + ", flipped " + fit_text(f) + ", " + g(s.secs) + " s"};
}

Outcome jordan(const Sweeps& s) {
  const SlopeFit* j = s.theorem.fit("jordan_defect");
  const SlopeFit* p = s.theorem.fit("product_defect");
  bool dec = true;
  for (std::size_t i = 1; i < s.theorem.rows.size(); ++i)
    dec = dec && s.theorem.rows[i].product_defect < s.theorem.rows[i - 1].product_defect;
  return {in_window(j) && dec && p && p->slope < 0,
          "jordan " + fit_text(j) + ", product " + fit_text(p) +
              (dec ? " (decreasing)" : " (not decreasing)")};
}

Outcome norm_convergence(const Sweeps& s) {
  const SlopeFit* n = s.theorem.fit("norm_gap");
  bool positive = true, dec = true;
  const auto& rows = s.theorem.rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    positive = positive && rows[i].norm_gap > 0;
    if (i) dec = dec && rows[i].norm_gap < rows[i - 1].norm_gap;
  }
  return {positive && dec && in_window(n),
          fit_text(n) + (positive ? ", positive" : ", not positive") +
              (dec ? ", decreasing" : ", not decreasing")};
}

Outcome duffield(const Sweeps& s) {
  bool dec = true;
  const auto& rows = s.theorem.rows;
  for (std::size_t i = 1; i < rows.size(); ++i)
    dec = dec && rows[i].duffield_gap < rows[i - 1].duffield_gap;
  const auto cw = make_cartan_weyl("A", 1);
  const Irrep r1 = build_irrep(cw, Weight{1}, 1);
  const DuffieldResult one =
      duffield_concentration(r1, {4, 8, 16, 32, 64}, OrbitFunction::constant(1.0), 0);
  double dev = 0;
  for (double m : one.mu) dev = std::max(dev, std::abs(m - 1));
  return {dec && dev < 1e-12, std::string(dec ? "gap decreasing" : "gap not decreasing") +
                                  " from " + g(rows.front().duffield_gap) + " to " +
                                  g(rows.back().duffield_gap) + ", |mu(1) - 1| " + g(dev)};
}

Outcome dimension_asymptotics() {
  const auto a1 = build_root_system("A", 1), a2 = build_root_system("A", 2);
  const std::vector<int> ks{8, 16, 24, 32, 40, 48, 56, 64};
  const double e1 = dimension_growth(a1, Weight{1}, ks).exponent;
  const double e11 = dimension_growth(a2, Weight{1, 1}, ks).exponent;
  const double e10 = dimension_growth(a2, Weight{1, 0}, ks).exponent;
  const bool ok = std::abs(e1 - 1) < 0.1 && std::abs(e11 - 3) < 0.1 && std::abs(e10 - 2) < 0.1;
  return {ok, "A1(1) " + g(e1) + ", A2(1,1) " + g(e11) + ", A2(1,0) " + g(e10)};
}

Outcome cross_validation() {
  ExperimentConfig a1;
  a1.lambda = {1.0};
  a1.k_values = {1, 2, 4};
  a1.functions = {{{"kind", "linear"}, {"basis", 1}},
                  {{"kind", "product"}, {"xs", {{0, 1, 0}, {0, 0, 1}}}, {"coefficient", 2.0}}};
  a1.seed = 99;
  a1.xval_samples = 1000000;
  ExperimentConfig a2;
  a2.rank = 2;
  a2.lambda = {1.0, 0.0};
  a2.k_values = {1, 2};
  a2.functions = {{{"kind", "linear"}, {"basis", 3}}};
  a2.seed = 98;
  a2.xval_samples = 200000;
  int entries = 0, failed = 0;
  double ratio = 0;
  for (const ExperimentConfig& cfg : {a1, a2}) {
    const CrossValidationReport r = cross_validate(cfg);
    for (const auto& e : r.entries) {
      ++entries;
      if (!e.pass) ++failed;
      ratio = std::max(ratio, e.max_sigma_ratio);
    }
  }
  return {entries > 0 && failed == 0, std::to_string(entries) + " operators, " +
                                          std::to_string(failed) + " failed, max |dev|/sigma " +
                                          g(ratio)};
}

Outcome completeness() {
  const auto cw = make_cartan_weyl("A", 1);
  const Weight lambda{1};
  std::string detail;
  bool ok = true;
  for (int k : {1, 2}) {
    const Irrep rep = build_irrep(cw, lambda, k);
    const QuadratureRule q = build_quadrature(cw, lambda, k, 2 * k);
    const Quantizer qz(rep, q, 2 * k);
    const int r = completeness_rank(qz, polynomial_family(*cw, 2 * k));
    const int full = rep.dimension * rep.dimension;
    ok = ok && r == full;
    detail += (detail.empty() ? "" : ", ") + std::string("k=") + std::to_string(k) + " rank " +
              std::to_string(r) + "/" + std::to_string(full);
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  bool report_only = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--report") == 0) report_only = true;

  Sweeps sweeps;
  bool sweeps_ready = false;
  auto ensure_sweeps = [&]() -> const Sweeps& {
    if (!sweeps_ready) {
      const auto t0 = Clock::now();
      sweeps.theorem = run_sweep(a1_sweep_config(PoissonSign::theorem));
      sweeps.flipped = run_sweep(a1_sweep_config(PoissonSign::flipped));
      sweeps.secs = seconds_since(t0);
      sweeps_ready = true;
    }
    return sweeps;
  };

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"irrep validity", irrep_validity},
      {"Gilmore factorization", gilmore},
      {"pure-state normalization", normalization},
      {"momentum map left inverse", momentum_map_inverse},
      {"identity, positivity, norm bound", positivity_and_norm},
      {"equivariance", equivariance},
      {"Dirac rate", [&] { return dirac(ensure_sweeps()); }},
      {"Jordan rate", [&] { return jordan(ensure_sweeps()); }},
      {"norm convergence", [&] { return norm_convergence(ensure_sweeps()); }},
      {"Duffield concentration", [&] { return duffield(ensure_sweeps()); }},
      {"dimension asymptotics", dimension_asymptotics},
      {"cross-validation", cross_validation},
      {"completeness", completeness},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu: %s - %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed && !report_only ? 1 : 0;
}
