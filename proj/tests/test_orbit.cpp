#include "doctest.h"

#include "berezin/errors.hpp"
#include "berezin/orbit.hpp"
#include "oracles.hpp"

using namespace berezin;

namespace {

RVector randn(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RVector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

}  // namespace

TEST_CASE("base point and coadjoint invariants") {
  const auto cw = make_cartan_weyl("A", 2);
  const Weight lambda{1, 1};
  const OrbitPoint b = base_point(*cw, lambda);
  CHECK(b.theta[0] == doctest::Approx(1.0));
  CHECK(b.theta[1] == doctest::Approx(1.0));
  for (int i = 2; i < cw->dim(); ++i) CHECK(std::abs(b.theta[i]) < 1e-15);
  const RVector inv0 = orbit_invariants(*cw, b.theta);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const GroupElement x = haar_random_element(*cw, rng);
    const OrbitPoint p = coadjoint_act(*cw, x, b);
    CHECK((orbit_invariants(*cw, p.theta) - inv0).norm() < 1e-12);
    CHECK(on_orbit(*cw, lambda, p.theta));
    // Co(x) theta (Y) = theta(Ad(x^-1) Y)
    const RVector y = randn(cw->dim(), rng);
    const RMatrix adinv = adjoint_matrix(*cw, x.inverse());
    CHECK(p.theta.dot(y) == doctest::Approx(b.theta.dot(adinv * y)).epsilon(1e-12));
  }
  CHECK_FALSE(on_orbit(*cw, lambda, 1.1 * b.theta));
}

TEST_CASE("A1 orbit is a sphere of radius proportional to m") {
  const auto cw = make_cartan_weyl("A", 1);
  std::mt19937_64 rng(2);
  for (int m : {1, 3}) {
    const OrbitPoint b = base_point(*cw, Weight{double(m)});
    for (int t = 0; t < 10; ++t) {
      const OrbitPoint p = coadjoint_act(*cw, haar_random_element(*cw, rng), b);
      // H, A, S are orthogonal with equal norm, so the orbit is |theta| = m
      CHECK(p.theta.norm() == doctest::Approx(m).epsilon(1e-12));
    }
  }
}

TEST_CASE("momentum map inverts the coherent-state map") {
  std::mt19937_64 rng(3);
  for (int rank : {1, 2}) {
    const auto cw = make_cartan_weyl("A", rank);
    const Weight lambda = rank == 1 ? Weight{2} : Weight{1, 1};
    const Irrep rep = build_irrep(cw, lambda, 3);
    const OrbitPoint b = base_point(*cw, lambda);
    for (int t = 0; t < 20; ++t) {
      const GroupElement x = haar_random_element(*cw, rng);
      const CVector q = group_unitary(rep, x) * rep.hw_vector;
      const OrbitPoint j = momentum_map(rep, q);
      CHECK((j.theta - coadjoint_act(*cw, x, b).theta).norm() < 1e-12);
    }
    CVector bad = 1.01 * rep.hw_vector;
    CHECK_THROWS_AS(momentum_map(rep, bad), DomainError);
  }
}

TEST_CASE("sign conventions") {
  CHECK(sign_factor(PoissonSign::theorem) == -1.0);
  CHECK(sign_factor(PoissonSign::liepbr) == -1.0);
  CHECK(sign_factor(PoissonSign::flipped) == 1.0);
  CHECK(parse_sign("theorem") == PoissonSign::theorem);
  CHECK(parse_sign("liepbr") == PoissonSign::liepbr);
  CHECK(parse_sign("flipped") == PoissonSign::flipped);
  CHECK_THROWS_AS(parse_sign("plus"), ConfigError);
  CHECK(to_string(PoissonSign::liepbr) == "liepbr");

  const auto cw = make_cartan_weyl("A", 1);
  const RVector th = base_point(*cw, Weight{1}).theta;
  // {f_A, f_S} at the base point: -theta([A, S])
  const RVector a = cw->unit(1), s = cw->unit(2);
  const double kks = th.dot(cw->bracket(a, s));
  CHECK(std::abs(kks) > 0.5);
  CHECK(poisson_linear(*cw, a, s, th) == doctest::Approx(-kks));
  CHECK(poisson_linear(*cw, a, s, th, PoissonSign::flipped) == doctest::Approx(kks));
}

TEST_CASE("group-level bracket reproduces the linear Lie-Poisson bracket") {
  std::mt19937_64 rng(4);
  struct Case {
    int rank;
    Weight lambda;
  };
  for (const Case& c : {Case{1, Weight{1}}, Case{1, Weight{3}}, Case{2, Weight{1, 1}},
                        Case{2, Weight{1, 0}}, Case{2, Weight{0, 2}}}) {
    const auto cw = make_cartan_weyl("A", c.rank);
    for (int t = 0; t < 5; ++t) {
      const RVector x = randn(cw->dim(), rng), y = randn(cw->dim(), rng);
      const GroupElement g = haar_random_element(*cw, rng);
      const RVector th = coadjoint_act(*cw, g, base_point(*cw, c.lambda)).theta;
      const double want = poisson_linear(*cw, x, y, th);
      const double got = poisson_general(*cw, c.lambda, OrbitFunction::linear(x),
                                         OrbitFunction::linear(y), g);
      CHECK(got == doctest::Approx(want).epsilon(1e-7));
    }
  }
}

TEST_CASE("Leibniz bracket of polynomials agrees with the group-level formula") {
  std::mt19937_64 rng(5);
  const auto cw = make_cartan_weyl("A", 2);
  const Weight lambda{1, 1};
  const RVector x = randn(8, rng), y = randn(8, rng), z = randn(8, rng);
  const OrbitFunction f = OrbitFunction::product({x, y}, 0.7) + OrbitFunction::linear(z);
  const OrbitFunction g = OrbitFunction::product({z, z});
  const OrbitFunction pb = poisson_polynomial(*cw, f, g, PoissonSign::theorem);
  CHECK(pb.degree() == 3);
  for (int t = 0; t < 4; ++t) {
    const GroupElement e = haar_random_element(*cw, rng);
    const RVector th = coadjoint_act(*cw, e, base_point(*cw, lambda)).theta;
    CHECK(pb.on_orbit(th) == doctest::Approx(poisson_general(*cw, lambda, f, g, e)).epsilon(1e-6));
  }
}

TEST_CASE("quadrature: weights, moments and the orthogonality self-test") {
  for (int rank : {1, 2}) {
    const auto cw = make_cartan_weyl("A", rank);
    const Weight lambda = rank == 1 ? Weight{1} : Weight{1, 1};
    const QuadratureRule q = build_quadrature(cw, lambda, 2, 2);
    CHECK(q.weight_sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(q.self_test_defect < 1e-10);
    const MomentTensor mt(q, nullptr, 2);
    const RVector th0 = base_point(*cw, lambda).theta;
    const double cas = th0.dot(cw->gram_inverse * th0);
    // invariance: first moments vanish, second moments are (cas / dim) G
    for (int b = 0; b < cw->dim(); ++b) {
      CHECK(std::abs(mt.slice({0, b + 1})(0, 0)) < 1e-12);
      for (int c = 0; c < cw->dim(); ++c) {
        const double want = cas / cw->dim() * cw->gram(b, c);
        CHECK(std::abs(mt.slice({b + 1, c + 1})(0, 0) - want) < 1e-12);
      }
    }
  }
}

TEST_CASE("quadrature moments agree with QR-Haar Monte Carlo") {
  const auto cw = make_cartan_weyl("A", 2);
  const Weight lambda{1, 0};
  const QuadratureRule q = build_quadrature(cw, lambda, 1, 4);
  const MomentTensor mt(q, nullptr, 4);
  const RVector th0 = base_point(*cw, lambda).theta;
  std::mt19937_64 rng(8);
  const int n = 60000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const RVector th = coadjoint_act(*cw, oracle::qr_haar(3, rng), th0);
    const double v = std::pow(th[2], 2) * std::pow(th[0], 2);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, sigma = std::sqrt((s2 / n - mean * mean) / n);
  const double quad = mt.slice({1, 1, 3, 3})(0, 0).real();
  CHECK(std::abs(quad - mean) < 5 * sigma);
}

TEST_CASE("coarse rules fail the self-test with a suggestion") {
  const auto cw = make_cartan_weyl("A", 1);
  for (int cap : {3, 12}) {
    QuadratureOptions opts;
    opts.max_nodes = cap;
    try {
      build_quadrature(cw, Weight{1}, 16, 2, opts);
      FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
      // suggestion: the largest level the capped rule still integrates, or -1
      CHECK(e.defect() > 1e-10);
      CHECK(e.suggested_k_max() < 16);
      if (e.suggested_k_max() >= 0) {
        opts.max_nodes = cap;
        CHECK_NOTHROW(build_quadrature(cw, Weight{1}, e.suggested_k_max(), 2, opts));
      }
      if (cap == 12) CHECK(e.suggested_k_max() >= 1);
    }
  }
}

TEST_CASE("visit_nodes and MomentTensor agree") {
  const auto cw = make_cartan_weyl("A", 2);
  const Weight lambda{1, 0};
  const Irrep rep = build_irrep(cw, lambda, 2);
  const QuadratureRule q = build_quadrature(cw, lambda, 2, 1);
  const MomentTensor mt(q, &rep, 1);
  const RVector x = cw->unit(3);
  CMatrix direct = CMatrix::Zero(rep.dimension, rep.dimension);
  std::size_t count = 0;
  visit_nodes(q, &rep, [&](const NodeView& v) {
    direct += v.weight * v.theta->dot(x) * (*v.vector) * v.vector->adjoint();
    ++count;
  });
  CHECK(count == q.size());
  CHECK((direct - mt.integrate(OrbitFunction::linear(x))).norm() < 1e-12);
}

TEST_CASE("Fubini-Study pullback is k times the KKS form") {
  const auto cw = make_cartan_weyl("A", 2);
  const Weight lambda{1, 1};
  std::mt19937_64 rng(9);
  const GroupElement y = haar_random_element(*cw, rng);
  OrbitPoint sigma = coadjoint_act(*cw, y, base_point(*cw, lambda));
  sigma.source = y;
  const RVector a = randn(8, rng), b = randn(8, rng);
  const double r1 = fs_pullback_ratio(build_irrep(cw, lambda, 1), sigma, a, b);
  for (int k : {2, 3}) {
    const double rk = fs_pullback_ratio(build_irrep(cw, lambda, k), sigma, a, b);
    CHECK(rk / r1 == doctest::Approx(k).epsilon(1e-6));
  }
  OrbitPoint nosrc = sigma;
  nosrc.source.reset();
  CHECK_THROWS_AS(fs_pullback_ratio(build_irrep(cw, lambda, 1), nosrc, a, b), DomainError);
}
