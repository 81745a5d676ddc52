#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "berezin/errors.hpp"
#include "berezin/irrep.hpp"
#include "berezin/serialize.hpp"
#include "oracles.hpp"

using namespace berezin;

namespace {

std::vector<double> sorted_abs_superdiag(const CMatrix& m) {
  std::vector<double> v;
  for (int i = 0; i + 1 < m.rows(); ++i) v.push_back(std::abs(m(i, i + 1)));
  return v;
}

}  // namespace

TEST_CASE("A1 generators match closed-form spin matrices") {
  const auto cw = make_cartan_weyl("A", 1);
  for (int m : {1, 2, 3})
    for (int k : {1, 2, 5}) {
      const Irrep rep = build_irrep(cw, Weight{double(m)}, k);
      const double j = k * m / 2.0;
      const auto s = oracle::spin(j);
      REQUIRE(rep.dimension == s.jz.rows());
      // rho(h) = 2 J_z, E_alpha = J_+ up to basis phases
      const CMatrix rho_h = kI * rep.h_matrices[0];
      CHECK((rho_h - 2.0 * s.jz).norm() < 1e-12);
      const CMatrix jp = s.jx + kI * s.jy;
      const auto got = sorted_abs_superdiag(rep.e_matrices[0]);
      const auto want = sorted_abs_superdiag(jp);
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      CHECK((rep.e_matrices[0] - rep.e_matrices[0].triangularView<Eigen::StrictlyUpper>().toDenseMatrix())
                .norm() < 1e-13);
      // Casimir: J^2 = j(j+1)
      const CMatrix ep = rep.e_matrices[0];
      const CMatrix jx = (ep + ep.adjoint()) / 2.0, jy = (ep - ep.adjoint()) / (2.0 * kI);
      const CMatrix cas = jx * jx + jy * jy + 0.25 * rho_h * rho_h;
      CHECK((cas - j * (j + 1) * CMatrix::Identity(rep.dimension, rep.dimension)).norm() < 1e-10);
    }
}

TEST_CASE("weight multiplicities agree with Freudenthal") {
  const auto cw = make_cartan_weyl("A", 2);
  for (auto hw : std::vector<std::vector<int>>{{1, 0}, {1, 1}, {2, 1}, {2, 2}, {3, 1}}) {
    const Irrep rep = build_irrep(cw, Weight{double(hw[0]), double(hw[1])});
    std::map<std::vector<int>, int> got;
    for (const auto& w : rep.weight_labels) ++got[{w[0], w[1]}];
    CHECK(got == oracle::freudenthal(hw));
  }
}

TEST_CASE("verification residuals and dimensions") {
  struct Case {
    int rank;
    std::vector<double> l;
    int k;
  };
  for (const Case& c : std::vector<Case>{{1, {1}, 1},    {1, {1}, 16},     {1, {8}, 4},
                                         {2, {1, 0}, 3}, {2, {0, 1}, 2},   {2, {1, 1}, 1},
                                         {2, {1, 1}, 4}, {2, {2, 1}, 2},   {3, {1, 0, 0}, 2},
                                         {3, {1, 0, 1}, 1}}) {
    const auto cw = make_cartan_weyl("A", c.rank);
    RVector l(c.rank);
    for (int i = 0; i < c.rank; ++i) l[i] = c.l[i];
    const Irrep rep = build_irrep(cw, Weight(l), c.k);
    const IrrepReport r = verify_irrep(rep);
    CAPTURE(c.rank);
    CAPTURE(c.k);
    CHECK(r.dimension_match);
    CHECK(r.expected_dimension == rep.dimension);
    CHECK(r.commutator_residual < 1e-12);
    CHECK(r.anti_hermiticity_residual < 1e-12);
    CHECK(r.adjoint_relation_residual < 1e-12);
    CHECK(r.hw_cartan_residual < 1e-12);
    CHECK(r.hw_raising_residual < 1e-12);
    CHECK(r.hw_expectation_residual < 1e-12);
    CHECK(irreducibility_check(rep));
  }
}

TEST_CASE("trivial representation and bad weights") {
  const auto cw = make_cartan_weyl("A", 2);
  const Irrep triv = build_irrep(cw, Weight{0, 0}, 3);
  CHECK(triv.dimension == 1);
  for (const auto& m : triv.basis_matrices) CHECK(m.norm() == 0.0);
  CHECK_THROWS_AS(build_irrep(cw, Weight{1, -1}), DomainError);
  CHECK_THROWS_AS(build_irrep(cw, Weight{1}), DomainError);
}

TEST_CASE("commutant detects reducibility") {
  const auto cw = make_cartan_weyl("A", 1);
  const Irrep rep = build_irrep(cw, Weight{1}, 2);
  const int d = rep.dimension;
  std::vector<CMatrix> twice, plus_triv;
  for (const auto& m : rep.basis_matrices) {
    CMatrix a = CMatrix::Zero(2 * d, 2 * d);
    a.topLeftCorner(d, d) = m;
    a.bottomRightCorner(d, d) = m;
    twice.push_back(a);
    CMatrix b = CMatrix::Zero(d + 1, d + 1);
    b.topLeftCorner(d, d) = m;
    plus_triv.push_back(b);
  }
  CHECK(commutant_dimension(rep.basis_matrices) == 1);
  CHECK(commutant_dimension(twice) == 4);
  CHECK(commutant_dimension(plus_triv) == 2);
}

TEST_CASE("group unitaries: unitarity and homomorphism") {
  const auto cw = make_cartan_weyl("A", 2);
  const Irrep rep = build_irrep(cw, Weight{1, 1}, 2);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    const GroupElement x = haar_random_element(*cw, rng), y = haar_random_element(*cw, rng);
    const CMatrix ux = group_unitary(rep, x), uy = group_unitary(rep, y);
    CHECK(unitarity_residual(ux) < 1e-10);
    CHECK((group_unitary(rep, x * y) - ux * uy).norm() < 1e-10);
    CHECK((group_unitary(rep, x.inverse()) - ux.adjoint()).norm() < 1e-10);
    CHECK(std::abs(defining_unitary(*cw, x).determinant() - 1.0) < 1e-12);
    // flows agree with the dense exponential
    const GeneratorFlows flows(rep, std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
    CHECK((flows.apply(x, rep.hw_vector) - ux * rep.hw_vector).norm() < 1e-10);
  }
}

TEST_CASE("Haar sampler moments match QR-Haar") {
  for (int rank : {1, 2}) {
    const auto cw = make_cartan_weyl("A", rank);
    const int n = rank + 1;
    const int samples = 40000;
    std::mt19937_64 rng(5), rng2(6);
    double m2 = 0, m4 = 0, q2 = 0, q4 = 0, tr = 0, qtr = 0;
    for (int s = 0; s < samples; ++s) {
      const CMatrix u = defining_unitary(*cw, haar_random_element(*cw, rng));
      const CMatrix v = oracle::qr_haar(n, rng2);
      m2 += std::norm(u(1, 0));
      m4 += std::pow(std::norm(u(0, 1)), 2);
      q2 += std::norm(v(1, 0));
      q4 += std::pow(std::norm(v(0, 1)), 2);
      tr += std::norm(u.trace());
      qtr += std::norm(v.trace());
    }
    m2 /= samples, m4 /= samples, q2 /= samples, q4 /= samples, tr /= samples, qtr /= samples;
    CAPTURE(rank);
    // exact: E|U_ij|^2 = 1/n, E|U_ij|^4 = 2/(n(n+1)), E|tr U|^2 = 1
    CHECK(m2 == doctest::Approx(1.0 / n).epsilon(0.02));
    CHECK(m4 == doctest::Approx(2.0 / (n * (n + 1))).epsilon(0.04));
    CHECK(tr == doctest::Approx(1.0).epsilon(0.04));
    CHECK(m4 == doctest::Approx(q4).epsilon(0.06));
    CHECK(tr == doctest::Approx(qtr).epsilon(0.06));
    CHECK(m2 == doctest::Approx(q2).epsilon(0.03));
  }
}

TEST_CASE("matrix bundle round trip") {
  const auto cw = make_cartan_weyl("A", 2);
  const Irrep rep = build_irrep(cw, Weight{1, 1}, 2);
  const auto path = (std::filesystem::temp_directory_path() / "bz_irrep_roundtrip.json").string();
  save_irrep(rep, path);
  const Irrep back = load_irrep(path);
  std::filesystem::remove(path);
  CHECK(back.dimension == rep.dimension);
  CHECK(back.k == rep.k);
  CHECK(back.lambda.labels == rep.lambda.labels);
  for (std::size_t b = 0; b < rep.basis_matrices.size(); ++b)
    CHECK((back.basis_matrices[b] - rep.basis_matrices[b]).norm() == 0.0);
  CHECK(irrep_cache_key(rep) == "A2_1-1_k2");

  // sparse layout
  CMatrix big = CMatrix::Zero(200, 200);
  big(3, 7) = cplx(1.5, -2.0);
  const auto j = matrix_to_json(big);
  CHECK(j["layout"] == "coo");
  CHECK((matrix_from_json(j) - big).norm() == 0.0);
  const auto small = matrix_to_json(CMatrix::Identity(2, 2));
  CHECK(small["layout"] == "row-major");
  CHECK(small["data"].size() == 4);

  auto bad = small;
  bad["layout"] = "column-major";
  CHECK_THROWS_AS(matrix_from_json(bad), ConfigError);
  CHECK_THROWS_AS(load_irrep("/nonexistent/dir/x.json"), IoError);
}
