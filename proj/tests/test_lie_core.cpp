#include "doctest.h"

#include <set>

#include "berezin/errors.hpp"
#include "berezin/lie_core.hpp"
#include "oracles.hpp"

using namespace berezin;

TEST_CASE("cartan matrices and positive roots") {
  const auto a1 = build_root_system("A", 1);
  CHECK(a1.cartan_matrix(0, 0) == 2);
  CHECK(a1.positive_roots.size() == 1);

  const auto a2 = build_root_system("A", 2);
  Eigen::MatrixXi c(2, 2);
  c << 2, -1, -1, 2;
  CHECK(a2.cartan_matrix == c);
  REQUIRE(a2.positive_roots.size() == 3);
  CHECK(a2.positive_roots[2].simple_coeffs == Eigen::Vector2i(1, 1));
  CHECK(a2.positive_roots[2].labels == Eigen::Vector2i(1, 1));
  CHECK(a2.dim_algebra() == 8);
  // (alpha, alpha) = 2 for every root
  for (const auto& r : a2.positive_roots) CHECK(a2.inner(r.labels.cast<double>(), r.labels.cast<double>()) == doctest::Approx(2.0));
}

TEST_CASE("unsupported groups are configuration errors") {
  CHECK_THROWS_AS(build_root_system("B", 2), ConfigError);
  CHECK_THROWS_AS(build_root_system("A", 0), ConfigError);
}

TEST_CASE("integrality and dominance") {
  CHECK(is_integral_dominant(Weight{1, 1}).dominant);
  CHECK_FALSE(is_integral_dominant(Weight{1, -1}).dominant);
  CHECK_FALSE(is_integral_dominant(Weight{0.5, 1}).integral);
  const auto a2 = build_root_system("A", 2);
  CHECK_THROWS_AS(weyl_dimension(a2, Weight{1, -1}), DomainError);
  CHECK_THROWS_AS(weyl_dimension(a2, Weight{0.5, 0}), DomainError);
}

TEST_CASE("weyl dimension against Freudenthal multiplicities") {
  for (int rank : {1, 2, 3}) {
    const auto rs = build_root_system("A", rank);
    std::vector<std::vector<int>> hws;
    if (rank == 1) hws = {{0}, {1}, {2}, {5}, {8}};
    if (rank == 2) hws = {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 0}, {2, 2}, {4, 3}};
    if (rank == 3) hws = {{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {1, 1, 1}};
    for (const auto& hw : hws) {
      int total = 0;
      for (const auto& [w, m] : oracle::freudenthal(hw)) total += m;
      RVector l(rank);
      for (int i = 0; i < rank; ++i) l[i] = hw[i];
      CAPTURE(rank);
      CAPTURE(l.transpose());
      CHECK(weyl_dimension(rs, Weight(l)) == total);
    }
  }
}

TEST_CASE("weyl dimension closed forms") {
  const auto a1 = build_root_system("A", 1);
  const auto a2 = build_root_system("A", 2);
  for (int k = 1; k <= 64; ++k) {
    CHECK(weyl_dimension(a1, Weight{3}, k) == 3 * k + 1);
    const long long a = k, b = k;
    CHECK(weyl_dimension(a2, Weight{1, 1}, k) == (a + 1) * (b + 1) * (a + b + 2) / 2);
    CHECK(weyl_dimension(a2, Weight{1, 0}, k) == (a + 1) * (a + 2) / 2);
  }
}

TEST_CASE("orbit dimension and weyl orbits") {
  const auto a1 = build_root_system("A", 1);
  const auto a2 = build_root_system("A", 2);
  CHECK(orbit_dimension(a1, Weight{1}).dimension == 2);
  CHECK(orbit_dimension(a1, Weight{0}).dimension == 0);
  CHECK(orbit_dimension(a2, Weight{1, 0}).dimension == 4);
  CHECK(orbit_dimension(a2, Weight{0, 1}).dimension == 4);
  CHECK(orbit_dimension(a2, Weight{1, 1}).dimension == 6);
  CHECK(orbit_dimension(a2, Weight{1, 0}).support.size() == 2);
  CHECK(weyl_group_orbit(a2, Weight{1, 1}).size() == 6);
  CHECK(weyl_group_orbit(a2, Weight{1, 0}).size() == 3);
  CHECK(weyl_group_orbit(a2, Weight{0, 0}).size() == 1);
}

namespace {

// Abstract bracket on the complex basis (h_i, E_r) from Cartan data and a
// table of N; Jacobi identity checked on all triples.
double jacobi_defect(const CartanWeylBasis& cw, const std::map<std::pair<int, int>, double>& n,
                     double sigma) {
  const int rk = cw.rank(), nr = cw.num_roots(), dim = rk + nr;
  std::vector<Eigen::MatrixXd> ad(dim, Eigen::MatrixXd::Zero(dim, dim));  // ad(x)_{out,in}
  auto set = [&](int a, int b, int c, double v) { ad[a](c, b) += v; };
  for (int r = 0; r < nr; ++r) {
    for (int i = 0; i < rk; ++i) {
      const double ai = cw.roots[r].labels[i];
      set(i, rk + r, rk + r, ai);
      set(rk + r, i, rk + r, -ai);
    }
    const int mr = cw.negative_of(r);
    for (int i = 0; i < rk; ++i) set(rk + r, rk + mr, i, sigma * cw.roots[r].simple_coeffs[i]);
    for (int s = 0; s < nr; ++s) {
      auto it = n.find({r, s});
      if (it == n.end()) continue;
      const int t = cw.root_index(cw.roots[r].simple_coeffs + cw.roots[s].simple_coeffs);
      set(rk + r, rk + s, rk + t, it->second);
    }
  }
  double worst = 0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      // ad([a,b]) = [ad a, ad b]
      Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(dim, dim);
      for (int c = 0; c < dim; ++c) lhs += ad[a](c, b) * ad[c];
      worst = std::max(worst, (lhs - (ad[a] * ad[b] - ad[b] * ad[a])).cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace

TEST_CASE("structure constants: realization and brute-force sign enumeration") {
  const auto cw = build_cartan_weyl(build_root_system("A", 2));
  const int p = cw.num_positive();

  // defining-matrix check of every entry, and [E_a, E_-a] = sigma h_a
  for (const auto& [ab, v] : cw.structure_constants) {
    const auto [a, b] = ab;
    const int c = cw.root_index(cw.roots[a].simple_coeffs + cw.roots[b].simple_coeffs);
    REQUIRE(c >= 0);
    const CMatrix comm = cw.e[a] * cw.e[b] - cw.e[b] * cw.e[a];
    CHECK((comm - v * cw.e[c]).norm() < 1e-13);
    CHECK(std::abs(std::abs(v) - 1.0) < 1e-13);
  }
  const CMatrix hh = cw.e[0] * cw.e[p] - cw.e[p] * cw.e[0];
  const double sigma = (hh.diagonal()(0)).real() / cw.h[0].diagonal()(0).real();
  CHECK(std::abs(std::abs(sigma) - 1.0) < 1e-13);
  CHECK((hh - sigma * cw.h[0]).norm() < 1e-13);

  CHECK(jacobi_defect(cw, cw.structure_constants, sigma) < 1e-12);

  // enumerate signs over unordered pairs (antisymmetry fixes the rest)
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [ab, v] : cw.structure_constants)
    if (ab.first < ab.second) pairs.push_back(ab);
  REQUIRE(pairs.size() == 6);
  int survivors = 0;
  bool library_found = false;
  for (int mask = 0; mask < (1 << pairs.size()); ++mask) {
    std::map<std::pair<int, int>, double> n;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double s = (mask >> i) & 1 ? -1.0 : 1.0;
      n[pairs[i]] = s;
      n[{pairs[i].second, pairs[i].first}] = -s;
    }
    if (jacobi_defect(cw, n, sigma) > 1e-12) continue;
    ++survivors;
    if (n == cw.structure_constants) library_found = true;
  }
  CHECK(survivors > 0);
  CHECK(survivors < 64);
  CHECK(library_found);
  // extraspecial pair (alpha_1, alpha_2)
  CHECK(cw.structure_constants.at({0, 1}) == doctest::Approx(1.0));
}

TEST_CASE("real basis is anti-Hermitian, traceless and orthogonal") {
  for (int rank : {1, 2, 3}) {
    const auto cw = build_cartan_weyl(build_root_system("A", rank));
    CHECK(cw.dim() == rank * (rank + 2));
    for (const auto& b : cw.basis) {
      CHECK((b + b.adjoint()).norm() < 1e-14);
      CHECK(std::abs(b.trace()) < 1e-14);
    }
    // off-diagonal gram blocks vanish between Cartan and root parts
    for (int a = 0; a < rank; ++a)
      for (int b = rank; b < cw.dim(); ++b) CHECK(std::abs(cw.gram(a, b)) < 1e-14);
    // bracket closes and expand inverts defining
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    RVector x(cw.dim()), y(cw.dim());
    for (int i = 0; i < cw.dim(); ++i) x[i] = g(rng), y[i] = g(rng);
    const CMatrix dx = cw.defining(x), dy = cw.defining(y);
    CHECK((cw.expand(dx) - x).norm() < 1e-12);
    CHECK((cw.defining(cw.bracket(x, y)) - (dx * dy - dy * dx)).norm() < 1e-12);
    CHECK((cw.ad(x) * y - cw.bracket(x, y)).norm() < 1e-12);
  }
}

TEST_CASE("root eigen-relation [h_j, E_a] = a(h_j) E_a") {
  const auto cw = build_cartan_weyl(build_root_system("A", 2));
  for (int r = 0; r < cw.num_roots(); ++r)
    for (int j = 0; j < cw.rank(); ++j) {
      const CMatrix comm = cw.h[j] * cw.e[r] - cw.e[r] * cw.h[j];
      CHECK((comm - double(cw.roots[r].labels[j]) * cw.e[r]).norm() < 1e-14);
    }
}
