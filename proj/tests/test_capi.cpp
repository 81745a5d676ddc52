#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "berezin.h"

TEST_CASE("dimension queries") {
  const int l11[] = {1, 1}, l10[] = {1, 0}, bad[] = {1, -1};
  long long d = 0;
  CHECK(bz_weyl_dimension("A", 2, l11, 2, 8, &d) == BZ_OK);
  CHECK(d == 729);
  CHECK(bz_weyl_dimension("A", 2, l10, 2, 3, &d) == BZ_OK);
  CHECK(d == 10);
  int od = 0;
  CHECK(bz_orbit_dimension("A", 2, l10, 2, &od) == BZ_OK);
  CHECK(od == 4);

  CHECK(bz_weyl_dimension("A", 2, bad, 2, 1, &d) == BZ_ERR_DOMAIN);
  CHECK(std::strlen(bz_last_error()) > 0);
  CHECK(bz_weyl_dimension("G", 2, l11, 2, 1, &d) == BZ_ERR_CONFIG);
  CHECK(bz_weyl_dimension("A", 2, l11, 1, 1, &d) == BZ_ERR_CONFIG);
  CHECK(bz_weyl_dimension(nullptr, 2, l11, 2, 1, &d) == BZ_ERR_INVALID_ARGUMENT);
  CHECK(bz_weyl_dimension("A", 2, l11, 2, 1, nullptr) == BZ_ERR_INVALID_ARGUMENT);
  CHECK(std::string(bz_status_string(BZ_ERR_IO)) == "i/o error");
  CHECK(std::strlen(bz_version()) > 0);
}

TEST_CASE("irrep handles") {
  const int l[] = {1, 1};
  bz_irrep* rep = nullptr;
  REQUIRE(bz_irrep_build("A", 2, l, 2, 2, &rep) == BZ_OK);
  REQUIRE(rep != nullptr);
  int d = 0, n = 0;
  CHECK(bz_irrep_dimension(rep, &d) == BZ_OK);
  CHECK(d == 27);
  CHECK(bz_irrep_algebra_dimension(rep, &n) == BZ_OK);
  CHECK(n == 8);

  double res = 1;
  int match = 0, irr = 0;
  CHECK(bz_irrep_verify(rep, &res, &match, &irr) == BZ_OK);
  CHECK(res < 1e-10);
  CHECK(match == 1);
  CHECK(irr == 1);

  std::vector<double> buf(2 * d * d);
  CHECK(bz_irrep_generator(rep, 0, buf.data(), buf.size()) == BZ_OK);
  // dU(H_1) is diagonal and anti-Hermitian: real parts vanish
  double re = 0;
  for (int i = 0; i < d * d; ++i) re += std::abs(buf[2 * i]);
  CHECK(re == 0.0);
  CHECK(bz_irrep_generator(rep, 0, buf.data(), 10) == BZ_ERR_BUFFER_TOO_SMALL);
  CHECK(bz_irrep_generator(rep, 8, buf.data(), buf.size()) == BZ_ERR_INVALID_ARGUMENT);

  const char* path = "capi_irrep.json";
  CHECK(bz_irrep_save(rep, path) == BZ_OK);
  bz_irrep* back = nullptr;
  CHECK(bz_irrep_load(path, &back) == BZ_OK);
  std::vector<double> buf2(buf.size());
  for (int b = 0; b < 8; ++b) {
    bz_irrep_generator(rep, b, buf.data(), buf.size());
    bz_irrep_generator(back, b, buf2.data(), buf2.size());
    CHECK(buf == buf2);
  }
  std::remove(path);
  bz_irrep_free(back);
  bz_irrep_free(rep);
  bz_irrep_free(nullptr);

  bz_irrep* none = nullptr;
  CHECK(bz_irrep_load("/nonexistent/irrep.json", &none) == BZ_ERR_IO);
  CHECK(none == nullptr);
  const int neg[] = {-1};
  CHECK(bz_irrep_build("A", 1, neg, 1, 1, &none) == BZ_ERR_DOMAIN);
}

TEST_CASE("quantize a linear function") {
  const int l[] = {1};
  bz_irrep* rep = nullptr;
  REQUIRE(bz_irrep_build("A", 1, l, 1, 4, &rep) == BZ_OK);
  const double x[] = {1.0, 0.0, 0.0};
  std::vector<double> q(2 * 25), g(2 * 25);
  CHECK(bz_quantize_linear(rep, x, 3, q.data(), q.size()) == BZ_OK);
  CHECK(bz_irrep_generator(rep, 0, g.data(), g.size()) == BZ_OK);
  // Q(f_H) = (1 / (k + 2)) i dU(H); i (a + ib) = -b + ia
  for (int i = 0; i < 25; ++i) {
    CHECK(q[2 * i] == doctest::Approx(-g[2 * i + 1] / 6.0).epsilon(1e-10));
    CHECK(q[2 * i + 1] == doctest::Approx(g[2 * i] / 6.0).epsilon(1e-10));
  }
  CHECK(bz_quantize_linear(rep, x, 2, q.data(), q.size()) == BZ_ERR_INVALID_ARGUMENT);
  bz_irrep_free(rep);
}

TEST_CASE("configs and runs") {
  bz_config* cfg = nullptr;
  CHECK(bz_config_parse("{not json", &cfg) == BZ_ERR_CONFIG);
  CHECK(bz_config_parse(R"({"schema_version": 1, "k_values": [3, 2]})", &cfg) == BZ_ERR_CONFIG);
  CHECK(bz_config_load("/nonexistent/cfg.json", &cfg) == BZ_ERR_IO);

  REQUIRE(bz_config_parse(R"({
      "schema_version": 1, "group": {"series": "A", "rank": 1}, "lambda": [1],
      "k_values": [2, 4, 8],
      "functions": [{"kind": "linear", "basis": 1}, {"kind": "linear", "basis": 2}],
      "xval_samples": 20000})",
                          &cfg) == BZ_OK);
  CHECK(bz_config_set_seed(cfg, 17) == BZ_OK);
  CHECK(bz_config_set_threads(cfg, 2) == BZ_OK);
  CHECK(bz_config_set_threads(cfg, 0) == BZ_ERR_INVALID_ARGUMENT);
  CHECK(bz_config_set_sign(cfg, "nope") == BZ_ERR_CONFIG);
  CHECK(bz_config_set_sign(cfg, "liepbr") == BZ_OK);
  CHECK(std::string(bz_config_json(cfg)).find("\"liepbr\"") != std::string::npos);

  bz_result* r = nullptr;
  REQUIRE(bz_run_sweep(cfg, 0, &r) == BZ_OK);
  const std::string csv = bz_result_csv(r);
  CHECK(csv.rfind("k,dim,dirac_defect", 0) == 0);
  CHECK(std::string(bz_result_json(r)).find("\"rows\"") != std::string::npos);
  bz_result_free(r);

  REQUIRE(bz_cross_validate(cfg, &r) == BZ_OK);
  CHECK(bz_result_pass(r) == 1);
  bz_result_free(r);

  REQUIRE(bz_dims_report(cfg, &r) == BZ_OK);
  CHECK(bz_result_pass(r) == 1);
  bz_result_free(r);

  REQUIRE(bz_irrep_report(cfg, &r) == BZ_OK);
  CHECK(bz_result_pass(r) == 1);
  bz_result_free(r);
  bz_config_free(cfg);

  CHECK(bz_run_sweep(nullptr, 0, &r) == BZ_ERR_INVALID_ARGUMENT);
  CHECK(bz_result_pass(nullptr) == 0);
}
