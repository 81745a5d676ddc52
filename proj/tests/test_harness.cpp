#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "berezin/errors.hpp"
#include "berezin/harness.hpp"
#include "berezin/serialize.hpp"

using namespace berezin;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "schema_version": 1,
    "group": {"series": "A", "rank": 1},
    "lambda": [1],
    "k_values": [4, 8, 16, 32],
    "functions": [{"kind": "linear", "basis": 1}, {"kind": "linear", "basis": 2}],
    "quadrature": {"scheme": "auto", "order": "auto"},
    "sign_convention": "theorem",
    "seed": 5
  })");
}

std::string strip_runtime(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto last = line.rfind(',');
    const auto prev = line.rfind(',', last - 1);
    out += line.substr(0, prev) + line.substr(last) + "\n";
  }
  return out;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("fit_slope contract") {
  std::vector<std::pair<double, double>> inv, flat;
  for (double k : {4.0, 8.0, 16.0, 32.0}) {
    inv.emplace_back(k, 3.0 / k);
    flat.emplace_back(k, 0.25);
  }
  const SlopeFit a = fit_slope(inv);
  CHECK(a.fitted);
  CHECK(std::abs(a.slope + 1.0) < 1e-12);
  CHECK(a.intercept == doctest::Approx(std::log(3.0)));
  CHECK(a.r2 == doctest::Approx(1.0));
  CHECK(a.ci_low <= a.slope);
  CHECK(a.ci_high >= a.slope);
  const SlopeFit b = fit_slope(flat);
  CHECK(std::abs(b.slope) < 1e-12);

  const SlopeFit c = fit_slope({{4, 1e-15}, {8, 1e-15}});
  CHECK_FALSE(c.fitted);
  CHECK(c.flag == "below-noise-floor");
  CHECK(fit_slope({{4, 1.0}, {8, -0.5}, {16, 0.1}}).flag == "below-noise-floor");
  CHECK(fit_slope({{4, 1.0}, {8, 0.5}}).flag == "insufficient-points");

  // noisy data: interval widens but still covers
  const SlopeFit n = fit_slope({{4, 1.0 / 4 * 1.1}, {8, 1.0 / 8 * 0.95}, {16, 1.0 / 16 * 1.05}, {32, 1.0 / 32}});
  CHECK(n.ci_high - n.ci_low > 0.01);
  CHECK(n.ci_low < -1.0);
  CHECK(n.ci_high > -1.0);
}

TEST_CASE("config parsing and validation") {
  const ExperimentConfig c = parse_config(base_config());
  CHECK(c.k_values == std::vector<int>{4, 8, 16, 32});
  CHECK(c.sign == PoissonSign::theorem);
  CHECK(c.quadrature_order == -1);
  CHECK(c.functions.size() == 2);
  CHECK(parse_config(to_json(c)).k_values == c.k_values);

  auto bad = [](auto edit) {
    json j = base_config();
    edit(j);
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  };
  bad([](json& j) { j.erase("schema_version"); });
  bad([](json& j) { j["schema_version"] = 2; });
  bad([](json& j) { j["k_values"] = json::array(); });
  bad([](json& j) { j["k_values"] = {4, 4, 8}; });
  bad([](json& j) { j["k_values"] = {8, 4}; });
  bad([](json& j) { j["k_values"] = {0, 4}; });
  bad([](json& j) { j["lambda"] = {-1}; });
  bad([](json& j) { j["lambda"] = {0.5}; });
  bad([](json& j) { j["lambda"] = {1, 1}; });
  bad([](json& j) { j["group"]["series"] = "C"; });
  bad([](json& j) { j["sign_convention"] = "minus"; });
  bad([](json& j) { j["quadrature"]["order"] = "high"; });
  bad([](json& j) { j["functions"] = {{{"kind", "spline"}}}; });
  bad([](json& j) { j["functions"] = {{{"kind", "linear"}, {"x", {1, 2}}}}; });
  bad([](json& j) { j["functions"] = {{{"kind", "linear"}, {"basis", 3}}}; });
  bad([](json& j) { j["threads"] = 0; });
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("function descriptors") {
  const auto cw = make_cartan_weyl("A", 2);
  const RVector th = RVector::LinSpaced(8, 1.0, 8.0);
  CHECK(parse_function(*cw, {{"kind", "constant"}, {"value", 2.5}}).on_orbit(th) == 2.5);
  CHECK(parse_function(*cw, {{"kind", "linear"}, {"basis", 3}}).on_orbit(th) == 4.0);
  CHECK(parse_function(*cw, {{"kind", "linear"}, {"x", {1, 0, 0, 0, 0, 0, 0, 1}}}).on_orbit(th) == 9.0);
  const json prod = {{"kind", "product"},
                     {"xs", {{1, 0, 0, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0, 0, 0}}},
                     {"coefficient", 0.5}};
  CHECK(parse_function(*cw, prod).on_orbit(th) == 1.0);
  const json poly = json::parse(R"({"kind":"polynomial","terms":[
      {"coefficient":2,"factors":[[1,0,0,0,0,0,0,0]]},
      {"coefficient":-1,"factors":[]}]})");
  CHECK(parse_function(*cw, poly).on_orbit(th) == 1.0);
  const auto gc = parse_function(*cw, json::parse(R"({"kind":"group_coefficient","re":[[1,0,0],[0,0,0],[0,0,0]]})"));
  CHECK(gc.kind() == OrbitFunction::Kind::group_coefficient);
  CHECK(gc.lift(*cw, Weight{1, 0}, GroupElement::identity()) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("A1 sweep reproduces the Dirac rate and the closed forms") {
  const ExperimentConfig c = parse_config(base_config());
  const DefectReport r = run_sweep(c);
  REQUIRE(r.rows.size() == 4);
  for (const DefectRow& row : r.rows) {
    const double k = row.k;
    CHECK(row.dim == row.k + 1);
    CHECK(row.dirac_defect == doctest::Approx(4 * k / ((k + 2) * (k + 2))).epsilon(1e-9));
    CHECK(row.norm_gap == doctest::Approx(2 / (k + 2)).epsilon(1e-6));
    CHECK(row.valid);
    CHECK(row.equivariance_defect < 1e-7);
    CHECK(row.gilmore_residual < 1e-8);
  }
  // OLS slope of the closed form over the same levels
  std::vector<std::pair<double, double>> exact;
  for (double k : {4.0, 8.0, 16.0, 32.0}) exact.emplace_back(k, 4 * k / ((k + 2) * (k + 2)));
  const SlopeFit* d = r.fit("dirac_defect");
  REQUIRE(d != nullptr);
  CHECK(d->fitted);
  CHECK(d->slope == doctest::Approx(fit_slope(exact).slope).epsilon(1e-8));
  CHECK(r.fit("norm_gap")->slope < -0.7);

  // header order is fixed
  const std::string csv = r.csv();
  CHECK(csv.substr(0, csv.find('\n')) ==
        "k,dim,dirac_defect,jordan_defect,product_defect,norm_gap,equivariance_defect,"
        "normalization_residual,gilmore_residual,duffield_gap,runtime_ms,valid");
  const json j = r.json();
  CHECK(j["rows"].size() == 4);
  CHECK(j["fits"]["dirac_defect"]["fitted"] == true);
  CHECK(j["conventions"]["sign"] == "theorem");
  CHECK(j["config"]["seed"] == 5);
}

TEST_CASE("Dirac slope over k up to 64 falls in the rate window") {
  json j = base_config();
  j["k_values"] = {4, 8, 16, 32, 64};
  const DefectReport r = run_sweep(parse_config(j));
  const SlopeFit* d = r.fit("dirac_defect");
  CHECK(d->slope <= -0.7);
  CHECK(d->slope >= -1.3);
  CHECK(d->r2 > 0.98);
}

TEST_CASE("flipped sign keeps the Dirac defect away from zero") {
  json j = base_config();
  j["sign_convention"] = "flipped";
  const DefectReport r = run_sweep(parse_config(j));
  CHECK(r.fit("dirac_defect")->slope > -0.2);
  bool seen = false;
  for (const auto& c : r.checks)
    if (c.name == "dirac_flipped_bounded") seen = c.pass;
  CHECK(seen);
}

TEST_CASE("sweeps are deterministic and thread-count independent") {
  json j = base_config();
  j["k_values"] = {2, 4, 8};
  ExperimentConfig c = parse_config(j);
  const std::string a = strip_runtime(run_sweep(c).csv());
  const std::string b = strip_runtime(run_sweep(c).csv());
  c.threads = 3;
  const std::string t = strip_runtime(run_sweep(c).csv());
  CHECK(a == b);
  CHECK(a == t);
}

TEST_CASE("degenerate sweeps") {
  json j = base_config();
  j["functions"] = json::array();
  j["k_values"] = {1, 2, 4};
  const DefectReport empty = run_sweep(parse_config(j));
  for (const auto& row : empty.rows) {
    CHECK(std::isnan(row.dirac_defect));
    CHECK(std::isnan(row.norm_gap));
    CHECK(row.normalization_residual < 1e-10);
  }
  CHECK(empty.json()["rows"][0]["dirac_defect"].is_null());

  j = base_config();
  j["k_values"] = {1};
  const DefectReport one = run_sweep(parse_config(j));
  CHECK(one.rows.size() == 1);
  for (const auto& [name, f] : one.fits) CHECK_FALSE(f.fitted);
}

TEST_CASE("report files") {
  ExperimentConfig c = parse_config(base_config());
  c.k_values = {2, 4};
  const auto dir = temp_dir("bz_report_test");
  c.out_dir = dir.string();
  write_report(run_sweep(c));
  CHECK(std::filesystem::exists(dir / "report.csv"));
  std::ifstream in(dir / "report.json");
  const json j = json::parse(in);
  CHECK(j["rows"].size() == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("irrep cache") {
  const auto dir = temp_dir("bz_cache_test");
  const auto cw = make_cartan_weyl("A", 2);
  bool hit = true;
  const Irrep a = cached_irrep(cw, Weight{1, 1}, 2, dir.string(), &hit);
  CHECK_FALSE(hit);
  CHECK(std::filesystem::exists(dir / "A2_1-1_k2.json"));
  const Irrep b = cached_irrep(cw, Weight{1, 1}, 2, dir.string(), &hit);
  CHECK(hit);
  for (std::size_t i = 0; i < a.basis_matrices.size(); ++i)
    CHECK((a.basis_matrices[i] - b.basis_matrices[i]).norm() == 0.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cross-validation against Monte Carlo") {
  json j = base_config();
  j["k_values"] = {1};
  j["functions"] = {{{"kind", "linear"}, {"basis", 1}}};
  j["xval_samples"] = 1000000;
  const CrossValidationReport r = cross_validate(parse_config(j));
  REQUIRE(r.entries.size() == 2);
  for (const auto& e : r.entries) {
    CHECK(e.pass);
    CHECK(e.max_deviation < 5e-3);
    CHECK(e.max_sigma_ratio < 5.0);
  }

  j["k_values"] = {1, 4, 8};
  j["xval_samples"] = 20000;
  const ExperimentConfig c = parse_config(j);
  const CrossValidationReport a = cross_validate(c), b = cross_validate(c);
  CHECK(a.skipped_k == std::vector<int>{8});
  CHECK(a.json().dump() == b.json().dump());
}

TEST_CASE("irrep and dims reports") {
  json j = base_config();
  j["group"]["rank"] = 2;
  j["lambda"] = {1, 1};
  j["k_values"] = {8, 16, 32, 64};
  j["functions"] = json::array();
  bool pass = false;
  const json d = dims_report(parse_config(j), pass);
  CHECK(pass);
  CHECK(d["exponent"].get<double>() == doctest::Approx(3.0).epsilon(0.03));
  CHECK(d["rows"][0]["dim"] == 729);

  j["k_values"] = {1, 2};
  const auto dir = temp_dir("bz_irrep_report");
  j["cache_dir"] = dir.string();
  const json r = irrep_report(parse_config(j), pass);
  CHECK(pass);
  CHECK(r["rows"].size() == 2);
  CHECK(r["rows"][1]["dim"] == 27);
  const json again = irrep_report(parse_config(j), pass);
  CHECK(again["rows"][0]["cache_hit"] == true);
  std::filesystem::remove_all(dir);
}
