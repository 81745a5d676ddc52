#include "berezin/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "berezin/errors.hpp"
#include "berezin/serialize.hpp"

namespace berezin {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNoiseFloor = 1e-12;

RVector real_vector(const json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ConfigError(std::string(what) + ": expected " + std::to_string(dim) + " components");
  RVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

RMatrix real_matrix(const json& j, int n, const char* what) {
  RMatrix m = RMatrix::Zero(n, n);
  if (j.is_null()) return m;
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " rows");
  for (int r = 0; r < n; ++r) m.row(r) = real_vector(j[static_cast<std::size_t>(r)], n, what);
  return m;
}

std::uint64_t row_seed(std::uint64_t seed, int k, std::uint64_t stream) {
  std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                  static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  s.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

CVector random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVector v(d);
  for (int i = 0; i < d; ++i) v[i] = cplx(n(rng), n(rng));
  return v / v.norm();
}

Weight config_weight(const ExperimentConfig& cfg) {
  RVector l(static_cast<Eigen::Index>(cfg.lambda.size()));
  for (std::size_t i = 0; i < cfg.lambda.size(); ++i) l[static_cast<Eigen::Index>(i)] = cfg.lambda[i];
  return Weight(l);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double t_quantile_975(int df) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) return kNaN;
  if (df <= 30) return table[df - 1];
  return 1.960;
}

int function_degree(const std::vector<OrbitFunction>& fns) {
  int d = 0;
  for (const auto& f : fns)
    if (f.is_polynomial()) d = std::max(d, f.degree());
  return d;
}

bool all_polynomial(const std::vector<OrbitFunction>& fns) {
  return std::all_of(fns.begin(), fns.end(), [](const auto& f) { return f.is_polynomial(); });
}

bool all_right_invariant(const std::vector<OrbitFunction>& fns) {
  return std::all_of(fns.begin(), fns.end(), [](const auto& f) { return f.right_invariant(); });
}

OrbitFunction duffield_test_function(const CartanWeylBasis& cw) {
  const int n = cw.defining_dim;
  CMatrix c = CMatrix::Zero(n, n);
  c(0, 0) = 0.3;
  c(0, 1) = 0.2;
  c(1, 0) = -0.1;
  c(1, 1) = 0.4;
  return OrbitFunction::group_coefficient(c);
}

struct SweepContext {
  const ExperimentConfig* cfg;
  std::shared_ptr<const CartanWeylBasis> cw;
  Weight lambda;
  std::vector<OrbitFunction> fns;
  double sup = 0.0;
  std::unique_ptr<Irrep> rep1;
  std::unique_ptr<OrbitFunction> duffield_f;
};

int quadrature_degree(const ExperimentConfig& cfg, const std::vector<OrbitFunction>& fns) {
  if (cfg.quadrature_order >= 0) return cfg.quadrature_order;
  int d = 0;
  if (!fns.empty()) {
    const int df = fns[0].is_polynomial() ? fns[0].degree() : 0;
    const int dg = fns.size() > 1 && fns[1].is_polynomial() ? fns[1].degree() : df;
    d = std::max(function_degree(fns), df + dg);
  }
  if (!all_polynomial(fns)) d = std::max(d, 16);
  return d;
}

DefectRow compute_row(const SweepContext& ctx, int k) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig& cfg = *ctx.cfg;
  const CartanWeylBasis& cw = *ctx.cw;
  DefectRow row;
  row.k = k;

  const Irrep rep = cached_irrep(ctx.cw, ctx.lambda, k, cfg.cache_dir);
  row.dim = rep.dimension;

  QuadratureOptions opts;
  opts.right_invariant = all_right_invariant(ctx.fns);
  const int fdeg = quadrature_degree(cfg, ctx.fns);
  const QuadratureRule q = build_quadrature(ctx.cw, ctx.lambda, k, fdeg, opts);
  int mdeg = 0;
  if (!ctx.fns.empty()) {
    const int df = ctx.fns[0].is_polynomial() ? ctx.fns[0].degree() : 0;
    const int dg = ctx.fns.size() > 1 && ctx.fns[1].is_polynomial() ? ctx.fns[1].degree() : df;
    mdeg = std::max(function_degree(ctx.fns), df + dg);
  }
  const Quantizer qz(rep, q, mdeg);

  std::mt19937_64 rng(row_seed(cfg.seed, k, 1));
  for (int s = 0; s < cfg.samples; ++s) {
    const CVector psi = random_unit(rep.dimension, rng);
    row.normalization_residual =
        std::max(row.normalization_residual, std::abs(check_normalization(qz.moments(), psi) - 1.0));
  }
  for (int s = 0; s < cfg.samples; ++s) {
    const GroupElement x = haar_random_element(cw, rng);
    row.gilmore_residual = std::max(row.gilmore_residual, gilmore_check(rep, *ctx.rep1, x));
  }

  if (ctx.fns.empty()) {
    row.dirac_defect = row.jordan_defect = row.product_defect = kNaN;
    row.norm_gap = row.equivariance_defect = kNaN;
  } else {
    const OrbitFunction& f = ctx.fns[0];
    const OrbitFunction& g = ctx.fns.size() > 1 ? ctx.fns[1] : ctx.fns[0];
    row.dirac_defect = dirac_defect(qz, f, g, cfg.sign);
    row.jordan_defect = jordan_defect(qz, f, g);
    row.product_defect = product_defect(qz, f, g);
    row.norm_gap = norm_gap(qz, f, ctx.sup);
    if (f.is_polynomial()) {
      for (int s = 0; s < cfg.samples; ++s) {
        const GroupElement x = haar_random_element(cw, rng);
        row.equivariance_defect = std::max(row.equivariance_defect, equivariance_defect(qz, f, x));
      }
    } else {
      row.equivariance_defect = kNaN;
    }
  }

  row.duffield_gap = kNaN;
  if (ctx.duffield_f) row.duffield_gap = duffield_concentration(*ctx.rep1, {k}, *ctx.duffield_f).gap[0];

  row.valid = row.normalization_residual < cfg.tolerance;
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

template <class Fn>
void parallel_for(int n, int threads, Fn fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double column(const DefectRow& r, const std::string& name) {
  if (name == "dirac_defect") return r.dirac_defect;
  if (name == "jordan_defect") return r.jordan_defect;
  if (name == "product_defect") return r.product_defect;
  if (name == "norm_gap") return r.norm_gap;
  if (name == "duffield_gap") return r.duffield_gap;
  if (name == "equivariance_defect") return r.equivariance_defect;
  if (name == "normalization_residual") return r.normalization_residual;
  if (name == "gilmore_residual") return r.gilmore_residual;
  return kNaN;
}

bool in_rate_window(const SlopeFit& f) { return f.slope >= -1.3 && f.slope <= -0.7; }

std::string slope_detail(const SlopeFit& f) {
  std::ostringstream s;
  s << "slope=" << f.slope << " r2=" << f.r2 << " points=" << f.points;
  return s.str();
}

json fit_json(const SlopeFit& f) {
  json j;
  j["fitted"] = f.fitted;
  j["flag"] = f.flag;
  j["points"] = f.points;
  if (f.fitted) {
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r2"] = f.r2;
    j["ci95"] = {number(f.ci_low), number(f.ci_high)};
  }
  return j;
}

}  // namespace

// ---------------------------------------------------------------- config

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    if (!j.contains("schema_version")) throw ConfigError("config: missing schema_version");
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != kConfigSchemaVersion)
      throw ConfigError("config: unsupported schema_version " + std::to_string(c.schema_version));
    if (j.contains("group")) {
      c.series = j["group"].value("series", c.series);
      c.rank = j["group"].value("rank", c.rank);
    }
    if (j.contains("lambda")) c.lambda = j.at("lambda").get<std::vector<double>>();
    if (j.contains("k_values")) c.k_values = j.at("k_values").get<std::vector<int>>();
    if (j.contains("functions")) {
      c.functions.clear();
      for (const json& f : j.at("functions")) c.functions.push_back(f);
    }
    if (j.contains("quadrature")) {
      const json& q = j["quadrature"];
      c.quadrature_scheme = q.value("scheme", c.quadrature_scheme);
      if (q.contains("order")) {
        if (q["order"].is_string()) {
          if (q["order"].get<std::string>() != "auto")
            throw ConfigError("config: quadrature.order must be an integer or \"auto\"");
          c.quadrature_order = -1;
        } else {
          c.quadrature_order = q["order"].get<int>();
          if (c.quadrature_order < 0) throw ConfigError("config: negative quadrature order");
        }
      }
    }
    if (j.contains("sign_convention")) c.sign = parse_sign(j["sign_convention"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    c.threads = j.value("threads", c.threads);
    c.samples = j.value("samples", c.samples);
    c.xval_samples = j.value("xval_samples", c.xval_samples);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.cache_dir = j.value("cache_dir", c.cache_dir);
    if (j.contains("output")) {
      const json& o = j["output"];
      c.out_dir = o.value("dir", c.out_dir);
      c.csv_name = o.value("csv", c.csv_name);
      c.json_name = o.value("json", c.json_name);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (c.k_values.empty()) throw ConfigError("config: k_values must be nonempty");
  for (std::size_t i = 0; i < c.k_values.size(); ++i) {
    if (c.k_values[i] < 1) throw ConfigError("config: k_values must be positive");
    if (i > 0 && c.k_values[i] <= c.k_values[i - 1])
      throw ConfigError("config: k_values must be strictly increasing");
  }
  if (c.threads < 1) throw ConfigError("config: threads must be >= 1");
  if (c.samples < 1) throw ConfigError("config: samples must be >= 1");
  if (c.xval_samples < 2) throw ConfigError("config: xval_samples must be >= 2");
  const RootSystem rs = build_root_system(c.series, c.rank);
  if (static_cast<int>(c.lambda.size()) != rs.rank)
    throw ConfigError("config: lambda needs " + std::to_string(rs.rank) + " Dynkin labels");
  const auto id = is_integral_dominant(config_weight(c));
  if (!id.integral || !id.dominant) throw ConfigError("config: lambda is not dominant integral");
  const auto cw = make_cartan_weyl(c.series, c.rank);
  for (const json& f : c.functions) parse_function(*cw, f);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["group"] = {{"series", c.series}, {"rank", c.rank}};
  j["lambda"] = c.lambda;
  j["k_values"] = c.k_values;
  j["functions"] = c.functions;
  j["quadrature"] = {{"scheme", c.quadrature_scheme},
                     {"order", c.quadrature_order < 0 ? json("auto") : json(c.quadrature_order)}};
  j["sign_convention"] = to_string(c.sign);
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["samples"] = c.samples;
  j["xval_samples"] = c.xval_samples;
  j["tolerance"] = c.tolerance;
  j["cache_dir"] = c.cache_dir;
  j["output"] = {{"dir", c.out_dir}, {"csv", c.csv_name}, {"json", c.json_name}};
  return j;
}

OrbitFunction parse_function(const CartanWeylBasis& cw, const json& j) {
  const int dim = cw.dim();
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return OrbitFunction::constant(j.value("value", 1.0));
    if (kind == "linear") {
      if (j.contains("basis")) {
        const int b = j["basis"].get<int>();
        if (b < 0 || b >= dim) throw ConfigError("function: basis index out of range");
        return OrbitFunction::linear(cw.unit(b));
      }
      return OrbitFunction::linear(real_vector(j.at("x"), dim, "function.x"));
    }
    if (kind == "product") {
      std::vector<RVector> xs;
      for (const json& x : j.at("xs")) xs.push_back(real_vector(x, dim, "function.xs"));
      return OrbitFunction::product(xs, j.value("coefficient", 1.0));
    }
    if (kind == "polynomial") {
      std::vector<Monomial> terms;
      for (const json& t : j.at("terms")) {
        Monomial m{t.value("coefficient", 1.0), {}};
        for (const json& x : t.at("factors")) m.factors.push_back(real_vector(x, dim, "function.factors"));
        terms.push_back(std::move(m));
      }
      return OrbitFunction::polynomial(std::move(terms));
    }
    if (kind == "group_coefficient") {
      const int n = cw.defining_dim;
      const RMatrix re = real_matrix(j.value("re", json()), n, "function.re");
      const RMatrix im = real_matrix(j.value("im", json()), n, "function.im");
      CMatrix c = re.cast<cplx>() + kI * im.cast<cplx>();
      return OrbitFunction::group_coefficient(c);
    }
    throw ConfigError("function: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("function: ") + e.what());
  }
}

// ---------------------------------------------------------------- cache

Irrep cached_irrep(std::shared_ptr<const CartanWeylBasis> cw, const Weight& lambda, int k,
                   const std::string& cache_dir, bool* hit) {
  if (hit) *hit = false;
  if (cache_dir.empty()) return build_irrep(std::move(cw), lambda, k);
  const fs::path path = fs::path(cache_dir) /
                        (irrep_cache_key(cw->root_system.series_label, cw->rank(), lambda, k) + ".json");
  if (fs::exists(path)) {
    Irrep rep = load_irrep(path.string());
    if (rep.lambda.labels == lambda.labels && rep.k == k) {
      if (hit) *hit = true;
      return rep;
    }
  }
  Irrep rep = build_irrep(cw, lambda, k);
  std::error_code ec;
  fs::create_directories(cache_dir, ec);
  if (ec) throw IoError("cannot create cache directory " + cache_dir);
  const fs::path tmp = path.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  save_irrep(rep, tmp.string());
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string());
  return rep;
}

// ---------------------------------------------------------------- fits

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
  SlopeFit f;
  f.points = static_cast<int>(points.size());
  for (const auto& [k, v] : points)
    if (!(v >= kNoiseFloor)) {
      f.flag = "below-noise-floor";
      return f;
    }
  if (points.size() < 3) {
    f.flag = "insufficient-points";
    return f;
  }
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [k, v] : points) {
    sx += std::log(k);
    sy += std::log(v);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [k, v] : points) {
    const double dx = std::log(k) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) {
    f.flag = "insufficient-points";
    return f;
  }
  f.fitted = true;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (const auto& [k, v] : points) {
    const double e = std::log(v) - (f.intercept + f.slope * std::log(k));
    ssr += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  const double se = std::sqrt(ssr / (n - 2.0) / sxx);
  const double t = t_quantile_975(static_cast<int>(n) - 2);
  f.ci_low = f.slope - t * se;
  f.ci_high = f.slope + t * se;
  return f;
}

// ---------------------------------------------------------------- report

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{
      "k",        "dim",          "dirac_defect",           "jordan_defect",
      "product_defect", "norm_gap", "equivariance_defect", "normalization_residual",
      "gilmore_residual", "duffield_gap", "runtime_ms",     "valid"};
  return cols;
}

bool DefectReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const SlopeFit* DefectReport::fit(const std::string& name) const {
  for (const auto& [n, f] : fits)
    if (n == name) return &f;
  return nullptr;
}

std::string DefectReport::csv() const {
  std::ostringstream s;
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) s << (i ? "," : "") << cols[i];
  s << "\n";
  for (const DefectRow& r : rows) {
    s << r.k << "," << r.dim << "," << fmt(r.dirac_defect) << "," << fmt(r.jordan_defect) << ","
      << fmt(r.product_defect) << "," << fmt(r.norm_gap) << "," << fmt(r.equivariance_defect) << ","
      << fmt(r.normalization_residual) << "," << fmt(r.gilmore_residual) << ","
      << fmt(r.duffield_gap) << "," << fmt(r.runtime_ms) << "," << (r.valid ? 1 : 0) << "\n";
  }
  return s.str();
}

json DefectReport::json() const {
  nlohmann::json j;
  j["config"] = to_json(config);
  j["columns"] = report_columns();
  nlohmann::json rs = nlohmann::json::array();
  for (const DefectRow& r : rows) {
    rs.push_back({{"k", r.k},
                  {"dim", r.dim},
                  {"dirac_defect", number(r.dirac_defect)},
                  {"jordan_defect", number(r.jordan_defect)},
                  {"product_defect", number(r.product_defect)},
                  {"norm_gap", number(r.norm_gap)},
                  {"equivariance_defect", number(r.equivariance_defect)},
                  {"normalization_residual", number(r.normalization_residual)},
                  {"gilmore_residual", number(r.gilmore_residual)},
                  {"duffield_gap", number(r.duffield_gap)},
                  {"runtime_ms", number(r.runtime_ms)},
                  {"valid", r.valid}});
  }
  j["rows"] = std::move(rs);
  nlohmann::json fj = nlohmann::json::object();
  for (const auto& [name, f] : fits) fj[name] = fit_json(f);
  j["fits"] = std::move(fj);
  j["fit_policy"] = {{"min_k", 4}, {"min_points", 3}, {"noise_floor", kNoiseFloor}};
  j["conventions"] = {{"sign", to_string(config.sign)},
                      {"bracket_factor", sign_factor(config.sign)},
                      {"bracket", "{f_X, f_Y}(theta) = bracket_factor * theta([X, Y])"}};
  nlohmann::json cj = nlohmann::json::array();
  for (const Check& c : checks) cj.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = std::move(cj);
  j["pass"] = all_pass();
  return j;
}

void write_report(const DefectReport& report) {
  const ExperimentConfig& c = report.config;
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.out_dir);
  const fs::path csv = fs::path(c.out_dir) / c.csv_name;
  const fs::path js = fs::path(c.out_dir) / c.json_name;
  std::ofstream a(csv);
  if (!a) throw IoError("cannot write " + csv.string());
  a << report.csv();
  std::ofstream b(js);
  if (!b) throw IoError("cannot write " + js.string());
  b << report.json().dump(2) << "\n";
  if (!a || !b) throw IoError("write failed in " + c.out_dir);
}

// ---------------------------------------------------------------- sweep

DefectReport run_sweep(const ExperimentConfig& cfg) {
  SweepContext ctx;
  ctx.cfg = &cfg;
  ctx.cw = make_cartan_weyl(cfg.series, cfg.rank);
  ctx.lambda = config_weight(cfg);
  for (const json& f : cfg.functions) ctx.fns.push_back(parse_function(*ctx.cw, f));
  if (!ctx.fns.empty()) ctx.sup = sup_norm(*ctx.cw, ctx.lambda, ctx.fns[0], 20000, cfg.seed);
  ctx.rep1 = std::make_unique<Irrep>(cached_irrep(ctx.cw, ctx.lambda, 1, cfg.cache_dir));
  if (ctx.cw->rank() == 1 && !ctx.lambda.is_zero())
    ctx.duffield_f = std::make_unique<OrbitFunction>(duffield_test_function(*ctx.cw));

  DefectReport rep;
  rep.config = cfg;
  rep.rows.resize(cfg.k_values.size());
  parallel_for(static_cast<int>(cfg.k_values.size()), cfg.threads, [&](int i) {
    rep.rows[static_cast<std::size_t>(i)] = compute_row(ctx, cfg.k_values[static_cast<std::size_t>(i)]);
  });

  for (const char* name : {"dirac_defect", "jordan_defect", "product_defect", "norm_gap", "duffield_gap"}) {
    std::vector<std::pair<double, double>> pts;
    bool any = false;
    for (const DefectRow& r : rep.rows) {
      const double v = column(r, name);
      if (std::isnan(v)) continue;
      any = true;
      if (r.k >= 4) pts.emplace_back(r.k, v);
    }
    if (any) rep.fits.emplace_back(name, fit_slope(pts));
  }

  auto add = [&](std::string name, bool pass, std::string detail) {
    rep.checks.push_back({std::move(name), pass, std::move(detail)});
  };
  auto max_of = [&](const char* name) {
    double m = 0.0;
    for (const DefectRow& r : rep.rows) {
      const double v = column(r, name);
      if (!std::isnan(v)) m = std::max(m, v);
    }
    return m;
  };
  {
    const bool ok = std::all_of(rep.rows.begin(), rep.rows.end(), [](const DefectRow& r) { return r.valid; });
    add("normalization", ok, "max residual " + fmt(max_of("normalization_residual")));
  }
  add("gilmore", max_of("gilmore_residual") < 1e-8, "max residual " + fmt(max_of("gilmore_residual")));
  if (!ctx.fns.empty()) {
    if (ctx.fns[0].is_polynomial())
      add("equivariance", max_of("equivariance_defect") < 1e-7,
          "max defect " + fmt(max_of("equivariance_defect")));
    double min_gap = std::numeric_limits<double>::infinity();
    for (const DefectRow& r : rep.rows) min_gap = std::min(min_gap, r.norm_gap);
    add("norm_bound", min_gap >= -1e-8, "min norm gap " + fmt(min_gap));
  }
  if (const SlopeFit* f = rep.fit("dirac_defect"); f && f->fitted) {
    if (cfg.sign == PoissonSign::flipped)
      add("dirac_flipped_bounded", f->slope > -0.2, slope_detail(*f));
    else
      add("dirac_rate", in_rate_window(*f) && f->r2 > 0.98, slope_detail(*f));
  }
  if (const SlopeFit* f = rep.fit("jordan_defect"); f && f->fitted)
    add("jordan_rate", in_rate_window(*f), slope_detail(*f));
  if (const SlopeFit* f = rep.fit("product_defect"); f && f->fitted)
    add("product_decreasing", f->slope < 0.0, slope_detail(*f));
  if (const SlopeFit* f = rep.fit("norm_gap"); f && f->fitted)
    add("norm_gap_rate", in_rate_window(*f), slope_detail(*f));
  if (ctx.duffield_f && rep.rows.size() >= 2) {
    bool dec = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
      if (rep.rows[i].k >= 4 && rep.rows[i - 1].k >= 4)
        dec = dec && rep.rows[i].duffield_gap < rep.rows[i - 1].duffield_gap;
    add("duffield_decreasing", dec, "gap at largest k " + fmt(rep.rows.back().duffield_gap));
  }
  return rep;
}

// ---------------------------------------------------------------- xval

bool CrossValidationReport::all_pass() const {
  return !entries.empty() &&
         std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

json CrossValidationReport::json() const {
  nlohmann::json j;
  j["samples"] = samples;
  j["seed"] = seed;
  j["tolerance_sigma"] = 5.0;
  nlohmann::json es = nlohmann::json::array();
  for (const auto& e : entries)
    es.push_back({{"k", e.k},
                  {"dim", e.dim},
                  {"function", e.function},
                  {"max_deviation", e.max_deviation},
                  {"max_sigma_ratio", e.max_sigma_ratio},
                  {"pass", e.pass}});
  j["entries"] = std::move(es);
  j["skipped_k"] = skipped_k;
  j["pass"] = all_pass();
  return j;
}

CrossValidationReport cross_validate(const ExperimentConfig& cfg) {
  CrossValidationReport out;
  out.samples = cfg.xval_samples;
  out.seed = cfg.seed;
  const auto cw = make_cartan_weyl(cfg.series, cfg.rank);
  const Weight lambda = config_weight(cfg);
  std::vector<OrbitFunction> fns{OrbitFunction::constant(1.0)};
  std::vector<std::string> labels{"constant"};
  for (const json& f : cfg.functions) {
    fns.push_back(parse_function(*cw, f));
    labels.push_back(f.dump());
  }
  const int nf = static_cast<int>(fns.size());
  const RVector theta0 = base_point(*cw, lambda).theta;

  for (int k : cfg.k_values) {
    const long long dk = weyl_dimension(cw->root_system, lambda, k);
    if (k > 4 || dk > 16) {
      out.skipped_k.push_back(k);
      continue;
    }
    const Irrep rep = cached_irrep(cw, lambda, k, cfg.cache_dir);
    const int d = rep.dimension;

    QuadratureOptions opts;
    opts.right_invariant = all_right_invariant(fns);
    const int fdeg = cfg.quadrature_order >= 0 ? cfg.quadrature_order
                                               : std::max(function_degree(fns), all_polynomial(fns) ? 0 : 16);
    const QuadratureRule q = build_quadrature(cw, lambda, k, fdeg, opts);
    const Quantizer qz(rep, q, function_degree(fns));
    std::vector<CMatrix> quad;
    for (const auto& f : fns) quad.push_back(qz(f));

    std::vector<RVector> axes;
    for (int b = 0; b < cw->dim(); ++b) axes.push_back(cw->unit(b));
    if (cw->rank() == 2) {
      RVector g8 = RVector::Zero(cw->dim());
      g8[0] = 1.0;
      g8[1] = 2.0;
      axes.push_back(g8);
    }
    const GeneratorFlows flows(rep, axes);

    std::vector<RMatrix> sre(nf, RMatrix::Zero(d, d)), sim(nf, RMatrix::Zero(d, d));
    std::vector<RMatrix> qre(nf, RMatrix::Zero(d, d)), qim(nf, RMatrix::Zero(d, d));
    std::mt19937_64 rng(row_seed(cfg.seed, k, 7));
    std::vector<double> fv(static_cast<std::size_t>(nf));
    for (long long s = 0; s < cfg.xval_samples; ++s) {
      const GroupElement x = haar_random_element(*cw, rng);
      const CVector v = flows.apply(x, rep.hw_vector);
      const CMatrix u = defining_unitary(*cw, x);
      const RVector theta = coadjoint_act(*cw, u, theta0);
      for (int i = 0; i < nf; ++i) {
        const OrbitFunction& f = fns[static_cast<std::size_t>(i)];
        fv[static_cast<std::size_t>(i)] =
            f.kind() == OrbitFunction::Kind::group_coefficient
                ? std::exp((f.coefficient_matrix() * u).trace().real())
                : f.on_orbit(theta);
      }
      for (int b = 0; b < d; ++b)
        for (int a = 0; a < d; ++a) {
          const cplx p = v[a] * std::conj(v[b]) * static_cast<double>(d);
          for (int i = 0; i < nf; ++i) {
            const double re = fv[static_cast<std::size_t>(i)] * p.real();
            const double im = fv[static_cast<std::size_t>(i)] * p.imag();
            sre[i](a, b) += re;
            qre[i](a, b) += re * re;
            sim[i](a, b) += im;
            qim[i](a, b) += im * im;
          }
        }
    }
    const double n = static_cast<double>(cfg.xval_samples);
    for (int i = 0; i < nf; ++i) {
      CrossValidationEntry e;
      e.k = k;
      e.dim = d;
      e.function = labels[static_cast<std::size_t>(i)];
      e.pass = true;
      for (int b = 0; b < d; ++b)
        for (int a = 0; a < d; ++a) {
          for (int part = 0; part < 2; ++part) {
            const double sum = part == 0 ? sre[i](a, b) : sim[i](a, b);
            const double sq = part == 0 ? qre[i](a, b) : qim[i](a, b);
            const double mean = sum / n;
            const double var = std::max(0.0, (sq / n - mean * mean) * n / (n - 1.0));
            const double sigma = std::sqrt(var / n);
            const cplx qv = quad[static_cast<std::size_t>(i)](a, b);
            const double dev = std::abs(mean - (part == 0 ? qv.real() : qv.imag()));
            e.max_deviation = std::max(e.max_deviation, dev);
            if (sigma > 0.0) e.max_sigma_ratio = std::max(e.max_sigma_ratio, dev / sigma);
            if (dev > 5.0 * sigma + 1e-10) e.pass = false;
          }
        }
      out.entries.push_back(e);
    }
  }
  return out;
}

// ---------------------------------------------------------------- irrep / dims

json irrep_report(const ExperimentConfig& cfg, bool& pass) {
  const auto cw = make_cartan_weyl(cfg.series, cfg.rank);
  const Weight lambda = config_weight(cfg);
  json rows = json::array();
  pass = true;
  for (int k : cfg.k_values) {
    const auto t0 = std::chrono::steady_clock::now();
    bool hit = false;
    const Irrep rep = cached_irrep(cw, lambda, k, cfg.cache_dir, &hit);
    const IrrepReport r = verify_irrep(rep);
    const bool irreducible = irreducibility_check(rep);
    const bool ok = r.dimension_match && r.commutator_residual < 1e-9 &&
                    r.hw_cartan_residual < 1e-10 && r.hw_raising_residual < 1e-10 &&
                    r.hw_expectation_residual < 1e-10 && r.anti_hermiticity_residual < 1e-10 &&
                    r.adjoint_relation_residual < 1e-10 && irreducible;
    pass = pass && ok;
    rows.push_back({{"k", k},
                    {"dim", rep.dimension},
                    {"expected_dim", r.expected_dimension},
                    {"commutator_residual", r.commutator_residual},
                    {"anti_hermiticity_residual", r.anti_hermiticity_residual},
                    {"adjoint_relation_residual", r.adjoint_relation_residual},
                    {"hw_cartan_residual", r.hw_cartan_residual},
                    {"hw_raising_residual", r.hw_raising_residual},
                    {"hw_expectation_residual", r.hw_expectation_residual},
                    {"irreducible", irreducible},
                    {"cache_hit", hit},
                    {"runtime_ms", std::chrono::duration<double, std::milli>(
                                       std::chrono::steady_clock::now() - t0)
                                       .count()},
                    {"pass", ok}});
  }
  return {{"group", {{"series", cfg.series}, {"rank", cfg.rank}}},
          {"lambda", cfg.lambda},
          {"cache_dir", cfg.cache_dir},
          {"rows", rows},
          {"pass", pass}};
}

json dims_report(const ExperimentConfig& cfg, bool& pass) {
  const RootSystem rs = build_root_system(cfg.series, cfg.rank);
  const Weight lambda = config_weight(cfg);
  json rows = json::array();
  for (int k : cfg.k_values) rows.push_back({{"k", k}, {"dim", weyl_dimension(rs, lambda, k)}});
  json out = {{"group", {{"series", cfg.series}, {"rank", cfg.rank}}},
              {"lambda", cfg.lambda},
              {"rows", rows},
              {"orbit_dimension", orbit_dimension(rs, lambda).dimension}};
  pass = true;
  if (cfg.k_values.size() >= 3) {
    const GrowthFit g = dimension_growth(rs, lambda, cfg.k_values);
    pass = std::abs(g.exponent - g.expected) <= 0.1;
    out["expected_exponent"] = g.expected;
    out["exponent"] = g.exponent;
    out["exponent_plain"] = g.exponent_plain;
    out["r2_plain"] = g.r2_plain;
  }
  out["pass"] = pass;
  return out;
}

}  // namespace berezin
