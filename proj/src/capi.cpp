#include "berezin.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "berezin/errors.hpp"
#include "berezin/harness.hpp"
#include "berezin/serialize.hpp"

struct bz_irrep {
  berezin::Irrep rep;
};

struct bz_config {
  berezin::ExperimentConfig cfg;
  mutable std::string text;
};

struct bz_result {
  std::string json;
  std::string csv;
  bool pass = false;
};

namespace {

thread_local std::string g_last_error;

bz_status fail(bz_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class Fn>
bz_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const berezin::ConfigError& e) {
    return fail(BZ_ERR_CONFIG, e.what());
  } catch (const berezin::DomainError& e) {
    return fail(BZ_ERR_DOMAIN, e.what());
  } catch (const berezin::NumericalError& e) {
    return fail(BZ_ERR_NUMERICAL, e.what());
  } catch (const berezin::IoError& e) {
    return fail(BZ_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BZ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BZ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BZ_ERR_INTERNAL, "unknown error");
  }
}

berezin::Weight weight(const int* labels, int n) {
  berezin::RVector l(n);
  for (int i = 0; i < n; ++i) l[i] = labels[i];
  return berezin::Weight(l);
}

bz_status check_weight_args(const char* series, const int* labels, int n) {
  if (!series) return fail(BZ_ERR_INVALID_ARGUMENT, "series is NULL");
  if (n < 0 || (n > 0 && !labels)) return fail(BZ_ERR_INVALID_ARGUMENT, "labels is NULL");
  return BZ_OK;
}

bz_status write_matrix(const berezin::CMatrix& m, double* out, size_t capacity) {
  const size_t need = static_cast<size_t>(2 * m.rows() * m.cols());
  if (!out) return fail(BZ_ERR_INVALID_ARGUMENT, "output buffer is NULL");
  if (capacity < need)
    return fail(BZ_ERR_BUFFER_TOO_SMALL, "buffer needs " + std::to_string(need) + " doubles");
  size_t i = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out[i++] = m(r, c).real();
      out[i++] = m(r, c).imag();
    }
  return BZ_OK;
}

bz_status make_result(bz_result** out, std::string json, std::string csv, bool pass) {
  *out = new bz_result{std::move(json), std::move(csv), pass};
  return BZ_OK;
}

}  // namespace

extern "C" {

const char* bz_last_error(void) { return g_last_error.c_str(); }

const char* bz_status_string(bz_status s) {
  switch (s) {
    case BZ_OK: return "ok";
    case BZ_ERR_CONFIG: return "configuration error";
    case BZ_ERR_DOMAIN: return "domain error";
    case BZ_ERR_NUMERICAL: return "numerical error";
    case BZ_ERR_IO: return "i/o error";
    case BZ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BZ_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case BZ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bz_version(void) { return "0.1.0"; }

bz_status bz_weyl_dimension(const char* series, int rank, const int* labels, int n, int k,
                            long long* out) {
  if (bz_status s = check_weight_args(series, labels, n)) return s;
  if (!out) return fail(BZ_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    const auto rs = berezin::build_root_system(series, rank);
    if (n != rs.rank) return fail(BZ_ERR_CONFIG, "label count does not match rank");
    *out = berezin::weyl_dimension(rs, weight(labels, n), k);
    return BZ_OK;
  });
}

bz_status bz_orbit_dimension(const char* series, int rank, const int* labels, int n, int* out) {
  if (bz_status s = check_weight_args(series, labels, n)) return s;
  if (!out) return fail(BZ_ERR_INVALID_ARGUMENT, "out is NULL");
  return guarded([&] {
    const auto rs = berezin::build_root_system(series, rank);
    if (n != rs.rank) return fail(BZ_ERR_CONFIG, "label count does not match rank");
    *out = berezin::orbit_dimension(rs, weight(labels, n)).dimension;
    return BZ_OK;
  });
}

bz_status bz_irrep_build(const char* series, int rank, const int* labels, int n, int k,
                         bz_irrep** out) {
  if (bz_status s = check_weight_args(series, labels, n)) return s;
  if (!out) return fail(BZ_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] {
    auto cw = berezin::make_cartan_weyl(series, rank);
    if (n != cw->rank()) return fail(BZ_ERR_CONFIG, "label count does not match rank");
    *out = new bz_irrep{berezin::build_irrep(cw, weight(labels, n), k)};
    return BZ_OK;
  });
}

bz_status bz_irrep_load(const char* path, bz_irrep** out) {
  if (!path || !out) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    *out = new bz_irrep{berezin::load_irrep(path)};
    return BZ_OK;
  });
}

bz_status bz_irrep_save(const bz_irrep* rep, const char* path) {
  if (!rep || !path) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    berezin::save_irrep(rep->rep, path);
    return BZ_OK;
  });
}

void bz_irrep_free(bz_irrep* rep) { delete rep; }

bz_status bz_irrep_dimension(const bz_irrep* rep, int* out) {
  if (!rep || !out) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = rep->rep.dimension;
  return BZ_OK;
}

bz_status bz_irrep_algebra_dimension(const bz_irrep* rep, int* out) {
  if (!rep || !out) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = rep->rep.cw->dim();
  return BZ_OK;
}

bz_status bz_irrep_verify(const bz_irrep* rep, double* max_residual, int* dimension_match,
                          int* irreducible) {
  if (!rep) return fail(BZ_ERR_INVALID_ARGUMENT, "rep is NULL");
  return guarded([&] {
    const auto r = berezin::verify_irrep(rep->rep);
    if (max_residual) *max_residual = r.max_residual();
    if (dimension_match) *dimension_match = r.dimension_match ? 1 : 0;
    if (irreducible) *irreducible = berezin::irreducibility_check(rep->rep) ? 1 : 0;
    return BZ_OK;
  });
}

bz_status bz_irrep_generator(const bz_irrep* rep, int b, double* out, size_t capacity) {
  if (!rep) return fail(BZ_ERR_INVALID_ARGUMENT, "rep is NULL");
  if (b < 0 || b >= rep->rep.cw->dim()) return fail(BZ_ERR_INVALID_ARGUMENT, "basis index out of range");
  return write_matrix(rep->rep.basis_matrices[static_cast<size_t>(b)], out, capacity);
}

bz_status bz_quantize_linear(const bz_irrep* rep, const double* x, int n, double* out,
                             size_t capacity) {
  if (!rep || !x) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  if (n != rep->rep.cw->dim()) return fail(BZ_ERR_INVALID_ARGUMENT, "x has the wrong length");
  return guarded([&] {
    berezin::RVector v(n);
    for (int i = 0; i < n; ++i) v[i] = x[i];
    const auto& r = rep->rep;
    const auto q = berezin::build_quadrature(r.cw, r.lambda, r.k, 1);
    const berezin::Quantizer qz(r, q, 1);
    return write_matrix(qz(berezin::OrbitFunction::linear(v)), out, capacity);
  });
}

bz_status bz_config_load(const char* path, bz_config** out) {
  if (!path || !out) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    *out = new bz_config{berezin::load_config(path), {}};
    return BZ_OK;
  });
}

bz_status bz_config_parse(const char* text, bz_config** out) {
  if (!text || !out) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      return fail(BZ_ERR_CONFIG, e.what());
    }
    *out = new bz_config{berezin::parse_config(j), {}};
    return BZ_OK;
  });
}

bz_status bz_config_default(bz_config** out) {
  if (!out) return fail(BZ_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = new bz_config{};
  return BZ_OK;
}

void bz_config_free(bz_config* cfg) { delete cfg; }

bz_status bz_config_set_seed(bz_config* cfg, uint64_t seed) {
  if (!cfg) return fail(BZ_ERR_INVALID_ARGUMENT, "cfg is NULL");
  cfg->cfg.seed = seed;
  return BZ_OK;
}

bz_status bz_config_set_threads(bz_config* cfg, int threads) {
  if (!cfg) return fail(BZ_ERR_INVALID_ARGUMENT, "cfg is NULL");
  if (threads < 1) return fail(BZ_ERR_INVALID_ARGUMENT, "threads must be >= 1");
  cfg->cfg.threads = threads;
  return BZ_OK;
}

bz_status bz_config_set_sign(bz_config* cfg, const char* sign) {
  if (!cfg || !sign) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    cfg->cfg.sign = berezin::parse_sign(sign);
    return BZ_OK;
  });
}

bz_status bz_config_set_output_dir(bz_config* cfg, const char* dir) {
  if (!cfg || !dir) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  cfg->cfg.out_dir = dir;
  return BZ_OK;
}

bz_status bz_config_set_cache_dir(bz_config* cfg, const char* dir) {
  if (!cfg || !dir) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  cfg->cfg.cache_dir = dir;
  return BZ_OK;
}

const char* bz_config_output_dir(const bz_config* cfg) {
  return cfg ? cfg->cfg.out_dir.c_str() : "";
}

const char* bz_config_cache_dir(const bz_config* cfg) {
  return cfg ? cfg->cfg.cache_dir.c_str() : "";
}

bz_status bz_config_set_xval_samples(bz_config* cfg, long long samples) {
  if (!cfg) return fail(BZ_ERR_INVALID_ARGUMENT, "cfg is NULL");
  if (samples < 2) return fail(BZ_ERR_INVALID_ARGUMENT, "samples must be >= 2");
  cfg->cfg.xval_samples = samples;
  return BZ_OK;
}

const char* bz_config_json(const bz_config* cfg) {
  if (!cfg) return "";
  cfg->text = berezin::to_json(cfg->cfg).dump(2);
  return cfg->text.c_str();
}

bz_status bz_run_sweep(const bz_config* cfg, int write_files, bz_result** out) {
  if (!cfg || !out) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    const auto report = berezin::run_sweep(cfg->cfg);
    if (write_files) berezin::write_report(report);
    return make_result(out, report.json().dump(2), report.csv(), report.all_pass());
  });
}

bz_status bz_cross_validate(const bz_config* cfg, bz_result** out) {
  if (!cfg || !out) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    const auto r = berezin::cross_validate(cfg->cfg);
    return make_result(out, r.json().dump(2), "", r.all_pass());
  });
}

bz_status bz_irrep_report(const bz_config* cfg, bz_result** out) {
  if (!cfg || !out) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    bool pass = false;
    const auto j = berezin::irrep_report(cfg->cfg, pass);
    return make_result(out, j.dump(2), "", pass);
  });
}

bz_status bz_dims_report(const bz_config* cfg, bz_result** out) {
  if (!cfg || !out) return fail(BZ_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    bool pass = false;
    const auto j = berezin::dims_report(cfg->cfg, pass);
    return make_result(out, j.dump(2), "", pass);
  });
}

const char* bz_result_json(const bz_result* r) { return r ? r->json.c_str() : ""; }
const char* bz_result_csv(const bz_result* r) { return r ? r->csv.c_str() : ""; }
int bz_result_pass(const bz_result* r) { return r && r->pass ? 1 : 0; }
void bz_result_free(bz_result* r) { delete r; }

}  // extern "C"
