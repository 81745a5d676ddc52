#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>
#include <string>

#include "CLI11.hpp"
#include "berezin.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string sign;
  bool has_out = false, has_seed = false, has_threads = false, has_sign = false;
};

int report_error(const char* what, bz_status s) {
  std::fprintf(stderr, "%s: %s: %s\n", what, bz_status_string(s), bz_last_error());
  return 2;
}

bz_config* make_config(const Options& o) {
  bz_config* cfg = nullptr;
  bz_status s = o.config.empty() ? bz_config_default(&cfg) : bz_config_load(o.config.c_str(), &cfg);
  if (s != BZ_OK) {
    report_error("config", s);
    return nullptr;
  }
  if ((o.has_out && (s = bz_config_set_output_dir(cfg, o.out.c_str())) != BZ_OK) ||
      (o.has_seed && (s = bz_config_set_seed(cfg, o.seed)) != BZ_OK) ||
      (o.has_threads && (s = bz_config_set_threads(cfg, o.threads)) != BZ_OK) ||
      (o.has_sign && (s = bz_config_set_sign(cfg, o.sign.c_str())) != BZ_OK)) {
    report_error("config", s);
    bz_config_free(cfg);
    return nullptr;
  }
  return cfg;
}

bool write_text(const std::string& dir, const std::string& name, const char* text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream f(std::filesystem::path(dir) / name);
  f << text << "\n";
  if (!f) {
    std::fprintf(stderr, "cannot write %s/%s\n", dir.c_str(), name.c_str());
    return false;
  }
  return true;
}

using Runner = bz_status (*)(const bz_config*, bz_result**);

int run_report(const Options& o, Runner fn, const char* name, const char* file, bool default_cache) {
  bz_config* cfg = make_config(o);
  if (!cfg) return 2;
  const std::string out_dir = bz_config_output_dir(cfg);
  if (default_cache && *bz_config_cache_dir(cfg) == 0)
    bz_config_set_cache_dir(cfg, (out_dir + "/cache").c_str());
  bz_result* r = nullptr;
  const bz_status s = fn(cfg, &r);
  bz_config_free(cfg);
  if (s != BZ_OK) return report_error(name, s);
  const int pass = bz_result_pass(r);
  const bool ok = write_text(out_dir, file, bz_result_json(r));
  std::cout << bz_result_json(r) << "\n";
  bz_result_free(r);
  if (!ok) return 2;
  return pass ? 0 : 1;
}

int run_sweep(const Options& o) {
  bz_config* cfg = make_config(o);
  if (!cfg) return 2;
  bz_result* r = nullptr;
  const bz_status s = bz_run_sweep(cfg, 1, &r);
  bz_config_free(cfg);
  if (s != BZ_OK) return report_error("sweep", s);
  std::cout << bz_result_csv(r);
  const int pass = bz_result_pass(r);
  std::cerr << (pass ? "all checks passed" : "some checks failed") << "\n";
  bz_result_free(r);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Berezin quantization of coadjoint orbits"};
  app.require_subcommand(1);
  Options o;
  std::vector<CLI::Option*> outs, seeds, threads, signs;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    outs.push_back(sub->add_option("--out", o.out, "output directory"));
    seeds.push_back(sub->add_option("--seed", o.seed, "random seed"));
    threads.push_back(
        sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber));
    signs.push_back(sub->add_option("--sign", o.sign, "Poisson sign convention")
                        ->check(CLI::IsMember({"theorem", "liepbr", "flipped"})));
  };
  auto* irrep = app.add_subcommand("irrep", "build, verify and cache irreps");
  auto* sweep = app.add_subcommand("sweep", "k-sweep of defect metrics");
  auto* xval = app.add_subcommand("xval", "Monte Carlo cross-validation of the quadrature");
  auto* dims = app.add_subcommand("dims", "dimension growth table");
  for (auto* s : {irrep, sweep, xval, dims}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  auto given = [](const std::vector<CLI::Option*>& v) {
    for (auto* opt : v)
      if (opt->count() > 0) return true;
    return false;
  };
  o.has_out = given(outs);
  o.has_seed = given(seeds);
  o.has_threads = given(threads);
  o.has_sign = given(signs);

  if (*irrep) return run_report(o, bz_irrep_report, "irrep", "irrep_report.json", true);
  if (*sweep) return run_sweep(o);
  if (*xval) return run_report(o, bz_cross_validate, "xval", "xval_report.json", false);
  if (*dims) return run_report(o, bz_dims_report, "dims", "dims_report.json", false);
  return 2;
}
