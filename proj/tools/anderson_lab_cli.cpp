#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anderson_lab.h"

namespace {

int exit_code(al_status s) {
  switch (s) {
    case AL_OK: return 0;
    case AL_CONFIG:
    case AL_DOMAIN:
    case AL_INVALID_ARGUMENT: return 2;
    case AL_NUMERIC: return 3;
    case AL_FINDING: return 4;
    default: return 1;
  }
}

int report_error(al_status s) {
  std::fprintf(stderr, "error: %s\n", al_last_error());
  return exit_code(s);
}

struct Options {
  std::string config;
  std::string out;
  long long seed = -1;
  unsigned threads = 1;
};

const char* out_dir(const Options& o) { return o.out.empty() ? nullptr : o.out.c_str(); }

// Writes the record and prints its path; 4 when it carries a finding.
int emit(al_result* r, const Options& o) {
  const char* path = nullptr;
  const al_status s = al_result_write(r, out_dir(o), &path);
  if (s != AL_OK) return report_error(s);
  std::printf("%s\n", path);
  const char* finding = nullptr;
  if (al_result_has_finding(r, &finding)) {
    std::fprintf(stderr, "finding: %s\n", finding);
    return 4;
  }
  return 0;
}

int run_single(const std::string& experiment, const Options& o) {
  al_config* cfg = nullptr;
  al_status s = al_config_load(o.config.c_str(), &cfg);
  if (s != AL_OK) return report_error(s);
  const char* name = nullptr;
  al_config_experiment(cfg, &name);
  if (experiment != name) {
    std::fprintf(stderr, "error: config describes '%s', not '%s'\n", name, experiment.c_str());
    al_config_free(cfg);
    return 2;
  }
  if (o.seed >= 0) al_config_set_seed(cfg, static_cast<uint64_t>(o.seed));
  al_result* r = nullptr;
  s = al_run(cfg, &r);
  al_config_free(cfg);
  if (s != AL_OK) return report_error(s);
  const int code = emit(r, o);
  al_result_free(r);
  return code;
}

// Sweep file: a JSON array of configs, or {"configs": [...], "master_seed": N}.
int run_sweep(const Options& o) {
  nlohmann::json j;
  try {
    std::ifstream f(o.config);
    if (!f) {
      std::fprintf(stderr, "error: cannot read %s\n", o.config.c_str());
      return 2;
    }
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: sweep file is not valid JSON: %s\n", e.what());
    return 2;
  }
  nlohmann::json list;
  int use_master = 0;
  uint64_t master = 0;
  try {
    if (!j.is_array() && !j.is_object()) throw std::runtime_error("expected an array or an object");
    list = j.is_array() ? j : j.value("configs", nlohmann::json::array());
    if (!list.is_array()) throw std::runtime_error("\"configs\" must be an array");
    if (j.is_object() && j.contains("master_seed")) {
      use_master = 1;
      master = j.at("master_seed").get<uint64_t>();
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: bad sweep file: %s\n", e.what());
    return 2;
  }
  if (o.seed >= 0) {
    use_master = 1;
    master = static_cast<uint64_t>(o.seed);
  }
  std::vector<al_config*> cfgs;
  for (const auto& c : list) {
    al_config* cfg = nullptr;
    const al_status s = al_config_parse(c.dump().c_str(), &cfg);
    if (s != AL_OK) {
      for (auto* p : cfgs) al_config_free(p);
      return report_error(s);
    }
    cfgs.push_back(cfg);
  }
  std::vector<al_result*> results(cfgs.size(), nullptr);
  std::vector<al_status> statuses(cfgs.size(), AL_OK);
  al_sweep(cfgs.data(), cfgs.size(), o.threads, use_master, master, results.data(), statuses.data());
  int code = 0;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    int c = 0;
    if (results[i]) {
      c = emit(results[i], o);
      al_result_free(results[i]);
    } else {
      std::fprintf(stderr, "config %zu failed (status %d)\n", i, static_cast<int>(statuses[i]));
      c = exit_code(statuses[i]);
    }
    if (code == 0) code = c;
    al_config_free(cfgs[i]);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Schroedinger operator experiments"};
  app.set_version_flag("--version", std::string(al_version()));
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> kinds{"spectrum",   "lifshitz", "wegner-mc", "dynloc",   "decompose",
                                       "sperner",    "cone-check", "annulus", "msa-plan", "combine", "sweep"};
  for (const auto& k : kinds) {
    auto* sub = app.add_subcommand(k, k == "sweep" ? "run a list of configs" : "run one " + k + " config");
    sub->add_option("--config", o.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override the seed (master seed for sweeps)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", o.out, "output directory (default $ANDERSON_LAB_OUT, then ./results)");
    sub->add_option("--threads", o.threads, "sweep parallelism")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  return name == "sweep" ? run_sweep(o) : run_single(name, o);
}
