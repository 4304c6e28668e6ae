#include "anderson_lab.h"

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <string>

#include "anderson/error.hpp"
#include "anderson/harness.hpp"
#include "anderson/operators.hpp"

struct al_config {
  anderson::ExperimentConfig cfg;
  std::string echo;
};

struct al_result {
  anderson::ResultRecord record;
  std::string json;
  std::string scalars;
  std::string path;
};

namespace {

thread_local std::string g_error;

al_status fail(al_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

al_status status_of(const std::exception& e) {
  using namespace anderson;
  if (dynamic_cast<const ConfigError*>(&e)) return AL_CONFIG;
  if (dynamic_cast<const DomainError*>(&e)) return AL_DOMAIN;
  if (dynamic_cast<const NumericError*>(&e)) return AL_NUMERIC;
  if (dynamic_cast<const FindingError*>(&e)) return AL_FINDING;
  return AL_INTERNAL;
}

template <class F>
al_status guarded(F&& f) {
  try {
    g_error.clear();
    return f();
  } catch (const std::exception& e) {
    return fail(status_of(e), e.what());
  } catch (...) {
    return fail(AL_INTERNAL, "unknown failure");
  }
}

al_config* wrap(anderson::ExperimentConfig c) {
  auto* out = new al_config{std::move(c), {}};
  out->echo = out->cfg.echo().dump();
  return out;
}

al_result* wrap(anderson::ResultRecord r) {
  auto* out = new al_result{std::move(r), {}, {}, {}};
  out->json = out->record.to_json().dump();
  out->scalars = out->record.scalars_json().dump();
  return out;
}

}  // namespace

extern "C" {

const char* al_version(void) { return ANDERSON_VERSION; }

int al_schema_version(void) { return anderson::kSchemaVersion; }

const char* al_last_error(void) { return g_error.c_str(); }

al_status al_config_parse(const char* json_text, al_config** out) {
  if (!json_text || !out) return fail(AL_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = wrap(anderson::ExperimentConfig::parse_text(json_text));
    return AL_OK;
  });
}

al_status al_config_load(const char* path, al_config** out) {
  if (!path || !out) return fail(AL_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = wrap(anderson::ExperimentConfig::load(path));
    return AL_OK;
  });
}

al_status al_config_set_seed(al_config* cfg, uint64_t seed) {
  if (!cfg) return fail(AL_INVALID_ARGUMENT, "null config");
  cfg->cfg.set_seed(seed);
  cfg->echo = cfg->cfg.echo().dump();
  return AL_OK;
}

al_status al_config_experiment(const al_config* cfg, const char** name) {
  if (!cfg || !name) return fail(AL_INVALID_ARGUMENT, "null argument");
  *name = anderson::kind_name(cfg->cfg.kind());
  return AL_OK;
}

al_status al_config_echo(const al_config* cfg, const char** json) {
  if (!cfg || !json) return fail(AL_INVALID_ARGUMENT, "null argument");
  *json = cfg->echo.c_str();
  return AL_OK;
}

void al_config_free(al_config* cfg) { delete cfg; }

al_status al_run(const al_config* cfg, al_result** out) {
  if (!cfg || !out) return fail(AL_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = wrap(anderson::run(cfg->cfg));
    return AL_OK;
  });
}

al_status al_sweep(al_config* const* cfgs, size_t n, unsigned threads, int use_master, uint64_t master_seed,
                   al_result** results, al_status* statuses) {
  if ((n > 0 && (!cfgs || !results || !statuses))) return fail(AL_INVALID_ARGUMENT, "null argument");
  for (size_t i = 0; i < n; ++i)
    if (!cfgs[i]) return fail(AL_INVALID_ARGUMENT, "null config in sweep");
  return guarded([&] {
    std::vector<anderson::ExperimentConfig> list;
    for (size_t i = 0; i < n; ++i) list.push_back(cfgs[i]->cfg);
    auto items = anderson::sweep(std::move(list), threads,
                                 use_master ? std::optional<std::uint64_t>(master_seed) : std::nullopt);
    al_status overall = AL_OK;
    for (size_t i = 0; i < n; ++i) {
      if (items[i].record) {
        results[i] = wrap(std::move(*items[i].record));
        statuses[i] = AL_OK;
      } else {
        results[i] = nullptr;
        switch (items[i].error_class) {
          case 2: statuses[i] = AL_CONFIG; break;
          case 3: statuses[i] = AL_NUMERIC; break;
          case 4: statuses[i] = AL_FINDING; break;
          default: statuses[i] = AL_INTERNAL;
        }
        if (overall == AL_OK) {
          overall = statuses[i];
          g_error = items[i].error;
        }
      }
    }
    return overall;
  });
}

al_status al_result_json(const al_result* r, const char** json) {
  if (!r || !json) return fail(AL_INVALID_ARGUMENT, "null argument");
  *json = r->json.c_str();
  return AL_OK;
}

al_status al_result_scalars_json(const al_result* r, const char** json) {
  if (!r || !json) return fail(AL_INVALID_ARGUMENT, "null argument");
  *json = r->scalars.c_str();
  return AL_OK;
}

al_status al_result_scalar(const al_result* r, const char* name, double* value) {
  if (!r || !name || !value) return fail(AL_INVALID_ARGUMENT, "null argument");
  auto it = r->record.scalars.find(name);
  if (it == r->record.scalars.end()) return fail(AL_INVALID_ARGUMENT, std::string("no scalar '") + name + "'");
  const auto& v = it->second;
  if (v.is_boolean()) *value = v.get<bool>() ? 1.0 : 0.0;
  else if (v.is_number()) *value = v.get<double>();
  else return fail(AL_INVALID_ARGUMENT, std::string("scalar '") + name + "' is not numeric");
  return AL_OK;
}

int al_result_has_finding(const al_result* r, const char** message) {
  if (!r || r->record.finding.empty()) return 0;
  if (message) *message = r->record.finding.c_str();
  return 1;
}

al_status al_result_write(const al_result* r, const char* dir, const char** json_path) {
  if (!r) return fail(AL_INVALID_ARGUMENT, "null result");
  return guarded([&] {
    std::string d;
    if (dir) d = dir;
    else if (const char* env = std::getenv("ANDERSON_LAB_OUT"); env && *env) d = env;
    else d = "results";
    auto* self = const_cast<al_result*>(r);
    self->path = anderson::write_record(r->record, d);
    if (json_path) *json_path = self->path.c_str();
    return AL_OK;
  });
}

void al_result_free(al_result* r) { delete r; }

al_status al_lattice_green(int64_t x, int64_t y, int64_t z, double* value) {
  if (!value) return fail(AL_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    *value = anderson::lattice_green(anderson::Site{x, y, z});
    return AL_OK;
  });
}

al_status al_eigenvalues(int64_t radius, const double* potential, double* out) {
  if (!potential || !out) return fail(AL_INVALID_ARGUMENT, "null argument");
  if (radius < 0 || radius > 22) return fail(AL_INVALID_ARGUMENT, "radius must lie in [0, 22]");
  return guarded([&] {
    const anderson::Cube cube({0, 0, 0}, radius);
    auto vals = anderson::eigenvalues(anderson::assemble(cube, std::vector<double>(potential, potential + cube.size())));
    std::sort(vals.begin(), vals.end());
    std::copy(vals.begin(), vals.end(), out);
    return AL_OK;
  });
}

}  // extern "C"
