#ifndef ANDERSON_LAB_H
#define ANDERSON_LAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(AL_BUILDING_LIBRARY)
#define AL_API __attribute__((visibility("default")))
#else
#define AL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum al_status {
  AL_OK = 0,
  AL_INVALID_ARGUMENT = 1,
  AL_CONFIG = 2,
  AL_NUMERIC = 3,
  AL_FINDING = 4,
  AL_DOMAIN = 5,
  AL_INTERNAL = 6
} al_status;

typedef struct al_config al_config;
typedef struct al_result al_result;

AL_API const char* al_version(void);
AL_API int al_schema_version(void);

/* Message for the last failing call on this thread; never NULL. */
AL_API const char* al_last_error(void);

/* Configs are validated completely on parse. */
AL_API al_status al_config_parse(const char* json_text, al_config** out);
AL_API al_status al_config_load(const char* path, al_config** out);
AL_API al_status al_config_set_seed(al_config* cfg, uint64_t seed);
AL_API al_status al_config_experiment(const al_config* cfg, const char** name);
/* Canonical config echo; the string lives as long as the config. */
AL_API al_status al_config_echo(const al_config* cfg, const char** json);
AL_API void al_config_free(al_config* cfg);

/* Runs the experiment; AL_OK also when the result carries a finding. */
AL_API al_status al_run(const al_config* cfg, al_result** out);

/* Runs n configs on up to `threads` threads. results[i] is NULL where statuses[i]
   is not AL_OK. With use_master set, seeds come from (master_seed, i). */
AL_API al_status al_sweep(al_config* const* cfgs, size_t n, unsigned threads, int use_master, uint64_t master_seed,
                          al_result** results, al_status* statuses);

/* Full record as JSON; lives as long as the result. */
AL_API al_status al_result_json(const al_result* r, const char** json);
/* Deterministic part only (scalars). */
AL_API al_status al_result_scalars_json(const al_result* r, const char** json);
AL_API al_status al_result_scalar(const al_result* r, const char* name, double* value);
/* 1 when a checked inequality failed; *message then points at its text. */
AL_API int al_result_has_finding(const al_result* r, const char** message);
/* Writes JSON and CSV files; dir NULL means $ANDERSON_LAB_OUT, else "results". */
AL_API al_status al_result_write(const al_result* r, const char* dir, const char** json_path);
AL_API void al_result_free(al_result* r);

/* Lattice Green's function G(a) on Z^3 with -Delta G = delta_0. */
AL_API al_status al_lattice_green(int64_t x, int64_t y, int64_t z, double* value);

/* All eigenvalues, increasing, of -Delta + V on the cube of the given radius
   centred at the origin; potential in site index order, out holds (2r+1)^3 values. */
AL_API al_status al_eigenvalues(int64_t radius, const double* potential, double* out);

#ifdef __cplusplus
}
#endif

#endif
