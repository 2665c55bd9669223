/* C interface to the chemotaxis-fluid simulator. All functions return a
 * cns_status; on failure cns_last_error() describes the problem (per thread).
 * Strings returned through char** must be released with cns_string_free. */
#ifndef CNS_CNS_H
#define CNS_CNS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CNS_API __declspec(dllexport)
#else
#define CNS_API __attribute__((visibility("default")))
#endif

typedef enum cns_status {
    CNS_OK = 0,
    CNS_ERR_USAGE = 1,
    CNS_ERR_VALIDATION = 2,
    CNS_ERR_SOLVER = 3,
    CNS_ERR_BLOWUP = 4,
    CNS_ERR_IO = 5,
    CNS_ERR_ACCEPTANCE = 6,
    CNS_ERR_FORMAT = 7,
    CNS_ERR_DOMAIN = 8,
    CNS_ERR_INTERNAL = 9
} cns_status;

typedef struct cns_config cns_config;
typedef struct cns_sim cns_sim;

CNS_API const char* cns_version(void);
CNS_API const char* cns_last_error(void);
CNS_API const char* cns_status_name(cns_status s);
CNS_API void cns_string_free(char* s);

/* Configuration. Loading from a file applies CNS_OUTPUT_ROOT. */
CNS_API cns_status cns_config_load(const char* path, cns_config** out);
CNS_API cns_status cns_config_parse(const char* json_text, cns_config** out);
/* Sets a dotted key ("time.horizon") to a JSON value ("0.5") and revalidates;
 * the config is left unchanged on error. */
CNS_API cns_status cns_config_set(cns_config* cfg, const char* dotted_key, const char* json_value);
CNS_API cns_status cns_config_to_json(const cns_config* cfg, char** out);
CNS_API void cns_config_free(cns_config* cfg);

/* Runs the configured simulation and writes series.csv, audit.json and
 * final.ckpt. The summary JSON (may be NULL) is produced even when the run
 * fails after starting. The return value is the run's exit class. */
CNS_API cns_status cns_run(const cns_config* cfg, char** summary_json);

/* Epsilon sweep; ladder strictly decreasing in (0, 1]. Returns
 * CNS_ERR_ACCEPTANCE when the Cauchy trend check fails. */
CNS_API cns_status cns_sweep(const cns_config* cfg, const double* ladder, size_t count, char** result_json);

/* Acceptance suite below scratch_dir (NULL = temporary directory). `only`
 * selects criteria (NULL/0 = all). `on_line` receives one line per criterion. */
typedef void (*cns_line_callback)(const char* line, void* user);
CNS_API cns_status cns_verify(const char* scratch_dir, const int* only, size_t only_count, int workers,
                              cns_line_callback on_line, void* user, int* failed);

/* Checkpoint header as JSON. */
CNS_API cns_status cns_inspect(const char* checkpoint_path, char** header_json);

/* Step-by-step simulation handle built from a config (initial data from the
 * config's seed). */
CNS_API cns_status cns_sim_create(const cns_config* cfg, cns_sim** out);
CNS_API cns_status cns_sim_step(cns_sim* sim, double* dt_taken);
/* Steps until time >= t_end (clamped to the last step). */
CNS_API cns_status cns_sim_advance(cns_sim* sim, double t_end);
CNS_API cns_status cns_sim_time(const cns_sim* sim, double* t, long* step);
/* mass, c_sup, entropy, sqrt_dirichlet, kinetic, energy, power_mass, c_squared */
CNS_API cns_status cns_sim_functionals(const cns_sim* sim, double out[8]);
CNS_API cns_status cns_sim_save(const cns_sim* sim, const char* path);
CNS_API void cns_sim_free(cns_sim* sim);

#ifdef __cplusplus
}
#endif

#endif
