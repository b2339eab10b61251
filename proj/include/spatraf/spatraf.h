/* C interface to the spatraf toolkit. Every function returns st_status;
 * on failure st_last_error() describes the most recent error of the
 * calling thread. Handles are opaque and owned by the caller. */
#ifndef SPATRAF_H
#define SPATRAF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ST_API __declspec(dllexport)
#else
#define ST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum st_status {
  ST_OK = 0,
  ST_INVALID_ARGUMENT = 1,
  ST_DEGENERATE_INPUT = 2,
  ST_TOO_FEW_POINTS = 3,
  ST_EMPTY_PATTERN = 4,
  ST_EMPTY_ATTRACTOR_SET = 5,
  ST_INDEX_OUT_OF_RANGE = 6,
  ST_NONCONVERGENCE = 7,
  ST_INFEASIBLE = 8,
  ST_IO = 9,
  ST_PARSE = 10,
  ST_INTERNAL = 100
} st_status;

typedef enum st_measure_kind { ST_MEASURE_G = 0, ST_MEASURE_V = 1, ST_MEASURE_E = 2 } st_measure_kind;
typedef enum st_method { ST_METHOD_BASIC = 0, ST_METHOD_ENHANCED = 1 } st_method;
typedef enum st_bias { ST_BIAS_CENTER = 0, ST_BIAS_EDGE = 1 } st_bias;
typedef enum st_initial { ST_INITIAL_PPP = 0, ST_INITIAL_LATTICE = 1 } st_initial;

typedef struct st_config st_config;
typedef struct st_pattern st_pattern;
typedef struct st_layout st_layout;
typedef struct st_table st_table;

ST_API const char* st_version(void);
ST_API const char* st_last_error(void);
ST_API const char* st_status_name(st_status s);
/* Frees strings returned through char** out-parameters. */
ST_API void st_free_string(char* s);

/* ---- config ---- */
ST_API st_status st_config_parse(const char* json, st_config** out);
ST_API void st_config_free(st_config* c);
ST_API st_status st_config_set_seed(st_config* c, uint64_t seed);
/* 1 when a seed is set; the seed itself goes to *seed. */
ST_API int st_config_get_seed(const st_config* c, uint64_t* seed);
ST_API st_status st_config_set_drops(st_config* c, size_t drops);
ST_API size_t st_config_get_drops(const st_config* c);
ST_API st_status st_config_set_workers(st_config* c, size_t workers);
ST_API st_status st_config_set_calibration(st_config* c, size_t grid, size_t drops);
ST_API st_status st_config_set_measure(st_config* c, st_measure_kind m);
ST_API st_status st_config_validate(const st_config* c);
ST_API st_status st_config_to_json(const st_config* c, char** out);
/* "# config_hash=<hex>, seed=<seed>" */
ST_API st_status st_config_header(const st_config* c, char** out);

/* ---- patterns ---- */
/* xy holds n interleaved (x, y) pairs; window is {x_min, y_min, x_max, y_max}. */
ST_API st_status st_pattern_create(const double* xy, size_t n, const double window[4], st_pattern** out);
ST_API void st_pattern_free(st_pattern* p);
ST_API size_t st_pattern_size(const st_pattern* p);
/* Copies up to cap points into xy (2 * cap doubles). */
ST_API st_status st_pattern_points(const st_pattern* p, double* xy, size_t cap);
ST_API st_status st_pattern_read_csv(const char* path, st_pattern** out);
ST_API st_status st_pattern_write_csv(const st_pattern* p, const char* path, const char* header);

typedef struct st_measure_report {
  st_measure_kind measure;
  double mean;
  double variance;
  double cov;
  double normalized_cov;
  size_t n;
} st_measure_report;

ST_API st_status st_measure(const st_pattern* p, st_measure_kind m, int exclude_boundary, st_measure_report* out);
ST_API st_status st_measure_parse(const char* name, st_measure_kind* out);

/* ---- layouts ---- */
/* Tier powers and gains come from the config. */
ST_API st_status st_layout_read_json(const char* path, const st_config* c, st_layout** out);
/* Random layout and attractors of drop `drop` under the config's seed. */
ST_API st_status st_layout_sample(const st_config* c, uint64_t drop, st_layout** out);
ST_API void st_layout_free(st_layout* l);
ST_API st_status st_layout_to_json(const st_layout* l, char** out);
ST_API st_status st_correlation(const st_layout* l, const st_config* c, const st_pattern* ues, double* rho);

/* ---- generation ---- */
typedef struct st_tgip {
  double alpha;
  double mu_beta;
  st_method method;
  st_bias bias;
  st_initial initial;
} st_tgip;

ST_API void st_tgip_default(st_tgip* t);
ST_API st_status st_method_parse(const char* s, st_method* out);
ST_API st_status st_bias_parse(const char* s, st_bias* out);
ST_API st_status st_initial_parse(const char* s, st_initial* out);

/* UEs for one drop on a fixed layout, mean count from the config. */
ST_API st_status st_generate(const st_layout* l, const st_config* c, const st_tgip* t, uint64_t drop,
                             st_pattern** ues);

/* ---- calibration tables ---- */
ST_API st_status st_calibrate(const st_config* c, st_initial initial, st_table** out);
ST_API void st_table_free(st_table* t);
ST_API st_status st_table_read(const char* path, st_table** out);
/* Writes the table JSON with a top-level "header" field. */
ST_API st_status st_table_write(const st_table* t, const char* path, const char* header);
ST_API st_status st_table_dims(const st_table* t, size_t* rows, size_t* cols);

typedef struct st_table_node {
  double alpha;
  double mu_beta;
  double c;
  double rho;
  double raw_c;
  double raw_rho;
  double se_c;
  double se_rho;
} st_table_node;

ST_API st_status st_table_node_at(const st_table* t, size_t i, size_t j, st_table_node* out);

/* lattice may be NULL. On ST_INFEASIBLE the nearest attainable point and its
 * parameters are still written. */
ST_API st_status st_invert(const st_table* ppp, const st_table* lattice, double c, double rho, st_tgip* tgip,
                           double* predicted_c, double* predicted_rho);

typedef struct st_feasible_bin {
  double rho_lo;
  double rho_hi;
  double c_min;
  double c_max;
} st_feasible_bin;

/* Writes up to cap bins; *count receives the total. */
ST_API st_status st_feasible_bins(const st_table* t, double bin_width, st_feasible_bin* out, size_t cap,
                                  size_t* count);

/* ---- network simulation ---- */
typedef struct st_kpi {
  double target_c;
  double target_rho;
  int feasible;
  st_tgip tgip;
  double measured_c;
  double measured_rho;
  double mean_rate_bps;
  double se_rate;
  double coverage_prob;
  double se_cov;
  size_t drops;
  uint64_t seed;
} st_kpi;

/* Drops and seed come from the config. */
ST_API st_status st_simulate(const st_config* c, const st_tgip* t, st_kpi* out);
/* targets holds n (C, rho) pairs. Infeasible targets get feasible = 0 and NaN values. */
ST_API st_status st_sweep(const st_config* c, const double* targets, size_t n, const st_table* ppp,
                          const st_table* lattice, st_kpi* out);

typedef struct st_curve_point {
  double mu_beta;
  double c_g, c_v, c_e;
  double cov_g, cov_v, cov_e;
  double se_g, se_v, se_e;
} st_curve_point;

ST_API st_status st_measure_curve(const st_config* c, double alpha, const double* betas, size_t n,
                                  st_curve_point* out);

#ifdef __cplusplus
}
#endif

#endif
