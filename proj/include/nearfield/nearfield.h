/* C interface to the near-field (P2P) layout laboratory.
 *
 * Every object is an opaque handle created by a *_create/_build/_generate
 * call and released by the matching *_destroy. Functions return nf_status;
 * on failure nf_last_error() holds a message for the calling thread.
 */
#ifndef NEARFIELD_H
#define NEARFIELD_H

#include <stddef.h>
#include <stdint.h>

#if defined(NF_BUILDING_LIBRARY)
#define NF_API __attribute__((visibility("default")))
#else
#define NF_API
#endif

/* Published prose claim for the normalized i=1 speedup; the formula gives
   13.93. */
#define NF_PUBLISHED_ADJUSTED_CLAIM_I1 17.0

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nf_status {
  NF_OK = 0,
  NF_ERR_INVALID_ARGUMENT = 1,
  NF_ERR_CONSTRUCTION_FAILURE = 2,
  NF_ERR_LAYOUT_CORRUPT = 3,
  NF_ERR_UNDEFINED_METRIC = 4,
  NF_ERR_INSUFFICIENT_DATA = 5,
  NF_ERR_IO = 6,
  NF_ERR_INTERNAL = 99
} nf_status;

NF_API const char* nf_version(void);
NF_API const char* nf_status_name(nf_status status);
/* Message of the last failed call on this thread; "" if none. */
NF_API const char* nf_last_error(void);

/* ---- geometry ---------------------------------------------------------- */

typedef struct nf_points nf_points;
typedef struct nf_tree nf_tree;

typedef struct nf_tree_stats {
  size_t t;
  double d;
  size_t b_count;
  int l;
  size_t n;
} nf_tree_stats;

NF_API nf_status nf_points_generate(size_t n, uint64_t seed, nf_points** out);
/* Copies caller-provided arrays: xy arrays hold 2n values, potentials n. */
NF_API nf_status nf_points_create(size_t n, const double* src_xy,
                                  const double* tgt_xy,
                                  const double* src_potential, nf_points** out);
NF_API void nf_points_destroy(nf_points* points);
NF_API size_t nf_points_count(const nf_points* points);
NF_API const double* nf_points_src_xy(const nf_points* points);
NF_API const double* nf_points_tgt_xy(const nf_points* points);
NF_API const double* nf_points_src_potential(const nf_points* points);

/* max_level <= 0 selects the default cap (16). */
NF_API nf_status nf_tree_build(const nf_points* points, int ct, int l_start,
                               int max_level, nf_tree** out);
NF_API nf_status nf_tree_build_at_level(const nf_points* points, int ct,
                                        int level, nf_tree** out);
NF_API nf_status nf_tree_adjust(const nf_tree* tree, const nf_points* points,
                                int delta, nf_tree** out);
NF_API void nf_tree_destroy(nf_tree* tree);
NF_API nf_status nf_tree_stats_get(const nf_tree* tree, nf_tree_stats* out);
/* Copies box membership; pass NULL to query the count only. */
NF_API nf_status nf_tree_box_sources(const nf_tree* tree, uint64_t box,
                                     uint32_t* out, size_t capacity,
                                     size_t* count);
NF_API nf_status nf_tree_box_targets(const nf_tree* tree, uint64_t box,
                                     uint32_t* out, size_t capacity,
                                     size_t* count);

NF_API nf_status nf_morton_encode(uint32_t ix, uint32_t iy, int level,
                                  uint64_t* out);
NF_API nf_status nf_morton_decode(uint64_t code, int level, uint32_t* ix,
                                  uint32_t* iy);
/* Writes up to 9 codes in ascending order. */
NF_API nf_status nf_neighbors_e1(uint64_t box, int level, uint64_t out[9],
                                 size_t* count);

/* ---- layouts ----------------------------------------------------------- */

typedef struct nf_indexing nf_indexing;
typedef struct nf_repetition nf_repetition;

typedef struct nf_layout_info {
  size_t n;
  int level;
  int ct;
  size_t t;
  uint64_t reported_bytes;
  uint64_t actual_bytes;
  double build_seconds;
  size_t work_items;
  size_t stride; /* repetition only: slots per record */
} nf_layout_info;

NF_API nf_status nf_indexing_build(const nf_tree* tree, const nf_points* points,
                                   nf_indexing** out);
NF_API void nf_indexing_destroy(nf_indexing* layout);
NF_API nf_status nf_indexing_info(const nf_indexing* layout,
                                  nf_layout_info* out);
NF_API nf_status nf_indexing_dump(const nf_indexing* layout, const char* path);
NF_API nf_status nf_indexing_load(const char* path, nf_indexing** out);

/* capacity 0 sizes records for the tree's CT. */
NF_API nf_status nf_repetition_build(const nf_tree* tree,
                                     const nf_points* points, int capacity,
                                     nf_repetition** out);
NF_API void nf_repetition_destroy(nf_repetition* layout);
NF_API nf_status nf_repetition_info(const nf_repetition* layout,
                                    nf_layout_info* out);
NF_API nf_status nf_repetition_dump(const nf_repetition* layout,
                                    const char* path);
NF_API nf_status nf_repetition_load(const char* path, nf_repetition** out);

/* ---- executors --------------------------------------------------------- */

typedef struct nf_run_info {
  double wall_time;
  size_t work_items;
} nf_run_info;

/* Output buffers must hold N doubles. epsilon <= 0 selects 1e-12. */
NF_API nf_status nf_run_baseline(const nf_tree* tree, const nf_points* points,
                                 double epsilon, double* out, size_t out_len,
                                 nf_run_info* info);
NF_API nf_status nf_run_indexing(const nf_indexing* layout, double epsilon,
                                 unsigned width, double* out, size_t out_len,
                                 nf_run_info* info);
NF_API nf_status nf_run_repetition(const nf_repetition* layout, double epsilon,
                                   unsigned width, double* out, size_t out_len,
                                   nf_run_info* info);

typedef struct nf_miss_ratio {
  double per_item;
  double summed;
  uint64_t total_runs;
  uint64_t occupied_banks;
  uint64_t layout_banks;
  size_t work_items;
} nf_miss_ratio;

/* bank_bytes 0 selects 512. */
NF_API nf_status nf_miss_ratio_indexing(const nf_indexing* layout,
                                        uint64_t bank_bytes, nf_miss_ratio* out);
NF_API nf_status nf_miss_ratio_repetition(const nf_repetition* layout,
                                          uint64_t bank_bytes,
                                          nf_miss_ratio* out);

/* ---- performance model ------------------------------------------------- */

typedef struct nf_shape {
  double n;
  int ct;
  int l;
  double t;
  double d;
  int i;
} nf_shape;

typedef struct nf_hardware {
  double m_indexing;
  double m_repetition;
  double o1;
  uint64_t bank_bytes;
  double total_cores;
  double find_nei_cost;
} nf_hardware;

typedef struct nf_coefficients {
  double alpha;
  double beta;
  double gamma;
  double lambda_ram;
  double lambda_gpu;
} nf_coefficients;

typedef struct nf_model_constants {
  double collect_volume_divisor;
  double kernel_speedup_constant;
  double kernel_speedup_constant_exact;
  double miss_quotient_numerator;
  double indexing_thread_miss_bytes;
  uint64_t default_bank_bytes;
} nf_model_constants;

typedef struct nf_model_report {
  double collect_time_indexing;
  double collect_time_repetition;
  uint64_t memory_indexing;
  uint64_t memory_repetition;
  double kernel_time_indexing;
  double kernel_time_indexing_expanded;
  double kernel_time_repetition;
  double miss_ratio_indexing_model;
  double miss_ratio_indexing_floor;
  double miss_ratio_repetition_model;
  double miss_ratio_quotient;
  double miss_ratio_quotient_bound;
  double volume_ratio;
  double speedup_collect;
  double speedup_transfer;
  double speedup_kernel;
  double speedup_total;
  double speedup_total_adjusted; /* at shape.i */
  double speedup_total_adjusted_normalized;
  double kernel_break_even_n;
} nf_model_report;

NF_API void nf_model_constants_get(nf_model_constants* out);
NF_API void nf_model_reference_coefficients(nf_coefficients* out);
NF_API void nf_model_default_hardware(nf_hardware* out);
/* d <= 0 is filled in as n / 4^(l-1). */
NF_API nf_status nf_model_evaluate(const nf_shape* shape, const nf_hardware* hw,
                                   const nf_coefficients* coeff,
                                   nf_model_report* out);

/* ---- bench ------------------------------------------------------------- */

typedef enum nf_plan_kind {
  NF_PLAN_COLLECT_SWEEP = 0,
  NF_PLAN_KERNEL_SWEEP = 1,
  NF_PLAN_GRID = 2
} nf_plan_kind;

typedef struct nf_grid_budget {
  size_t max_n;
  int max_level;
  int level_min; /* grid rows kept: [level_min, level_max] */
  int level_max;
} nf_grid_budget;

typedef struct nf_plan_cell {
  size_t n;
  int level; /* > 0 pins the tree level (grid) */
  int i;
  int skipped;
  char reason[160];
} nf_plan_cell;

typedef struct nf_experiment_options {
  int ct;
  int l_start;
  int repeats;
  uint64_t seed;
  unsigned width;
  nf_coefficients coefficients;
  uint64_t bank_bytes;
  int miss_ratio;
  double epsilon;
} nf_experiment_options;

typedef struct nf_bench_row {
  size_t n;
  int ct;
  int l;
  int i;
  size_t t;
  double d;
  uint64_t bytes_idx;
  uint64_t bytes_rep;
  double collect_idx_s;
  double collect_rep_s;
  double kernel_idx_s;
  double kernel_rep_s;
  double base1_s;
  double base2_s;
  double x_collect;
  double x_kernel;
  double x_total;
  double pred_x_collect;
  double pred_x_kernel;
  double pred_x_total;
  double miss_exact_idx;
  double miss_exact_rep;
  int skipped;
  char reason[160];
} nf_bench_row;

typedef struct nf_rows nf_rows;

NF_API void nf_experiment_default_options(nf_experiment_options* out);
NF_API void nf_grid_default_budget(nf_grid_budget* out);
/* Two-call pattern: pass out == NULL to learn the count. budget may be NULL
 * for the defaults. */
NF_API nf_status nf_plan_cells(nf_plan_kind kind, double scale,
                               const nf_grid_budget* budget, nf_plan_cell* out,
                               size_t capacity, size_t* count);
/* audit, if non-NULL, receives the comma-separated event sequence. */
NF_API nf_status nf_run_experiment(const nf_plan_cell* cell,
                                   const nf_experiment_options* options,
                                   nf_bench_row* out, char* audit,
                                   size_t audit_len);

NF_API nf_status nf_rows_create(nf_rows** out);
NF_API void nf_rows_destroy(nf_rows* rows);
NF_API nf_status nf_rows_append(nf_rows* rows, const nf_bench_row* row);
NF_API size_t nf_rows_count(const nf_rows* rows);
NF_API nf_status nf_rows_get(const nf_rows* rows, size_t index,
                             nf_bench_row* out);
NF_API nf_status nf_rows_write_csv(const nf_rows* rows, const char* path);
NF_API nf_status nf_rows_write_skip_log(const nf_rows* rows, const char* path);
NF_API nf_status nf_rows_read_csv(const char* path, nf_rows** out);

typedef struct nf_lambda_stats {
  double mean;
  double min;
  double max;
  size_t used;
  size_t skipped;
} nf_lambda_stats;

typedef struct nf_fit_result {
  double alpha;
  double beta;
  double gamma;
  double residual_rms;
  size_t records_used;
  nf_lambda_stats lambda_ram;
  nf_lambda_stats lambda_gpu;
} nf_fit_result;

NF_API nf_status nf_fit(const nf_rows* rows, int trim, nf_fit_result* out);

typedef struct nf_verify_config {
  size_t instances;
  uint64_t seed;
  unsigned width;
  double rel_tol;
  double abs_tol;
} nf_verify_config;

typedef struct nf_verify_report {
  size_t instances;
  size_t failures;
  double max_rel_error;
} nf_verify_report;

typedef void (*nf_line_callback)(const char* line, void* user);

NF_API void nf_verify_default_config(nf_verify_config* out);
/* on_line, if non-NULL, receives one PASS/FAIL line per instance. */
NF_API nf_status nf_verify(const nf_verify_config* config,
                           nf_verify_report* out, nf_line_callback on_line,
                           void* user);

#ifdef __cplusplus
}
#endif

#endif /* NEARFIELD_H */
