/*
 * mcpsim C API.
 *
 * Every fallible function returns an mcpsim_status; on failure a message is
 * available from mcpsim_last_error() on the same thread until the next call.
 * Reports are opaque handles released with the matching *_free function.
 * Strings returned through char** are released with mcpsim_string_free.
 */
#ifndef MCPSIM_MCPSIM_H
#define MCPSIM_MCPSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MCPSIM_BUILDING)
#    define MCPSIM_API __declspec(dllexport)
#  else
#    define MCPSIM_API __declspec(dllimport)
#  endif
#else
#  define MCPSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcpsim_status {
  MCPSIM_OK = 0,
  MCPSIM_ERR_DOMAIN = 1,       /* parameter outside its domain */
  MCPSIM_ERR_PRECONDITION = 2, /* e.g. unordered coupled initial states */
  MCPSIM_ERR_RESOURCE = 3,     /* event or site cap exceeded */
  MCPSIM_ERR_FORMAT = 4,       /* malformed serialized input */
  MCPSIM_ERR_ARGUMENT = 5,     /* null pointer or bad enum value */
  MCPSIM_ERR_INTERNAL = 6
} mcpsim_status;

typedef enum mcpsim_format { MCPSIM_FORMAT_CSV = 0, MCPSIM_FORMAT_JSON = 1 } mcpsim_format;

MCPSIM_API const char* mcpsim_version(void);
MCPSIM_API const char* mcpsim_last_error(void);
MCPSIM_API void mcpsim_string_free(char* s);

/* ---- thresholds ------------------------------------------------------- */

/* beta_2 = c*beta, delta_2 = 1, beta_1 = beta*alpha, delta_1 = alpha on Z^dim. */
typedef struct mcpsim_params {
  double beta;
  double c;
  double alpha;
  int dim;
} mcpsim_params;

typedef struct mcpsim_broman_params {
  double alpha0;
  double alpha1;
  double gamma;
  double p;
} mcpsim_broman_params;

MCPSIM_API mcpsim_status mcpsim_lambda_bar(const mcpsim_params* p, double* out);
MCPSIM_API mcpsim_status mcpsim_lambda_bar_broman(const mcpsim_broman_params* b, double* out);
MCPSIM_API mcpsim_status mcpsim_cpree_broman_params(const mcpsim_params* p,
                                                    mcpsim_broman_params* out);
MCPSIM_API mcpsim_status mcpsim_c_star(double alpha, double beta, int dim, double* out);
MCPSIM_API mcpsim_status mcpsim_sufficient_c_bound(double alpha, double beta, int dim,
                                                   double* out);
MCPSIM_API mcpsim_status mcpsim_survival_sufficient(const mcpsim_params* p, double lambda_c_ref,
                                                    int* out);
MCPSIM_API mcpsim_status mcpsim_lambda_c_bounds(int dim, double* lower, double* upper);

/* ---- modulated point process dominance -------------------------------- */

typedef struct mcpsim_dominance_report mcpsim_dominance_report;

typedef struct mcpsim_dominance_config {
  mcpsim_broman_params params;
  double lambda;
  const double* times; /* NULL: 0.5, 1, 2, 5, 10 */
  size_t n_times;
  int64_t max_count; /* <= 0: 99.99% Poisson quantile at the largest time */
  uint64_t replicas;
  uint64_t seed;
  double z;
  unsigned threads; /* 0: hardware concurrency */
} mcpsim_dominance_config;

MCPSIM_API mcpsim_status mcpsim_dominance_run(const mcpsim_dominance_config* cfg,
                                              mcpsim_dominance_report** out);
MCPSIM_API size_t mcpsim_dominance_violations(const mcpsim_dominance_report* r);
MCPSIM_API size_t mcpsim_dominance_cells(const mcpsim_dominance_report* r);
MCPSIM_API double mcpsim_dominance_lambda_bar(const mcpsim_dominance_report* r);
MCPSIM_API mcpsim_status mcpsim_dominance_serialize(const mcpsim_dominance_report* r,
                                                    mcpsim_format fmt, char** out);
MCPSIM_API void mcpsim_dominance_free(mcpsim_dominance_report* r);

/* ---- coupled runs ----------------------------------------------------- */

typedef enum mcpsim_coupling {
  MCPSIM_COUPLE_CPREE_MCP = 0,
  MCPSIM_COUPLE_ATTRACTIVE = 1,
  MCPSIM_COUPLE_PROP1 = 2
} mcpsim_coupling;

typedef enum mcpsim_pair_init {
  MCPSIM_PAIR_STANDARD = 0,
  MCPSIM_PAIR_EQUAL = 1,
  MCPSIM_PAIR_RANDOM_ORDERED = 2
} mcpsim_pair_init;

typedef struct mcpsim_couple_report mcpsim_couple_report;

/* Stream intensities of the shared construction. For MCPSIM_COUPLE_PROP1
 * d1 is ignored and replaced by sigma, d2 by 1. */
typedef struct mcpsim_couple_config {
  mcpsim_coupling which;
  double b1, d1, b2, d2;
  double sigma;
  int dim;
  int side;
  int periodic;
  double horizon;
  uint64_t replicas;
  uint64_t seed;
  mcpsim_pair_init init;
  double p1, p2;
  int64_t fault_replica; /* < 0: no fault injection */
  unsigned threads;
} mcpsim_couple_config;

MCPSIM_API mcpsim_status mcpsim_couple_run(const mcpsim_couple_config* cfg,
                                           mcpsim_couple_report** out);
MCPSIM_API size_t mcpsim_couple_violations(const mcpsim_couple_report* r);
MCPSIM_API uint64_t mcpsim_couple_checked_events(const mcpsim_couple_report* r);
MCPSIM_API mcpsim_status mcpsim_couple_serialize(const mcpsim_couple_report* r,
                                                 mcpsim_format fmt, char** out);
MCPSIM_API void mcpsim_couple_free(mcpsim_couple_report* r);

/* ---- survival --------------------------------------------------------- */

typedef enum mcpsim_process {
  MCPSIM_PROCESS_CP = 0,
  MCPSIM_PROCESS_MCP = 1,
  MCPSIM_PROCESS_CPREE = 2,
  MCPSIM_PROCESS_MCP_PERTURBED = 3
} mcpsim_process;

typedef enum mcpsim_init {
  MCPSIM_INIT_SINGLE_SEED = 0,
  MCPSIM_INIT_PRODUCT = 1,
  MCPSIM_INIT_ALL_2 = 2
} mcpsim_init;

typedef struct mcpsim_survival_report mcpsim_survival_report;

/* For MCPSIM_PROCESS_CP the construction is lambda-arrows with x marks at
 * rate 1 and b1, d1, b2, d2 are ignored. tracked_state 0 selects the
 * process default (1 for cp, 2 otherwise). */
typedef struct mcpsim_survival_config {
  mcpsim_process kind;
  double lambda;
  double sigma;
  double b1, d1, b2, d2;
  int dim;
  int side;
  int periodic;
  double horizon;
  const double* checkpoints;
  size_t n_checkpoints;
  mcpsim_init init;
  double p1, p2;
  int tracked_state;
  uint64_t replicas;
  uint64_t seed;
  unsigned threads;
} mcpsim_survival_config;

typedef struct mcpsim_survival_summary {
  uint64_t replicas;
  uint64_t survive_count;
  uint64_t origin_occupied_count;
  double estimate;   /* origin occupancy at the horizon */
  double half_width; /* 95% */
  double survive_estimate;
  double survive_half_width;
} mcpsim_survival_summary;

MCPSIM_API mcpsim_status mcpsim_survival_run(const mcpsim_survival_config* cfg,
                                             mcpsim_survival_report** out);
MCPSIM_API mcpsim_status mcpsim_survival_get_summary(const mcpsim_survival_report* r,
                                                     mcpsim_survival_summary* out);
MCPSIM_API mcpsim_status mcpsim_survival_serialize(const mcpsim_survival_report* r,
                                                   mcpsim_format fmt, char** out);
MCPSIM_API void mcpsim_survival_free(mcpsim_survival_report* r);

/* ---- graphical construction ------------------------------------------- */

/* Generates one construction and writes its text form. */
MCPSIM_API mcpsim_status mcpsim_event_log_text(int dim, int side, int periodic, double b1,
                                               double d1, double b2, double d2, double horizon,
                                               uint64_t seed, char** out);

#ifdef __cplusplus
}
#endif

#endif /* MCPSIM_MCPSIM_H */
