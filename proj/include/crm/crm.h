#ifndef CRM_CRM_H
#define CRM_CRM_H

/* C interface to the compression-rate benchmark library.
 *
 * Every function returns a crm_status. On failure crm_last_error() holds a
 * message for the calling thread until its next call into the library.
 * Strings returned through char** out-parameters are owned by the caller and
 * released with crm_string_free(). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CRM_API __declspec(dllexport)
#else
#define CRM_API __attribute__((visibility("default")))
#endif

typedef enum crm_status {
    CRM_OK = 0,
    CRM_ERR_DOMAIN = 1,
    CRM_ERR_ENCODING = 2,
    CRM_ERR_PARSE = 3,
    CRM_ERR_IO = 4,
    CRM_ERR_NOT_FOUND = 5,
    CRM_ERR_REFUSED = 6,
    CRM_ERR_VERIFICATION = 7,
    CRM_ERR_INVALID_ARGUMENT = 8,
    CRM_ERR_INTERNAL = 9
} crm_status;

typedef enum crm_unit { CRM_UNIT_BITS = 0, CRM_UNIT_NATS = 1 } crm_unit;

typedef struct crm_workspace crm_workspace;

CRM_API const char* crm_version(void);
CRM_API const char* crm_status_name(crm_status status);
CRM_API const char* crm_last_error(void);
CRM_API void crm_string_free(char* s);

/* Information measures over probability vectors of length n. */
CRM_API crm_status crm_shannon_codelength(double p, double* out_bits);
CRM_API crm_status crm_entropy(const double* p, size_t n, crm_unit unit, double* out);
CRM_API crm_status crm_cross_entropy(const double* p, const double* q, size_t n, crm_unit unit, double* out);
CRM_API crm_status crm_kl_divergence(const double* p, const double* q, size_t n, crm_unit unit, double* out);
CRM_API crm_status crm_kraft_sum(const unsigned* lengths, size_t n, double* out);

/* Geometric source p(x) = (1 - e^-lambda) e^(-lambda x). */
CRM_API crm_status crm_geometric_entropy(double lambda, double* out_nats, double* out_bits);
CRM_API crm_status crm_geometric_cross_entropy(double lambda_true, double lambda_guess, double* out_nats,
                                               double* out_bits);
CRM_API crm_status crm_geometric_kl(double lambda_true, double lambda_guess, double* out_nats, double* out_bits);
CRM_API crm_status crm_crossover_n(double header_bits, double per_sample_penalty, uint64_t* out);

/* Generalization bounds. Class sizes are given as natural logs. */
typedef struct crm_bound {
    double value;
    const char* unit; /* static string: samples, nats, bits, probability, dimensionless */
} crm_bound;

typedef struct crm_worm_simulation {
    uint64_t trials;
    uint64_t worm_trials;
    double frequency;
    double analytic_bound;
    double sigma;
} crm_worm_simulation;

typedef struct crm_compression_view {
    double bits;
    double fallback_bits;
    int saves;
} crm_compression_view;

CRM_API crm_status crm_bounds_required_samples(double epsilon, double delta, double ln_class_size, crm_bound* out);
CRM_API crm_status crm_bounds_max_class_log_size(double n, double epsilon, double delta, crm_bound* out);
CRM_API crm_status crm_bounds_rule_class_log_size(uint64_t k, uint64_t e, uint64_t d, crm_bound* out);
CRM_API crm_status crm_bounds_hidden_worm(double ln_class_size, double epsilon, uint64_t n, crm_bound* out);
CRM_API crm_status crm_bounds_simulate_hidden_worm(uint64_t class_size, double epsilon, uint64_t n,
                                                   uint64_t trials, uint64_t seed, unsigned threads,
                                                   crm_worm_simulation* out);
CRM_API crm_status crm_bounds_compression_view(int found, double ln_class_size, uint64_t n,
                                               crm_compression_view* out);
CRM_API crm_status crm_bounds_compression_risk(double bits_per_sample, double n, double delta, crm_bound* out);
CRM_API crm_status crm_bounds_model_ceiling(double n_labels, double flat_payload_bits, crm_bound* out);
CRM_API crm_status crm_bounds_two_part_savings(double model_bits, double payload_bits, double flat_bits,
                                               double* out);

/* Models and sampling (no workspace needed). */
CRM_API crm_status crm_list_models(char** out_json);
/* Samples may contain NUL bytes; *out_len is the length. */
CRM_API crm_status crm_sample(const char* model_id, uint64_t count, uint64_t seed, char** out, size_t* out_len);
/* Synthetic datasets: geometric, poisson, gaussian, laplace (integers),
 * normal (reals) and bernoulli (one line of bits). */
CRM_API crm_status crm_generate(const char* family, const double* params, size_t n_params, uint64_t n,
                                uint64_t seed, char** out);

/* Workspaces. A NULL home means $CRM_HOME, or ".crm" when unset. */
CRM_API crm_status crm_workspace_open(const char* home, crm_workspace** out);
CRM_API void crm_workspace_close(crm_workspace* ws);
CRM_API const char* crm_workspace_home(const crm_workspace* ws);

/* kind: text, integers, reals, image, frame-triple, bitstrings. id may be NULL. */
CRM_API crm_status crm_register(crm_workspace* ws, const char* path, const char* kind, const char* id,
                                char** out_json);
/* Returns CRM_ERR_VERIFICATION, with the report still written to *out_json,
 * when the round trip fails. */
CRM_API crm_status crm_run(crm_workspace* ws, const char* dataset, const char* model, uint64_t seed,
                           char** out_json);
CRM_API crm_status crm_leaderboard(crm_workspace* ws, const char* dataset, char** out_json);
CRM_API crm_status crm_datasets(crm_workspace* ws, char** out_json);
/* format: "json" or "table". */
CRM_API crm_status crm_report(crm_workspace* ws, const char* format, int include_timing, char** out);
CRM_API crm_status crm_verify_container(crm_workspace* ws, const char* container_path, const char* dataset,
                                        char** out_json);

#ifdef __cplusplus
}
#endif

#endif
