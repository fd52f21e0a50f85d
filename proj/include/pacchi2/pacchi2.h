/* C interface to the chi-squared PAC-Bayes posterior library. */
#ifndef PACCHI2_H
#define PACCHI2_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PC2_API __declspec(dllexport)
#else
#define PC2_API __attribute__((visibility("default")))
#endif

typedef enum {
    PC2_OK = 0,
    PC2_ERR_INVALID_ARGUMENT = 1,
    PC2_ERR_INPUT = 2, /* unreadable or malformed user files */
    PC2_ERR_NUMERIC = 3,
    PC2_ERR_INTERNAL = 4
} pc2_status;

typedef enum { PC2_LIN = 0, PC2_SQ = 1, PC2_KL = 2 } pc2_distance;

typedef struct pc2_profile pc2_profile;
typedef struct pc2_posterior pc2_posterior;

/* Message for the last failed call on this thread; never NULL. */
PC2_API const char* pc2_last_error(void);
PC2_API const char* pc2_version(void);
PC2_API void pc2_string_free(char* s);

/* Parses "lin", "sq" or "kl". */
PC2_API pc2_status pc2_parse_distance(const char* name, pc2_distance* out);

/* Risk profiles. labels may be NULL. */
PC2_API pc2_status pc2_profile_create(const double* risks, size_t n, int m, const char* const* labels,
                                      pc2_profile** out);
/* Reads lambda,train_risk,valid_risk,test_risk; m is the validation size. */
PC2_API pc2_status pc2_profile_load_csv(const char* path, int m, pc2_profile** out);
PC2_API void pc2_profile_free(pc2_profile* p);
PC2_API size_t pc2_profile_size(const pc2_profile* p);
PC2_API int pc2_profile_m(const pc2_profile* p);
/* Risks in sorted order; perm maps sorted position to original index. */
PC2_API pc2_status pc2_profile_sorted_risks(const pc2_profile* p, double* risks, size_t* perm, size_t n);
/* Original-order label of the classifier at a sorted position. */
PC2_API const char* pc2_profile_label(const pc2_profile* p, size_t sorted_index);

/* Ordered-subset search under a uniform prior. */
PC2_API pc2_status pc2_optimize(const pc2_profile* p, pc2_distance d, double delta, pc2_posterior** out);
PC2_API pc2_status pc2_gibbs_posterior(const pc2_profile* p, pc2_posterior** out);
PC2_API void pc2_posterior_free(pc2_posterior* q);
PC2_API size_t pc2_posterior_size(const pc2_posterior* q);
PC2_API size_t pc2_posterior_support(const pc2_posterior* q);
/* Bound value; NaN for posteriors without a chi-squared bound. */
PC2_API double pc2_posterior_bound(const pc2_posterior* q);
PC2_API double pc2_posterior_empirical_risk(const pc2_posterior* q);
/* Weights in sorted-risk order. */
PC2_API pc2_status pc2_posterior_weights(const pc2_posterior* q, double* out, size_t n);
/* Writes rank,label,risk,weight rows. */
PC2_API pc2_status pc2_posterior_write_csv(const pc2_posterior* q, const pc2_profile* p, const char* path);

/* Scalars. */
PC2_API pc2_status pc2_moment_constant(pc2_distance d, int m, double* value, double* maximizer, int* capped);
PC2_API pc2_status pc2_kl_upper_inverse(double p_hat, double eps, double* out);
/* Bound of posterior q (uniform prior) over raw risks. */
PC2_API pc2_status pc2_bound(pc2_distance d, const double* q, const double* risks, size_t n, int m, double delta,
                             double* out);
/* Writes up to cap values; *count receives the grid size. h_target 0 means full grid. */
PC2_API pc2_status pc2_lambda_grid(size_t h_target, double* out, size_t cap, size_t* count);

/* End-to-end pipeline. distance_mask bits: 1 lin, 2 sq, 4 kl. h 0 means full grid. */
typedef struct {
    const char* dataset_path;
    const char* label_column;
    const char* positive_label;
    uint64_t seed;
    double delta;
    size_t h;
    unsigned distance_mask;
    int enable_ccp;
    int ccp_starts;
    const char* output_dir;
    int run_cv;
    int folds;
} pc2_run_config;

PC2_API void pc2_run_config_init(pc2_run_config* cfg);
/* On success *summary_json holds the report; free with pc2_string_free. */
PC2_API pc2_status pc2_run(const pc2_run_config* cfg, char** summary_json);
/* Cross-validation only; JSON result. */
PC2_API pc2_status pc2_cross_validate(const pc2_run_config* cfg, char** report_json);

/* Golden-value checks; text report, *all_passed set to 0 or 1. */
PC2_API pc2_status pc2_verify(int strict_published, char** report_text, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
