#ifndef FRONTWAVE_FRONTWAVE_H
#define FRONTWAVE_FRONTWAVE_H

#include <stddef.h>

#if defined(_WIN32)
#define FW_API __declspec(dllexport)
#else
#define FW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct fw_config fw_config;
typedef struct fw_result fw_result;

/* Error codes; the numbering follows the library's internal error kinds. */
typedef enum fw_status {
    FW_OK = 0,
    FW_ERR_CONFIG = 1,
    FW_ERR_POLE_EVALUATION = 2,
    FW_ERR_EMPTY_FIBER = 3,
    FW_ERR_DEGENERATE_FIBER = 4,
    FW_ERR_MISSING_TANGENT = 5,
    FW_ERR_STEP_FAILURE = 6,
    FW_ERR_POLE_CROSSING = 7,
    FW_ERR_REFINEMENT_BUDGET = 8,
    FW_ERR_INSUFFICIENT_TAIL = 9,
    FW_ERR_MORSE_VIOLATION = 10,
    FW_ERR_TURNING_POINT = 11,
    FW_ERR_ROUTE_MISMATCH = 12,
    FW_ERR_BOUNDARY_AMBIGUITY = 13,
    FW_ERR_ENDPOINT_DIVERGENCE = 14,
    FW_ERR_FIT_DEGENERATE = 15,
    FW_ERR_WRONG_BOUNDARY = 16,
    FW_ERR_ASSUMPTION = 17,
    FW_ERR_DEGENERATE_CRITICAL = 18,
    FW_ERR_BUDGET = 19,
    FW_ERR_HYPOTHESIS = 20,
    FW_ERR_PRECONDITION = 21,
    FW_ERR_IO = 22,
    FW_ERR_INVALID_ARGUMENT = 100,
    FW_ERR_INTERNAL = 101
} fw_status;

FW_API const char* fw_version(void);
FW_API const char* fw_status_name(fw_status status);
/* Message of the last failed call on this thread; empty when none. */
FW_API const char* fw_last_error(void);

/* 0 selects the number of hardware threads. Results do not depend on the value. */
FW_API fw_status fw_set_threads(int threads);
FW_API int fw_threads(void);

FW_API fw_status fw_config_load(const char* path, fw_config** out);
FW_API fw_status fw_config_parse(const char* text, fw_config** out);
FW_API const char* fw_config_digest(const fw_config* cfg);
FW_API void fw_config_free(fw_config* cfg);

/* command: simulate, lambda, verify, ergodic, statphase, singular-set.
   out_dir may be NULL (derived from the config and FRONTWAVE_OUT); horizon <= 0 keeps the config value.
   FW_OK means the command ran; whether its checks passed is reported by fw_result_passed. */
FW_API fw_status fw_run(const fw_config* cfg, const char* command, const char* out_dir, double horizon,
                        fw_result** out);
FW_API int fw_result_passed(const fw_result* res);
FW_API const char* fw_result_summary(const fw_result* res);
FW_API const char* fw_result_report_json(const fw_result* res);
FW_API const char* fw_result_out_dir(const fw_result* res);
FW_API size_t fw_result_file_count(const fw_result* res);
FW_API const char* fw_result_file(const fw_result* res, size_t index);
FW_API void fw_result_free(fw_result* res);

/* Direct access without writing files. */
FW_API fw_status fw_lambda(const fw_config* cfg, double* lambda, double* error_estimate);
FW_API fw_status fw_front_lengths(const fw_config* cfg, const double* times, size_t count, double* lengths);

#ifdef __cplusplus
}
#endif

#endif
