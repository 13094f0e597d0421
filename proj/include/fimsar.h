/*
 * fimsar: FIM-LFM waveform, SAR echo simulation and focusing, and communication-link
 * Monte Carlo, behind a plain C interface.
 *
 * Every function returning fimsar_status leaves a message for fimsar_last_error() on
 * failure. Handles are opaque and must be released with the matching _free function.
 */
#ifndef FIMSAR_H
#define FIMSAR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FIMSAR_API __declspec(dllexport)
#else
#define FIMSAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fimsar_status {
    FIMSAR_OK = 0,
    FIMSAR_E_ARGUMENT = 1, /* null handle or bad enum */
    FIMSAR_E_CONFIG = 2,   /* config parse or validation error */
    FIMSAR_E_RUNTIME = 3   /* I/O or processing error */
} fimsar_status;

typedef enum fimsar_ambiguity_method {
    FIMSAR_AMBIGUITY_NUMERIC = 0,
    FIMSAR_AMBIGUITY_CLOSED_FORM = 1
} fimsar_ambiguity_method;

typedef enum fimsar_ambiguity_cut {
    FIMSAR_CUT_NONE = 0,
    FIMSAR_CUT_TAU0 = 1, /* Doppler profile at zero delay */
    FIMSAR_CUT_XI0 = 2   /* range profile at zero Doppler */
} fimsar_ambiguity_cut;

typedef enum fimsar_ber_engine {
    FIMSAR_BER_WAVEFORM = 0,
    FIMSAR_BER_CORRELATOR = 1,
    FIMSAR_BER_FROM_CONFIG = 2
} fimsar_ber_engine;

#define FIMSAR_FOCUS_SKIP_QAM_REMOVAL 1u
#define FIMSAR_FOCUS_SKIP_COMPENSATION 2u

typedef struct fimsar_config fimsar_config;
typedef struct fimsar_matrix fimsar_matrix;

typedef struct fimsar_derived {
    double Bs;               /* sub-band width, Hz */
    double Ts;               /* sub-pulse duration, s */
    double Kc;               /* chirp rate, Hz/s */
    double fs;               /* sample rate, Hz */
    uint64_t Ns;             /* samples per sub-pulse */
    uint64_t Npulse;         /* samples per pulse */
    uint32_t bits_per_pulse;
    double range_res_fine;   /* c/(2Bw), m */
    double range_res_coarse; /* c/(2Bs), m */
} fimsar_derived;

FIMSAR_API const char* fimsar_version(void);
/* Message of the last failure on the calling thread ("" if none). */
FIMSAR_API const char* fimsar_last_error(void);

FIMSAR_API fimsar_status fimsar_config_load(const char* path, fimsar_config** out);
FIMSAR_API fimsar_status fimsar_config_parse(const char* text, fimsar_config** out);
/* Overrides one key using the config-file syntax, then re-validates. */
FIMSAR_API fimsar_status fimsar_config_set(fimsar_config* cfg, const char* key, const char* value);
FIMSAR_API const char* fimsar_config_output_dir(const fimsar_config* cfg);
FIMSAR_API fimsar_status fimsar_config_derived(const fimsar_config* cfg, fimsar_derived* out);
FIMSAR_API void fimsar_config_free(fimsar_config* cfg);

FIMSAR_API fimsar_status fimsar_run_waveform(const fimsar_config* cfg, const char* out_dir);
FIMSAR_API fimsar_status fimsar_run_ambiguity(const fimsar_config* cfg, const char* out_dir,
                                              fimsar_ambiguity_method method, fimsar_ambiguity_cut cut);
FIMSAR_API fimsar_status fimsar_run_sar_sim(const fimsar_config* cfg, const char* out_dir);
/* echo_path may be NULL to simulate the configured scene; flags are FIMSAR_FOCUS_* bits
   applied on top of the config's pipeline settings. */
FIMSAR_API fimsar_status fimsar_run_sar_focus(const fimsar_config* cfg, const char* echo_path, unsigned flags,
                                              const char* out_dir);
FIMSAR_API fimsar_status fimsar_run_metrics(const fimsar_config* cfg, const char* image_path, const char* out_csv);
/* snr_db may be NULL (n_snr 0) and trials 0 to use the config values. */
FIMSAR_API fimsar_status fimsar_run_comm_ber(const fimsar_config* cfg, const double* snr_db, size_t n_snr,
                                             uint64_t trials, fimsar_ber_engine engine, const char* out_csv);

FIMSAR_API fimsar_status fimsar_matrix_read(const char* path, fimsar_matrix** out);
FIMSAR_API uint64_t fimsar_matrix_rows(const fimsar_matrix* m);
FIMSAR_API uint64_t fimsar_matrix_cols(const fimsar_matrix* m);
/* Interleaved (re, im) pairs, rows*cols*2 floats, row-major. */
FIMSAR_API const float* fimsar_matrix_data(const fimsar_matrix* m);
FIMSAR_API void fimsar_matrix_free(fimsar_matrix* m);

#ifdef __cplusplus
}
#endif

#endif /* FIMSAR_H */
