#include "fimsar.h"

#include "fimsar/ambiguity.hpp"
#include "fimsar/commands.hpp"
#include "fimsar/config.hpp"
#include "fimsar/io.hpp"

#include <new>
#include <string>

struct fimsar_config {
    fimsar::RunConfig cfg;
};

struct fimsar_matrix {
    std::vector<float> values;
    uint64_t rows = 0;
    uint64_t cols = 0;
};

namespace {

thread_local std::string g_last_error;

template <class F>
fimsar_status guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return FIMSAR_OK;
    } catch (const fimsar::ConfigError& e) {
        g_last_error = e.what();
        return FIMSAR_E_CONFIG;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return FIMSAR_E_RUNTIME;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FIMSAR_E_RUNTIME;
    }
}

fimsar_status argument_error(const char* what) {
    g_last_error = what;
    return FIMSAR_E_ARGUMENT;
}

}  // namespace

extern "C" {

const char* fimsar_version(void) { return "1.0.0"; }

const char* fimsar_last_error(void) { return g_last_error.c_str(); }

fimsar_status fimsar_config_load(const char* path, fimsar_config** out) {
    if (!path || !out) return argument_error("null argument");
    *out = nullptr;
    return guarded([&] { *out = new fimsar_config{fimsar::parse_config(path)}; });
}

fimsar_status fimsar_config_parse(const char* text, fimsar_config** out) {
    if (!text || !out) return argument_error("null argument");
    *out = nullptr;
    return guarded([&] { *out = new fimsar_config{fimsar::parse_config_text(text)}; });
}

fimsar_status fimsar_config_set(fimsar_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return argument_error("null argument");
    return guarded([&] {
        fimsar::RunConfig copy = cfg->cfg;
        fimsar::set_config_value(copy, key, value);
        cfg->cfg = std::move(copy);
    });
}

const char* fimsar_config_output_dir(const fimsar_config* cfg) { return cfg ? cfg->cfg.output_dir.c_str() : ""; }

fimsar_status fimsar_config_derived(const fimsar_config* cfg, fimsar_derived* out) {
    if (!cfg || !out) return argument_error("null argument");
    return guarded([&] {
        fimsar::DerivedParams p = fimsar::derive_params(cfg->cfg.waveform);
        auto b = fimsar::resolution_bounds(p);
        *out = fimsar_derived{p.Bs, p.Ts, p.Kc, p.fs, p.Ns, p.Npulse,
                              static_cast<uint32_t>(fimsar::bits_per_pulse(cfg->cfg.waveform)), b.first, b.second};
    });
}

void fimsar_config_free(fimsar_config* cfg) { delete cfg; }

fimsar_status fimsar_run_waveform(const fimsar_config* cfg, const char* out_dir) {
    if (!cfg || !out_dir) return argument_error("null argument");
    return guarded([&] { fimsar::cmd_waveform(cfg->cfg, out_dir); });
}

fimsar_status fimsar_run_ambiguity(const fimsar_config* cfg, const char* out_dir, fimsar_ambiguity_method method,
                                   fimsar_ambiguity_cut cut) {
    if (!cfg || !out_dir) return argument_error("null argument");
    if (method != FIMSAR_AMBIGUITY_NUMERIC && method != FIMSAR_AMBIGUITY_CLOSED_FORM)
        return argument_error("unknown ambiguity method");
    if (cut != FIMSAR_CUT_NONE && cut != FIMSAR_CUT_TAU0 && cut != FIMSAR_CUT_XI0) return argument_error("unknown cut");
    return guarded([&] {
        fimsar::cmd_ambiguity(cfg->cfg, out_dir,
                              method == FIMSAR_AMBIGUITY_NUMERIC ? fimsar::AmbiguityMethod::Numeric
                                                                 : fimsar::AmbiguityMethod::ClosedForm,
                              cut == FIMSAR_CUT_TAU0  ? fimsar::AmbiguityCut::Tau0
                              : cut == FIMSAR_CUT_XI0 ? fimsar::AmbiguityCut::Xi0
                                                      : fimsar::AmbiguityCut::None);
    });
}

fimsar_status fimsar_run_sar_sim(const fimsar_config* cfg, const char* out_dir) {
    if (!cfg || !out_dir) return argument_error("null argument");
    return guarded([&] { fimsar::cmd_sar_sim(cfg->cfg, out_dir); });
}

fimsar_status fimsar_run_sar_focus(const fimsar_config* cfg, const char* echo_path, unsigned flags, const char* out_dir) {
    if (!cfg || !out_dir) return argument_error("null argument");
    return guarded([&] {
        fimsar::RunConfig c = cfg->cfg;
        if (flags & FIMSAR_FOCUS_SKIP_QAM_REMOVAL) c.pipeline.skip_qam_removal = true;
        if (flags & FIMSAR_FOCUS_SKIP_COMPENSATION) c.pipeline.skip_compensation = true;
        fimsar::cmd_sar_focus(c, echo_path ? echo_path : "", out_dir);
    });
}

fimsar_status fimsar_run_metrics(const fimsar_config* cfg, const char* image_path, const char* out_csv) {
    if (!cfg || !image_path || !out_csv) return argument_error("null argument");
    return guarded([&] { fimsar::cmd_metrics(cfg->cfg, image_path, out_csv); });
}

fimsar_status fimsar_run_comm_ber(const fimsar_config* cfg, const double* snr_db, size_t n_snr, uint64_t trials,
                                  fimsar_ber_engine engine, const char* out_csv) {
    if (!cfg || !out_csv || (n_snr > 0 && !snr_db)) return argument_error("null argument");
    if (engine != FIMSAR_BER_WAVEFORM && engine != FIMSAR_BER_CORRELATOR && engine != FIMSAR_BER_FROM_CONFIG) return argument_error("unknown BER engine");
    return guarded([&] {
        fimsar::RunConfig c = cfg->cfg;
        if (n_snr > 0) c.ber.snr_db.assign(snr_db, snr_db + n_snr);
        if (trials > 0) c.ber.trials = trials;
        if (engine == FIMSAR_BER_WAVEFORM) c.ber.engine = fimsar::BerEngine::Waveform;
        if (engine == FIMSAR_BER_CORRELATOR) c.ber.engine = fimsar::BerEngine::Correlator;
        fimsar::validate(c);
        fimsar::cmd_comm_ber(c, out_csv);
    });
}

fimsar_status fimsar_matrix_read(const char* path, fimsar_matrix** out) {
    if (!path || !out) return argument_error("null argument");
    *out = nullptr;
    return guarded([&] {
        fimsar::CMatrix m = fimsar::io::read_matrix(path);
        auto* h = new fimsar_matrix;
        h->rows = m.rows;
        h->cols = m.cols;
        h->values.reserve(m.data.size() * 2);
        for (const auto& z : m.data) {
            h->values.push_back(static_cast<float>(z.real()));
            h->values.push_back(static_cast<float>(z.imag()));
        }
        *out = h;
    });
}

uint64_t fimsar_matrix_rows(const fimsar_matrix* m) { return m ? m->rows : 0; }
uint64_t fimsar_matrix_cols(const fimsar_matrix* m) { return m ? m->cols : 0; }
const float* fimsar_matrix_data(const fimsar_matrix* m) { return m ? m->values.data() : nullptr; }
void fimsar_matrix_free(fimsar_matrix* m) { delete m; }

}  // extern "C"
