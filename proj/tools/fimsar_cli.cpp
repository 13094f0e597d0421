// Command-line front end over the fimsar C library.
#include "fimsar.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

const CLI::Validator kKeyValue(
    [](std::string& s) { return s.find('=') == std::string::npos ? std::string("expected key=value") : std::string(); },
    "KEY=VALUE");

struct Common {
    std::string cfg_path;
    std::string out;
    std::vector<std::string> overrides;
    int threads = -1;
};

void add_common(CLI::App* sub, Common& c, const char* out_help) {
    sub->add_option("config", c.cfg_path, "configuration file")->required();
    sub->add_option("-o,--out", c.out, out_help);
    sub->add_option("--set", c.overrides, "override a config key, key=value (repeatable)")->check(kKeyValue);
    sub->add_option("--threads", c.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
}

int report(fimsar_status s) {
    if (s == FIMSAR_OK) return 0;
    std::fprintf(stderr, "fimsar: %s\n", fimsar_last_error());
    return s == FIMSAR_E_CONFIG ? kExitConfig : kExitRuntime;
}

struct ConfigHandle {
    fimsar_config* p = nullptr;
    ~ConfigHandle() { fimsar_config_free(p); }
};

fimsar_status load(const Common& c, ConfigHandle& h) {
    fimsar_status s = fimsar_config_load(c.cfg_path.c_str(), &h.p);
    if (s != FIMSAR_OK) return s;
    for (const auto& kv : c.overrides) {
        auto eq = kv.find('=');
        s = fimsar_config_set(h.p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
        if (s != FIMSAR_OK) return s;
    }
    if (c.threads >= 0) s = fimsar_config_set(h.p, "run.threads", std::to_string(c.threads).c_str());
    return s;
}

std::string out_dir(const Common& c, const ConfigHandle& h) {
    return c.out.empty() ? std::string(fimsar_config_output_dir(h.p)) : c.out;
}

std::string out_file(const Common& c, const ConfigHandle& h, const char* name) {
    if (!c.out.empty()) return c.out;
    std::string dir = fimsar_config_output_dir(h.p);
    return dir.empty() ? name : dir + "/" + name;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FIM-LFM waveform, SAR imaging and communication-link tools"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fimsar_version());

    Common wf, amb, sim, foc, met, ber;

    auto* c_wf = app.add_subcommand("waveform", "synthesize one pulse train and its spectrogram");
    add_common(c_wf, wf, "output directory");

    auto* c_amb = app.add_subcommand("ambiguity", "ambiguity surface or principal cuts");
    add_common(c_amb, amb, "output directory");
    bool closed_form = false, numeric = false;
    std::string cut;
    auto* o_cf = c_amb->add_flag("--closed-form", closed_form, "use the analytic expressions");
    c_amb->add_flag("--numeric", numeric, "correlate the synthesized pulse (default)")->excludes(o_cf);
    c_amb->add_option("--cut", cut, "principal cut instead of the full surface")
        ->check(CLI::IsMember({"tau0", "xi0"}));

    auto* c_sim = app.add_subcommand("sar-sim", "simulate the raw echo cube of the configured scene");
    add_common(c_sim, sim, "output directory");

    auto* c_foc = app.add_subcommand("sar-focus", "range-Doppler focusing of an echo cube");
    add_common(c_foc, foc, "output directory");
    bool skip_qam = false, skip_comp = false;
    std::string echo;
    c_foc->add_flag("--skip-qam-removal", skip_qam, "keep the QAM symbols on the echo");
    c_foc->add_flag("--skip-compensation", skip_comp, "compress against the nominal chirp only");
    c_foc->add_option("--echo", echo, "echo cube from sar-sim; simulated on the fly when omitted");

    auto* c_met = app.add_subcommand("metrics", "point-target quality of a focused image");
    std::string image;
    c_met->add_option("image", image, "focused image (.cfm)")->required();
    c_met->add_option("--targets", met.cfg_path, "configuration holding the target list")->required();
    c_met->add_option("-o,--out", met.out, "CSV output path");
    c_met->add_option("--set", met.overrides, "override a config key, key=value (repeatable)")->check(kKeyValue);
    c_met->add_option("--threads", met.threads, "worker threads")->check(CLI::NonNegativeNumber);

    auto* c_ber = app.add_subcommand("comm-ber", "Monte Carlo bit error rate over an SNR sweep");
    add_common(c_ber, ber, "CSV output path");
    std::vector<double> snr;
    std::uint64_t trials = 0;
    std::string engine;
    c_ber->add_option("--snr", snr, "SNR points in dB, comma separated")->delimiter(',');
    c_ber->add_option("--trials", trials, "frames per SNR point")->check(CLI::PositiveNumber);
    c_ber->add_option("--engine", engine, "waveform or correlator; default from ber.engine")->check(CLI::IsMember({"waveform", "correlator"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "fimsar: %s\n", e.what());
        return kExitConfig;
    }

    ConfigHandle h;
    fimsar_status s = FIMSAR_OK;
    if (c_wf->parsed()) {
        if ((s = load(wf, h)) == FIMSAR_OK) s = fimsar_run_waveform(h.p, out_dir(wf, h).c_str());
    } else if (c_amb->parsed()) {
        if ((s = load(amb, h)) == FIMSAR_OK) {
            fimsar_ambiguity_cut which = cut == "tau0" ? FIMSAR_CUT_TAU0 : cut == "xi0" ? FIMSAR_CUT_XI0 : FIMSAR_CUT_NONE;
            s = fimsar_run_ambiguity(h.p, out_dir(amb, h).c_str(),
                                     closed_form ? FIMSAR_AMBIGUITY_CLOSED_FORM : FIMSAR_AMBIGUITY_NUMERIC, which);
        }
    } else if (c_sim->parsed()) {
        if ((s = load(sim, h)) == FIMSAR_OK) s = fimsar_run_sar_sim(h.p, out_dir(sim, h).c_str());
    } else if (c_foc->parsed()) {
        if ((s = load(foc, h)) == FIMSAR_OK) {
            unsigned flags = (skip_qam ? FIMSAR_FOCUS_SKIP_QAM_REMOVAL : 0u) |
                             (skip_comp ? FIMSAR_FOCUS_SKIP_COMPENSATION : 0u);
            s = fimsar_run_sar_focus(h.p, echo.empty() ? nullptr : echo.c_str(), flags, out_dir(foc, h).c_str());
        }
    } else if (c_met->parsed()) {
        if ((s = load(met, h)) == FIMSAR_OK)
            s = fimsar_run_metrics(h.p, image.c_str(), out_file(met, h, "metrics.csv").c_str());
    } else if (c_ber->parsed()) {
        if ((s = load(ber, h)) == FIMSAR_OK)
            s = fimsar_run_comm_ber(h.p, snr.empty() ? nullptr : snr.data(), snr.size(), trials,
                                    engine == "correlator" ? FIMSAR_BER_CORRELATOR
                                    : engine == "waveform" ? FIMSAR_BER_WAVEFORM
                                                           : FIMSAR_BER_FROM_CONFIG,
                                    out_file(ber, h, "ber.csv").c_str());
    }
    return report(s);
}
