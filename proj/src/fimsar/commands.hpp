#pragma once

#include "fimsar/config.hpp"
#include "fimsar/echo.hpp"
#include "fimsar/imaging.hpp"

#include <string>

namespace fimsar {

enum class AmbiguityMethod { Numeric, ClosedForm };
enum class AmbiguityCut { None, Tau0, Xi0 };

// Each command writes its files into the given location and returns their paths. If it
// fails, files it already wrote are removed before the error propagates.
std::vector<std::string> cmd_waveform(const RunConfig& cfg, const std::string& out_dir);
std::vector<std::string> cmd_ambiguity(const RunConfig& cfg, const std::string& out_dir, AmbiguityMethod method,
                                       AmbiguityCut cut);
std::vector<std::string> cmd_sar_sim(const RunConfig& cfg, const std::string& out_dir);
/** Focuses `echo_path` if given, otherwise simulates the configured scene first. */
std::vector<std::string> cmd_sar_focus(const RunConfig& cfg, const std::string& echo_path, const std::string& out_dir);
std::vector<std::string> cmd_metrics(const RunConfig& cfg, const std::string& image_path, const std::string& out_csv);
std::vector<std::string> cmd_comm_ber(const RunConfig& cfg, const std::string& out_csv);

// Serialization of cubes and images with their sidecars (<path>.meta, and <path>.frame.csv for cubes).
std::vector<std::string> save_echo(const std::string& path, const EchoCube& cube);
EchoCube load_echo(const std::string& path);
std::vector<std::string> save_image(const std::string& path, const SarImage& img);
SarImage load_image(const std::string& path);

}  // namespace fimsar
