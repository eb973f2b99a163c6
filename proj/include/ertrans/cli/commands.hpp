#pragma once

#include "ertrans/cli/config.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace ertrans::cli {

// Each command writes its files under cfg.out_dir, prints a short summary to
// `os` and returns the paths it wrote. Errors propagate as ertrans::Error.

std::vector<std::filesystem::path> cmd_protocol_run(const RunConfig& cfg, std::ostream& os);
std::vector<std::filesystem::path> cmd_protocol_sweep(const RunConfig& cfg, std::ostream& os);

std::vector<std::filesystem::path> cmd_spin_levels(const RunConfig& cfg, std::ostream& os);
std::vector<std::filesystem::path> cmd_spin_transitions(const RunConfig& cfg, std::ostream& os);
std::vector<std::filesystem::path> cmd_spin_sweep(const RunConfig& cfg, std::ostream& os);
std::vector<std::filesystem::path> cmd_spin_zefoz(const RunConfig& cfg, std::ostream& os);

// fig2 | fig3a | fig3b | figA1 | figA2 | table1 | zefoz | tfinal | all
std::vector<std::filesystem::path> cmd_reproduce(const std::string& target, const RunConfig& cfg, std::ostream& os);

const std::vector<std::string>& reproduce_targets();

// Loads cfg.spin.params_file, with an actionable message when it is absent.
spin::SpinParams load_spin(const RunConfig& cfg, std::ostream& os);

}  // namespace ertrans::cli
