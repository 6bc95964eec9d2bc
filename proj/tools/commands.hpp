#pragma once

#include <iosfwd>

#include "config.hpp"

namespace implorenz::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point shared by the executable and the tests. Progress goes to
/// `out`; failures are reported as one JSON line on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

SectionChart chart_for(const ExperimentConfig& c);

void cmd_simulate(const ExperimentConfig& c, const std::filesystem::path& dir, std::ostream& log);
void cmd_section_map(const ExperimentConfig& c, const std::filesystem::path& dir, std::ostream& log);
void cmd_measure(const ExperimentConfig& c, const std::filesystem::path& dir, std::ostream& log);
void cmd_basins(const ExperimentConfig& c, const std::filesystem::path& dir, std::ostream& log);
void cmd_entropy(const ExperimentConfig& c, const std::filesystem::path& dir, std::ostream& log);
void cmd_stability_sweep(const ExperimentConfig& c, const std::filesystem::path& dir, std::ostream& log);
void cmd_check_conditions(const ExperimentConfig& c, const std::filesystem::path& dir, std::ostream& log);

}  // namespace implorenz::cli
