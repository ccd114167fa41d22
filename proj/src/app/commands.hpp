#pragma once

#include <string>

#include "app/config.hpp"
#include "app/output.hpp"

namespace boxanneal::app {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIO = 4;

/// Per-subcommand computations, kept separate from argument handling so
/// tests can call them directly.
Artifact potential_artifact(const ExperimentConfig& c);
Artifact density_artifact(const ExperimentConfig& c);
Artifact spectrum_artifact(const ExperimentConfig& c);
Artifact gaps_artifact(const ExperimentConfig& c);
Artifact anneal_artifact(const ExperimentConfig& c);
Artifact sweep_artifact(const ExperimentConfig& c);
Artifact oracle_artifact(const ExperimentConfig& c, const std::string& formula);
Artifact variational_artifact(const ExperimentConfig& c);

/// Names accepted by the oracle subcommand.
const std::vector<std::string>& oracle_formulas();

/// Parses argv, runs one subcommand and returns the exit code.
int run(int argc, char** argv);

}  // namespace boxanneal::app
