#pragma once

#include <ostream>

namespace hinv {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitThreshold = 3 };

// Subcommands: synth, invert, bound, check-vandermonde, experiment.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hinv
