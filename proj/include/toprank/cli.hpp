#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace toprank::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kDiverged = 3,
};

/// Runs one command line (without the program name). Subcommands: synth,
/// pairs, train, sweep-p, eval, plots.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace toprank::cli
