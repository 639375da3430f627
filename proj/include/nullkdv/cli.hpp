#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace nullkdv::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,      // bad command line or unparsable input text
  kDomain = 3,     // InvalidArgument, DomainError
  kSymbolic = 4,   // NotExact, NotGradient, JetTooShort, NotAdmissible
  kGeometry = 5,   // FrameDrift, NotPseudoArc, FlexPoint, NotNull
  kNumerical = 6,  // Instability, NearPole, PoleEncountered
  kIo = 7,
};

/// Runs one subcommand. args excludes the program name. Results go to
/// `out` unless an output file is named; errors are written to `err` as
/// {"error", "detail", "partial"}.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace nullkdv::cli
