#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "enverify/verifier.hpp"

namespace enverify {

struct RunConfig {
  std::string programPath;
  std::string modelPath;
  std::string specsPath;
  std::string signaturesPath;
  std::string outPath;          // empty: write to stdout
  std::string format = "pragmas";  // pragmas | summary | both
  unsigned taylorOrder = 8;
  // Closed-formula cutoff for analytic roots; isolation above it is exact
  // regardless, so this is informational.
  unsigned maxPolyDegree = 4;
  long maxSample = 10000;
  int exitOnCheck = 2;
};

// Exit codes: 0 all assertions checked; 1 some assertion is false;
// exitOnCheck (default 2) when undecided assertions remain; 3 usage or
// unreadable file; 4 program parse error; 5 model error; 6 specification
// error; 7 signature error.
constexpr int kExitAllChecked = 0;
constexpr int kExitFalse = 1;
constexpr int kExitCheck = 2;
constexpr int kExitUsage = 3;
constexpr int kExitProgram = 4;
constexpr int kExitModel = 5;
constexpr int kExitSpecs = 6;
constexpr int kExitSignatures = 7;

std::string renderReport(const Report& rep, const std::string& format);

// Full driver, testable in-process: parses flags, runs the pipeline,
// writes the report, returns the exit code. Diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace enverify
