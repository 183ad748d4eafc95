#include "enverify/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "enverify/compare.hpp"

namespace enverify {

namespace {

std::optional<std::string> readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::string renderReport(const Report& rep, const std::string& format) {
  if (format == "summary") return renderSummaryJson(rep);
  if (format == "pragmas") return renderAnnotatedSpec(rep);
  return renderAnnotatedSpec(rep) + "\n" + renderSummaryJson(rep);
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"energy interval verifier for Horn-clause blocks"};
  app.add_option("--program", cfg.programPath, "Horn-clause program (.hcir)")
      ->required();
  app.add_option("--model", cfg.modelPath, "energy model (JSON)")->required();
  app.add_option("--specs", cfg.specsPath, "assertions to verify (.spec)")
      ->required();
  app.add_option("--signatures", cfg.signaturesPath,
                 "types, modes, and size metrics (.sig)")
      ->required();
  app.add_option("--out", cfg.outPath, "write the report here (default: stdout)");
  app.add_option("--format", cfg.format, "pragmas | summary | both")
      ->check(CLI::IsMember({"pragmas", "summary", "both"}));
  app.add_option("--taylor-order", cfg.taylorOrder,
                 "series order seeding the root scan (default 8)")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-sample", cfg.maxSample,
                 "integer points sampled per decided region (default 10000)")
      ->check(CLI::PositiveNumber);
  app.add_option("--exit-on-check", cfg.exitOnCheck,
                 "exit code when undecided assertions remain (default 2)");

  std::vector<const char*> argv;
  argv.push_back("enverify");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitAllChecked;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  auto programText = readFile(cfg.programPath);
  if (!programText) {
    err << "cannot read program file: " << cfg.programPath << "\n";
    return kExitUsage;
  }
  auto modelText = readFile(cfg.modelPath);
  if (!modelText) {
    err << "cannot read model file: " << cfg.modelPath << "\n";
    return kExitUsage;
  }
  auto specsText = readFile(cfg.specsPath);
  if (!specsText) {
    err << "cannot read specs file: " << cfg.specsPath << "\n";
    return kExitUsage;
  }
  auto sigText = readFile(cfg.signaturesPath);
  if (!sigText) {
    err << "cannot read signatures file: " << cfg.signaturesPath << "\n";
    return kExitUsage;
  }

  Program program;
  try {
    program = parseProgram(*programText);
  } catch (const std::exception& e) {
    err << cfg.programPath << ": " << e.what() << "\n";
    return kExitProgram;
  }
  EnergyModel model;
  try {
    model = loadModel(*modelText);
  } catch (const std::exception& e) {
    err << cfg.modelPath << ": " << e.what() << "\n";
    return kExitModel;
  }
  SpecFile specs;
  try {
    specs = parseSpecFile(*specsText);
  } catch (const std::exception& e) {
    err << cfg.specsPath << ": " << e.what() << "\n";
    return kExitSpecs;
  }
  SignatureTable sigs;
  try {
    sigs = parseSignatures(*sigText);
  } catch (const std::exception& e) {
    err << cfg.signaturesPath << ": " << e.what() << "\n";
    return kExitSignatures;
  }

  setTaylorSeedOrder(cfg.taylorOrder);
  Report rep = verifyProgram(program, sigs, model, specs, cfg.maxSample);
  for (const std::string& w : program.warnings) err << "warning: " << w << "\n";
  for (const std::string& d : rep.diagnostics) err << "warning: " << d << "\n";

  std::string text = renderReport(rep, cfg.format);
  if (cfg.outPath.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.outPath, std::ios::binary);
    if (!f) {
      err << "cannot write output file: " << cfg.outPath << "\n";
      return kExitUsage;
    }
    f << text;
  }

  if (rep.falseCount > 0) return kExitFalse;
  if (rep.checkCount > 0) return cfg.exitOnCheck;
  return kExitAllChecked;
}

}  // namespace enverify
