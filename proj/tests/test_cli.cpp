#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "enverify/cli.hpp"
#include "enverify/compare.hpp"

using namespace enverify;

namespace {

std::string fx(const std::string& name) {
  return std::string(ENVERIFY_FIXTURE_DIR) + "/" + name;
}

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult runCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> biquadArgs() {
  return {"--program", fx("biquad.hcir"), "--model", fx("biquad_model.json"),
          "--specs", fx("biquad.spec"), "--signatures", fx("biquad.sig")};
}

std::string tempFile(const std::string& stem, const std::string& content) {
  std::filesystem::path p =
      std::filesystem::temp_directory_path() / ("enverify_" + stem);
  std::ofstream(p) << content;
  return p.string();
}

}  // namespace

TEST_CASE("cli: help text lists the flags and exits cleanly") {
  RunResult r = runCli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--program") != std::string::npos);
  CHECK(r.out.find("--specs") != std::string::npos);
}

TEST_CASE("cli: missing required flags is a usage error") {
  RunResult r = runCli({"--program", fx("biquad.hcir")});
  CHECK(r.code == kExitUsage);
  CHECK(!r.err.empty());
}

TEST_CASE("cli: biquad run annotates the spec and signals the false "
          "region") {
  RunResult r = runCli(biquadArgs());
  CHECK(r.code == kExitFalse);
  CHECK(r.out.find("#pragma checked biquadCascade(state,xn,N) : "
                   "(1 <= N && N <= 7) ==> (energy <= 125000000)") !=
        std::string::npos);
  CHECK(r.out.find("#pragma false biquadCascade(state,xn,N) : "
                   "(8 <= N) ==> (energy <= 125000000)") !=
        std::string::npos);
}

TEST_CASE("cli: fully verified program exits zero") {
  RunResult r = runCli({"--program", fx("fact.hcir"), "--model",
                        fx("empty_model.json"), "--specs", fx("fact.spec"),
                        "--signatures", fx("fact.sig")});
  CHECK(r.code == kExitAllChecked);
  CHECK(r.out.find(":- checked pred fact(N,F)") != std::string::npos);
}

TEST_CASE("cli: summary format emits machine-readable JSON") {
  auto args = biquadArgs();
  args.push_back("--format");
  args.push_back("summary");
  RunResult r = runCli(args);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("counts").at("checked") == 1);
  CHECK(doc.at("counts").at("false") == 1);

  args.back() = "both";
  RunResult rb = runCli(args);
  CHECK(rb.out.find("#pragma checked") != std::string::npos);
  CHECK(rb.out.find("\"all_verified\"") != std::string::npos);
}

TEST_CASE("cli: --out writes the report to a file") {
  std::filesystem::path p =
      std::filesystem::temp_directory_path() / "enverify_out.spec";
  std::filesystem::remove(p);
  auto args = biquadArgs();
  args.push_back("--out");
  args.push_back(p.string());
  RunResult r = runCli(args);
  CHECK(r.code == kExitFalse);
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  CHECK(os.str().find("#pragma checked biquadCascade") != std::string::npos);
  std::filesystem::remove(p);
}

TEST_CASE("cli: undecided regions drive the exit code through "
          "--exit-on-check") {
  std::vector<std::string> base = {
      "--program", fx("trust.hcir"), "--model", fx("empty_model.json"),
      "--specs", fx("trust_capped.spec"), "--signatures", fx("trust.sig")};
  RunResult dflt = runCli(base);
  CHECK(dflt.code == kExitCheck);

  auto relaxed = base;
  relaxed.push_back("--exit-on-check");
  relaxed.push_back("0");
  RunResult r = runCli(relaxed);
  CHECK(r.code == 0);
}

TEST_CASE("cli: each missing or malformed input names its own exit code") {
  auto args = biquadArgs();
  args[1] = fx("nosuch.hcir");
  CHECK(runCli(args).code == kExitUsage);

  args = biquadArgs();
  args[3] = tempFile("bad_model.json", "{ not json");
  CHECK(runCli(args).code == kExitModel);

  args = biquadArgs();
  args[5] = tempFile("bad.spec", "what is this\n");
  CHECK(runCli(args).code == kExitSpecs);

  args = biquadArgs();
  args[7] = tempFile("bad.sig", "pred broken(\n");
  CHECK(runCli(args).code == kExitSignatures);

  args = biquadArgs();
  args[1] = tempFile("bad.hcir", "p(X :- q.\n");
  CHECK(runCli(args).code == kExitProgram);
}

TEST_CASE("cli: taylor order flag is threaded into the comparison stage") {
  unsigned saved = taylorSeedOrder();
  auto args = biquadArgs();
  args.push_back("--taylor-order");
  args.push_back("10");
  RunResult r = runCli(args);
  CHECK(r.code == kExitFalse);
  CHECK(taylorSeedOrder() == 10);
  setTaylorSeedOrder(saved);

  auto bad = biquadArgs();
  bad.push_back("--taylor-order");
  bad.push_back("-3");
  CHECK(runCli(bad).code == kExitUsage);
}
