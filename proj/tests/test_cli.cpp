#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "qkdforge/cli.hpp"
#include "qkdforge/error.hpp"

using namespace qkdforge;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

json outputs(const Result& r) { return json::parse(r.out).at("outputs"); }

std::string temp_file(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p.string();
}

// Scoped QKDFORGE_SEED override.
struct SeedEnv {
  explicit SeedEnv(const char* v) { setenv("QKDFORGE_SEED", v, 1); }
  ~SeedEnv() { unsetenv("QKDFORGE_SEED"); }
};

}  // namespace

TEST_CASE("codes table hamming74 prints the 8-row table") {
  auto r = call({"codes", "table", "hamming74", "--t", "1"});
  REQUIRE(r.code == 0);
  auto entries = outputs(r).at("entries");
  REQUIRE(entries.size() == 8);
  std::map<std::string, std::string> got;
  for (const auto& e : entries) got[e.at("syndrome")] = e.at("error");
  CHECK(got["000"] == "0000000");
  CHECK(got["110"] == "1000000");
  CHECK(got["111"] == "0100000");
  CHECK(got["101"] == "0010000");
  CHECK(got["011"] == "0001000");
  CHECK(got["100"] == "0000100");
  CHECK(got["010"] == "0000010");
  CHECK(got["001"] == "0000001");

  auto csv = call({"--format", "csv", "codes", "table", "hamming74"});
  CHECK(csv.code == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 9);
  CHECK(csv.out.rfind("syndrome,error\n", 0) == 0);
}

TEST_CASE("usage errors exit 2") {
  auto empty = call({});
  CHECK(empty.code == cli::kExitUsage);
  CHECK(empty.out.empty());
  CHECK(empty.err.find("Usage") != std::string::npos);
  CHECK(call({"bogus"}).code == cli::kExitUsage);
  CHECK(call({"codes"}).code == cli::kExitUsage);
  CHECK(call({"codes", "table"}).code == cli::kExitUsage);
  CHECK(call({"--format", "xml", "codes", "show", "parity4"}).code == cli::kExitUsage);
  CHECK(call({"--format", "csv", "css", "build"}).code == cli::kExitUsage);
  CHECK(call({"bb84", "run", "--mode", "quantum"}).code == cli::kExitUsage);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("domain errors exit 1") {
  auto r = call({"codes", "show", "nosuch"});
  CHECK(r.code == cli::kExitDomain);
  CHECK(r.err.find("nosuch") != std::string::npos);
  CHECK(call({"codes", "decode", "hamming74", "101"}).code == cli::kExitDomain);
  CHECK(call({"bb84", "run", "--n", "0"}).code == cli::kExitDomain);
  CHECK(call({"bb84", "run", "--px", "2"}).code == cli::kExitDomain);
  CHECK(call({"css", "build", "--c1", "hamming74", "--c2", "hamming74"}).code ==
        cli::kExitDomain);
}

TEST_CASE("codes subcommands") {
  auto show = outputs(call({"codes", "show", "hamming74"}));
  CHECK(show.at("d") == 3);
  CHECK(show.at("codewords").size() == 16);

  auto dec = outputs(call({"codes", "decode", "hamming74", "1011110"}));
  CHECK(dec.at("word") == "0011110");
  CHECK(dec.at("error") == "1000000");
  CHECK(dec.at("status") == "ok");

  auto cos = outputs(call({"codes", "cosets", "parity4", "dual"}));
  CHECK(cos.at("cosets").size() == 4);

  auto file = temp_file("qkdforge_rep3.txt", "111\n");
  auto rep = outputs(call({"codes", "show", file}));
  CHECK(rep.at("n") == 3);
  CHECK(rep.at("k") == 1);
}

TEST_CASE("load_code") {
  auto h = cli::load_code("hamming74");
  CHECK(cli::load_code("dual", h).k() == 3);
  CHECK_THROWS_AS(cli::load_code("dual"), DomainError);
  CHECK_THROWS_AS(cli::load_code("/nonexistent/code.txt"), DomainError);
}

TEST_CASE("qec demos") {
  auto bf = outputs(call({"qec", "bitflip", "--qubit", "2"}));
  CHECK(bf.at("syndrome").at("outcome") == 2);
  CHECK(bf.at("correction") == "X2");
  CHECK(bf.at("fidelity").get<double>() == doctest::Approx(1));

  auto pf = outputs(call({"qec", "phaseflip", "--qubit", "3"}));
  CHECK(pf.at("syndrome").at("outcome") == 3);
  CHECK(pf.at("fidelity").get<double>() == doctest::Approx(1));

  auto sh = outputs(call({"--seed", "4", "qec", "shor"}));
  CHECK(sh.at("fidelity").get<double>() == doctest::Approx(1));
  auto y = outputs(call({"qec", "shor", "--pauli", "Y", "--qubit", "5"}));
  CHECK(y.at("bitSyndromes").at(1).at("outcome") == 2);
  CHECK(y.at("phaseSyndrome").at("outcome") == 2);
}

TEST_CASE("css subcommands") {
  auto b = outputs(call({"css", "build"}));
  CHECK(b.at("k") == 1);
  CHECK(b.at("H2").size() == 3);
  CHECK(b.at("bitTable").size() == 8);

  auto enc = outputs(call({"css", "encode", "--c1", "parity4", "--v", "0110"}));
  CHECK(enc.at("amplitudes").size() == 2);

  auto inj = outputs(call({"css", "inject", "--e1", "0000100"}));
  CHECK(inj.at("amplitudes").size() == 8);

  for (const char* method : {"x", "hadamard"}) {
    auto c = outputs(call({"css", "correct", "--v", "0001011", "--e1", "0000010", "--e2",
                           "0000010", "--method", method}));
    CHECK(c.at("bitSyndrome") == "010");
    CHECK(c.at("phaseSyndrome") == "010");
    CHECK(c.at("fidelity").get<double>() == doctest::Approx(1));
    CHECK(c.at("key") == "1");
  }

  auto v = outputs(call({"css", "verify", "--c1", "parity4", "--xs", "0000,0001", "--zs",
                         "0000,0001"}));
  CHECK(v.at("states") == 16);
  CHECK(v.at("ok") == true);
  // Complete tables give coset leaders for every x and z.
  auto full = call({"css", "verify"});
  CHECK(full.code == 0);
  CHECK(outputs(full).at("states") == 128);
  CHECK(outputs(full).at("ok") == true);
  // parity4 at t = 0 has one-entry tables.
  CHECK(call({"css", "verify", "--c1", "parity4"}).code == cli::kExitUsage);
}

TEST_CASE("distill subcommand") {
  auto d = outputs(call({"--seed", "3", "distill", "--e1", "0010000", "--e2", "0000001"}));
  CHECK(d.at("keysMatch") == true);
  CHECK(d.at("bobBitCorrection") == "0010000");
  CHECK(d.at("bobPhaseCorrection") == "0000001");
}

TEST_CASE("bb84 run: the seed-7 example and a completing seed") {
  // Seed 7 runs out of sifted bits under the fixed draw order; the abort is
  // reported, not an error.
  auto r7 = call({"bb84", "run", "--mode", "shor-preskill", "--c1", "hamming74", "--seed", "7"});
  REQUIRE(r7.code == 0);
  auto t7 = outputs(r7);
  CHECK(t7.at("aborted") == true);
  CHECK(t7.at("key").is_null());

  auto r1 = call({"bb84", "run", "--mode", "shor-preskill", "--c1", "hamming74", "--seed", "1"});
  REQUIRE(r1.code == 0);
  auto t1 = outputs(r1);
  CHECK(t1.at("aborted") == false);
  CHECK(t1.at("key").get<std::string>().size() == 1);
  CHECK(t1.at("keysMatch") == true);
  for (const char* field : {"d", "b", "bobBases", "sifted", "checkIdx", "mismatches",
                            "aborted", "xMinusU", "uHat", "key"}) {
    CHECK_MESSAGE(t1.contains(field), field);
  }
  auto report = json::parse(r1.out);
  for (const char* field : {"command", "config", "seed", "outputs", "timing"}) {
    CHECK_MESSAGE(report.contains(field), field);
  }
  CHECK(report.at("timing").is_null());
  CHECK(report.at("seed") == 1);
}

TEST_CASE("bb84 sweep defaults to CSV") {
  auto s = call({"bb84", "sweep", "--count", "4", "--seed", "2"});
  REQUIRE(s.code == 0);
  CHECK(s.out.rfind("seed,qber,sifted_len,aborted,key,keys_match\n", 0) == 0);
  CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 5);
  auto j = call({"--format", "json", "bb84", "sweep", "--count", "4", "--seed", "2"});
  CHECK(outputs(j).at("rows").size() == 4);
}

TEST_CASE("property: echoed config reproduces the outputs") {
  const std::vector<std::string> args = {"--seed", "11", "bb84", "run", "--n", "12", "--eve",
                                         "intercept", "--pz", "0.1"};
  auto a = call(args), b = call(args);
  CHECK(a.out == b.out);
  auto cfg = json::parse(a.out).at("config");
  auto again = call({"--seed", std::to_string(cfg.at("seed").get<std::uint64_t>()), "bb84",
                     "run", "--n", std::to_string(cfg.at("n").get<std::size_t>()), "--eve",
                     cfg.at("eve"), "--pz", "0.1"});
  CHECK(outputs(again) == outputs(a));

  CHECK(call({"--seed", "5", "distill"}).out == call({"--seed", "5", "distill"}).out);
  CHECK(call({"--seed", "5", "qec", "shor"}).out == call({"--seed", "5", "qec", "shor"}).out);
}

TEST_CASE("QKDFORGE_SEED is the default seed") {
  CHECK(cli::default_seed() == 0);
  {
    SeedEnv env("42");
    CHECK(cli::default_seed() == 42);
    auto env_run = call({"bb84", "run", "--n", "10"});
    auto flag_run = call({"--seed", "42", "bb84", "run", "--n", "10"});
    CHECK(outputs(env_run) == outputs(flag_run));
  }
  {
    SeedEnv env("abc");
    CHECK_THROWS_AS(cli::default_seed(), DomainError);
    CHECK(call({"bb84", "run"}).code == cli::kExitDomain);
  }
}

TEST_CASE("timing is opt-in") {
  auto r = json::parse(call({"--timing", "codes", "show", "parity4"}).out);
  CHECK(r.at("timing").at("ms").get<double>() >= 0);
}

TEST_CASE("reproduce passes and is deterministic") {
  auto a = call({"reproduce"});
  CHECK(a.code == 0);
  auto rep = outputs(a);
  CHECK(rep.at("failed") == 0);
  CHECK(rep.at("checks").size() > 70);
  CHECK(call({"reproduce"}).out == a.out);

  auto direct = cli::reproduce_all();
  CHECK(direct.ok());
  CHECK(direct.to_json().dump() == cli::reproduce_all().to_json().dump());
}

TEST_CASE("reproduce names the checks broken by a corrupted check matrix") {
  // Rows swapped: still a valid check matrix, different syndromes.
  auto swapped = temp_file("qkdforge_h_swapped.txt", "1101010\n1110100\n0111001\n");
  auto r = call({"reproduce", "--hamming-h", swapped});
  CHECK(r.code == cli::kExitDomain);
  std::set<std::string> failed;
  const auto checks = outputs(r).at("checks");
  for (const auto& c : checks)
    if (!c.at("pass").get<bool>()) failed.insert(c.at("name").get<std::string>());
  CHECK(failed.count("hamming74 syndrome table"));
  CHECK(failed.count("hamming74 bit syndrome after X5"));
  CHECK(!failed.count("parity4 codewords"));

  // Not a check matrix at all: every hamming74 check fails, others pass.
  cli::ReproduceOptions opt;
  opt.hamming_h = BitMatrix::from_strings({"1111111", "1110100", "0111001"});
  auto bad = cli::reproduce_all(opt);
  CHECK(!bad.ok());
  for (const auto& c : bad.checks) {
    if (c.name.find("hamming74") != std::string::npos) CHECK_MESSAGE(!c.pass, c.name);
    if (c.name.find("parity4") != std::string::npos) CHECK_MESSAGE(c.pass, c.name);
  }
}
