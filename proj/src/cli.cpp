#include "qkdforge/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qkdforge/bb84.hpp"
#include "qkdforge/distill.hpp"
#include "qkdforge/error.hpp"
#include "qkdforge/qec3.hpp"

namespace qkdforge::cli {

using nlohmann::json;

namespace {

// Raised for option combinations CLI11 cannot see.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> row_strings(const BitMatrix& m) {
  std::vector<std::string> out;
  for (const auto& r : m.row_vectors()) out.push_back(r.to_string());
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

json table_json(const SyndromeTable& t) {
  json rows = json::array();
  for (const auto& [s, e] : t.entries()) {
    rows.push_back({{"syndrome", s.to_string()}, {"error", e.to_string()}});
  }
  return rows;
}

std::size_t default_css_t(const LinearCode& c1, const LinearCode& c2) {
  return std::min(c1.min_weight().t, dual(c2).min_weight().t);
}

BitVector bits_or_zero(const std::string& s, std::size_t n) {
  if (s.empty()) return BitVector::zeros(n);
  auto v = BitVector::from_string(s);
  if (v.size() != n) {
    throw DimensionError("bit string '" + s + "' must have length " + std::to_string(n));
  }
  return v;
}

json syndrome3_json(const Syndrome3& s) {
  return {{"outcome", s.outcome}, {"signs", {s.first, s.second}}};
}

// Options shared by the css subcommands.
struct CssArgs {
  std::string c1 = "hamming74";
  std::string c2 = "dual";
  std::optional<std::size_t> t;
  std::string v, x, z, e1, e2;
  std::string method = "x";
  std::string xs, zs;
};

struct Bb84Args {
  std::string mode = "standard";
  std::optional<std::size_t> n;
  double delta = 0.25;
  std::string eve = "none";
  std::string eve_basis = "uniform";
  std::string alice_basis = "uniform";
  double px = 0, pz = 0;
  std::string c1 = "hamming74", c2 = "dual";
  std::optional<std::size_t> t;
  std::optional<double> abort_qber;
  std::string key_errors;
  std::size_t shed = 0;
  std::size_t count = 100;
};

BasisPolicy parse_policy(const std::string& s) {
  if (s == "uniform") return BasisPolicy::uniform_random;
  if (s == "z" || s == "Z") return BasisPolicy::always_z;
  if (s == "x" || s == "X") return BasisPolicy::always_x;
  throw UsageError("basis policy must be uniform, z or x");
}

SessionConfig session_config(const Bb84Args& a, std::uint64_t seed) {
  SessionConfig cfg;
  cfg.n = a.n.value_or(7);
  cfg.delta = a.delta;
  cfg.seed = seed;
  cfg.channel = {a.px, a.pz};
  cfg.t_abort = a.t;
  cfg.abort_qber = a.abort_qber;
  cfg.shed_bits = a.shed;
  cfg.alice_basis = parse_policy(a.alice_basis);
  if (a.eve == "intercept") {
    cfg.eve = {EveStrategy::Kind::intercept_resend, parse_policy(a.eve_basis)};
  } else if (a.eve != "none") {
    throw UsageError("--eve must be intercept or none");
  }
  if (a.mode == "standard") {
    cfg.mode = Mode::standard;
  } else if (a.mode == "shor-preskill") {
    cfg.mode = Mode::shor_preskill;
    auto c1 = load_code(a.c1);
    auto c2 = load_code(a.c2, c1);
    cfg.code = std::make_shared<const CssCode>(
        css_build(c1, c2, default_css_t(c1, c2)));
    if (!a.n) cfg.n = cfg.code->n();
  } else {
    throw UsageError("--mode must be standard or shor-preskill");
  }
  if (!a.key_errors.empty()) cfg.key_block_errors = BitVector::from_string(a.key_errors);
  return cfg;
}

json session_config_json(const Bb84Args& a, const SessionConfig& cfg) {
  json j = {{"mode", a.mode},       {"n", cfg.n},
            {"delta", cfg.delta},   {"eve", a.eve},
            {"eveBasis", a.eve_basis}, {"aliceBasis", a.alice_basis},
            {"px", cfg.channel.px}, {"pz", cfg.channel.pz},
            {"seed", cfg.seed},     {"shed", cfg.shed_bits}};
  j["t"] = cfg.t_abort ? json(*cfg.t_abort) : json(nullptr);
  j["abortQber"] = cfg.abort_qber ? json(*cfg.abort_qber) : json(nullptr);
  j["keyErrors"] = a.key_errors.empty() ? json(nullptr) : json(a.key_errors);
  if (cfg.mode == Mode::shor_preskill) {
    j["c1"] = a.c1;
    j["c2"] = a.c2;
  }
  return j;
}

}  // namespace

std::uint64_t default_seed() {
  const char* env = std::getenv("QKDFORGE_SEED");
  if (!env || !*env) return 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw DomainError(std::string("QKDFORGE_SEED is not an integer: ") + env);
  }
}

LinearCode load_code(const std::string& source,
                     const std::optional<LinearCode>& context) {
  if (source == "dual") {
    if (!context) throw DomainError("'dual' needs a first code");
    return dual(*context);
  }
  for (const auto& name : named_code_list()) {
    if (source == name) return named_code(source);
  }
  if (!std::filesystem::exists(source)) {
    throw DomainError("unknown code '" + source + "' (not a built-in name or a file)");
  }
  std::ifstream in(source);
  if (!in) throw DomainError("cannot read " + source);
  return code_from_generator(read_matrix(in));
}

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Quantum key distribution and CSS code workbench", "qkdforge"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "json";
  bool timing = false;
  std::optional<std::uint64_t> seed_opt;
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--timing", timing, "Add wall-clock time to the report");
  app.add_option("--seed", seed_opt, "RNG seed (default: QKDFORGE_SEED or 0)");

  std::function<json()> run;           // JSON-producing handler
  std::function<std::string()> run_csv;  // optional CSV form
  json config = json::object();
  bool domain_failure = false;         // report printed but exit nonzero

  auto seed = [&] { return seed_opt ? *seed_opt : default_seed(); };

  // ---------------------------------------------------------------- codes
  auto* codes = app.add_subcommand("codes", "Classical linear codes");
  codes->require_subcommand(1);
  std::string code_name, code_name2, word;
  std::optional<std::size_t> code_t;

  auto* show = codes->add_subcommand("show", "Generator, check matrix and codewords");
  show->add_option("code", code_name, "Name or matrix file")->required();
  show->callback([&] {
    config = {{"code", code_name}};
    run = [&] {
      auto c = load_code(code_name);
      auto d = c.min_weight();
      json words = json::array();
      for (const auto& w : c.codewords()) words.push_back(w.to_string());
      return json{{"n", c.n()}, {"k", c.k()}, {"d", d.d}, {"u", d.u}, {"t", d.t},
                  {"G", row_strings(c.G())}, {"H", row_strings(c.H())},
                  {"codewords", words}};
    };
    run_csv = [&] {
      std::string s = "codeword\n";
      for (const auto& w : load_code(code_name).codewords()) s += w.to_string() + "\n";
      return s;
    };
  });

  auto* table = codes->add_subcommand("table", "Syndrome table");
  table->add_option("code", code_name, "Name or matrix file")->required();
  table->add_option("--t", code_t, "Weight bound (default: the code's t)");
  table->callback([&] {
    run = [&] {
      auto c = load_code(code_name);
      const auto t = code_t ? *code_t : c.min_weight().t;
      config = {{"code", code_name}, {"t", t}};
      return json{{"t", t}, {"entries", table_json(build_syndrome_table(c, t))}};
    };
    run_csv = [&] {
      auto c = load_code(code_name);
      auto tbl = build_syndrome_table(c, code_t ? *code_t : c.min_weight().t);
      std::string s = "syndrome,error\n";
      for (const auto& [syn, e] : tbl.entries()) {
        s += syn.to_string() + "," + e.to_string() + "\n";
      }
      return s;
    };
  });

  auto* dec = codes->add_subcommand("decode", "Syndrome decoding of a received word");
  dec->add_option("code", code_name, "Name or matrix file")->required();
  dec->add_option("word", word, "Received word")->required();
  dec->add_option("--t", code_t, "Weight bound (default: the code's t)");
  dec->callback([&] {
    run = [&] {
      auto c = load_code(code_name);
      const auto t = code_t ? *code_t : c.min_weight().t;
      config = {{"code", code_name}, {"word", word}, {"t", t}};
      const auto r = BitVector::from_string(word);
      auto res = decode(c, build_syndrome_table(c, t), r);
      return json{{"received", word},
                  {"syndrome", c.syndrome(r).to_string()},
                  {"word", res.word.to_string()},
                  {"error", res.error.to_string()},
                  {"status", res.status == DecodeStatus::ok ? "ok"
                                                            : "detected_uncorrectable"}};
    };
  });

  auto* cos = codes->add_subcommand("cosets", "Cosets of C2 in C1 with their keys");
  cos->add_option("c1", code_name, "Outer code")->required();
  cos->add_option("c2", code_name2, "Inner code, or 'dual'")->required();
  auto coset_rows = [&] {
    auto c1 = load_code(code_name);
    auto q = quotient(c1, load_code(code_name2, c1));
    std::vector<std::pair<std::string, std::vector<std::string>>> rows;
    auto cs = q.cosets();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      std::vector<std::string> ws;
      for (const auto& w : cs[i]) ws.push_back(w.to_string());
      rows.emplace_back(BitVector::from_index(q.key_length(), i).to_string(), ws);
    }
    return rows;
  };
  cos->callback([&] {
    config = {{"c1", code_name}, {"c2", code_name2}};
    run = [&] {
      json arr = json::array();
      for (const auto& [key, ws] : coset_rows()) arr.push_back({{"key", key}, {"words", ws}});
      return json{{"cosets", arr}};
    };
    run_csv = [&] {
      std::string s = "key,word\n";
      for (const auto& [key, ws] : coset_rows())
        for (const auto& w : ws) s += key + "," + w + "\n";
      return s;
    };
  });

  // ------------------------------------------------------------------ qec
  auto* qec = app.add_subcommand("qec", "Three-qubit and Shor code demos");
  qec->require_subcommand(1);
  double amp_a = 0.6, amp_b = 0.8, theta = std::numbers::pi / 2;
  std::size_t qubit = 1;
  std::string pauli = "random";

  auto* bitflip = qec->add_subcommand("bitflip", "cos(theta) I + i sin(theta) X on one qubit");
  bitflip->add_option("--a", amp_a, "Amplitude of |0>");
  bitflip->add_option("--b", amp_b, "Amplitude of |1>");
  bitflip->add_option("--qubit", qubit, "Qubit 1..3, 0 for none")->check(CLI::Range(0, 3));
  bitflip->add_option("--theta", theta, "Rotation angle");
  bitflip->callback([&] {
    run = [&] {
      Rng rng(seed());
      config = {{"a", amp_a}, {"b", amp_b}, {"qubit", qubit}, {"theta", theta},
                {"seed", seed()}};
      const auto clean = bitflip_encode(amp_a, amp_b);
      auto s = qubit ? apply_error(clean, ArbitraryError::rotation_x(theta, qubit)) : clean;
      auto [syn, fixed] = bitflip_syndrome_and_correct(s, rng);
      return json{{"syndrome", syndrome3_json(syn)},
                  {"correction", syn.outcome ? "X" + std::to_string(syn.outcome) : "none"},
                  {"fidelity", fidelity(fixed, clean)}};
    };
  });

  auto* phaseflip = qec->add_subcommand("phaseflip", "Z error on one qubit");
  phaseflip->add_option("--a", amp_a, "Amplitude of |0>");
  phaseflip->add_option("--b", amp_b, "Amplitude of |1>");
  phaseflip->add_option("--qubit", qubit, "Qubit 1..3, 0 for none")->check(CLI::Range(0, 3));
  phaseflip->callback([&] {
    run = [&] {
      Rng rng(seed());
      config = {{"a", amp_a}, {"b", amp_b}, {"qubit", qubit}, {"seed", seed()}};
      const auto clean = phaseflip_encode(amp_a, amp_b);
      auto s = qubit ? apply_gate(clean, Gate::Z, qubit) : clean;
      auto [syn, fixed] = phaseflip_syndrome_and_correct(s, rng);
      return json{{"syndrome", syndrome3_json(syn)},
                  {"correction", syn.outcome ? "Z" + std::to_string(syn.outcome) : "none"},
                  {"fidelity", fidelity(fixed, clean)}};
    };
  });

  auto* shor = qec->add_subcommand("shor", "Nine-qubit code with one arbitrary error");
  shor->add_option("--a", amp_a, "Amplitude of |0>");
  shor->add_option("--b", amp_b, "Amplitude of |1>");
  shor->add_option("--qubit", qubit, "Qubit 1..9 (ignored for random)")->check(CLI::Range(1, 9));
  shor->add_option("--pauli", pauli, "X, Y, Z or random")
      ->check(CLI::IsMember({"X", "Y", "Z", "random"}));
  shor->callback([&] {
    run = [&] {
      Rng rng(seed());
      config = {{"a", amp_a}, {"b", amp_b}, {"pauli", pauli}, {"seed", seed()}};
      const auto clean = shor_codeword(amp_a, amp_b);
      StateVector s = clean;
      json error;
      if (pauli == "random") {
        auto e = ArbitraryError::random(rng, 9);
        s = apply_error(clean, e);
        error = {{"kind", "random"}, {"qubit", e.qubit}};
      } else {
        config["qubit"] = qubit;
        const Gate g = pauli == "X" ? Gate::X : pauli == "Y" ? Gate::Y : Gate::Z;
        s = apply_gate(clean, g, qubit);
        error = {{"kind", pauli}, {"qubit", qubit}};
      }
      auto rep = shor_correct(s, rng);
      json bits = json::array();
      for (const auto& b : rep.bit) bits.push_back(syndrome3_json(b));
      return json{{"error", error},
                  {"bitSyndromes", bits},
                  {"phaseSyndrome", syndrome3_json(rep.phase)},
                  {"fidelity", fidelity(rep.state, clean)}};
    };
  });

  // ------------------------------------------------------------------ css
  auto* css = app.add_subcommand("css", "CSS quantum codes");
  css->require_subcommand(1);
  CssArgs ca;
  auto css_common = [&](CLI::App* sub) {
    sub->add_option("--c1", ca.c1, "Outer code");
    sub->add_option("--c2", ca.c2, "Inner code, or 'dual'");
    sub->add_option("--t", ca.t, "Correction capacity (default: largest valid)");
  };
  auto build_css = [&] {
    auto c1 = load_code(ca.c1);
    auto c2 = load_code(ca.c2, c1);
    const auto t = ca.t ? *ca.t : default_css_t(c1, c2);
    return css_build(c1, c2, t);
  };
  auto css_config = [&](const CssCode& code) {
    return json{{"c1", ca.c1}, {"c2", ca.c2}, {"t", code.t()}};
  };

  auto* cbuild = css->add_subcommand("build", "Check matrices and syndrome tables");
  css_common(cbuild);
  cbuild->callback([&] {
    run = [&] {
      auto code = build_css();
      config = css_config(code);
      return json{{"n", code.n()}, {"k", code.k()}, {"t", code.t()},
                  {"H1", row_strings(code.H1())}, {"H2", row_strings(code.H2())},
                  {"bitTable", table_json(code.bit_table())},
                  {"phaseTable", table_json(code.phase_table())}};
    };
  });

  auto* cenc = css->add_subcommand("encode", "Codeword state for v in C1");
  css_common(cenc);
  cenc->add_option("--v", ca.v, "Codeword of C1 (default zero)");
  cenc->add_option("--x", ca.x, "Bit shift");
  cenc->add_option("--z", ca.z, "Phase pattern");
  cenc->callback([&] {
    run = [&] {
      auto code = build_css();
      const auto n = code.n();
      const auto v = bits_or_zero(ca.v, n);
      CssParams p{bits_or_zero(ca.x, n), bits_or_zero(ca.z, n)};
      config = css_config(code);
      config.update({{"v", v.to_string()}, {"x", p.x.to_string()}, {"z", p.z.to_string()}});
      return json{{"key", key_from_coset(code.quotient(), v).to_string()},
                  {"amplitudes", debug_dump(css_codeword(code, v, p))}};
    };
  });

  auto* cinj = css->add_subcommand("inject", "Codeword state after X and Z errors");
  css_common(cinj);
  cinj->add_option("--v", ca.v, "Codeword of C1 (default zero)");
  cinj->add_option("--e1", ca.e1, "X error pattern");
  cinj->add_option("--e2", ca.e2, "Z error pattern");
  cinj->callback([&] {
    run = [&] {
      auto code = build_css();
      const auto n = code.n();
      const auto v = bits_or_zero(ca.v, n);
      const auto e1 = bits_or_zero(ca.e1, n), e2 = bits_or_zero(ca.e2, n);
      config = css_config(code);
      config.update({{"v", v.to_string()}, {"e1", e1.to_string()}, {"e2", e2.to_string()}});
      return json{{"amplitudes", debug_dump(inject_errors(css_codeword(code, v), e1, e2))}};
    };
  });

  auto* ccor = css->add_subcommand("correct", "Inject errors, measure syndromes, correct");
  css_common(ccor);
  ccor->add_option("--v", ca.v, "Codeword of C1 (default zero)");
  ccor->add_option("--x", ca.x, "Bit shift");
  ccor->add_option("--z", ca.z, "Phase pattern");
  ccor->add_option("--e1", ca.e1, "X error pattern");
  ccor->add_option("--e2", ca.e2, "Z error pattern");
  ccor->add_option("--method", ca.method, "Phase correction: x or hadamard")
      ->check(CLI::IsMember({"x", "hadamard"}));
  ccor->callback([&] {
    run = [&] {
      auto code = build_css();
      const auto n = code.n();
      const auto v = bits_or_zero(ca.v, n);
      CssParams p{bits_or_zero(ca.x, n), bits_or_zero(ca.z, n)};
      const auto e1 = bits_or_zero(ca.e1, n), e2 = bits_or_zero(ca.e2, n);
      config = css_config(code);
      config.update({{"v", v.to_string()}, {"x", p.x.to_string()}, {"z", p.z.to_string()},
                     {"e1", e1.to_string()}, {"e2", e2.to_string()},
                     {"method", ca.method}, {"seed", seed()}});
      Rng rng(seed());
      const auto clean = css_codeword(code, v, p);
      auto rep = css_correct(code, inject_errors(clean, e1, e2), p, rng,
                             ca.method == "x" ? PhaseMethod::x_strings
                                              : PhaseMethod::hadamard_sandwich);
      json j{{"bitSyndrome", rep.bit_syndrome.to_string()},
             {"phaseSyndrome", rep.phase_syndrome.to_string()},
             {"bitCorrection", rep.bit_correction.to_string()},
             {"phaseCorrection", rep.phase_correction.to_string()},
             {"status", rep.status == DecodeStatus::ok ? "ok" : "detected_uncorrectable"},
             {"fidelity", fidelity(rep.state, clean)}};
      try {
        j["key"] = css_identify(code, rep.state, p).to_string();
      } catch (const DomainError&) {
        j["key"] = nullptr;
      }
      return j;
    };
  });

  auto* cver = css->add_subcommand("verify", "Basis identities of the CSS_{x,z} family");
  css_common(cver);
  cver->add_option("--xs", ca.xs, "Comma-separated x values (default: C1 coset leaders)");
  cver->add_option("--zs", ca.zs, "Comma-separated z values (default: C2 dual coset leaders)");
  cver->callback([&] {
    run = [&] {
      auto code = build_css();
      auto split = [](const std::string& s) {
        std::vector<BitVector> out;
        std::stringstream in(s);
        for (std::string item; std::getline(in, item, ',');) {
          out.push_back(BitVector::from_string(item));
        }
        return out;
      };
      auto leaders = [](const SyndromeTable& t, std::size_t want) {
        if (t.size() != want) {
          throw UsageError("syndrome table is not complete; pass --xs and --zs");
        }
        std::vector<BitVector> out;
        for (const auto& [s, e] : t.entries()) out.push_back(e);
        return out;
      };
      const auto n = code.n();
      auto xs = ca.xs.empty()
                    ? leaders(code.bit_table(), std::size_t{1} << (n - code.C1().k()))
                    : split(ca.xs);
      auto zs = ca.zs.empty() ? leaders(code.phase_table(), std::size_t{1} << code.C2().k())
                              : split(ca.zs);
      config = css_config(code);
      json jx = json::array(), jz = json::array();
      for (const auto& x : xs) jx.push_back(x.to_string());
      for (const auto& z : zs) jz.push_back(z.to_string());
      config.update({{"xs", jx}, {"zs", jz}});
      auto rep = verify_basis_identities(code, xs, zs);
      domain_failure = !rep.ok();
      return json{{"states", rep.states},
                  {"orthonormalError", rep.orthonormal_error},
                  {"overlapError", rep.overlap_error},
                  {"completenessError", rep.completeness_error},
                  {"pairSumError", rep.pair_sum_error < 0 ? json(nullptr)
                                                          : json(rep.pair_sum_error)},
                  {"failures", rep.failures},
                  {"ok", rep.ok()}};
    };
  });

  // -------------------------------------------------------------- distill
  auto* dist = app.add_subcommand("distill", "CSS entanglement distillation");
  std::string dcode = "hamming74", dcode2 = "dual", de1, de2;
  dist->add_option("--code", dcode, "Outer code C1");
  dist->add_option("--c2", dcode2, "Inner code, or 'dual'");
  dist->add_option("--e1", de1, "X errors on Bob's halves");
  dist->add_option("--e2", de2, "Z errors on Bob's halves");
  dist->callback([&] {
    run = [&] {
      auto c1 = load_code(dcode);
      auto c2 = load_code(dcode2, c1);
      auto code = css_build(c1, c2, default_css_t(c1, c2));
      const auto n = code.n();
      const auto e1 = bits_or_zero(de1, n), e2 = bits_or_zero(de2, n);
      config = {{"code", dcode}, {"c2", dcode2}, {"e1", e1.to_string()},
                {"e2", e2.to_string()}, {"seed", seed()}};
      Rng rng(seed());
      auto r = run_distillation(code, inject_bob_errors(create_epr(n), e1, e2), rng);
      return json{{"aliceSx", r.alice_sx.to_string()},
                  {"aliceSz", r.alice_sz.to_string()},
                  {"x", r.x.to_string()},
                  {"z", r.z.to_string()},
                  {"bobSx", r.bob_sx.to_string()},
                  {"bobSz", r.bob_sz.to_string()},
                  {"bobBitCorrection", r.bob_bit_correction.to_string()},
                  {"bobPhaseCorrection", r.bob_phase_correction.to_string()},
                  {"aliceString", r.alice_string.to_string()},
                  {"bobString", r.bob_string.to_string()},
                  {"aliceKey", r.alice_key.to_string()},
                  {"bobKey", r.bob_key.to_string()},
                  {"keysMatch", r.keys_match}};
    };
  });

  // ----------------------------------------------------------------- bb84
  auto* bb = app.add_subcommand("bb84", "BB84 sessions");
  bb->require_subcommand(1);
  Bb84Args ba;
  auto bb_common = [&](CLI::App* sub) {
    sub->add_option("--mode", ba.mode, "standard or shor-preskill")
        ->check(CLI::IsMember({"standard", "shor-preskill"}));
    sub->add_option("--n", ba.n, "Block size (default 7, or the code length)");
    sub->add_option("--delta", ba.delta, "Slack fraction");
    sub->add_option("--eve", ba.eve, "intercept or none")
        ->check(CLI::IsMember({"intercept", "none"}));
    sub->add_option("--eve-basis", ba.eve_basis, "uniform, z or x");
    sub->add_option("--alice-basis", ba.alice_basis, "uniform, z or x");
    sub->add_option("--px", ba.px, "X error probability per qubit");
    sub->add_option("--pz", ba.pz, "Z error probability per qubit");
    sub->add_option("--c1", ba.c1, "Outer code (shor-preskill)");
    sub->add_option("--c2", ba.c2, "Inner code or 'dual' (shor-preskill)");
    sub->add_option("--t", ba.t, "Check-bit mismatch limit");
    sub->add_option("--abort-qber", ba.abort_qber, "Standard-mode error-rate limit");
    sub->add_option("--key-errors", ba.key_errors, "XOR pattern on Bob's key block");
    sub->add_option("--shed", ba.shed, "Extra bits shed in privacy amplification");
  };

  auto* brun = bb->add_subcommand("run", "One session; transcript as JSON");
  bb_common(brun);
  brun->callback([&] {
    run = [&] {
      auto cfg = session_config(ba, seed());
      config = session_config_json(ba, cfg);
      return run_session(cfg).to_json();
    };
    run_csv = [&] {
      auto cfg = session_config(ba, seed());
      return sweep_csv(sweep(cfg, {cfg.seed}));
    };
  });

  auto* bsweep = bb->add_subcommand("sweep", "Many sessions with derived seeds; CSV");
  bb_common(bsweep);
  bsweep->add_option("--count", ba.count, "Number of sessions");
  auto sweep_rows = [&] {
    auto cfg = session_config(ba, seed());
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < ba.count; ++i) seeds.push_back(Rng::derive(cfg.seed, i));
    config = session_config_json(ba, cfg);
    config["count"] = ba.count;
    return sweep(cfg, seeds);
  };
  bsweep->callback([&] {
    run = [&] {
      json rows = json::array();
      for (const auto& r : sweep_rows()) {
        rows.push_back({{"seed", r.seed}, {"qber", r.qber}, {"sifted_len", r.sifted_len},
                        {"aborted", r.aborted}, {"key", r.key},
                        {"keys_match", r.keys_match}});
      }
      return json{{"rows", rows}};
    };
    run_csv = [&] { return sweep_csv(sweep_rows()); };
  });

  // ------------------------------------------------------------ reproduce
  auto* rep = app.add_subcommand("reproduce", "Check every worked example");
  std::string hamming_h_file;
  rep->add_option("--hamming-h", hamming_h_file, "Replacement hamming74 check matrix");
  auto reproduce_report = [&] {
    ReproduceOptions opt;
    opt.seed = seed_opt ? *seed_opt : (std::getenv("QKDFORGE_SEED") ? default_seed() : 1);
    if (!hamming_h_file.empty()) {
      std::ifstream in(hamming_h_file);
      if (!in) throw DomainError("cannot read " + hamming_h_file);
      opt.hamming_h = read_matrix(in);
    }
    config = {{"seed", opt.seed}};
    if (!hamming_h_file.empty()) config["hammingH"] = hamming_h_file;
    auto r = reproduce_all(opt);
    domain_failure = !r.ok();
    return r;
  };
  rep->callback([&] {
    run = [&] { return reproduce_report().to_json(); };
    run_csv = [&] {
      std::string s = "name,pass,detail\n";
      for (const auto& c : reproduce_report().checks) {
        s += csv_escape(c.name) + "," + (c.pass ? "true" : "false") + "," +
             csv_escape(c.detail) + "\n";
      }
      return s;
    };
  });

  if (args.empty()) {
    err << app.help();
    return kExitUsage;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  // bb84 sweep defaults to CSV unless --format was given.
  const bool csv = format == "csv" ||
                   (app.count("--format") == 0 && bb->got_subcommand(bsweep));
  try {
    const auto start = std::chrono::steady_clock::now();
    if (csv) {
      if (!run_csv) throw UsageError("CSV output is not available for this command");
      out << run_csv();
    } else {
      json outputs = run();
      json report{{"command", args},
                  {"config", config},
                  {"seed", config.contains("seed") ? config["seed"] : json(nullptr)},
                  {"outputs", outputs},
                  {"timing", nullptr}};
      if (timing) {
        const auto ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        report["timing"] = {{"ms", ms}};
      }
      out << report.dump(2) << '\n';
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return domain_failure ? kExitDomain : kExitOk;
}

}  // namespace qkdforge::cli
