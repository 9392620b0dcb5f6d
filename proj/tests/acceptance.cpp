// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "qkdforge/bb84.hpp"
#include "qkdforge/cli.hpp"
#include "qkdforge/distill.hpp"
#include "qkdforge/qec3.hpp"

using namespace qkdforge;

namespace {

BitVector bv(std::string_view s) { return BitVector::from_string(s); }

struct Verdict {
  std::vector<std::string> problems;
  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

bool within3(double freq, double p, std::size_t trials) {
  const double sigma = std::sqrt(p * (1 - p) / double(trials));
  return std::abs(freq - p) <= 3 * sigma + 1e-12;
}

std::vector<amp_t> ket_sum(std::initializer_list<const char*> words) {
  const auto n = std::string(*words.begin()).size();
  std::vector<amp_t> a(std::size_t{1} << n);
  for (auto w : words) a[std::stoul(w, nullptr, 2)] = 1 / std::sqrt(double(words.size()));
  return a;
}

double max_diff(const StateVector& s, const std::vector<amp_t>& want) {
  if (s.dim() != want.size()) return INFINITY;
  double m = 0;
  for (std::size_t i = 0; i < want.size(); ++i) m = std::max(m, std::abs(s[i] - want[i]));
  return m;
}

CssCode parity_css() {
  auto c = named_code("parity4");
  return css_build(c, dual(c), 0);
}
CssCode hamming_css() {
  auto c = named_code("hamming74");
  return css_build(c, dual(c), 1);
}

const char* kColumns[] = {"110", "111", "101", "011", "100", "010", "001"};

// ---------------------------------------------------------------- criteria

void classical_tables(Verdict& v) {
  auto ham = named_code("hamming74");
  v.expect(oracle::as_strings(ham.codewords()) ==
               std::set<std::string>{"0000000", "0001011", "0010101", "0011110",
                                     "0100111", "0101100", "0110010", "0111001",
                                     "1000110", "1001101", "1010011", "1011000",
                                     "1100001", "1101010", "1110100", "1111111"},
           "hamming74 codewords");
  v.expect(ham.min_weight().d == 3, "hamming74 d");
  auto t = build_syndrome_table(ham, 1);
  v.expect(t.size() == 8, "hamming74 table size");
  v.expect(t.lookup(bv("000")) == bv("0000000"), "zero syndrome");
  for (std::size_t i = 0; i < 7; ++i) {
    v.expect(t.lookup(bv(kColumns[i])) == BitVector::unit(7, i),
             std::string("syndrome ") + kColumns[i]);
  }
  auto par = named_code("parity4");
  v.expect(oracle::as_strings(par.codewords()) ==
               std::set<std::string>{"0000", "0011", "0101", "0110", "1001", "1010",
                                     "1100", "1111"},
           "parity4 codewords");
  v.expect(oracle::as_strings(dual(par).codewords()) ==
               std::set<std::string>{"0000", "1111"},
           "parity4 dual");
}

void decode_behaviors(Verdict& v) {
  auto ham = named_code("hamming74");
  auto t = build_syndrome_table(ham, 1);
  auto one = decode(ham, t, bv("1011110"));
  v.expect(one.word == bv("0011110") && one.status == DecodeStatus::ok, "single error");
  auto two = decode(ham, t, bv("1011111"));
  v.expect(two.word == bv("1111111") && two.status == DecodeStatus::ok, "two errors");
  const auto sent = bv("0011110"), three = bv("1100001");
  v.expect(three.weight() == 3 && sent + three == bv("1111111"), "three-error setup");
  v.expect(ham.syndrome(sent + three).is_zero(), "three errors undetected");
}

void coset_structure(Verdict& v) {
  auto c1 = named_code("parity4");
  auto c2 = dual(c1);
  auto cosets = quotient(c1, c2).cosets();
  std::set<std::set<std::string>> got;
  for (const auto& c : cosets) got.insert(oracle::as_strings(c));
  v.expect(got == std::set<std::set<std::string>>{{"0000", "1111"}, {"0011", "1100"},
                                                   {"0101", "1010"}, {"0110", "1001"}},
           "parity4 cosets");
  // Partition: every codeword in exactly one coset, same coset iff the
  // difference lies in C2.
  std::map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < cosets.size(); ++i) {
    for (const auto& w : cosets[i]) {
      v.expect(!owner.count(w.to_string()), "word in two cosets: " + w.to_string());
      owner[w.to_string()] = i;
    }
  }
  v.expect(owner.size() == (std::size_t{1} << c1.k()), "union size");
  const auto c2words = oracle::span(oracle::rows_of(c2.G()), 4);
  for (const auto& a : c1.codewords()) {
    for (const auto& b : c1.codewords()) {
      const bool same = owner[a.to_string()] == owner[b.to_string()];
      const bool diff_in_c2 =
          c2words.count(oracle::str(oracle::add(oracle::bits(a.to_string()),
                                                oracle::bits(b.to_string()))));
      v.expect(same == diff_in_c2, a.to_string() + " vs " + b.to_string());
    }
  }
}

void character_sums(Verdict& v) {
  oracle::Gen gen(2024);
  std::vector<std::pair<std::string, LinearCode>> codes = {
      {"parity4", named_code("parity4")}, {"hamming74", named_code("hamming74")}};
  for (int i = 0; i < 20; ++i) {
    const auto n = gen.range(2, 10);
    codes.emplace_back("random " + std::to_string(i), gen.code(n, gen.range(1, n - 1)));
  }
  for (const auto& [name, code] : codes) {
    const auto n = code.n();
    const auto words = oracle::span(oracle::rows_of(code.G()), n);
    const auto perp = oracle::kernel(oracle::rows_of(code.G()), n);
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
      const auto u = BitVector::from_index(n, i);
      long long brute = 0;
      const auto ub = oracle::bits(u.to_string());
      for (const auto& w : words) brute += oracle::dot(oracle::bits(w), ub) ? -1 : 1;
      const long long want = perp.count(u.to_string()) ? (1LL << code.k()) : 0;
      if (char_sum(code, u) != want || brute != want) {
        v.expect(false, name + " at u=" + u.to_string());
        break;
      }
    }
    // Sum over the whole message space {0,1}^k.
    const auto k = code.k();
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << k); ++w) {
      long long sum = 0;
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << k); ++m) {
        sum += __builtin_popcountll(m & w) % 2 ? -1 : 1;
      }
      if (sum != (w == 0 ? (1LL << k) : 0)) {
        v.expect(false, name + " full-space sum at w=" + std::to_string(w));
        break;
      }
    }
  }
}

void css_codewords(Verdict& v) {
  auto p = parity_css();
  const std::vector<std::pair<const char*, std::vector<amp_t>>> q = {
      {"0000", ket_sum({"0000", "1111"})},
      {"0011", ket_sum({"0011", "1100"})},
      {"0101", ket_sum({"0101", "1010"})},
      {"0110", ket_sum({"0110", "1001"})}};
  std::vector<StateVector> states;
  for (const auto& [word, want] : q) {
    states.push_back(css_codeword(p, bv(word)));
    v.expect(max_diff(states.back(), want) < 1e-9, std::string("parity4 v=") + word);
  }
  auto h = hamming_css();
  auto h1 = css_codeword(h, bv("0000000"));
  auto h2 = css_codeword(h, bv("0001011"));
  v.expect(max_diff(h1, ket_sum({"0000000", "1110100", "1101010", "0111001", "0011110",
                                 "1001101", "1010011", "0100111"})) < 1e-9,
           "hamming74 Q1");
  v.expect(max_diff(h2, ket_sum({"0001011", "1111111", "1100001", "0110010", "0010101",
                                 "1011000", "1000110", "0101100"})) < 1e-9,
           "hamming74 Q2");
  for (std::size_t a = 0; a < states.size(); ++a)
    for (std::size_t b = a + 1; b < states.size(); ++b)
      v.expect(std::abs(overlap(states[a], states[b])) < 1e-9, "parity4 overlap");
  v.expect(std::abs(overlap(h1, h2)) < 1e-9, "hamming74 overlap");
}

void css_tables(Verdict& v) {
  auto h = hamming_css();
  Rng rng(6);
  for (const char* word : {"0000000", "0001011"}) {
    auto clean = css_codeword(h, bv(word));
    for (std::size_t q = 1; q <= 7; ++q) {
      auto bit = css_bit_syndrome(h, apply_gate(clean, Gate::X, q), rng).syndrome;
      auto phase = css_phase_syndrome(h, apply_gate(clean, Gate::Z, q), rng).syndrome;
      v.expect(bit == bv(kColumns[q - 1]), "X" + std::to_string(q));
      v.expect(phase == bv(kColumns[q - 1]), "Z" + std::to_string(q));
      v.expect(h.bit_table().lookup(bit) == BitVector::unit(7, q - 1), "bit table");
      v.expect(h.phase_table().lookup(phase) == BitVector::unit(7, q - 1), "phase table");
    }
    for (std::size_t i = 0; i < 7; ++i) {
      for (std::size_t j = 0; j < 7; ++j) {
        auto bad = inject_errors(clean, BitVector::unit(7, i), BitVector::unit(7, j));
        for (auto m : {PhaseMethod::x_strings, PhaseMethod::hadamard_sandwich}) {
          auto rep = css_correct(h, bad, CssParams::zero(7), rng, m);
          v.expect(fidelity(rep.state, clean) > 1 - 1e-9,
                   "X" + std::to_string(i + 1) + " Z" + std::to_string(j + 1));
        }
      }
    }
  }
}

void basis_identities(Verdict& v) {
  std::vector<BitVector> xs{bv("0000"), bv("0001")};
  auto rep = verify_basis_identities(parity_css(), xs, xs);
  v.expect(rep.states == 16, "state count " + std::to_string(rep.states));
  v.expect(rep.orthonormal_error < 1e-9, "orthonormality " + num(rep.orthonormal_error));
  v.expect(rep.overlap_error < 1e-9, "overlap branches " + num(rep.overlap_error));
  v.expect(rep.completeness_error < 1e-9, "completeness " + num(rep.completeness_error));
  for (const auto& f : rep.failures) v.expect(false, f);
}

void single_error_demos(Verdict& v) {
  const int signs[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  auto clean = bitflip_encode(0.6, amp_t(0, 0.8));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    for (std::size_t q = 0; q <= 3; ++q) {
      auto s = q ? apply_gate(clean, Gate::X, q) : clean;
      auto [syn, fixed] = bitflip_syndrome_and_correct(s, rng);
      v.expect(syn.outcome == q && syn.first == signs[q][0] && syn.second == signs[q][1],
               "table row " + std::to_string(q));
      v.expect(fidelity(fixed, clean) > 1 - 1e-9, "table correction " + std::to_string(q));
    }
  }

  Rng rng(8);
  const std::size_t trials = 10000;
  for (double theta : {0.0, std::numbers::pi / 6, std::numbers::pi / 4, std::numbers::pi / 3}) {
    auto bad = apply_error(clean, ArbitraryError::rotation_x(theta, 3));
    std::size_t none = 0, flagged = 0;
    bool fixed_all = true;
    for (std::size_t i = 0; i < trials; ++i) {
      auto [syn, fixed] = bitflip_syndrome_and_correct(bad, rng);
      none += syn.outcome == 0;
      flagged += syn.outcome == 3;
      fixed_all = fixed_all && fidelity(fixed, clean) > 1 - 1e-9;
    }
    const double c2 = std::pow(std::cos(theta), 2);
    v.expect(none + flagged == trials, "unexpected outcome at theta " + num(theta));
    v.expect(within3(double(none) / trials, c2, trials),
             "theta " + num(theta) + ": no-flip rate " + num(double(none) / trials));
    v.expect(fixed_all, "fidelity at theta " + num(theta));
  }

  auto shor = shor_codeword(0.6, amp_t(0, 0.8));
  for (int i = 0; i < 100; ++i) {
    auto e = ArbitraryError::random(rng, 9);
    if (fidelity(shor_correct(apply_error(shor, e), rng).state, shor) < 1 - 1e-9) {
      v.expect(false, "Shor trial " + std::to_string(i));
    }
  }
}

void distillation(Verdict& v) {
  auto h = hamming_css();
  Rng rng(9);
  std::size_t agreed = 0;
  for (std::size_t i = 0; i <= 7; ++i) {
    for (std::size_t j = 0; j <= 7; ++j) {
      auto e1 = i ? BitVector::unit(7, i - 1) : BitVector::zeros(7);
      auto e2 = j ? BitVector::unit(7, j - 1) : BitVector::zeros(7);
      auto r = run_distillation(h, inject_bob_errors(create_epr(7), e1, e2), rng);
      agreed += r.keys_match && r.alice_key == r.bob_key;
    }
  }
  v.expect(agreed == 64, std::to_string(agreed) + " of 64 agree");
  auto p = parity_css();
  for (int i = 0; i < 20; ++i) {
    auto a = alice_measure(p, create_epr(4), rng);
    const double ov = std::abs(overlap(a.joint, paired_codeword_sum(p, a.x, a.z)));
    v.expect(ov >= 1 - 1e-9, "parity4 state overlap " + num(ov));
  }
}

void intercept_resend(Verdict& v) {
  SessionConfig cfg;
  cfg.n = 23600;  // raw length 100300
  cfg.seed = 10;
  cfg.eve = {EveStrategy::Kind::intercept_resend, BasisPolicy::uniform_random};
  const auto raw = cfg.raw_length();
  v.expect(raw >= 100000, "raw length " + std::to_string(raw));
  auto t = run_session(cfg);
  std::size_t errors = 0, learned = 0;
  for (auto i : t.sifted) {
    errors += t.d[i] != t.bob_results[i];
    learned += t.eve_learned[i];
  }
  const auto s = t.sifted.size();
  v.expect(within3(double(errors) / s, 0.25, s), "QBER " + num(double(errors) / s));
  v.expect(within3(double(s) / raw, 0.5, raw), "sifted fraction " + num(double(s) / raw));
  v.expect(within3(double(learned) / s, 0.5, s), "Eve learned " + num(double(learned) / s));
  v.expect(std::abs(eve_info_estimate(t) - double(learned) / s) < 1e-12, "estimate mismatch");
}

void shor_preskill(Verdict& v) {
  SessionConfig cfg;
  cfg.mode = Mode::shor_preskill;
  cfg.n = 7;
  cfg.code = std::make_shared<const CssCode>(hamming_css());
  // Sessions that run short of sifted bits abort before any key exists;
  // take the first seed that does not.
  cfg.seed = 1;
  while (run_session(cfg).aborted) ++cfg.seed;
  for (std::size_t q = 0; q <= 7; ++q) {
    cfg.key_block_errors = q ? BitVector::unit(7, q - 1) : BitVector::zeros(7);
    auto t = run_session(cfg);
    v.expect(!t.aborted && t.keys_match && t.alice_key && t.alice_key->size() == 1,
             "key-block error " + std::to_string(q));
  }
  const double b = bennett_bound(5);
  v.expect(std::abs(b - 0.0451) <= 1e-4, "bennett_bound(5) = " + num(b));
  v.expect(std::abs(b - std::pow(2.0, -5) / std::log(2.0)) < 1e-15, "closed form");
}

void determinism(Verdict& v) {
  SessionConfig a;
  a.n = 40;
  a.seed = 77;
  a.eve = {EveStrategy::Kind::intercept_resend, BasisPolicy::uniform_random};
  a.channel = {0.05, 0.02};
  SessionConfig b;
  b.mode = Mode::shor_preskill;
  b.code = std::make_shared<const CssCode>(hamming_css());
  b.seed = 5;
  b.channel = {0.1, 0.1};
  for (const auto& cfg : {a, b}) {
    v.expect(run_session(cfg).to_json().dump() == run_session(cfg).to_json().dump(),
             "session transcript");
  }
  auto cli_run = [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    cli::dispatch(args, out, err);
    return out.str();
  };
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"--seed", "9", "bb84", "run", "--eve", "intercept", "--n", "30"},
           {"--seed", "9", "bb84", "run", "--mode", "shor-preskill", "--px", "0.1"},
           {"--seed", "9", "bb84", "sweep", "--count", "20"},
           {"--seed", "9", "distill", "--e1", "0100000"},
           {"--seed", "9", "qec", "shor"},
           {"reproduce"}}) {
    std::string label;
    for (const auto& a : args) label += " " + a;
    v.expect(cli_run(args) == cli_run(args), "cli" + label);
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    void (*run)(Verdict&);
    double limit_s;  // 0: no time bound
  };
  const Criterion criteria[] = {
      {1, "classical code tables", classical_tables, 1},
      {2, "decode behaviors", decode_behaviors, 0},
      {3, "coset structure", coset_structure, 0},
      {4, "character-sum identities", character_sums, 0},
      {5, "CSS codewords", css_codewords, 0},
      {6, "CSS syndrome tables and combined errors", css_tables, 30},
      {7, "generalized-basis identities", basis_identities, 0},
      {8, "single-error demos", single_error_demos, 0},
      {9, "distillation", distillation, 120},
      {10, "BB84 intercept-resend statistics", intercept_resend, 0},
      {11, "Shor-Preskill end-to-end", shor_preskill, 0},
      {12, "determinism", determinism, 0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs > c.limit_s) v.expect(false, "took " + num(secs) + " s");
    const bool pass = v.problems.empty();
    failures += !pass;
    std::printf("criterion %2d %s  %s (%.2f s)", c.id, pass ? "PASS" : "FAIL", c.title, secs);
    for (std::size_t i = 0; i < v.problems.size() && i < 5; ++i) {
      std::printf("%s%s", i ? "; " : "  -- ", v.problems[i].c_str());
    }
    if (v.problems.size() > 5) std::printf("; +%zu more", v.problems.size() - 5);
    std::printf("\n");
  }
  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures ? 1 : 0;
}
