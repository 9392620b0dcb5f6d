#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "qkdforge/bb84.hpp"
#include "qkdforge/cli.hpp"
#include "qkdforge/distill.hpp"
#include "qkdforge/error.hpp"
#include "qkdforge/qec3.hpp"

namespace qkdforge::cli {

using nlohmann::json;

bool ReproduceReport::ok() const { return failed() == 0; }

std::size_t ReproduceReport::failed() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += !c.pass;
  return n;
}

json ReproduceReport::to_json() const {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  return {{"seed", seed}, {"passed", checks.size() - failed()},
          {"failed", failed()}, {"checks", arr}};
}

namespace {

BitVector bv(std::string_view s) { return BitVector::from_string(s); }

std::set<std::string> strings(const std::vector<BitVector>& v) {
  std::set<std::string> out;
  for (const auto& x : v) out.insert(x.to_string());
  return out;
}
std::set<std::string> strings(const std::set<BitVector>& v) {
  return strings(std::vector<BitVector>(v.begin(), v.end()));
}

// Equal-weight superposition of kets with optional signs.
StateVector kets(std::initializer_list<std::string_view> words,
                 std::initializer_list<double> signs = {}) {
  const auto n = words.begin()->size();
  std::vector<amp_t> a(std::size_t{1} << n);
  const double c = 1 / std::sqrt(double(words.size()));
  auto s = signs.begin();
  for (auto w : words) {
    a[bv(w).to_index()] += c * (signs.size() ? *s++ : 1.0);
  }
  return StateVector::from_amplitudes(std::move(a));
}

StateVector two_kets(std::string_view w0, amp_t a, std::string_view w1, amp_t b) {
  std::vector<amp_t> v(std::size_t{1} << w0.size());
  v[bv(w0).to_index()] += a;
  v[bv(w1).to_index()] += b;
  return StateVector::from_amplitudes(std::move(v));
}

double distance(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) return INFINITY;
  double m = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool same(const StateVector& a, const StateVector& b) { return distance(a, b) < 1e-9; }
bool same_ray(const StateVector& a, const StateVector& b) {
  return a.dim() == b.dim() && fidelity(a, b) > 1 - 1e-9;
}

bool within3(double freq, double p, std::size_t trials) {
  const double sigma = std::sqrt(p * (1 - p) / double(trials));
  return std::abs(freq - p) <= 3 * sigma + 1e-12;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

struct Expect {
  std::string detail;
  void operator()(bool cond, const std::string& what) {
    if (cond) return;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

class Runner {
 public:
  explicit Runner(std::uint64_t seed) { report_.seed = seed; }

  void check(std::string name, const std::function<void(Expect&, Rng&)>& body) {
    Rng rng(Rng::derive(report_.seed, report_.checks.size()));
    CheckResult r{std::move(name), false, ""};
    Expect e;
    try {
      body(e, rng);
      r.pass = e.detail.empty();
      r.detail = e.detail;
    } catch (const std::exception& ex) {
      r.detail = std::string("exception: ") + ex.what();
    }
    report_.checks.push_back(std::move(r));
  }

  ReproduceReport take() { return std::move(report_); }

 private:
  ReproduceReport report_;
};

const std::set<std::string> kParityWords = {"0000", "0011", "0101", "0110",
                                            "1001", "1010", "1100", "1111"};
const std::set<std::string> kHammingWords = {
    "0000000", "0001011", "0010101", "0011110", "0100111", "0101100",
    "0110010", "0111001", "1000110", "1001101", "1010011", "1011000",
    "1100001", "1101010", "1110100", "1111111"};
const std::set<std::string> kHammingDual = {"0000000", "1110100", "1101010", "0111001",
                                            "0011110", "1001101", "1010011", "0100111"};
const std::set<std::string> kHammingOther = {"0001011", "1111111", "1100001", "0110010",
                                             "0010101", "1011000", "1000110", "0101100"};
const char* kSyndromeColumns[] = {"110", "111", "101", "011", "100", "010", "001"};

}  // namespace

ReproduceReport reproduce_all(const ReproduceOptions& options) {
  Runner run(options.seed);

  auto parity = [] { return named_code("parity4"); };
  auto hamming = [&] {
    auto g = named_code("hamming74").G();
    return options.hamming_h ? code_from_generator(g, *options.hamming_h)
                             : code_from_generator(g);
  };
  auto parity_css = [&] { auto c = parity(); return css_build(c, dual(c), 0); };
  auto hamming_css = [&] { auto c = hamming(); return css_build(c, dual(c), 1); };

  // ----------------------------------------------------------- GF(2) basics
  run.check("vector sum 0101 + 0110", [](Expect& e, Rng&) {
    e(bv("0101") + bv("0110") == bv("0011"), "expected 0011");
  });
  run.check("received word 0011110 + 1000001", [](Expect& e, Rng&) {
    e(bv("0011110") + bv("1000001") == bv("1011111"), "expected 1011111");
  });
  run.check("dot product 1111 . 1010", [](Expect& e, Rng&) {
    e(!vec_dot(bv("1111"), bv("1010")), "expected 0");
  });
  run.check("parity4 encodes 011 as 0110", [&](Expect& e, Rng&) {
    e(mat_apply(parity().G(), bv("011"), Side::left) == bv("0110"), "wrong codeword");
  });
  run.check("parity check of 0111 is [1]", [](Expect& e, Rng&) {
    e(mat_apply(BitMatrix::from_strings({"1111"}), bv("0111"), Side::right) == bv("1"),
      "expected [1]");
  });
  run.check("hamming74 generator has rank 4", [&](Expect& e, Rng&) {
    e(rank(hamming().G()) == 4, "rank differs");
  });
  run.check("parity4 dual basis spans {0000, 1111}", [&](Expect& e, Rng&) {
    auto ns = nullspace_basis(parity().G());
    e(ns.size() == 1 && ns[0] == bv("1111"), "expected the single row 1111");
  });

  // ------------------------------------------------------------ code tables
  run.check("parity4 codewords", [&](Expect& e, Rng&) {
    e(strings(parity().codewords()) == kParityWords, "codeword list differs");
  });
  run.check("hamming74 codewords", [&](Expect& e, Rng&) {
    e(strings(hamming().codewords()) == kHammingWords, "codeword list differs");
  });
  run.check("rep3 codewords", [](Expect& e, Rng&) {
    e(strings(named_code("rep3").codewords()) == std::set<std::string>{"000", "111"},
      "expected {000, 111}");
  });
  run.check("parity4 encodes 011 via encode()", [&](Expect& e, Rng&) {
    e(parity().encode(bv("011")) == bv("0110"), "expected 0110");
  });
  run.check("hamming74 encodes 0011 as 0011110", [&](Expect& e, Rng&) {
    e(hamming().encode(bv("0011")) == bv("0011110"), "expected 0011110");
  });
  run.check("codeword membership", [&](Expect& e, Rng&) {
    e(!parity().contains(bv("0111")), "0111 accepted by parity4");
    e(hamming().contains(bv("1111111")), "1111111 rejected by hamming74");
  });
  run.check("parity4 distance", [&](Expect& e, Rng&) {
    auto d = parity().min_weight();
    e(d.d == 2 && d.u == 1 && d.t == 0, "expected d=2 u=1 t=0");
  });
  run.check("hamming74 distance", [&](Expect& e, Rng&) {
    auto d = hamming().min_weight();
    e(d.d == 3 && d.u == 2 && d.t == 1, "expected d=3 u=2 t=1");
  });
  run.check("rep3 distance", [](Expect& e, Rng&) {
    auto d = named_code("rep3").min_weight();
    e(d.d == 3 && d.t == 1, "expected d=3 t=1");
  });
  run.check("parity4 dual is {0000, 1111} and weakly self-dual", [&](Expect& e, Rng&) {
    auto c = parity();
    auto d = dual(c);
    e(strings(d.codewords()) == std::set<std::string>{"0000", "1111"}, "dual differs");
    e(is_subcode(d, c), "dual not contained in the code");
  });
  run.check("hamming74 dual has 8 words and is weakly self-dual", [&](Expect& e, Rng&) {
    auto c = hamming();
    auto d = dual(c);
    e(d.k() == 3 && strings(d.codewords()) == kHammingDual, "dual differs");
    e(is_subcode(d, c), "dual not contained in the code");
  });
  run.check("hamming74 syndrome of 1011110", [&](Expect& e, Rng&) {
    e(hamming().syndrome(bv("1011110")) == bv("110"), "expected 110");
  });
  run.check("hamming74 syndrome of 1011111", [&](Expect& e, Rng&) {
    e(hamming().syndrome(bv("1011111")) == bv("111"), "expected 111");
  });
  run.check("hamming74 syndrome table", [&](Expect& e, Rng&) {
    auto t = build_syndrome_table(hamming(), 1);
    e(t.size() == 8, "expected 8 entries");
    e(t.lookup(bv("000")) == bv("0000000"), "000 should map to no error");
    for (std::size_t i = 0; i < 7; ++i) {
      e(t.lookup(bv(kSyndromeColumns[i])) == BitVector::unit(7, i),
        std::string(kSyndromeColumns[i]) + " should map to bit " + std::to_string(i + 1));
    }
  });
  run.check("rep3 syndrome table", [](Expect& e, Rng&) {
    auto t = build_syndrome_table(named_code("rep3"), 1);
    e(t.size() == 4, "expected 4 entries");
    e(t.lookup(bv("00")) == bv("000") && t.lookup(bv("10")) == bv("100") &&
          t.lookup(bv("11")) == bv("010") && t.lookup(bv("01")) == bv("001"),
      "entries differ");
  });
  run.check("hamming74 corrects a single error", [&](Expect& e, Rng&) {
    auto c = hamming();
    auto r = decode(c, build_syndrome_table(c, 1), bv("1011110"));
    e(r.word == bv("0011110") && r.error == bv("1000000") &&
          r.status == DecodeStatus::ok,
      "expected 0011110 with error 1000000");
  });
  run.check("hamming74 miscorrects two errors", [&](Expect& e, Rng&) {
    auto c = hamming();
    auto r = decode(c, build_syndrome_table(c, 1), bv("1011111"));
    e(r.word == bv("1111111") && r.status == DecodeStatus::ok, "expected 1111111");
  });
  run.check("hamming74 misses three errors", [&](Expect& e, Rng&) {
    const auto sent = bv("0011110"), err = bv("1100001");
    e(err.weight() == 3 && sent + err == bv("1111111"), "setup");
    e(hamming().syndrome(sent + err).is_zero(), "expected zero syndrome");
  });

  // ----------------------------------------------------------------- cosets
  run.check("parity4 coset of 0111", [&](Expect& e, Rng&) {
    e(strings(coset(parity(), bv("0111"))) ==
          std::set<std::string>{"0111", "0100", "0010", "0001", "1110", "1101", "1011",
                                "1000"},
      "expected the 8 odd-parity words");
  });
  run.check("parity4 cosets of its dual", [&](Expect& e, Rng&) {
    auto c = parity();
    std::set<std::set<std::string>> got;
    for (const auto& s : quotient(c, dual(c)).cosets()) got.insert(strings(s));
    e(got == std::set<std::set<std::string>>{{"0000", "1111"}, {"0011", "1100"},
                                              {"0101", "1010"}, {"0110", "1001"}},
      "coset partition differs");
  });
  run.check("hamming74 cosets of its dual", [&](Expect& e, Rng&) {
    auto c = hamming();
    auto cs = quotient(c, dual(c)).cosets();
    e(cs.size() == 2, "expected 2 cosets");
    if (cs.size() == 2) {
      std::set<std::set<std::string>> got{strings(cs[0]), strings(cs[1])};
      e(got == std::set<std::set<std::string>>{kHammingDual, kHammingOther},
        "coset contents differ");
    }
  });
  run.check("hamming74 coset keys", [&](Expect& e, Rng&) {
    auto c = hamming();
    auto q = quotient(c, dual(c));
    for (const auto& w : kHammingDual) e(key_from_coset(q, bv(w)) == bv("0"), w + " not key 0");
    for (const auto& w : kHammingOther) e(key_from_coset(q, bv(w)) == bv("1"), w + " not key 1");
  });
  run.check("parity4 character sum at 1111", [&](Expect& e, Rng&) {
    e(char_sum(parity(), bv("1111")) == 8, "expected 8");
  });
  run.check("character sums vanish off the dual", [&](Expect& e, Rng&) {
    for (auto c : {parity(), hamming()}) {
      auto d = dual(c);
      const long long size = 1LL << c.k();
      for (std::uint64_t i = 0; i < (1ULL << c.n()); ++i) {
        auto u = BitVector::from_index(c.n(), i);
        const long long want = d.contains(u) ? size : 0;
        e(char_sum(c, u) == want, "sum at " + u.to_string());
      }
    }
  });

  // ---------------------------------------------------------------- qubits
  run.check("basis kets 00 and 11", [](Expect& e, Rng&) {
    auto a = basis_state(bv("00")), b = basis_state(bv("11"));
    e(std::abs(a[0] - amp_t(1)) < 1e-12 && std::abs(b[3] - amp_t(1)) < 1e-12,
      "wrong basis vector");
  });
  run.check("X on |0> and Z on |1>", [](Expect& e, Rng&) {
    e(same(apply_gate(basis_state(bv("0")), Gate::X, 1), basis_state(bv("1"))),
      "X|0> != |1>");
    e(same(apply_gate(basis_state(bv("1")), Gate::Z, 1),
           two_kets("0", 0, "1", -1.0)),
      "Z|1> != -|1>");
  });
  run.check("H Z H acts as X", [](Expect& e, Rng&) {
    for (auto w : {"0", "1"}) {
      auto s = basis_state(bv(w));
      s.gate(Gate::H, 1).gate(Gate::Z, 1).gate(Gate::H, 1);
      e(same(s, apply_gate(basis_state(bv(w)), Gate::X, 1)), std::string("on |") + w + ">");
    }
  });
  run.check("CNOT on |10> and |01>", [](Expect& e, Rng&) {
    e(same(apply_cnot(basis_state(bv("10")), 1, 2), basis_state(bv("11"))), "|10>");
    e(same(apply_cnot(basis_state(bv("01")), 1, 2), basis_state(bv("01"))), "|01>");
  });
  run.check("ZZII phase on |0010>", [](Expect& e, Rng&) {
    auto s = basis_state(bv("0010"));
    e(same(apply_pauli_string(s, PauliString::parse("ZZII")), s), "phase should be +1");
  });
  run.check("ZZZZ on (|1000> + |0111>)/sqrt2", [](Expect& e, Rng&) {
    auto s = kets({"1000", "0111"});
    e(std::abs(expectation(s, PauliString::parse("ZZZZ")) - amp_t(-1)) < 1e-9,
      "eigenvalue should be -1");
  });
  run.check("Hadamard of |000>", [](Expect& e, Rng&) {
    auto s = hadamard_all(basis_state(bv("000")));
    for (std::size_t i = 0; i < 8; ++i) {
      e(std::abs(s[i] - amp_t(1 / std::sqrt(8.0))) < 1e-12, "amplitude " + std::to_string(i));
    }
  });
  run.check("Hadamard of (|0000> - |1111>)/sqrt2", [](Expect& e, Rng&) {
    auto s = hadamard_all(kets({"0000", "1111"}, {1, -1}));
    for (std::size_t i = 0; i < 16; ++i) {
      const bool odd = BitVector::from_index(4, i).weight() % 2;
      e(std::abs(s[i] - amp_t(odd ? 1 / (2 * std::sqrt(2.0)) : 0)) < 1e-12,
        "amplitude " + std::to_string(i));
    }
  });

  const std::vector<BasisProjector> rep_projectors = {
      {{bv("000"), bv("111")}}, {{bv("100"), bv("011")}},
      {{bv("010"), bv("101")}}, {{bv("001"), bv("110")}}};
  run.check("projector P1 on a|100> + b|011>", [&](Expect& e, Rng& rng) {
    auto s = two_kets("100", 0.6, "011", 0.8);
    auto [rec, after] = measure_projective(s, rep_projectors, rng);
    e(rec.outcome == 1 && std::abs(rec.probability - 1) < 1e-9, "outcome should be P1");
    e(same(after, s), "state disturbed");
  });
  run.check("projector probabilities after a partial X rotation", [&](Expect& e, Rng&) {
    for (double theta : {0.0, std::numbers::pi / 6, std::numbers::pi / 4, std::numbers::pi / 3}) {
      auto s = apply_error(bitflip_encode(0.6, 0.8), ArbitraryError::rotation_x(theta, 3));
      const double c2 = std::pow(std::cos(theta), 2), s2 = std::pow(std::sin(theta), 2);
      const double p[4] = {projector_probability(s, rep_projectors[0]),
                           projector_probability(s, rep_projectors[1]),
                           projector_probability(s, rep_projectors[2]),
                           projector_probability(s, rep_projectors[3])};
      e(std::abs(p[0] - c2) < 1e-9 && std::abs(p[3] - s2) < 1e-9 && p[1] < 1e-9 &&
            p[2] < 1e-9,
        "theta=" + fmt(theta));
    }
  });
  run.check("EPR pair under parity projectors", [&](Expect& e, Rng& rng) {
    auto s = kets({"00", "11"});
    auto [rec, after] = measure_projective(
        s, {{{bv("00"), bv("11")}}, {{bv("01"), bv("10")}}}, rng);
    e(rec.outcome == 0 && std::abs(rec.probability - 1) < 1e-9, "even parity expected");
    e(same(after, s), "state disturbed");
  });
  run.check("Z1Z2 and Z2Z3 on a|010> + b|101>", [](Expect& e, Rng& rng) {
    auto s = two_kets("010", 0.6, "101", 0.8);
    auto [r1, s1] = measure_pauli_observable(s, PauliString::parse("ZZI"), rng);
    auto [r2, s2] = measure_pauli_observable(s1, PauliString::parse("IZZ"), rng);
    e(r1.eigenvalue == -1 && r2.eigenvalue == -1, "expected (-1, -1)");
  });
  run.check("XXXX on (|0000> - |1111>)/sqrt2", [](Expect& e, Rng& rng) {
    auto s = kets({"0000", "1111"}, {1, -1});
    for (int i = 0; i < 10; ++i) {
      e(measure_pauli_observable(s, PauliString::parse("XXXX"), rng).first.eigenvalue == -1,
        "eigenvalue should be -1");
    }
  });
  run.check("EPR pair measurement statistics", [](Expect& e, Rng& rng) {
    const std::size_t trials = 2000;
    std::size_t zeros = 0, mixed = 0;
    auto s = kets({"00", "11"});
    for (std::size_t i = 0; i < trials; ++i) {
      auto w = measure_all_z(s, rng).first.to_string();
      zeros += w == "00";
      mixed += w == "01" || w == "10";
    }
    e(mixed == 0, "observed 01 or 10");
    e(within3(double(zeros) / trials, 0.5, trials), "00 frequency " + fmt(double(zeros) / trials));
  });
  run.check("parity4 codeword measures to 0000 or 1111", [&](Expect& e, Rng& rng) {
    auto s = css_codeword(parity_css(), bv("0000"));
    for (int i = 0; i < 50; ++i) {
      auto w = measure_all_z(s, rng).first.to_string();
      e(w == "0000" || w == "1111", "outcome " + w);
    }
  });
  run.check("parity4 codewords are orthogonal", [&](Expect& e, Rng&) {
    auto p = parity_css();
    e(std::abs(overlap(css_codeword(p, bv("0000")), css_codeword(p, bv("0011")))) < 1e-12,
      "overlap nonzero");
  });

  // --------------------------------------------------- three-qubit codes
  run.check("bit-flip encoder", [](Expect& e, Rng&) {
    e(same(bitflip_encode(1, 0), basis_state(bv("000"))), "(1,0)");
    e(same(bitflip_encode(0, 1), basis_state(bv("111"))), "(0,1)");
  });
  run.check("bit-flip syndrome table", [](Expect& e, Rng& rng) {
    const int signs[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    auto clean = bitflip_encode(0.6, 0.8);
    for (std::size_t q = 0; q <= 3; ++q) {
      auto s = q ? apply_gate(clean, Gate::X, q) : clean;
      auto [syn, fixed] = bitflip_syndrome_and_correct(s, rng);
      e(syn.outcome == q && syn.first == signs[q][0] && syn.second == signs[q][1],
        "flip on qubit " + std::to_string(q));
      e(same(fixed, clean), "correction of qubit " + std::to_string(q));
    }
  });
  run.check("bit-flip correction of a|100> + b|011>", [](Expect& e, Rng& rng) {
    auto [syn, fixed] = bitflip_syndrome_and_correct(two_kets("100", 0.6, "011", 0.8), rng);
    e(syn.outcome == 1 && same(fixed, bitflip_encode(0.6, 0.8)), "expected qubit 1");
  });
  run.check("bit-flip discretization of a partial rotation", [](Expect& e, Rng& rng) {
    const double theta = std::numbers::pi / 6;
    const std::size_t trials = 2000;
    std::size_t flagged = 0;
    auto clean = bitflip_encode(0.6, 0.8);
    auto bad = apply_error(clean, ArbitraryError::rotation_x(theta, 3));
    for (std::size_t i = 0; i < trials; ++i) {
      auto [syn, fixed] = bitflip_syndrome_and_correct(bad, rng);
      e(syn.outcome == 0 || syn.outcome == 3, "outcome " + std::to_string(syn.outcome));
      flagged += syn.outcome == 3;
      if (fidelity(fixed, clean) < 1 - 1e-9) {
        e(false, "fidelity below 1");
        break;
      }
    }
    const double p = std::pow(std::sin(theta), 2);
    e(within3(double(flagged) / trials, p, trials), "flag rate " + fmt(double(flagged) / trials));
  });
  run.check("phase-flip encoder", [](Expect& e, Rng&) {
    e(same(phaseflip_encode(1, 0), hadamard_all(basis_state(bv("000")))), "(1,0)");
    e(same(phaseflip_encode(0, 1), hadamard_all(basis_state(bv("111")))), "(0,1)");
  });
  run.check("Z turns one |+> into |->", [](Expect& e, Rng&) {
    auto plus = phaseflip_encode(1, 0);
    for (std::size_t q = 1; q <= 3; ++q) {
      auto want = hadamard_all(basis_state(BitVector::unit(3, q - 1)));
      e(same(apply_gate(plus, Gate::Z, q), want), "qubit " + std::to_string(q));
    }
  });
  run.check("phase-flip correction of Z2", [](Expect& e, Rng& rng) {
    auto clean = phaseflip_encode(0.6, 0.8);
    auto [syn, fixed] = phaseflip_syndrome_and_correct(apply_gate(clean, Gate::Z, 2), rng);
    e(syn.outcome == 2, "expected qubit 2");
    e(same(fixed, clean), "not corrected");
    e(same(hadamard_all(fixed), bitflip_encode(0.6, 0.8)), "Hadamard does not return a|000> + b|111>");
  });
  run.check("Shor code logical zero", [](Expect& e, Rng&) {
    auto s = shor_codeword(1, 0);
    const double c = 1 / (2 * std::sqrt(2.0));
    for (std::size_t i = 0; i < s.dim(); ++i) {
      auto w = BitVector::from_index(9, i);
      bool in = true;
      for (std::size_t b = 0; b < 3; ++b) {
        auto blk = w.slice(3 * b, 3).to_string();
        in = in && (blk == "000" || blk == "111");
      }
      e(std::abs(s[i] - amp_t(in ? c : 0)) < 1e-12, "amplitude of " + w.to_string());
    }
    e(same(shor_encode(0.6, 0.8), shor_codeword(0.6, 0.8)), "encoder circuit differs");
  });
  run.check("Shor code X4 moves block 2", [](Expect& e, Rng&) {
    auto s = apply_gate(shor_codeword(1, 0), Gate::X, 4);
    const double c = 1 / (2 * std::sqrt(2.0));
    e(std::abs(s.amp(bv("000100000")) - amp_t(c)) < 1e-12, "|000 100 000> missing");
    e(std::abs(s.amp(bv("000011000")) - amp_t(c)) < 1e-12, "|000 011 000> missing");
    e(std::abs(s.amp(bv("000000000"))) < 1e-12, "|000 000 000> present");
  });
  run.check("Shor code Z4, Z5, Z6 coincide", [](Expect& e, Rng&) {
    auto s = shor_codeword(0.6, 0.8);
    auto z4 = apply_gate(s, Gate::Z, 4);
    e(same(z4, apply_gate(s, Gate::Z, 5)) && same(z4, apply_gate(s, Gate::Z, 6)),
      "states differ");
  });
  run.check("Shor code corrects X4 Z4", [](Expect& e, Rng& rng) {
    auto clean = shor_codeword(0.6, 0.8);
    auto s = apply_gate(apply_gate(clean, Gate::Z, 4), Gate::X, 4);
    e(same_ray(shor_correct(s, rng).state, clean), "not corrected");
  });
  run.check("Shor code corrects random single-qubit unitaries", [](Expect& e, Rng& rng) {
    auto clean = shor_codeword(0.6, amp_t(0, 0.8));
    for (int i = 0; i < 100; ++i) {
      auto err = ArbitraryError::random(rng, 9);
      if (!same_ray(shor_correct(apply_error(clean, err), rng).state, clean)) {
        e(false, "trial " + std::to_string(i) + " qubit " + std::to_string(err.qubit));
        break;
      }
    }
  });

  // -------------------------------------------------------------------- CSS
  run.check("parity4 CSS parameters", [&](Expect& e, Rng&) {
    auto p = parity_css();
    e(p.k() == 2 && p.t() == 0, "expected k=2");
  });
  run.check("hamming74 CSS parameters", [&](Expect& e, Rng&) {
    auto h = hamming_css();
    e(h.k() == 1 && h.t() == 1, "expected k=1 t=1");
  });
  run.check("parity4 CSS codewords", [&](Expect& e, Rng&) {
    auto p = parity_css();
    e(same(css_codeword(p, bv("0000")), kets({"0000", "1111"})), "Q1");
    e(same(css_codeword(p, bv("0011")), kets({"0011", "1100"})), "Q2");
    e(same(css_codeword(p, bv("0101")), kets({"0101", "1010"})), "Q3");
    e(same(css_codeword(p, bv("0110")), kets({"0110", "1001"})), "Q4");
    const char* vs[] = {"0000", "0011", "0101", "0110"};
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        e(std::abs(overlap(css_codeword(p, bv(vs[a])), css_codeword(p, bv(vs[b])))) < 1e-12,
          std::string("overlap ") + vs[a] + " " + vs[b]);
  });
  run.check("hamming74 CSS codewords", [&](Expect& e, Rng&) {
    auto h = hamming_css();
    e(same(css_codeword(h, bv("0000000")),
           kets({"0000000", "1110100", "1101010", "0111001", "0011110", "1001101",
                 "1010011", "0100111"})),
      "Q1");
    e(same(css_codeword(h, bv("0001011")),
           kets({"0001011", "1111111", "1100001", "0110010", "0010101", "1011000",
                 "1000110", "0101100"})),
      "Q2");
  });
  run.check("check strings from rows", [](Expect& e, Rng&) {
    e(pauli_row(bv("1111"), Pauli::Z).to_string() == "ZZZZ", "1111");
    e(pauli_row(bv("1110100"), Pauli::Z).to_string() == "ZZZIZII", "1110100");
  });
  run.check("parity4 bit syndrome after X1", [&](Expect& e, Rng& rng) {
    auto p = parity_css();
    auto s = apply_gate(css_codeword(p, bv("0000")), Gate::X, 1);
    e(same(s, kets({"1000", "0111"})), "flipped codeword differs");
    e(css_bit_syndrome(p, s, rng).syndrome == bv("1"), "expected [1]");
  });
  run.check("hamming74 bit syndrome after X5", [&](Expect& e, Rng& rng) {
    auto h = hamming_css();
    auto s = apply_gate(css_codeword(h, bv("0000000")), Gate::X, 5);
    e(css_bit_syndrome(h, s, rng).syndrome == bv("100"), "expected 100");
  });
  run.check("parity4 phase syndrome after Z1", [&](Expect& e, Rng& rng) {
    auto p = parity_css();
    auto s = apply_gate(css_codeword(p, bv("0000")), Gate::Z, 1);
    e(css_phase_syndrome(p, s, rng).syndrome == bv("1"), "expected [1]");
  });
  run.check("hamming74 phase syndrome after Z2", [&](Expect& e, Rng& rng) {
    auto h = hamming_css();
    auto s = apply_gate(css_codeword(h, bv("0000000")), Gate::Z, 2);
    e(css_phase_syndrome(h, s, rng).syndrome == bv("111"), "expected 111");
  });
  run.check("hamming74 single-error syndrome tables", [&](Expect& e, Rng& rng) {
    auto h = hamming_css();
    auto clean = css_codeword(h, bv("0000000"));
    for (std::size_t q = 1; q <= 7; ++q) {
      e(css_bit_syndrome(h, apply_gate(clean, Gate::X, q), rng).syndrome ==
            bv(kSyndromeColumns[q - 1]),
        "X" + std::to_string(q));
      e(css_phase_syndrome(h, apply_gate(clean, Gate::Z, q), rng).syndrome ==
            bv(kSyndromeColumns[q - 1]),
        "Z" + std::to_string(q));
    }
  });
  run.check("hamming74 corrects X and Z on qubit 6", [&](Expect& e, Rng& rng) {
    auto h = hamming_css();
    auto clean = css_codeword(h, bv("0001011"));
    auto bad = inject_errors(clean, BitVector::unit(7, 5), BitVector::unit(7, 5));
    auto rep = css_correct(h, bad, CssParams::zero(7), rng);
    e(same_ray(rep.state, clean), "not recovered");
  });
  run.check("parity4 identifies the coset of 0011", [&](Expect& e, Rng&) {
    auto p = parity_css();
    auto key = css_identify(p, css_codeword(p, bv("0011")), CssParams::zero(4));
    e(key == key_from_coset(p.quotient(), bv("0011")), "wrong key");
  });
  run.check("parity4 generalized basis identities", [&](Expect& e, Rng&) {
    std::vector<BitVector> xs{bv("0000"), bv("0001")};
    auto rep = verify_basis_identities(parity_css(), xs, xs);
    e(rep.states == 16, "expected 16 states");
    for (const auto& f : rep.failures) e(false, f);
  });

  // ---------------------------------------------------------- distillation
  run.check("single EPR pair", [](Expect& e, Rng& rng) {
    auto s = create_epr(1);
    e(same(s.joint, kets({"00", "11"})), "state differs");
    for (int i = 0; i < 50; ++i) {
      auto w = measure_all_z(s.joint, rng).first;
      e(w[0] == w[1], "halves disagree");
    }
  });
  run.check("EPR pair with Bob's errors", [](Expect& e, Rng&) {
    auto x = inject_bob_errors(create_epr(1), bv("1"), bv("0"));
    e(same(x.joint, kets({"01", "10"})), "X error");
    auto y = inject_bob_errors(create_epr(1), bv("1"), bv("1"));
    e(same_ray(y.joint, kets({"01", "10"}, {1, -1})), "X and Z error");
  });
  run.check("parity4 state after Alice's checks", [&](Expect& e, Rng& rng) {
    auto p = parity_css();
    for (int i = 0; i < 10; ++i) {
      auto a = alice_measure(p, create_epr(4), rng);
      e(std::abs(overlap(a.joint, paired_codeword_sum(p, a.x, a.z))) >= 1 - 1e-9,
        "overlap below 1");
    }
  });

  // ------------------------------------------------------------------ BB84
  run.check("intercept-resend error rate", [](Expect& e, Rng& rng) {
    const EveStrategy eve{EveStrategy::Kind::intercept_resend, BasisPolicy::uniform_random};
    std::size_t matched = 0, wrong = 0;
    for (int i = 0; i < 20000; ++i) {
      const bool bit = rng.bit();
      const auto basis = rng.bit() ? BasisChoice::X : BasisChoice::Z;
      auto o = transmit_qubit(bit, basis, {}, eve, rng);
      if (o.bob_basis != basis) continue;
      ++matched;
      wrong += o.bob_bit != bit;
    }
    e(within3(double(wrong) / matched, 0.25, matched), "rate " + fmt(double(wrong) / matched));
  });
  run.check("wrong-basis interception", [](Expect& e, Rng& rng) {
    const EveStrategy eve{EveStrategy::Kind::intercept_resend, BasisPolicy::always_x};
    std::size_t matched = 0, wrong = 0;
    for (int i = 0; i < 20000; ++i) {
      const bool bit = rng.bit();
      auto o = transmit_qubit(bit, BasisChoice::Z, {}, eve, rng);
      if (o.bob_basis != BasisChoice::Z) continue;
      ++matched;
      wrong += o.bob_bit != bit;
    }
    e(within3(double(wrong) / matched, 0.5, matched), "rate " + fmt(double(wrong) / matched));
  });
  run.check("intercept-resend session statistics", [](Expect& e, Rng& rng) {
    SessionConfig cfg;
    cfg.n = 4000;
    cfg.seed = rng.below(1ULL << 62);
    cfg.eve = {EveStrategy::Kind::intercept_resend, BasisPolicy::uniform_random};
    auto t = run_session(cfg);
    const auto raw = cfg.raw_length();
    e(within3(double(t.sifted.size()) / raw, 0.5, raw),
      "sifted fraction " + fmt(double(t.sifted.size()) / raw));
    if (t.check_idx.empty()) {
      e(false, "no check bits (" + t.abort_reason + ")");
      return;
    }
    e(within3(double(t.mismatches) / t.check_idx.size(), 0.25, t.check_idx.size()),
      "check error rate " + fmt(double(t.mismatches) / t.check_idx.size()));
    const double info = eve_info_estimate(t);
    e(within3(info, 0.5, t.sifted.size()), "Eve's information " + fmt(info));
  });
  run.check("no Eve, no information", [](Expect& e, Rng& rng) {
    SessionConfig cfg;
    cfg.n = 50;
    cfg.seed = rng.below(1ULL << 62);
    e(eve_info_estimate(run_session(cfg)) == 0, "nonzero estimate");
  });
  run.check("hamming74 key agreement under single key-block errors", [&](Expect& e, Rng&) {
    auto code = std::make_shared<const CssCode>(hamming_css());
    SessionConfig cfg;
    cfg.mode = Mode::shor_preskill;
    cfg.n = 7;
    cfg.code = code;
    // First seed whose session survives sifting; aborts are legitimate.
    cfg.seed = options.seed;
    for (int i = 0; i < 64 && run_session(cfg).aborted; ++i) ++cfg.seed;
    for (std::size_t q = 0; q <= 7; ++q) {
      cfg.key_block_errors = q ? BitVector::unit(7, q - 1) : BitVector::zeros(7);
      auto t = run_session(cfg);
      e(!t.aborted && t.keys_match && t.alice_key && t.alice_key->size() == 1,
        "error on bit " + std::to_string(q) + " (seed " + std::to_string(cfg.seed) + ")");
    }
  });
  run.check("privacy amplification bound for s=5", [](Expect& e, Rng&) {
    const double b = bennett_bound(5);
    e(std::abs(b - 0.0451) < 1e-4 && std::abs(b - std::pow(2.0, -5) / std::log(2.0)) < 1e-12,
      "bound " + fmt(b));
  });

  return run.take();
}

}  // namespace qkdforge::cli
