#include "doctest.h"
#include "oracles.hpp"
#include "qkdforge/codes.hpp"
#include "qkdforge/error.hpp"

using namespace qkdforge;

namespace {
BitVector bv(const char* s) { return BitVector::from_string(s); }

const std::set<std::string> kParityWords = {"0000", "0011", "0101", "0110",
                                            "1001", "1010", "1100", "1111"};
const std::set<std::string> kHammingWords = {
    "0000000", "0001011", "0010101", "0011110", "0100111", "0101100",
    "0110010", "0111001", "1000110", "1001101", "1010011", "1011000",
    "1100001", "1101010", "1110100", "1111111"};

// All codewords by brute force: words annihilated by every check row.
std::set<std::string> brute_words(const LinearCode& c) {
  return oracle::span(oracle::rows_of(c.G()), c.n());
}
}  // namespace

TEST_CASE("construction from a generator") {
  auto parity = named_code("parity4");
  CHECK(parity.n() == 4);
  CHECK(parity.k() == 3);
  CHECK(oracle::as_strings(parity.codewords()) == kParityWords);
  CHECK(parity.H() == BitMatrix::from_strings({"1111"}));

  auto ham = named_code("hamming74");
  CHECK(oracle::as_strings(ham.codewords()) == kHammingWords);
  CHECK(ham.H() ==
        BitMatrix::from_strings({"1110100", "1101010", "0111001"}));

  auto rep = code_from_generator(BitMatrix::from_strings({"111"}));
  CHECK(oracle::as_strings(rep.codewords()) ==
        std::set<std::string>{"000", "111"});

  CHECK_THROWS_AS(code_from_generator(BitMatrix::from_strings({"110", "110"})),
                  DomainError);
  CHECK_THROWS_AS(code_from_generator(BitMatrix::identity(3)), DomainError);
  CHECK_THROWS_AS(named_code("golay"), DomainError);
}

TEST_CASE("explicit check matrix is validated") {
  auto g = BitMatrix::from_strings({"111"});
  CHECK_NOTHROW(code_from_generator(g, BitMatrix::from_strings({"110", "011"})));
  CHECK_THROWS_AS(code_from_generator(g, BitMatrix::from_strings({"100", "011"})),
                  DomainError);
  CHECK_THROWS_AS(code_from_generator(g, BitMatrix::from_strings({"110", "110"})),
                  DomainError);
  CHECK_THROWS_AS(code_from_generator(g, BitMatrix::from_strings({"110"})),
                  DomainError);
}

TEST_CASE("encode examples") {
  CHECK(named_code("parity4").encode(bv("011")) == bv("0110"));
  CHECK(named_code("parity4").encode(bv("000")) == bv("0000"));
  CHECK(named_code("hamming74").encode(bv("0011")) == bv("0011110"));
  CHECK_THROWS_AS(named_code("parity4").encode(bv("01")), DimensionError);
}

TEST_CASE("contains examples") {
  CHECK_FALSE(named_code("parity4").contains(bv("0111")));
  CHECK(named_code("parity4").contains(bv("0000")));
  CHECK(named_code("hamming74").contains(bv("1111111")));
}

TEST_CASE("min_weight examples") {
  auto p = named_code("parity4").min_weight();
  CHECK(p.d == 2);
  CHECK(p.u == 1);
  CHECK(p.t == 0);
  auto h = named_code("hamming74").min_weight();
  CHECK(h.d == 3);
  CHECK(h.u == 2);
  CHECK(h.t == 1);
  auto r = named_code("rep3").min_weight();
  CHECK(r.d == 3);
  CHECK(r.t == 1);
}

TEST_CASE("enumeration guard") {
  oracle::Gen gen(3);
  auto big = gen.code(30, 25);
  CHECK_THROWS_AS(big.min_weight(), DomainError);
  CHECK_THROWS_AS(big.codewords(), DomainError);
}

TEST_CASE("dual examples") {
  auto parity = named_code("parity4");
  auto pd = dual(parity);
  CHECK(oracle::as_strings(pd.codewords()) ==
        std::set<std::string>{"0000", "1111"});
  CHECK(is_subcode(pd, parity));

  auto ham = named_code("hamming74");
  auto hd = dual(ham);
  CHECK(hd.k() == 3);
  CHECK(is_subcode(hd, ham));
  // Exhaustive orthogonality oracle.
  CHECK(oracle::as_strings(hd.codewords()) ==
        oracle::kernel(oracle::rows_of(ham.G()), 7));
  // The derived dual differs from one printed listing in exactly one word.
  const std::set<std::string> printed = {"0000000", "1110100", "1101010",
                                         "0111001", "0011110", "1001101",
                                         "1010011", "0100011"};
  std::set<std::string> derived = oracle::as_strings(hd.codewords());
  std::vector<std::string> only_printed, only_derived;
  std::set_difference(printed.begin(), printed.end(), derived.begin(),
                      derived.end(), std::back_inserter(only_printed));
  std::set_difference(derived.begin(), derived.end(), printed.begin(),
                      printed.end(), std::back_inserter(only_derived));
  CHECK(only_printed == std::vector<std::string>{"0100011"});
  CHECK(only_derived == std::vector<std::string>{"0100111"});

  oracle::Gen gen(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = gen.range(2, 9);
    auto c = gen.code(n, gen.range(1, n - 1));
    CHECK(brute_words(dual(dual(c))) == brute_words(c));
  }
}

TEST_CASE("syndrome examples") {
  auto ham = named_code("hamming74");
  CHECK(ham.syndrome(bv("1011110")) == bv("110"));
  CHECK(ham.syndrome(bv("1011111")) == bv("111"));
  for (const auto& c : ham.codewords()) CHECK(ham.syndrome(c).is_zero());
}

TEST_CASE("syndrome table examples") {
  auto ham = build_syndrome_table(named_code("hamming74"), 1);
  const std::map<std::string, std::string> want = {
      {"000", "0000000"}, {"110", "1000000"}, {"111", "0100000"},
      {"101", "0010000"}, {"011", "0001000"}, {"100", "0000100"},
      {"010", "0000010"}, {"001", "0000001"}};
  std::map<std::string, std::string> got;
  for (const auto& [s, e] : ham.entries()) got[s.to_string()] = e.to_string();
  CHECK(got == want);

  auto rep = build_syndrome_table(named_code("rep3"), 1);
  std::map<std::string, std::string> rgot;
  for (const auto& [s, e] : rep.entries()) rgot[s.to_string()] = e.to_string();
  CHECK(rgot == std::map<std::string, std::string>{
                    {"00", "000"}, {"10", "100"}, {"11", "010"}, {"01", "001"}});

  CHECK_THROWS_AS(build_syndrome_table(named_code("parity4"), 1), DomainError);
}

TEST_CASE("decode examples") {
  auto ham = named_code("hamming74");
  auto table = build_syndrome_table(ham, 1);
  auto r1 = decode(ham, table, bv("1011110"));
  CHECK(r1.word == bv("0011110"));
  CHECK(r1.error == bv("1000000"));
  CHECK(r1.status == DecodeStatus::ok);

  for (const auto& c : ham.codewords()) {
    auto r = decode(ham, table, c);
    CHECK(r.word == c);
    CHECK(r.error.is_zero());
  }

  auto r2 = decode(ham, table, bv("1011111"));
  CHECK(r2.word == bv("1111111"));
  CHECK(r2.status == DecodeStatus::ok);

  // Three errors land on another codeword: syndrome zero.
  CHECK(ham.syndrome(bv("0011110") + bv("1100001")).is_zero());

  // A partial table leaves some syndromes unknown.
  auto parity = named_code("parity4");
  auto t0 = build_syndrome_table(parity, 0);
  auto r3 = decode(parity, t0, bv("0111"));
  CHECK(r3.status == DecodeStatus::detected_uncorrectable);
  CHECK(r3.word == bv("0111"));
}

TEST_CASE("coset examples") {
  auto parity = named_code("parity4");
  CHECK(oracle::as_strings(coset(parity, bv("0111"))) ==
        std::set<std::string>{"0111", "0100", "0010", "0001", "1110", "1101",
                              "1011", "1000"});
  CHECK(oracle::as_strings(coset(parity, bv("0110"))) == kParityWords);

  oracle::Gen gen(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto n = gen.range(3, 8);
    auto c = gen.code(n, gen.range(1, n - 1));
    auto x1 = gen.vec(n), x2 = gen.vec(n);
    auto a = coset(c, x1), b = coset(c, x2);
    CHECK(a.size() == (std::size_t{1} << c.k()));
    const bool same = c.contains(x1 + x2);
    if (same) {
      CHECK(a == b);
    } else {
      std::vector<BitVector> common;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::back_inserter(common));
      CHECK(common.empty());
    }
  }
}

TEST_CASE("quotient examples") {
  auto parity = named_code("parity4");
  auto q = quotient(parity, dual(parity));
  CHECK(q.key_length() == 2);
  std::set<std::set<std::string>> got;
  for (const auto& c : q.cosets()) got.insert(oracle::as_strings(c));
  CHECK(got == std::set<std::set<std::string>>{{"0000", "1111"},
                                               {"0011", "1100"},
                                               {"0101", "1010"},
                                               {"0110", "1001"}});

  auto same = quotient(parity, parity);
  CHECK(same.key_length() == 0);
  REQUIRE(same.cosets().size() == 1);
  CHECK(oracle::as_strings(same.cosets()[0]) == kParityWords);

  auto ham = named_code("hamming74");
  auto hq = quotient(ham, dual(ham));
  REQUIRE(hq.cosets().size() == 2);
  const std::set<std::string> q1 = {"0000000", "1110100", "1101010", "0111001",
                                    "0011110", "1001101", "1010011", "0100111"};
  const std::set<std::string> q2 = {"0001011", "1111111", "1100001", "0110010",
                                    "0010101", "1011000", "1000110", "0101100"};
  CHECK(oracle::as_strings(hq.cosets()[0]) == q1);
  CHECK(oracle::as_strings(hq.cosets()[1]) == q2);

  CHECK_THROWS_AS(quotient(dual(parity), parity), DomainError);
}

TEST_CASE("key_from_coset examples") {
  auto ham = named_code("hamming74");
  auto hq = quotient(ham, dual(ham));
  for (const auto& w : dual(ham).codewords()) {
    CHECK(key_from_coset(hq, w) == bv("0"));
  }
  CHECK(key_from_coset(hq, bv("0001011")) == bv("1"));
  CHECK_THROWS_AS(key_from_coset(hq, bv("1000000")), DomainError);

  oracle::Gen gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = gen.range(4, 8);
    const auto k1 = gen.range(2, n - 1);
    auto c1 = gen.code(n, k1);
    // Subcode from a random subset of rows of a re-randomized basis of C1.
    const auto k2 = gen.range(1, k1 - 1);
    std::vector<BitVector> rows;
    while (rows.size() < k2) {
      auto m = gen.vec(k1);
      auto cand = c1.encode(m);
      auto test = rows;
      test.push_back(cand);
      if (rank(std::span<const BitVector>(test)) == test.size()) rows = test;
    }
    LinearCode c2{BitMatrix(rows)};
    auto q = quotient(c1, c2);
    std::map<std::string, std::set<std::string>> by_key;
    for (const auto& u : c1.codewords()) {
      by_key[key_from_coset(q, u).to_string()].insert(
          oracle::as_strings(coset(c2, u)).begin()->data());
    }
    CHECK(by_key.size() == (std::size_t{1} << (k1 - k2)));
    for (const auto& [key, reps] : by_key) CHECK(reps.size() == 1);
  }
}

TEST_CASE("char_sum examples") {
  auto parity = named_code("parity4");
  CHECK(char_sum(parity, bv("1111")) == 8);
  CHECK(char_sum(parity, bv("0000")) == 8);
  CHECK(char_sum(parity, bv("0001")) == 0);
}

TEST_CASE("property: constructed codes satisfy H G^T = 0 and Singleton") {
  oracle::Gen gen(31);
  for (int trial = 0; trial < 60; ++trial) {
    const auto n = gen.range(2, 12);
    auto c = gen.code(n, gen.range(1, n - 1));
    CHECK(mat_mul(c.H(), c.G().transpose()).is_zero());
    CHECK(c.min_weight().d <= c.n() - c.k() + 1);
  }
}

TEST_CASE("property: decoding undoes every correctable error") {
  oracle::Gen gen(37);
  std::vector<LinearCode> codes = {named_code("hamming74"), named_code("rep3")};
  for (int trial = 0; trial < 12; ++trial) {
    const auto n = gen.range(5, 10);
    codes.push_back(gen.code(n, gen.range(1, n - 3)));
  }
  for (const auto& c : codes) {
    const auto t = c.min_weight().t;
    auto table = build_syndrome_table(c, t);
    const std::size_t n = c.n();
    for (const auto& word : c.codewords()) {
      for (std::uint64_t e = 0; e < (1ULL << n); ++e) {
        if (static_cast<std::size_t>(__builtin_popcountll(e)) > t) continue;
        auto ev = BitVector::from_index(n, e);
        auto r = decode(c, table, word + ev);
        if (r.word != word) FAIL("decode failed for " << word << " + " << ev);
      }
    }
  }
}

TEST_CASE("property: quotient cosets partition C1") {
  auto check = [](const LinearCode& c1, const LinearCode& c2) {
    auto q = quotient(c1, c2);
    auto cs = q.cosets();
    std::set<BitVector> all;
    std::size_t total = 0;
    for (const auto& c : cs) {
      total += c.size();
      all.insert(c.begin(), c.end());
    }
    CHECK(total == all.size());
    CHECK(all.size() == (std::size_t{1} << c1.k()));
    for (const auto& w : all) CHECK(c1.contains(w));
  };
  check(named_code("parity4"), dual(named_code("parity4")));
  check(named_code("hamming74"), dual(named_code("hamming74")));
}

TEST_CASE("property: char_sum identity exhaustively") {
  oracle::Gen gen(43);
  std::vector<LinearCode> codes = {named_code("parity4"), named_code("hamming74")};
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = gen.range(2, 10);
    codes.push_back(gen.code(n, gen.range(1, n - 1)));
  }
  for (const auto& c : codes) {
    const auto in_dual = oracle::kernel(oracle::rows_of(c.G()), c.n());
    const long long size = 1LL << c.k();
    for (std::uint64_t u = 0; u < (1ULL << c.n()); ++u) {
      auto uv = BitVector::from_index(c.n(), u);
      const long long want = in_dual.count(uv.to_string()) ? size : 0;
      if (char_sum(c, uv) != want) FAIL("char_sum mismatch at " << uv);
    }
  }
}
