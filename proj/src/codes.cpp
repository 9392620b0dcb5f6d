#include "qkdforge/codes.hpp"

#include <bit>
#include <functional>

#include "qkdforge/error.hpp"

namespace qkdforge {

namespace {

void check_len(const BitVector& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(n) + ", got " +
                         std::to_string(v.size()));
  }
}

void guard_enumeration(std::size_t k) {
  if (k > kEnumerationLimit) {
    throw DomainError("code dimension " + std::to_string(k) +
                      " exceeds the enumeration limit of " +
                      std::to_string(kEnumerationLimit));
  }
}

// Visits every codeword in Gray-code order.
template <typename Fn>
void for_each_codeword(const BitMatrix& g, Fn&& fn) {
  const std::size_t k = g.rows();
  guard_enumeration(k);
  BitVectorBuilder cur(g.cols());
  const std::uint64_t total = std::uint64_t{1} << k;
  std::uint64_t gray = 0;
  fn(gray, cur.peek());
  for (std::uint64_t i = 1; i < total; ++i) {
    const int b = std::countr_zero(i);
    gray ^= std::uint64_t{1} << b;
    cur.add(g.row(k - 1 - static_cast<std::size_t>(b)));
    fn(gray, cur.peek());
  }
}

void validate_generator(const BitMatrix& g) {
  if (g.rows() >= g.cols()) {
    throw DomainError("generator must satisfy 1 <= k < n (got k=" +
                      std::to_string(g.rows()) +
                      ", n=" + std::to_string(g.cols()) + ")");
  }
  if (rank(g) != g.rows()) {
    throw DomainError("generator rows are linearly dependent");
  }
}

BitMatrix derive_check_matrix(const BitMatrix& g) {
  return BitMatrix(nullspace_basis(g));
}

}  // namespace

LinearCode::LinearCode(BitMatrix g)
    : g_((validate_generator(g), std::move(g))), h_(derive_check_matrix(g_)) {
  if (!mat_mul(h_, g_.transpose()).is_zero()) {
    throw DomainError("derived check matrix fails H G^T = 0");
  }
}

LinearCode::LinearCode(BitMatrix g, BitMatrix h)
    : g_((validate_generator(g), std::move(g))), h_(std::move(h)) {
  if (h_.cols() != g_.cols()) {
    throw DimensionError("check matrix width differs from generator width");
  }
  if (h_.rows() != n() - k() || rank(h_) != n() - k()) {
    throw DomainError("check matrix must have n-k independent rows");
  }
  if (!mat_mul(h_, g_.transpose()).is_zero()) {
    throw DomainError("check matrix fails H G^T = 0");
  }
}

BitVector LinearCode::encode(const BitVector& m) const {
  check_len(m, k(), "encode");
  return mat_apply(g_, m, Side::left);
}

BitVector LinearCode::syndrome(const BitVector& r) const {
  check_len(r, n(), "syndrome");
  return mat_apply(h_, r, Side::right);
}

bool LinearCode::contains(const BitVector& w) const {
  return syndrome(w).is_zero();
}

Distance LinearCode::min_weight() const {
  std::size_t d = n() + 1;
  for_each_codeword(g_, [&](std::uint64_t idx, const BitVector& c) {
    if (idx != 0) d = std::min(d, c.weight());
  });
  if (d > n() - k() + 1) {
    throw DomainError("Singleton bound violated: d=" + std::to_string(d));
  }
  return Distance{d, d - 1, (d - 1) / 2};
}

std::vector<BitVector> LinearCode::codewords() const {
  guard_enumeration(k());
  std::vector<BitVector> out(std::size_t{1} << k());
  for_each_codeword(g_, [&](std::uint64_t idx, const BitVector& c) {
    out[idx] = c;
  });
  return out;
}

LinearCode code_from_generator(const BitMatrix& g) { return LinearCode(g); }

LinearCode code_from_generator(const BitMatrix& g, const BitMatrix& h) {
  return LinearCode(g, h);
}

LinearCode dual(const LinearCode& code) {
  return LinearCode(code.H(), code.G());
}

bool is_subcode(const LinearCode& inner, const LinearCode& outer) {
  if (inner.n() != outer.n()) return false;
  for (const auto& r : inner.G().row_vectors()) {
    if (!outer.contains(r)) return false;
  }
  return true;
}

// ----------------------------------------------------------- syndrome table

std::optional<BitVector> SyndromeTable::lookup(const BitVector& s) const {
  auto it = entries_.find(s);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

SyndromeTable build_syndrome_table(const LinearCode& code, std::size_t t_max) {
  SyndromeTable table;
  table.t_max_ = t_max;
  const std::size_t n = code.n();

  auto insert = [&](const BitVector& e) {
    auto s = code.syndrome(e);
    auto [it, fresh] = table.entries_.emplace(s, e);
    if (!fresh) {
      throw DomainError("syndrome " + s.to_string() + " shared by errors " +
                        it->second.to_string() + " and " + e.to_string() +
                        "; code cannot correct " + std::to_string(t_max) +
                        " errors");
    }
  };

  insert(BitVector::zeros(n));
  BitVectorBuilder e(n);
  std::function<void(std::size_t, std::size_t)> choose =
      [&](std::size_t start, std::size_t left) {
        if (left == 0) {
          insert(e.peek());
          return;
        }
        for (std::size_t p = start; p + left <= n; ++p) {
          e.set(p);
          choose(p + 1, left - 1);
          e.set(p, false);
        }
      };
  for (std::size_t w = 1; w <= t_max && w <= n; ++w) choose(0, w);
  return table;
}

DecodeResult decode(const LinearCode& code, const SyndromeTable& table,
                    const BitVector& r) {
  auto e = table.lookup(code.syndrome(r));
  if (!e) {
    return DecodeResult{r, BitVector::zeros(code.n()),
                        DecodeStatus::detected_uncorrectable};
  }
  return DecodeResult{r + *e, *e, DecodeStatus::ok};
}

std::set<BitVector> coset(const LinearCode& code, const BitVector& x) {
  check_len(x, code.n(), "coset");
  std::set<BitVector> out;
  for_each_codeword(code.G(), [&](std::uint64_t, const BitVector& c) {
    out.insert(x + c);
  });
  return out;
}

// ---------------------------------------------------------------- quotient

namespace {

std::vector<BitVector> greedy_extension(const LinearCode& c1,
                                        const LinearCode& c2) {
  std::vector<BitVector> span = c2.G().row_vectors();
  std::vector<BitVector> ext;
  std::size_t r = span.size();
  for (const auto& row : c1.G().row_vectors()) {
    if (r == c1.k()) break;
    span.push_back(row);
    const std::size_t next = rank(std::span<const BitVector>(span));
    if (next > r) {
      ext.push_back(row);
      r = next;
    } else {
      span.pop_back();
    }
  }
  return ext;
}

BitMatrix basis_columns(const LinearCode& c2,
                        const std::vector<BitVector>& ext) {
  std::vector<BitVector> rows = c2.G().row_vectors();
  rows.insert(rows.end(), ext.begin(), ext.end());
  return BitMatrix(std::move(rows)).transpose();
}

}  // namespace

CosetQuotient::CosetQuotient(LinearCode c1, LinearCode c2)
    : c1_(std::move(c1)),
      c2_(std::move(c2)),
      ext_(greedy_extension(c1_, c2_)),
      basis_t_(basis_columns(c2_, ext_)) {}

BitVector CosetQuotient::representative(const BitVector& key) const {
  check_len(key, ext_.size(), "representative");
  BitVectorBuilder acc(c1_.n());
  for (std::size_t i = 0; i < ext_.size(); ++i) {
    if (key[i]) acc.add(ext_[i]);
  }
  return std::move(acc).build();
}

std::vector<std::set<BitVector>> CosetQuotient::cosets() const {
  guard_enumeration(ext_.size());
  std::vector<std::set<BitVector>> out;
  const std::uint64_t count = std::uint64_t{1} << ext_.size();
  for (std::uint64_t i = 0; i < count; ++i) {
    out.push_back(
        coset(c2_, representative(BitVector::from_index(ext_.size(), i))));
  }
  return out;
}

CosetQuotient quotient(const LinearCode& c1, const LinearCode& c2) {
  if (c1.n() != c2.n()) {
    throw DimensionError("quotient: codes have different lengths");
  }
  if (!is_subcode(c2, c1)) {
    throw DomainError("quotient: C2 is not a subcode of C1");
  }
  return CosetQuotient(c1, c2);
}

BitVector key_from_coset(const CosetQuotient& q, const BitVector& u) {
  check_len(u, q.c1_.n(), "key_from_coset");
  if (!q.c1_.contains(u)) {
    throw DomainError("key_from_coset: " + u.to_string() + " is not in C1");
  }
  auto coeffs = solve_particular(q.basis_t_, u);
  if (!coeffs) throw DomainError("key_from_coset: basis does not span u");
  return coeffs->slice(q.c2_.k(), q.ext_.size());
}

long long char_sum(const LinearCode& code, const BitVector& u) {
  check_len(u, code.n(), "char_sum");
  long long total = 0;
  for_each_codeword(code.G(), [&](std::uint64_t, const BitVector& v) {
    total += vec_dot(v, u) ? -1 : 1;
  });
  return total;
}

// ------------------------------------------------------------ named codes

LinearCode named_code(std::string_view name) {
  if (name == "parity4") {
    return LinearCode(BitMatrix::from_strings({"1001", "0101", "0011"}));
  }
  if (name == "hamming74") {
    return LinearCode(BitMatrix::from_strings(
        {"1000110", "0100111", "0010101", "0001011"}));
  }
  if (name == "rep3") {
    // Check matrix chosen so the syndromes read as Z1Z2, Z2Z3 outcomes.
    return LinearCode(BitMatrix::from_strings({"111"}),
                      BitMatrix::from_strings({"110", "011"}));
  }
  throw DomainError("unknown code name '" + std::string(name) + "'");
}

std::vector<std::string> named_code_list() {
  return {"parity4", "hamming74", "rep3"};
}

}  // namespace qkdforge
