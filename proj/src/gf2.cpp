#include "qkdforge/gf2.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>

#include "qkdforge/error.hpp"

namespace qkdforge {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

void check_same_length(const BitVector& a, const BitVector& b,
                       const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------- BitVector

BitVector BitVector::zeros(std::size_t n) {
  BitVector v;
  v.len_ = n;
  v.words_.assign(word_count(n), 0);
  return v;
}

BitVector BitVector::ones(std::size_t n) {
  BitVectorBuilder b(n);
  for (std::size_t i = 0; i < n; ++i) b.set(i);
  return std::move(b).build();
}

BitVector BitVector::unit(std::size_t n, std::size_t pos) {
  if (pos >= n) throw DimensionError("unit vector position out of range");
  return std::move(BitVectorBuilder(n).set(pos)).build();
}

BitVector BitVector::from_string(std::string_view text) {
  BitVectorBuilder b(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '1') {
      b.set(i);
    } else if (c != '0') {
      throw DimensionError("bit string contains non-binary character '" +
                           std::string(1, c) + "'");
    }
  }
  return std::move(b).build();
}

BitVector BitVector::from_index(std::size_t n, std::uint64_t index) {
  if (n > 63) throw DimensionError("from_index supports at most 63 bits");
  BitVectorBuilder b(n);
  for (std::size_t i = 0; i < n; ++i) {
    if ((index >> (n - 1 - i)) & 1U) b.set(i);
  }
  return std::move(b).build();
}

bool BitVector::at(std::size_t pos) const {
  if (pos >= len_) throw DimensionError("bit position out of range");
  return (*this)[pos];
}

std::size_t BitVector::weight() const {
  std::size_t w = 0;
  for (auto word : words_) w += static_cast<std::size_t>(std::popcount(word));
  return w;
}

bool BitVector::is_zero() const {
  return std::all_of(words_.begin(), words_.end(),
                     [](std::uint64_t w) { return w == 0; });
}

BitVector BitVector::flipped(std::size_t pos) const {
  if (pos >= len_) throw DimensionError("bit position out of range");
  return std::move(BitVectorBuilder(*this).flip(pos)).build();
}

BitVector BitVector::with_bit(std::size_t pos, bool value) const {
  if (pos >= len_) throw DimensionError("bit position out of range");
  return std::move(BitVectorBuilder(*this).set(pos, value)).build();
}

BitVector BitVector::slice(std::size_t begin, std::size_t count) const {
  if (begin + count > len_) throw DimensionError("slice out of range");
  BitVectorBuilder b(count);
  for (std::size_t i = 0; i < count; ++i) {
    if ((*this)[begin + i]) b.set(i);
  }
  return std::move(b).build();
}

BitVector BitVector::concat(const BitVector& tail) const {
  BitVectorBuilder b(len_ + tail.len_);
  for (std::size_t i = 0; i < len_; ++i) {
    if ((*this)[i]) b.set(i);
  }
  for (std::size_t i = 0; i < tail.len_; ++i) {
    if (tail[i]) b.set(len_ + i);
  }
  return std::move(b).build();
}

BitVector BitVector::operator+(const BitVector& other) const {
  check_same_length(*this, other, "vec_add");
  BitVector out = *this;
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] ^= other.words_[w];
  return out;
}

BitVector BitVector::operator&(const BitVector& other) const {
  check_same_length(*this, other, "bitwise and");
  BitVector out = *this;
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] &= other.words_[w];
  return out;
}

std::uint64_t BitVector::to_index() const {
  if (len_ > 63) throw DimensionError("to_index supports at most 63 bits");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < len_; ++i) idx = (idx << 1) | ((*this)[i] ? 1U : 0U);
  return idx;
}

std::string BitVector::to_string() const {
  std::string s(len_, '0');
  for (std::size_t i = 0; i < len_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

std::vector<std::size_t> BitVector::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < len_; ++i) {
    if ((*this)[i]) out.push_back(i);
  }
  return out;
}

std::strong_ordering operator<=>(const BitVector& a, const BitVector& b) {
  if (auto c = a.len_ <=> b.len_; c != 0) return c;
  for (std::size_t w = 0; w < a.words_.size(); ++w) {
    const std::uint64_t diff = a.words_[w] ^ b.words_[w];
    if (diff == 0) continue;
    // Lowest set bit is the leftmost differing printed position.
    const int pos = std::countr_zero(diff);
    return ((a.words_[w] >> pos) & 1U) ? std::strong_ordering::greater
                                       : std::strong_ordering::less;
  }
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const BitVector& v) {
  return os << v.to_string();
}

// --------------------------------------------------------- BitVectorBuilder

BitVectorBuilder::BitVectorBuilder(std::size_t n) : v_(BitVector::zeros(n)) {}

BitVectorBuilder::BitVectorBuilder(BitVector start) : v_(std::move(start)) {}

BitVectorBuilder& BitVectorBuilder::set(std::size_t pos, bool value) {
  if (pos >= v_.len_) throw DimensionError("bit position out of range");
  const std::uint64_t mask = std::uint64_t{1} << (pos & 63);
  if (value) {
    v_.words_[pos >> 6] |= mask;
  } else {
    v_.words_[pos >> 6] &= ~mask;
  }
  return *this;
}

BitVectorBuilder& BitVectorBuilder::flip(std::size_t pos) {
  if (pos >= v_.len_) throw DimensionError("bit position out of range");
  v_.words_[pos >> 6] ^= std::uint64_t{1} << (pos & 63);
  return *this;
}

BitVectorBuilder& BitVectorBuilder::add(const BitVector& other) {
  check_same_length(v_, other, "vec_add");
  for (std::size_t w = 0; w < v_.words_.size(); ++w) v_.words_[w] ^= other.words_[w];
  return *this;
}

BitVector vec_add(const BitVector& a, const BitVector& b) { return a + b; }

bool vec_dot(const BitVector& a, const BitVector& b) {
  check_same_length(a, b, "vec_dot");
  std::uint64_t acc = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t w = 0; w < wa.size(); ++w) acc ^= wa[w] & wb[w];
  return (std::popcount(acc) & 1) != 0;
}

// ---------------------------------------------------------------- BitMatrix

BitMatrix::BitMatrix(std::vector<BitVector> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw DimensionError("matrix must have at least one row");
  cols_ = rows_.front().size();
  if (cols_ == 0) throw DimensionError("matrix must have at least one column");
  for (const auto& r : rows_) {
    if (r.size() != cols_) throw DimensionError("matrix rows are ragged");
  }
}

BitMatrix BitMatrix::from_strings(std::initializer_list<std::string_view> rows) {
  std::vector<BitVector> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(BitVector::from_string(r));
  return BitMatrix(std::move(out));
}

BitMatrix BitMatrix::identity(std::size_t n) {
  std::vector<BitVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(BitVector::unit(n, i));
  return BitMatrix(std::move(out));
}

BitMatrix BitMatrix::zeros(std::size_t rows, std::size_t cols) {
  return BitMatrix(std::vector<BitVector>(rows, BitVector::zeros(cols)));
}

bool BitMatrix::is_zero() const {
  return std::all_of(rows_.begin(), rows_.end(),
                     [](const BitVector& r) { return r.is_zero(); });
}

BitMatrix BitMatrix::transpose() const {
  std::vector<BitVector> out;
  out.reserve(cols_);
  for (std::size_t c = 0; c < cols_; ++c) {
    BitVectorBuilder b(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (rows_[r][c]) b.set(r);
    }
    out.push_back(std::move(b).build());
  }
  return BitMatrix(std::move(out));
}

BitMatrix BitMatrix::stacked(const BitMatrix& below) const {
  if (below.cols_ != cols_) throw DimensionError("stacked: column mismatch");
  std::vector<BitVector> out = rows_;
  out.insert(out.end(), below.rows_.begin(), below.rows_.end());
  return BitMatrix(std::move(out));
}

std::string BitMatrix::to_text() const {
  std::string s;
  for (const auto& r : rows_) {
    s += r.to_string();
    s += '\n';
  }
  return s;
}

std::ostream& operator<<(std::ostream& os, const BitMatrix& m) {
  return os << m.to_text();
}

BitVector mat_apply(const BitMatrix& m, const BitVector& v, Side side) {
  if (side == Side::left) {
    if (v.size() != m.rows()) {
      throw DimensionError("mat_apply(left): |v| must equal the row count");
    }
    BitVectorBuilder acc(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (v[r]) acc.add(m.row(r));
    }
    return std::move(acc).build();
  }
  if (v.size() != m.cols()) {
    throw DimensionError("mat_apply(right): |v| must equal the column count");
  }
  BitVectorBuilder out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (vec_dot(m.row(r), v)) out.set(r);
  }
  return std::move(out).build();
}

BitMatrix mat_mul(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("mat_mul: inner dimension mismatch");
  std::vector<BitVector> out;
  out.reserve(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    out.push_back(mat_apply(b, a.row(r), Side::left));
  }
  return BitMatrix(std::move(out));
}

// ------------------------------------------------------------ elimination

namespace {

struct Elimination {
  std::vector<BitVector> rows;
  std::vector<std::size_t> pivots;
};

// Gauss-Jordan on a copy of the rows; optional right-hand side is carried
// along as an augmented bit per row.
Elimination eliminate(std::vector<BitVector> in, std::size_t cols,
                      std::vector<bool>* rhs) {
  std::vector<BitVectorBuilder> rows;
  rows.reserve(in.size());
  for (auto& r : in) rows.emplace_back(std::move(r));

  std::vector<std::size_t> pivots;
  std::size_t lead = 0;
  for (std::size_t c = 0; c < cols && lead < rows.size(); ++c) {
    std::size_t p = lead;
    while (p < rows.size() && !rows[p].get(c)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[lead]);
    if (rhs) std::swap((*rhs)[p], (*rhs)[lead]);
    const BitVector pivot_row = rows[lead].peek();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != lead && rows[r].get(c)) {
        rows[r].add(pivot_row);
        if (rhs) (*rhs)[r] = (*rhs)[r] != (*rhs)[lead];
      }
    }
    pivots.push_back(c);
    ++lead;
  }

  Elimination e;
  e.rows.reserve(rows.size());
  for (auto& b : rows) e.rows.push_back(std::move(b).build());
  e.pivots = std::move(pivots);
  return e;
}

}  // namespace

RrefResult rref(const BitMatrix& m) {
  auto e = eliminate(m.row_vectors(), m.cols(), nullptr);
  const std::size_t r = e.pivots.size();
  return RrefResult{BitMatrix(std::move(e.rows)), r, std::move(e.pivots)};
}

std::size_t rank(const BitMatrix& m) { return rref(m).rank; }

std::size_t rank(std::span<const BitVector> rows) {
  if (rows.empty()) return 0;
  return rank(BitMatrix(std::vector<BitVector>(rows.begin(), rows.end())));
}

std::vector<BitVector> nullspace_basis(const BitMatrix& m) {
  const auto red = rref(m);
  const std::size_t n = m.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : red.pivot_cols) is_pivot[c] = true;

  std::vector<BitVector> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    BitVectorBuilder v(n);
    v.set(f);
    for (std::size_t i = 0; i < red.rank; ++i) {
      if (red.reduced.row(i)[f]) v.set(red.pivot_cols[i]);
    }
    basis.push_back(std::move(v).build());
  }
  return basis;
}

std::optional<BitVector> solve_particular(const BitMatrix& m,
                                          const BitVector& s) {
  if (s.size() != m.rows()) {
    throw DimensionError("solve_particular: |s| must equal the row count");
  }
  std::vector<bool> rhs(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) rhs[r] = s[r];
  auto e = eliminate(m.row_vectors(), m.cols(), &rhs);

  const std::size_t rk = e.pivots.size();
  for (std::size_t r = rk; r < rhs.size(); ++r) {
    if (rhs[r]) return std::nullopt;
  }
  BitVectorBuilder x(m.cols());
  for (std::size_t i = 0; i < rk; ++i) {
    if (rhs[i]) x.set(e.pivots[i]);
  }
  return std::move(x).build();
}

BitMatrix read_matrix(std::istream& in) {
  std::vector<BitVector> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;
    rows.push_back(BitVector::from_string(line));
  }
  return BitMatrix(std::move(rows));
}

BitMatrix parse_matrix(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_matrix(in);
}

}  // namespace qkdforge
