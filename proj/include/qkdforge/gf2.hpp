#pragma once

// Dense linear algebra over GF(2).
//
// Bit position 0 of a BitVector is the leftmost character of its printed
// form ("0101" has bits 0,1,0,1). The same ordering is used for qubit
// numbering and basis-state indexing in qsim: position 0 is the most
// significant bit of a basis index.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qkdforge {

class BitVectorBuilder;

class BitVector {
 public:
  BitVector() = default;

  static BitVector zeros(std::size_t n);
  static BitVector ones(std::size_t n);
  static BitVector unit(std::size_t n, std::size_t pos);
  // Parses '0'/'1' characters; anything else throws DimensionError.
  static BitVector from_string(std::string_view text);
  // Inverse of to_index(): position 0 receives the most significant bit.
  static BitVector from_index(std::size_t n, std::uint64_t index);

  std::size_t size() const { return len_; }
  bool operator[](std::size_t pos) const {
    return (words_[pos >> 6] >> (pos & 63)) & 1U;
  }
  bool at(std::size_t pos) const;

  std::size_t weight() const;
  bool is_zero() const;

  BitVector flipped(std::size_t pos) const;
  BitVector with_bit(std::size_t pos, bool value) const;
  BitVector slice(std::size_t begin, std::size_t count) const;
  BitVector concat(const BitVector& tail) const;

  BitVector operator+(const BitVector& other) const;
  BitVector operator&(const BitVector& other) const;

  // Basis-state index sum_i b_i 2^(n-1-i); requires size() <= 63.
  std::uint64_t to_index() const;
  std::string to_string() const;
  std::vector<std::size_t> support() const;

  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;
  // Length first, then lexicographic on the printed form.
  friend std::strong_ordering operator<=>(const BitVector& a,
                                          const BitVector& b);

 private:
  friend class BitVectorBuilder;
  std::size_t len_ = 0;
  std::vector<std::uint64_t> words_;
};

std::ostream& operator<<(std::ostream& os, const BitVector& v);

// Mutable staging area for assembling a BitVector.
class BitVectorBuilder {
 public:
  explicit BitVectorBuilder(std::size_t n);
  explicit BitVectorBuilder(BitVector start);

  BitVectorBuilder& set(std::size_t pos, bool value = true);
  BitVectorBuilder& flip(std::size_t pos);
  BitVectorBuilder& add(const BitVector& other);
  bool get(std::size_t pos) const { return v_[pos]; }
  std::size_t size() const { return v_.len_; }

  BitVector build() && { return std::move(v_); }
  const BitVector& peek() const { return v_; }

 private:
  BitVector v_;
};

BitVector vec_add(const BitVector& a, const BitVector& b);
bool vec_dot(const BitVector& a, const BitVector& b);

class BitMatrix {
 public:
  explicit BitMatrix(std::vector<BitVector> rows);

  static BitMatrix from_strings(std::initializer_list<std::string_view> rows);
  static BitMatrix identity(std::size_t n);
  static BitMatrix zeros(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  const BitVector& row(std::size_t r) const { return rows_.at(r); }
  const std::vector<BitVector>& row_vectors() const { return rows_; }
  bool at(std::size_t r, std::size_t c) const { return rows_.at(r).at(c); }
  bool is_zero() const;

  BitMatrix transpose() const;
  BitMatrix stacked(const BitMatrix& below) const;

  // Plain-text form: one row per line, '0'/'1' characters.
  std::string to_text() const;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<BitVector> rows_;
};

std::ostream& operator<<(std::ostream& os, const BitMatrix& m);

enum class Side {
  left,   // v M   (|v| = rows)
  right,  // M v^T (|v| = cols), returned as a row vector
};

BitVector mat_apply(const BitMatrix& m, const BitVector& v, Side side);
BitMatrix mat_mul(const BitMatrix& a, const BitMatrix& b);

struct RrefResult {
  BitMatrix reduced;
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_cols;
};

RrefResult rref(const BitMatrix& m);
std::size_t rank(const BitMatrix& m);
std::size_t rank(std::span<const BitVector> rows);

// One basis vector per free column of the RREF, in increasing column order;
// the free column's own coordinate is 1 and the other free coordinates 0.
std::vector<BitVector> nullspace_basis(const BitMatrix& m);

// Some x with m x^T = s. Free variables are fixed to 0.
std::optional<BitVector> solve_particular(const BitMatrix& m,
                                          const BitVector& s);

// Reads the plain-text matrix format from a stream; stops at a blank line
// or end of input. Throws DimensionError on ragged rows or bad characters.
BitMatrix read_matrix(std::istream& in);
BitMatrix parse_matrix(std::string_view text);

}  // namespace qkdforge
