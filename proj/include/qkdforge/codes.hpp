#pragma once

// Binary linear [n,k] codes, syndrome decoding and coset quotients.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qkdforge/gf2.hpp"

namespace qkdforge {

// Largest k for which codeword enumeration is allowed.
inline constexpr std::size_t kEnumerationLimit = 24;

struct Distance {
  std::size_t d = 0;
  std::size_t u = 0;  // detectable errors, d - 1
  std::size_t t = 0;  // correctable errors, (d - 1) / 2
};

class LinearCode {
 public:
  // H is derived from the nullspace of G.
  explicit LinearCode(BitMatrix g);
  // Uses the supplied check matrix after validating rank and H G^T = 0.
  LinearCode(BitMatrix g, BitMatrix h);

  std::size_t n() const { return g_.cols(); }
  std::size_t k() const { return g_.rows(); }
  const BitMatrix& G() const { return g_; }
  const BitMatrix& H() const { return h_; }

  BitVector encode(const BitVector& m) const;
  BitVector syndrome(const BitVector& r) const;
  bool contains(const BitVector& w) const;

  // Enumerates 2^k codewords; throws DomainError past kEnumerationLimit.
  Distance min_weight() const;
  std::vector<BitVector> codewords() const;

 private:
  BitMatrix g_;
  BitMatrix h_;
};

LinearCode code_from_generator(const BitMatrix& g);
LinearCode code_from_generator(const BitMatrix& g, const BitMatrix& h);

// Generator of the dual is H of the input, and vice versa.
LinearCode dual(const LinearCode& code);

// True when every generator row of inner lies in outer.
bool is_subcode(const LinearCode& inner, const LinearCode& outer);

class SyndromeTable {
 public:
  std::size_t t_max() const { return t_max_; }
  std::size_t size() const { return entries_.size(); }
  const std::map<BitVector, BitVector>& entries() const { return entries_; }
  std::optional<BitVector> lookup(const BitVector& s) const;

 private:
  friend SyndromeTable build_syndrome_table(const LinearCode&, std::size_t);
  std::size_t t_max_ = 0;
  std::map<BitVector, BitVector> entries_;
};

// Every error of weight <= t_max gets an entry. Two errors sharing a
// syndrome throw DomainError.
SyndromeTable build_syndrome_table(const LinearCode& code, std::size_t t_max);

enum class DecodeStatus { ok, detected_uncorrectable };

struct DecodeResult {
  BitVector word;
  BitVector error;
  DecodeStatus status = DecodeStatus::ok;
};

DecodeResult decode(const LinearCode& code, const SyndromeTable& table,
                    const BitVector& r);

std::set<BitVector> coset(const LinearCode& code, const BitVector& x);

class CosetQuotient {
 public:
  CosetQuotient(LinearCode c1, LinearCode c2);

  const LinearCode& C1() const { return c1_; }
  const LinearCode& C2() const { return c2_; }
  const std::vector<BitVector>& extension_rows() const { return ext_; }
  std::size_t key_length() const { return ext_.size(); }

  // sum_i key_i * ext_i; a coset representative for key.
  BitVector representative(const BitVector& key) const;
  // Every coset of C2 in C1, ordered by key index.
  std::vector<std::set<BitVector>> cosets() const;

 private:
  friend BitVector key_from_coset(const CosetQuotient&, const BitVector&);
  LinearCode c1_;
  LinearCode c2_;
  std::vector<BitVector> ext_;
  BitMatrix basis_t_;  // columns: rows of G2 then extension rows
};

// Throws DomainError unless C2 is a subcode of C1.
CosetQuotient quotient(const LinearCode& c1, const LinearCode& c2);

// Coefficients of u on the extension rows. Throws DomainError if u is not
// in C1.
BitVector key_from_coset(const CosetQuotient& q, const BitVector& u);

// sum over v in C of (-1)^{v.u}.
long long char_sum(const LinearCode& code, const BitVector& u);

// "parity4", "hamming74", "rep3". Throws DomainError for other names.
LinearCode named_code(std::string_view name);
std::vector<std::string> named_code_list();

}  // namespace qkdforge
