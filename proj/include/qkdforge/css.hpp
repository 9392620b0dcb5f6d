#pragma once

// CSS codes built from a nested pair C2 < C1, their generalized codewords
// CSS_{x,z}, and syndrome measurement by Pauli observables.

#include <cstddef>
#include <string>
#include <vector>

#include "qkdforge/codes.hpp"
#include "qkdforge/qsim.hpp"

namespace qkdforge {

struct CssParams {
  BitVector x;
  BitVector z;
  static CssParams zero(std::size_t n) {
    return {BitVector::zeros(n), BitVector::zeros(n)};
  }
};

class CssCode {
 public:
  CssCode(LinearCode c1, LinearCode c2, std::size_t t);

  std::size_t n() const { return c1_.n(); }
  std::size_t k() const { return q_.key_length(); }
  std::size_t t() const { return t_; }
  const LinearCode& C1() const { return c1_; }
  const LinearCode& C2() const { return c2_; }
  const LinearCode& C2_dual() const { return c2d_; }
  const CosetQuotient& quotient() const { return q_; }
  // Z-type checks, n - k1 rows.
  const BitMatrix& H1() const { return c1_.H(); }
  // X-type checks, k2 rows (the check matrix of C2 dual).
  const BitMatrix& H2() const { return c2d_.H(); }
  const SyndromeTable& bit_table() const { return bit_table_; }
  const SyndromeTable& phase_table() const { return phase_table_; }

 private:
  LinearCode c1_;
  LinearCode c2_;
  LinearCode c2d_;
  CosetQuotient q_;
  std::size_t t_;
  SyndromeTable bit_table_;
  SyndromeTable phase_table_;
};

// Throws DomainError when C2 is not a proper subcode of C1 or when t
// exceeds the capacity of C1 or of C2 dual.
CssCode css_build(const LinearCode& c1, const LinearCode& c2, std::size_t t);

// |C2|^{-1/2} sum_{w in C2} (-1)^{w.z} |v + w + x>. v must lie in C1.
StateVector css_codeword(const CssCode& code, const BitVector& v,
                         const CssParams& params);
StateVector css_codeword(const CssCode& code, const BitVector& v);

// Chosen Pauli where the row has a 1, identity elsewhere.
PauliString pauli_row(const BitVector& row, Pauli kind);

struct SyndromeMeasurement {
  BitVector syndrome;  // eigenvalue +1 -> 0, -1 -> 1
  StateVector state;
};

// Measures pauli_row(r, kind) for each row r of m in order.
SyndromeMeasurement measure_checks(const StateVector& s, const BitMatrix& m,
                                   Pauli kind, Rng& rng);

SyndromeMeasurement css_bit_syndrome(const CssCode& code, const StateVector& s,
                                     Rng& rng);
SyndromeMeasurement css_phase_syndrome(const CssCode& code,
                                       const StateVector& s, Rng& rng);

enum class PhaseMethod {
  x_strings,          // measure X-type checks directly
  hadamard_sandwich,  // transform, treat phase flips as bit flips, transform back
};

struct CorrectionReport {
  BitVector bit_syndrome;
  BitVector phase_syndrome;
  BitVector bit_correction;
  BitVector phase_correction;
  DecodeStatus status = DecodeStatus::ok;
  StateVector state;
};

CorrectionReport css_correct(const CssCode& code, const StateVector& s,
                             const CssParams& params, Rng& rng,
                             PhaseMethod method = PhaseMethod::x_strings);

// Applies X on e1 positions and Z on e2 positions.
StateVector inject_errors(StateVector s, const BitVector& e1,
                          const BitVector& e2);

// Key label of the coset whose codeword matches the state (|overlap| within
// 1e-6 of 1). Throws DomainError if no codeword matches.
BitVector css_identify(const CssCode& code, const StateVector& s,
                       const CssParams& params);

struct BasisReport {
  std::size_t states = 0;
  double orthonormal_error = 0;   // max |<a|b> - delta_ab|
  double overlap_error = 0;       // max deviation from the 1 / 0 branches
  double completeness_error = 0;  // max deviation of sum |psi><psi| from I
  double pair_sum_error = -1;     // sum psi (x) psi vs sum |j>|j>; -1 if skipped
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Builds all |psi_{v,x,z}> over coset keys v, x in x_set, z in z_set and
// checks orthonormality, the z-overlap branches for every z in {0,1}^n,
// resolution of the identity, and (for 2n <= 16) the paired-sum identity.
BasisReport verify_basis_identities(const CssCode& code,
                                    const std::vector<BitVector>& x_set,
                                    const std::vector<BitVector>& z_set);

}  // namespace qkdforge
