#pragma once

// CSS-based entanglement distillation on n EPR pairs. Joint register
// layout: Alice holds qubits 1..n, Bob holds n+1..2n.

#include <cstddef>
#include <optional>

#include "qkdforge/css.hpp"

namespace qkdforge {

inline constexpr std::size_t kMaxJointQubits = 16;

struct EprSession {
  std::size_t n = 0;
  StateVector joint{1};
};

// (1/sqrt(2^n)) sum_j |j>_A |j>_B. Throws DimensionError when 2n > 16.
EprSession create_epr(std::size_t n);

// X on Bob's qubit i where e1_i = 1, then Z where e2_i = 1.
EprSession inject_bob_errors(EprSession s, const BitVector& e1,
                             const BitVector& e2);

struct AliceMeasurement {
  BitVector sx;  // H1 checks (Z type)
  BitVector sz;  // H2 checks (X type)
  BitVector x;   // particular solution of H1 x^T = sx
  BitVector z;   // particular solution of H2 z^T = sz
  StateVector joint;
};

// Alice measures the CSS checks on her half. x_offset must lie in C1 and
// z_offset in C2 dual; they select an alternative valid x or z.
AliceMeasurement alice_measure(const CssCode& code, const EprSession& s,
                               Rng& rng,
                               const std::optional<BitVector>& x_offset = {},
                               const std::optional<BitVector>& z_offset = {});

// Normalized sum over coset keys of |psi_{v,x,z}>_A |psi_{v,x,z}>_B.
StateVector paired_codeword_sum(const CssCode& code, const BitVector& x,
                                const BitVector& z);

struct DistillReport {
  BitVector alice_sx, alice_sz;
  BitVector x, z;
  BitVector bob_sx, bob_sz;
  BitVector bob_bit_correction, bob_phase_correction;
  BitVector alice_string, bob_string;
  BitVector alice_key, bob_key;
  bool keys_match = false;
};

// Throws DomainError when Bob's shifted syndrome is outside the tables.
DistillReport run_distillation(const CssCode& code, const EprSession& s,
                               Rng& rng,
                               const std::optional<BitVector>& x_offset = {},
                               const std::optional<BitVector>& z_offset = {});

// Check pairs simulated as independent 2-qubit sessions: pair i carries
// Bob-side errors (e1_i, e2_i); both parties measure in a shared random
// basis. Returns the number of disagreeing pairs.
std::size_t check_pair_errors(const BitVector& e1, const BitVector& e2,
                              Rng& rng);

}  // namespace qkdforge
