#pragma once

// Three-qubit bit-flip and phase-flip codes and the nine-qubit Shor code.

#include <array>
#include <cstddef>
#include <utility>

#include "qkdforge/qsim.hpp"

namespace qkdforge {

// t I + u X + v Y + w Z acting on one qubit (1-based).
struct ArbitraryError {
  amp_t t{1}, u{0}, v{0}, w{0};
  std::size_t qubit = 1;

  kernels::Mat2 matrix() const;
  // Throws DomainError unless the operator is unitary within 1e-9.
  void validate() const;

  // cos(theta) I + i sin(theta) X.
  static ArbitraryError rotation_x(double theta, std::size_t qubit);
  // Random e^{i phi}(cos a I - i sin a n.sigma) on a uniformly random qubit.
  static ArbitraryError random(Rng& rng, std::size_t n_qubits);
};

StateVector apply_error(StateVector s, const ArbitraryError& e);

// Syndrome outcome: 0 = no error, 1..3 = qubit flagged.
struct Syndrome3 {
  std::size_t outcome = 0;
  int first = 1;   // eigenvalue of the first observable
  int second = 1;  // eigenvalue of the second observable
};

// (+,+) -> 0, (-,+) -> 1, (-,-) -> 2, (+,-) -> 3.
std::size_t flag_from_signs(int first, int second);

StateVector bitflip_encode(amp_t a, amp_t b);
// Inverse encoder: CNOT(2,3) then CNOT(1,2).
StateVector bitflip_decode(StateVector s);
// Measures Z1Z2 then Z2Z3 and applies X to the flagged qubit.
std::pair<Syndrome3, StateVector> bitflip_syndrome_and_correct(
    const StateVector& s, Rng& rng);

StateVector phaseflip_encode(amp_t a, amp_t b);
// Measures X1X2 then X2X3 and applies Z to the flagged qubit.
std::pair<Syndrome3, StateVector> phaseflip_syndrome_and_correct(
    const StateVector& s, Rng& rng);

StateVector shor_encode(amp_t a, amp_t b);
// Direct amplitude construction of a|0_C> + b|1_C>, used to check the
// encoder circuit.
StateVector shor_codeword(amp_t a, amp_t b);

struct ShorReport {
  std::array<Syndrome3, 3> bit;  // per block, qubit numbers block-local
  Syndrome3 phase;               // outcome = block 1..3 with a sign flip
  StateVector state;
};

ShorReport shor_correct(const StateVector& s, Rng& rng);

}  // namespace qkdforge
