#pragma once

// Amplitude-loop kernels. Each kernel exists in a plain serial form and an
// OpenMP form with identical results; the serial form is the reference used
// by the tests. Masks select qubits as bits of the basis index.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

namespace qkdforge::kernels {

using amp_t = std::complex<double>;
using Amps = std::span<amp_t>;
using ConstAmps = std::span<const amp_t>;

// Single-qubit 2x2 matrix [[m00, m01], [m10, m11]].
struct Mat2 {
  amp_t m00, m01, m10, m11;
};

// A Pauli string in mask form: X on xmask bits, Z on zmask bits, with Y
// counted in both masks and ny giving the number of Y factors.
struct PauliMask {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  unsigned ny = 0;
};

#define QKDFORGE_KERNEL_DECLS                                              \
  void apply_1q(Amps a, std::uint64_t mask, const Mat2& m);                \
  void apply_x(Amps a, std::uint64_t mask);                                \
  void apply_z(Amps a, std::uint64_t mask);                                \
  void apply_cnot(Amps a, std::uint64_t control, std::uint64_t target);    \
  void apply_pauli(Amps a, const PauliMask& p);                            \
  void hadamard_all(Amps a);                                               \
  double norm_sq(ConstAmps a);                                             \
  amp_t inner(ConstAmps a, ConstAmps b);                                   \
  amp_t pauli_expectation(ConstAmps a, const PauliMask& p);                \
  void scale(Amps a, double f);

namespace serial {
QKDFORGE_KERNEL_DECLS
}
namespace parallel {
QKDFORGE_KERNEL_DECLS
}

#undef QKDFORGE_KERNEL_DECLS

// States with at least this many qubits use the parallel kernels.
std::size_t parallel_threshold();
void set_parallel_threshold(std::size_t qubits);

}  // namespace qkdforge::kernels
