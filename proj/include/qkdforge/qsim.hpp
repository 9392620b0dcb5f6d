#pragma once

// Dense state-vector simulator. Qubits are numbered 1..n from the left;
// qubit 1 is the most significant bit of the basis index.

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qkdforge/gf2.hpp"
#include "qkdforge/kernels.hpp"
#include "qkdforge/rng.hpp"
#include "json.hpp"

namespace qkdforge {

using amp_t = std::complex<double>;

inline constexpr double kTol = 1e-9;
inline constexpr std::size_t kDefaultMaxQubits = 20;

std::size_t max_qubits();
void set_max_qubits(std::size_t n);

enum class Gate { X, Y, Z, H };
enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<Pauli> factors) : f_(std::move(factors)) {}
  // Characters I, X, Y, Z.
  static PauliString parse(std::string_view text);
  static PauliString identity(std::size_t n);

  std::size_t size() const { return f_.size(); }
  Pauli operator[](std::size_t i) const { return f_[i]; }
  const std::vector<Pauli>& factors() const { return f_; }
  std::string to_string() const;
  kernels::PauliMask mask() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::vector<Pauli> f_;
};

class StateVector {
 public:
  // |0...0> on n qubits.
  explicit StateVector(std::size_t n);
  // Takes amplitudes as given and normalizes; throws on zero norm or a
  // size that is not 2^n.
  static StateVector from_amplitudes(std::vector<amp_t> amps);
  // Superposition sum_i c_i |bits_i>, normalized.
  static StateVector superposition(
      const std::vector<std::pair<BitVector, amp_t>>& terms);

  std::size_t qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<amp_t>& amps() const { return amps_; }
  amp_t amp(const BitVector& bits) const;
  amp_t operator[](std::size_t index) const { return amps_[index]; }
  double norm() const;

  // Index mask for 1-based qubit q; throws DimensionError when out of range.
  std::uint64_t mask(std::size_t q) const;

  // In-place mutators used by the free functions below.
  StateVector& gate(Gate g, std::size_t q);
  StateVector& unitary(const kernels::Mat2& m, std::size_t q);
  StateVector& cnot(std::size_t control, std::size_t target);
  StateVector& pauli(const PauliString& p);
  StateVector& hadamard_all();
  StateVector& normalize();

  std::vector<amp_t>& mutable_amps() { return amps_; }

 private:
  StateVector() = default;
  std::size_t n_ = 0;
  std::vector<amp_t> amps_;
};

StateVector basis_state(const BitVector& bits);
StateVector apply_gate(StateVector s, Gate g, std::size_t qubit);
StateVector apply_cnot(StateVector s, std::size_t control, std::size_t target);
StateVector apply_pauli_string(StateVector s, const PauliString& p);
StateVector hadamard_all(StateVector s);

amp_t overlap(const StateVector& a, const StateVector& b);
// |<a|b>|, insensitive to global phase.
double fidelity(const StateVector& a, const StateVector& b);
// Complex expectation <psi|P|psi>.
amp_t expectation(const StateVector& s, const PauliString& p);

enum class Basis { computational, hadamard };

struct BasisProjector {
  std::vector<BitVector> kets;
  Basis basis = Basis::computational;
};

struct MeasurementRecord {
  std::size_t outcome = 0;
  double probability = 0;
  int eigenvalue = 0;  // +1/-1 for observables, 0 otherwise
};

// Born probability <psi|P|psi> of one projector.
double projector_probability(const StateVector& s, const BasisProjector& p);

// Rejects projector sets with repeated or shared kets, mixed bases, or
// total probability on the state differing from 1 by more than 1e-9.
std::pair<MeasurementRecord, StateVector> measure_projective(
    const StateVector& s, const std::vector<BasisProjector>& projectors,
    Rng& rng);

std::pair<MeasurementRecord, StateVector> measure_pauli_observable(
    const StateVector& s, const PauliString& p, Rng& rng);

std::pair<BitVector, StateVector> measure_all_z(const StateVector& s,
                                                Rng& rng);

// Array of [basis string, re, im] for amplitudes with modulus above 1e-12.
nlohmann::json debug_dump(const StateVector& s);

}  // namespace qkdforge
