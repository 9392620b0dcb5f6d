#include "qkdforge/qec3.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "qkdforge/error.hpp"

namespace qkdforge {

namespace {

void check_normalized(amp_t a, amp_t b) {
  const double nrm = std::norm(a) + std::norm(b);
  if (std::abs(nrm - 1.0) > kTol) {
    throw DomainError("|a|^2 + |b|^2 = " + std::to_string(nrm) + ", not 1");
  }
}

PauliString two_body(std::size_t n, std::size_t i, std::size_t j, Pauli p) {
  std::vector<Pauli> f(n, Pauli::I);
  f[i - 1] = p;
  f[j - 1] = p;
  return PauliString(std::move(f));
}

// Measures two observables and applies gate g to the flagged qubit,
// offset by base within a larger register.
std::pair<Syndrome3, StateVector> measure_pair_and_fix(
    const StateVector& s, const PauliString& first, const PauliString& second,
    Gate g, std::size_t base, Rng& rng) {
  auto [r1, s1] = measure_pauli_observable(s, first, rng);
  auto [r2, s2] = measure_pauli_observable(s1, second, rng);
  Syndrome3 syn{flag_from_signs(r1.eigenvalue, r2.eigenvalue), r1.eigenvalue,
                r2.eigenvalue};
  if (syn.outcome != 0) s2.gate(g, base + syn.outcome);
  return {syn, std::move(s2)};
}

}  // namespace

kernels::Mat2 ArbitraryError::matrix() const {
  const amp_t i{0, 1};
  return {t + w, u - i * v, u + i * v, t - w};
}

void ArbitraryError::validate() const {
  const auto m = matrix();
  // Columns of a unitary are orthonormal.
  const double c0 = std::norm(m.m00) + std::norm(m.m10);
  const double c1 = std::norm(m.m01) + std::norm(m.m11);
  const amp_t cross = std::conj(m.m00) * m.m01 + std::conj(m.m10) * m.m11;
  if (std::abs(c0 - 1) > kTol || std::abs(c1 - 1) > kTol ||
      std::abs(cross) > kTol) {
    throw DomainError("error operator is not unitary");
  }
}

ArbitraryError ArbitraryError::rotation_x(double theta, std::size_t qubit) {
  return ArbitraryError{std::cos(theta), amp_t(0, std::sin(theta)), 0, 0,
                        qubit};
}

ArbitraryError ArbitraryError::random(Rng& rng, std::size_t n_qubits) {
  const double phi = 2 * std::numbers::pi * rng.uniform();
  const double alpha = 2 * std::numbers::pi * rng.uniform();
  // Uniform direction on the sphere.
  const double cz = 2 * rng.uniform() - 1;
  const double az = 2 * std::numbers::pi * rng.uniform();
  const double sz = std::sqrt(std::max(0.0, 1 - cz * cz));
  const double nx = sz * std::cos(az), ny = sz * std::sin(az), nz = cz;
  const std::size_t q = 1 + static_cast<std::size_t>(rng.below(n_qubits));

  const amp_t g = std::polar(1.0, phi);
  const amp_t mi{0, -1};
  const double sa = std::sin(alpha);
  ArbitraryError e{g * std::cos(alpha), g * mi * sa * nx, g * mi * sa * ny,
                   g * mi * sa * nz, q};
  e.validate();
  return e;
}

StateVector apply_error(StateVector s, const ArbitraryError& e) {
  e.validate();
  s.unitary(e.matrix(), e.qubit);
  return s;
}

std::size_t flag_from_signs(int first, int second) {
  if (first > 0 && second > 0) return 0;
  if (first < 0 && second > 0) return 1;
  if (first < 0 && second < 0) return 2;
  return 3;
}

// -------------------------------------------------------------- bit flip

StateVector bitflip_encode(amp_t a, amp_t b) {
  check_normalized(a, b);
  auto s = StateVector::from_amplitudes({a, 0, 0, 0, b, 0, 0, 0});
  s.cnot(1, 2).cnot(2, 3);
  return s;
}

StateVector bitflip_decode(StateVector s) {
  s.cnot(2, 3).cnot(1, 2);
  return s;
}

std::pair<Syndrome3, StateVector> bitflip_syndrome_and_correct(
    const StateVector& s, Rng& rng) {
  return measure_pair_and_fix(s, two_body(3, 1, 2, Pauli::Z),
                              two_body(3, 2, 3, Pauli::Z), Gate::X, 0, rng);
}

// ------------------------------------------------------------ phase flip

StateVector phaseflip_encode(amp_t a, amp_t b) {
  return hadamard_all(bitflip_encode(a, b));
}

std::pair<Syndrome3, StateVector> phaseflip_syndrome_and_correct(
    const StateVector& s, Rng& rng) {
  return measure_pair_and_fix(s, two_body(3, 1, 2, Pauli::X),
                              two_body(3, 2, 3, Pauli::X), Gate::Z, 0, rng);
}

// ------------------------------------------------------------------ Shor

StateVector shor_encode(amp_t a, amp_t b) {
  check_normalized(a, b);
  StateVector s(9);
  auto& amps = s.mutable_amps();
  amps[0] = a;
  amps[std::size_t{1} << 8] = b;
  s.cnot(1, 4).cnot(1, 7);
  s.gate(Gate::H, 1).gate(Gate::H, 4).gate(Gate::H, 7);
  for (std::size_t lead : {1, 4, 7}) s.cnot(lead, lead + 1).cnot(lead, lead + 2);
  return s;
}

StateVector shor_codeword(amp_t a, amp_t b) {
  check_normalized(a, b);
  // (|000> +- |111>)^{x3}: each term picks 000 or 111 per block with sign
  // (-1)^{number of 111 blocks} for the minus branch.
  std::vector<amp_t> amps(std::size_t{1} << 9, amp_t{0});
  const double c = 1.0 / (2.0 * std::sqrt(2.0));
  for (unsigned pick = 0; pick < 8; ++pick) {
    std::size_t idx = 0;
    for (unsigned blk = 0; blk < 3; ++blk) {
      idx <<= 3;
      if (pick & (4U >> blk)) idx |= 7;
    }
    const int ones = std::popcount(pick);
    amps[idx] += c * (a + ((ones & 1) ? -b : b));
  }
  return StateVector::from_amplitudes(std::move(amps));
}

ShorReport shor_correct(const StateVector& s, Rng& rng) {
  if (s.qubits() != 9) throw DimensionError("Shor code needs 9 qubits");
  ShorReport rep{{}, {}, s};
  for (std::size_t blk = 0; blk < 3; ++blk) {
    const std::size_t base = 3 * blk;
    auto [syn, next] = measure_pair_and_fix(
        rep.state, two_body(9, base + 1, base + 2, Pauli::Z),
        two_body(9, base + 2, base + 3, Pauli::Z), Gate::X, base, rng);
    rep.bit[blk] = syn;
    rep.state = std::move(next);
  }

  auto block_pair = [](std::size_t first_block) {
    std::vector<Pauli> f(9, Pauli::I);
    for (std::size_t q = 3 * first_block; q < 3 * first_block + 6; ++q) {
      f[q] = Pauli::X;
    }
    return PauliString(std::move(f));
  };
  auto [r1, s1] = measure_pauli_observable(rep.state, block_pair(0), rng);
  auto [r2, s2] = measure_pauli_observable(s1, block_pair(1), rng);
  rep.phase = {flag_from_signs(r1.eigenvalue, r2.eigenvalue), r1.eigenvalue,
               r2.eigenvalue};
  if (rep.phase.outcome != 0) s2.gate(Gate::Z, 3 * (rep.phase.outcome - 1) + 1);
  rep.state = std::move(s2);
  return rep;
}

}  // namespace qkdforge
