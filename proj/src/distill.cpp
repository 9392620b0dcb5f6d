#include "qkdforge/distill.hpp"

#include <cmath>

#include "qkdforge/error.hpp"

namespace qkdforge {

namespace {

// Embeds an n-bit check row into one half of the 2n-qubit register.
BitVector on_half(const BitVector& row, std::size_t n, bool bob) {
  return bob ? BitVector::zeros(n).concat(row) : row.concat(BitVector::zeros(n));
}

BitMatrix on_half(const BitMatrix& m, std::size_t n, bool bob) {
  std::vector<BitVector> rows;
  for (const auto& r : m.row_vectors()) rows.push_back(on_half(r, n, bob));
  return BitMatrix(std::move(rows));
}

BitVector checked_solution(const BitMatrix& m, const BitVector& s,
                           const char* what) {
  auto x = solve_particular(m, s);
  if (!x) throw DomainError(std::string(what) + ": syndrome not in range");
  return *x;
}

}  // namespace

EprSession create_epr(std::size_t n) {
  if (n == 0 || 2 * n > kMaxJointQubits) {
    throw DimensionError("EPR session needs 1 <= n and 2n <= " +
                         std::to_string(kMaxJointQubits));
  }
  std::vector<amp_t> amps(std::size_t{1} << (2 * n), amp_t{0});
  for (std::size_t j = 0; j < (std::size_t{1} << n); ++j) {
    amps[(j << n) | j] = 1;
  }
  return EprSession{n, StateVector::from_amplitudes(std::move(amps))};
}

EprSession inject_bob_errors(EprSession s, const BitVector& e1,
                             const BitVector& e2) {
  if (e1.size() != s.n || e2.size() != s.n) {
    throw DimensionError("error patterns must have length n");
  }
  for (auto p : e1.support()) s.joint.gate(Gate::X, s.n + p + 1);
  for (auto p : e2.support()) s.joint.gate(Gate::Z, s.n + p + 1);
  return s;
}

AliceMeasurement alice_measure(const CssCode& code, const EprSession& s,
                               Rng& rng, const std::optional<BitVector>& x_offset,
                               const std::optional<BitVector>& z_offset) {
  const std::size_t n = s.n;
  if (code.n() != n) throw DimensionError("code length differs from pair count");
  auto bit = measure_checks(s.joint, on_half(code.H1(), n, false), Pauli::Z, rng);
  auto ph = measure_checks(bit.state, on_half(code.H2(), n, false), Pauli::X, rng);

  AliceMeasurement out{bit.syndrome, ph.syndrome,
                       checked_solution(code.H1(), bit.syndrome, "alice sx"),
                       checked_solution(code.H2(), ph.syndrome, "alice sz"),
                       std::move(ph.state)};
  if (x_offset) {
    if (!code.C1().contains(*x_offset)) {
      throw DomainError("x offset must be a codeword of C1");
    }
    out.x = out.x + *x_offset;
  }
  if (z_offset) {
    if (!code.C2_dual().contains(*z_offset)) {
      throw DomainError("z offset must be a codeword of C2 dual");
    }
    out.z = out.z + *z_offset;
  }
  return out;
}

StateVector paired_codeword_sum(const CssCode& code, const BitVector& x,
                                const BitVector& z) {
  const std::size_t n = code.n();
  if (2 * n > kMaxJointQubits) throw DimensionError("paired sum too large");
  const auto& q = code.quotient();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<amp_t> amps(dim * dim, amp_t{0});
  for (std::uint64_t key = 0; key < (std::uint64_t{1} << q.key_length()); ++key) {
    const auto v = q.representative(BitVector::from_index(q.key_length(), key));
    const auto psi = css_codeword(code, v, CssParams{x, z});
    for (std::size_t i = 0; i < dim; ++i) {
      if (psi[i] == amp_t{0}) continue;
      for (std::size_t j = 0; j < dim; ++j) amps[i * dim + j] += psi[i] * psi[j];
    }
  }
  return StateVector::from_amplitudes(std::move(amps));
}

DistillReport run_distillation(const CssCode& code, const EprSession& s,
                               Rng& rng, const std::optional<BitVector>& x_offset,
                               const std::optional<BitVector>& z_offset) {
  const std::size_t n = s.n;
  auto alice = alice_measure(code, s, rng, x_offset, z_offset);

  DistillReport rep;
  rep.alice_sx = alice.sx;
  rep.alice_sz = alice.sz;
  rep.x = alice.x;
  rep.z = alice.z;

  auto bit = measure_checks(alice.joint, on_half(code.H1(), n, true), Pauli::Z, rng);
  auto ph = measure_checks(bit.state, on_half(code.H2(), n, true), Pauli::X, rng);
  rep.bob_sx = bit.syndrome;
  rep.bob_sz = ph.syndrome;
  StateVector joint = std::move(ph.state);

  const auto e1 = code.bit_table().lookup(
      rep.bob_sx + mat_apply(code.H1(), rep.x, Side::right));
  const auto e2 = code.phase_table().lookup(
      rep.bob_sz + mat_apply(code.H2(), rep.z, Side::right));
  if (!e1 || !e2) {
    throw DomainError("Bob's syndrome is outside the correctable set");
  }
  rep.bob_bit_correction = *e1;
  rep.bob_phase_correction = *e2;
  for (auto p : e1->support()) joint.gate(Gate::X, n + p + 1);
  for (auto p : e2->support()) joint.gate(Gate::Z, n + p + 1);

  auto [bits, collapsed] = measure_all_z(joint, rng);
  rep.alice_string = bits.slice(0, n);
  rep.bob_string = bits.slice(n, n);
  const auto& q = code.quotient();
  rep.alice_key = key_from_coset(q, rep.alice_string + rep.x);
  rep.bob_key = key_from_coset(q, rep.bob_string + rep.x);
  rep.keys_match = rep.alice_key == rep.bob_key;
  return rep;
}

std::size_t check_pair_errors(const BitVector& e1, const BitVector& e2,
                              Rng& rng) {
  if (e1.size() != e2.size()) throw DimensionError("check error length mismatch");
  std::size_t bad = 0;
  for (std::size_t i = 0; i < e1.size(); ++i) {
    auto pair = inject_bob_errors(create_epr(1), BitVector::from_index(1, e1[i]),
                                  BitVector::from_index(1, e2[i]));
    if (rng.bit()) pair.joint.hadamard_all();
    auto [bits, post] = measure_all_z(pair.joint, rng);
    if (bits[0] != bits[1]) ++bad;
  }
  return bad;
}

}  // namespace qkdforge
