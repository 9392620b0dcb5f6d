#include "qkdforge/css.hpp"

#include <algorithm>
#include <cmath>

#include "qkdforge/error.hpp"

namespace qkdforge {

namespace {

void check_len(const BitVector& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(n) + ", got " +
                         std::to_string(v.size()));
  }
}

CosetQuotient checked_quotient(const LinearCode& c1, const LinearCode& c2) {
  auto q = quotient(c1, c2);
  if (q.key_length() == 0) {
    throw DomainError("C2 equals C1; the CSS code would encode no qubits");
  }
  return q;
}

void apply_pattern(StateVector& s, const BitVector& e, Gate g) {
  for (auto p : e.support()) s.gate(g, p + 1);
}

}  // namespace

CssCode::CssCode(LinearCode c1, LinearCode c2, std::size_t t)
    : c1_(std::move(c1)),
      c2_(std::move(c2)),
      c2d_(dual(c2_)),
      q_(checked_quotient(c1_, c2_)),
      t_(t) {
  const auto t1 = c1_.min_weight().t;
  const auto t2 = c2d_.min_weight().t;
  if (t > std::min(t1, t2)) {
    throw DomainError("requested t=" + std::to_string(t) +
                      " exceeds capacity (C1 corrects " + std::to_string(t1) +
                      ", C2 dual corrects " + std::to_string(t2) + ")");
  }
  bit_table_ = build_syndrome_table(c1_, t);
  phase_table_ = build_syndrome_table(c2d_, t);
}

CssCode css_build(const LinearCode& c1, const LinearCode& c2, std::size_t t) {
  return CssCode(c1, c2, t);
}

StateVector css_codeword(const CssCode& code, const BitVector& v,
                         const CssParams& params) {
  const std::size_t n = code.n();
  check_len(v, n, "css_codeword v");
  check_len(params.x, n, "css_codeword x");
  check_len(params.z, n, "css_codeword z");
  if (!code.C1().contains(v)) {
    throw DomainError("css_codeword: " + v.to_string() + " is not in C1");
  }
  StateVector s(n);
  auto& amps = s.mutable_amps();
  amps[0] = 0;
  for (const auto& w : code.C2().codewords()) {
    amps[(v + w + params.x).to_index()] += vec_dot(w, params.z) ? -1.0 : 1.0;
  }
  s.normalize();
  return s;
}

StateVector css_codeword(const CssCode& code, const BitVector& v) {
  return css_codeword(code, v, CssParams::zero(code.n()));
}

PauliString pauli_row(const BitVector& row, Pauli kind) {
  std::vector<Pauli> f(row.size(), Pauli::I);
  for (auto p : row.support()) f[p] = kind;
  return PauliString(std::move(f));
}

SyndromeMeasurement measure_checks(const StateVector& s, const BitMatrix& m,
                                   Pauli kind, Rng& rng) {
  BitVectorBuilder syn(m.rows());
  StateVector cur = s;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto [rec, next] = measure_pauli_observable(cur, pauli_row(m.row(r), kind), rng);
    if (rec.eigenvalue < 0) syn.set(r);
    cur = std::move(next);
  }
  return {std::move(syn).build(), std::move(cur)};
}

SyndromeMeasurement css_bit_syndrome(const CssCode& code, const StateVector& s,
                                     Rng& rng) {
  return measure_checks(s, code.H1(), Pauli::Z, rng);
}

SyndromeMeasurement css_phase_syndrome(const CssCode& code,
                                       const StateVector& s, Rng& rng) {
  return measure_checks(s, code.H2(), Pauli::X, rng);
}

CorrectionReport css_correct(const CssCode& code, const StateVector& s,
                             const CssParams& params, Rng& rng,
                             PhaseMethod method) {
  const std::size_t n = code.n();
  check_len(params.x, n, "css_correct x");
  check_len(params.z, n, "css_correct z");
  CorrectionReport rep{BitVector{}, BitVector{}, BitVector::zeros(n),
                       BitVector::zeros(n), DecodeStatus::ok, s};

  // Bit flips first.
  auto bit = css_bit_syndrome(code, s, rng);
  rep.bit_syndrome = bit.syndrome;
  rep.state = std::move(bit.state);
  const auto bit_shift = mat_apply(code.H1(), params.x, Side::right);
  if (auto e1 = code.bit_table().lookup(rep.bit_syndrome + bit_shift)) {
    rep.bit_correction = *e1;
    apply_pattern(rep.state, *e1, Gate::X);
  } else {
    rep.status = DecodeStatus::detected_uncorrectable;
  }

  const auto phase_shift = mat_apply(code.H2(), params.z, Side::right);
  if (method == PhaseMethod::x_strings) {
    auto ph = css_phase_syndrome(code, rep.state, rng);
    rep.phase_syndrome = ph.syndrome;
    rep.state = std::move(ph.state);
    if (auto e2 = code.phase_table().lookup(rep.phase_syndrome + phase_shift)) {
      rep.phase_correction = *e2;
      apply_pattern(rep.state, *e2, Gate::Z);
    } else {
      rep.status = DecodeStatus::detected_uncorrectable;
    }
  } else {
    // In the Hadamard frame phase flips are bit flips and X-checks are
    // Z-checks.
    auto ph = measure_checks(hadamard_all(rep.state), code.H2(), Pauli::Z, rng);
    rep.phase_syndrome = ph.syndrome;
    StateVector framed = std::move(ph.state);
    if (auto e2 = code.phase_table().lookup(rep.phase_syndrome + phase_shift)) {
      rep.phase_correction = *e2;
      apply_pattern(framed, *e2, Gate::X);
    } else {
      rep.status = DecodeStatus::detected_uncorrectable;
    }
    rep.state = hadamard_all(std::move(framed));
  }
  return rep;
}

StateVector inject_errors(StateVector s, const BitVector& e1,
                          const BitVector& e2) {
  check_len(e1, s.qubits(), "inject_errors e1");
  check_len(e2, s.qubits(), "inject_errors e2");
  apply_pattern(s, e1, Gate::X);
  apply_pattern(s, e2, Gate::Z);
  return s;
}

BitVector css_identify(const CssCode& code, const StateVector& s,
                       const CssParams& params) {
  const auto& q = code.quotient();
  const std::uint64_t count = std::uint64_t{1} << q.key_length();
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto key = BitVector::from_index(q.key_length(), i);
    const auto ref = css_codeword(code, q.representative(key), params);
    if (fidelity(ref, s) > 1.0 - 1e-6) return key;
  }
  throw DomainError("css_identify: state is not a codeword of this code");
}

// ------------------------------------------------------ basis identities

BasisReport verify_basis_identities(const CssCode& code,
                                    const std::vector<BitVector>& x_set,
                                    const std::vector<BitVector>& z_set) {
  const std::size_t n = code.n();
  const auto& q = code.quotient();
  BasisReport rep;

  std::vector<StateVector> psi;
  const std::uint64_t keys = std::uint64_t{1} << q.key_length();
  for (std::uint64_t key = 0; key < keys; ++key) {
    const auto v = q.representative(BitVector::from_index(q.key_length(), key));
    for (const auto& x : x_set) {
      const auto plain = css_codeword(code, v, CssParams{x, BitVector::zeros(n)});
      // Overlap branches over every z in {0,1}^n.
      for (std::uint64_t zi = 0; zi < (std::uint64_t{1} << n); ++zi) {
        const auto z = BitVector::from_index(n, zi);
        const double want = code.C2_dual().contains(z) ? 1.0 : 0.0;
        const auto got = overlap(css_codeword(code, v, CssParams{x, z}), plain);
        rep.overlap_error = std::max(rep.overlap_error, std::abs(got - want));
      }
      for (const auto& z : z_set) psi.push_back(css_codeword(code, v, {x, z}));
    }
  }
  rep.states = psi.size();
  if (psi.size() != (std::size_t{1} << n)) {
    rep.failures.push_back("expected 2^n = " + std::to_string(1U << n) +
                           " states, built " + std::to_string(psi.size()));
  }

  for (std::size_t a = 0; a < psi.size(); ++a) {
    for (std::size_t b = a; b < psi.size(); ++b) {
      const double want = a == b ? 1.0 : 0.0;
      rep.orthonormal_error = std::max(
          rep.orthonormal_error, std::abs(overlap(psi[a], psi[b]) - want));
    }
  }

  // sum_psi |psi><psi| j> for each basis ket j.
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<amp_t> acc(dim, amp_t{0});
    for (const auto& p : psi) {
      const amp_t c = std::conj(p[j]);
      if (c == amp_t{0}) continue;
      for (std::size_t i = 0; i < dim; ++i) acc[i] += c * p[i];
    }
    for (std::size_t i = 0; i < dim; ++i) {
      const double want = i == j ? 1.0 : 0.0;
      rep.completeness_error =
          std::max(rep.completeness_error, std::abs(acc[i] - want));
    }
  }

  if (2 * n <= 16) {
    std::vector<amp_t> pair(dim * dim, amp_t{0});
    for (const auto& p : psi) {
      for (std::size_t i = 0; i < dim; ++i) {
        if (p[i] == amp_t{0}) continue;
        for (std::size_t k = 0; k < dim; ++k) pair[i * dim + k] += p[i] * p[k];
      }
    }
    rep.pair_sum_error = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        const double want = i == k ? 1.0 : 0.0;
        rep.pair_sum_error =
            std::max(rep.pair_sum_error, std::abs(pair[i * dim + k] - want));
      }
    }
  }

  if (rep.orthonormal_error > kTol) rep.failures.push_back("orthonormality");
  if (rep.overlap_error > kTol) rep.failures.push_back("z-overlap branches");
  if (rep.completeness_error > kTol) rep.failures.push_back("completeness");
  if (rep.pair_sum_error > kTol) rep.failures.push_back("paired sum");
  return rep;
}

}  // namespace qkdforge
