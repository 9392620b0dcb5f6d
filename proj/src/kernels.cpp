#include "qkdforge/kernels.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>

namespace qkdforge::kernels {

namespace {

std::atomic<std::size_t> g_threshold{14};

// Phase picked up by |i> under the Pauli string: i^ny (-1)^{|i & z|}.
inline amp_t pauli_phase(std::uint64_t i, const PauliMask& p) {
  static const amp_t ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  amp_t ph = ipow[p.ny & 3U];
  return (std::popcount(i & p.z) & 1) ? -ph : ph;
}

inline std::int64_t dim_of(std::size_t size) {
  return static_cast<std::int64_t>(size);
}

}  // namespace

std::size_t parallel_threshold() { return g_threshold.load(); }
void set_parallel_threshold(std::size_t qubits) { g_threshold.store(qubits); }

// ------------------------------------------------------------------ serial

namespace serial {

void apply_1q(Amps a, std::uint64_t mask, const Mat2& m) {
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (i & mask) continue;
    const amp_t a0 = a[i];
    const amp_t a1 = a[i | mask];
    a[i] = m.m00 * a0 + m.m01 * a1;
    a[i | mask] = m.m10 * a0 + m.m11 * a1;
  }
}

void apply_x(Amps a, std::uint64_t mask) {
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (!(i & mask)) std::swap(a[i], a[i | mask]);
  }
}

void apply_z(Amps a, std::uint64_t mask) {
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (i & mask) a[i] = -a[i];
  }
}

void apply_cnot(Amps a, std::uint64_t control, std::uint64_t target) {
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if ((i & control) && !(i & target)) std::swap(a[i], a[i | target]);
  }
}

void apply_pauli(Amps a, const PauliMask& p) {
  if (p.x == 0) {
    for (std::uint64_t i = 0; i < a.size(); ++i) a[i] *= pauli_phase(i, p);
    return;
  }
  const std::uint64_t top = std::bit_floor(p.x);
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (i & top) continue;
    const std::uint64_t j = i ^ p.x;
    const amp_t ai = a[i];
    const amp_t aj = a[j];
    a[j] = pauli_phase(i, p) * ai;
    a[i] = pauli_phase(j, p) * aj;
  }
}

void hadamard_all(Amps a) {
  for (std::uint64_t h = 1; h < a.size(); h <<= 1) {
    for (std::uint64_t i = 0; i < a.size(); ++i) {
      if (i & h) continue;
      const amp_t u = a[i];
      const amp_t v = a[i | h];
      a[i] = u + v;
      a[i | h] = u - v;
    }
  }
  scale(a, 1.0 / std::sqrt(static_cast<double>(a.size())));
}

double norm_sq(ConstAmps a) {
  double s = 0;
  for (const auto& v : a) s += std::norm(v);
  return s;
}

amp_t inner(ConstAmps a, ConstAmps b) {
  amp_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

amp_t pauli_expectation(ConstAmps a, const PauliMask& p) {
  amp_t s = 0;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    s += std::conj(a[i ^ p.x]) * pauli_phase(i, p) * a[i];
  }
  return s;
}

void scale(Amps a, double f) {
  for (auto& v : a) v *= f;
}

}  // namespace serial

// ---------------------------------------------------------------- parallel

namespace parallel {

void apply_1q(Amps a, std::uint64_t mask, const Mat2& m) {
  const std::int64_t dim = dim_of(a.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < dim; ++s) {
    const auto i = static_cast<std::uint64_t>(s);
    if (i & mask) continue;
    const amp_t a0 = a[i];
    const amp_t a1 = a[i | mask];
    a[i] = m.m00 * a0 + m.m01 * a1;
    a[i | mask] = m.m10 * a0 + m.m11 * a1;
  }
}

void apply_x(Amps a, std::uint64_t mask) {
  const std::int64_t dim = dim_of(a.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < dim; ++s) {
    const auto i = static_cast<std::uint64_t>(s);
    if (!(i & mask)) std::swap(a[i], a[i | mask]);
  }
}

void apply_z(Amps a, std::uint64_t mask) {
  const std::int64_t dim = dim_of(a.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < dim; ++s) {
    const auto i = static_cast<std::uint64_t>(s);
    if (i & mask) a[i] = -a[i];
  }
}

void apply_cnot(Amps a, std::uint64_t control, std::uint64_t target) {
  const std::int64_t dim = dim_of(a.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < dim; ++s) {
    const auto i = static_cast<std::uint64_t>(s);
    if ((i & control) && !(i & target)) std::swap(a[i], a[i | target]);
  }
}

void apply_pauli(Amps a, const PauliMask& p) {
  const std::int64_t dim = dim_of(a.size());
  if (p.x == 0) {
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < dim; ++s) {
      const auto i = static_cast<std::uint64_t>(s);
      a[i] *= pauli_phase(i, p);
    }
    return;
  }
  const std::uint64_t top = std::bit_floor(p.x);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < dim; ++s) {
    const auto i = static_cast<std::uint64_t>(s);
    if (i & top) continue;
    const std::uint64_t j = i ^ p.x;
    const amp_t ai = a[i];
    const amp_t aj = a[j];
    a[j] = pauli_phase(i, p) * ai;
    a[i] = pauli_phase(j, p) * aj;
  }
}

void hadamard_all(Amps a) {
  const std::int64_t dim = dim_of(a.size());
  for (std::uint64_t h = 1; h < a.size(); h <<= 1) {
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < dim; ++s) {
      const auto i = static_cast<std::uint64_t>(s);
      if (i & h) continue;
      const amp_t u = a[i];
      const amp_t v = a[i | h];
      a[i] = u + v;
      a[i | h] = u - v;
    }
  }
  scale(a, 1.0 / std::sqrt(static_cast<double>(a.size())));
}

double norm_sq(ConstAmps a) {
  const std::int64_t dim = dim_of(a.size());
  double s = 0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::int64_t i = 0; i < dim; ++i) s += std::norm(a[i]);
  return s;
}

amp_t inner(ConstAmps a, ConstAmps b) {
  const std::int64_t dim = dim_of(a.size());
  double re = 0, im = 0;
#pragma omp parallel for reduction(+ : re, im) schedule(static)
  for (std::int64_t i = 0; i < dim; ++i) {
    const amp_t t = std::conj(a[i]) * b[i];
    re += t.real();
    im += t.imag();
  }
  return {re, im};
}

amp_t pauli_expectation(ConstAmps a, const PauliMask& p) {
  const std::int64_t dim = dim_of(a.size());
  double re = 0, im = 0;
#pragma omp parallel for reduction(+ : re, im) schedule(static)
  for (std::int64_t s = 0; s < dim; ++s) {
    const auto i = static_cast<std::uint64_t>(s);
    const amp_t t = std::conj(a[i ^ p.x]) * pauli_phase(i, p) * a[i];
    re += t.real();
    im += t.imag();
  }
  return {re, im};
}

void scale(Amps a, double f) {
  const std::int64_t dim = dim_of(a.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < dim; ++i) a[i] *= f;
}

}  // namespace parallel

}  // namespace qkdforge::kernels
