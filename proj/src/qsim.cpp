#include "qkdforge/qsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>

#include "qkdforge/error.hpp"

namespace qkdforge {

namespace {

std::atomic<std::size_t> g_max_qubits{kDefaultMaxQubits};

bool use_parallel(std::size_t n) { return n >= kernels::parallel_threshold(); }

#define QKDFORGE_DISPATCH(n, fn, ...)                       \
  (use_parallel(n) ? kernels::parallel::fn(__VA_ARGS__)     \
                   : kernels::serial::fn(__VA_ARGS__))

std::size_t qubits_for_dim(std::size_t dim) {
  if (dim == 0 || (dim & (dim - 1)) != 0) {
    throw DimensionError("amplitude count " + std::to_string(dim) +
                         " is not a power of two");
  }
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

const kernels::Mat2& gate_matrix(Gate g) {
  static const double r = 1.0 / std::sqrt(2.0);
  static const kernels::Mat2 x{0, 1, 1, 0};
  static const kernels::Mat2 y{0, amp_t(0, -1), amp_t(0, 1), 0};
  static const kernels::Mat2 z{1, 0, 0, -1};
  static const kernels::Mat2 h{r, r, r, -r};
  switch (g) {
    case Gate::X: return x;
    case Gate::Y: return y;
    case Gate::Z: return z;
    case Gate::H: return h;
  }
  return x;
}

void check_same_size(const StateVector& a, const StateVector& b) {
  if (a.qubits() != b.qubits()) {
    throw DimensionError("states have different qubit counts");
  }
}

}  // namespace

std::size_t max_qubits() { return g_max_qubits.load(); }
void set_max_qubits(std::size_t n) { g_max_qubits.store(n); }

// -------------------------------------------------------------- PauliString

PauliString PauliString::parse(std::string_view text) {
  std::vector<Pauli> f;
  f.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case 'I': f.push_back(Pauli::I); break;
      case 'X': f.push_back(Pauli::X); break;
      case 'Y': f.push_back(Pauli::Y); break;
      case 'Z': f.push_back(Pauli::Z); break;
      default:
        throw DimensionError("bad Pauli character '" + std::string(1, c) + "'");
    }
  }
  return PauliString(std::move(f));
}

PauliString PauliString::identity(std::size_t n) {
  return PauliString(std::vector<Pauli>(n, Pauli::I));
}

std::string PauliString::to_string() const {
  std::string s;
  for (auto p : f_) s += static_cast<char>(p);
  return s;
}

kernels::PauliMask PauliString::mask() const {
  kernels::PauliMask m;
  const std::size_t n = f_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - i);
    switch (f_[i]) {
      case Pauli::I: break;
      case Pauli::X: m.x |= bit; break;
      case Pauli::Z: m.z |= bit; break;
      case Pauli::Y:
        m.x |= bit;
        m.z |= bit;
        ++m.ny;
        break;
    }
  }
  return m;
}

// -------------------------------------------------------------- StateVector

StateVector::StateVector(std::size_t n) : n_(n) {
  if (n == 0 || n > max_qubits()) {
    throw DimensionError("qubit count " + std::to_string(n) +
                         " outside 1.." + std::to_string(max_qubits()));
  }
  amps_.assign(std::size_t{1} << n, amp_t{0});
  amps_[0] = 1;
}

StateVector StateVector::from_amplitudes(std::vector<amp_t> amps) {
  const std::size_t n = qubits_for_dim(amps.size());
  if (n == 0 || n > max_qubits()) {
    throw DimensionError("qubit count outside 1.." +
                         std::to_string(max_qubits()));
  }
  StateVector s;
  s.n_ = n;
  s.amps_ = std::move(amps);
  s.normalize();
  return s;
}

StateVector StateVector::superposition(
    const std::vector<std::pair<BitVector, amp_t>>& terms) {
  if (terms.empty()) throw DomainError("superposition of no terms");
  StateVector s(terms.front().first.size());
  s.amps_[0] = 0;
  for (const auto& [bits, c] : terms) {
    if (bits.size() != s.n_) throw DimensionError("ragged superposition terms");
    s.amps_[bits.to_index()] += c;
  }
  s.normalize();
  return s;
}

amp_t StateVector::amp(const BitVector& bits) const {
  if (bits.size() != n_) throw DimensionError("basis string length mismatch");
  return amps_[bits.to_index()];
}

double StateVector::norm() const {
  return std::sqrt(QKDFORGE_DISPATCH(n_, norm_sq, amps_));
}

std::uint64_t StateVector::mask(std::size_t q) const {
  if (q < 1 || q > n_) {
    throw DimensionError("qubit index " + std::to_string(q) + " outside 1.." +
                         std::to_string(n_));
  }
  return std::uint64_t{1} << (n_ - q);
}

StateVector& StateVector::gate(Gate g, std::size_t q) {
  const auto m = mask(q);
  switch (g) {
    case Gate::X: QKDFORGE_DISPATCH(n_, apply_x, amps_, m); break;
    case Gate::Z: QKDFORGE_DISPATCH(n_, apply_z, amps_, m); break;
    default: QKDFORGE_DISPATCH(n_, apply_1q, amps_, m, gate_matrix(g)); break;
  }
  return *this;
}

StateVector& StateVector::unitary(const kernels::Mat2& m, std::size_t q) {
  QKDFORGE_DISPATCH(n_, apply_1q, amps_, mask(q), m);
  return *this;
}

StateVector& StateVector::cnot(std::size_t control, std::size_t target) {
  if (control == target) throw DimensionError("CNOT control equals target");
  const auto c = mask(control);
  const auto t = mask(target);
  QKDFORGE_DISPATCH(n_, apply_cnot, amps_, c, t);
  return *this;
}

StateVector& StateVector::pauli(const PauliString& p) {
  if (p.size() != n_) {
    throw DimensionError("Pauli string length " + std::to_string(p.size()) +
                         " differs from qubit count " + std::to_string(n_));
  }
  QKDFORGE_DISPATCH(n_, apply_pauli, amps_, p.mask());
  return *this;
}

StateVector& StateVector::hadamard_all() {
  QKDFORGE_DISPATCH(n_, hadamard_all, amps_);
  return *this;
}

StateVector& StateVector::normalize() {
  const double nrm = norm();
  if (nrm < 1e-300) throw DomainError("cannot normalize the zero vector");
  QKDFORGE_DISPATCH(n_, scale, amps_, 1.0 / nrm);
  return *this;
}

// --------------------------------------------------------- free functions

StateVector basis_state(const BitVector& bits) {
  StateVector s(bits.size());
  auto& a = s.mutable_amps();
  a[0] = 0;
  a[bits.to_index()] = 1;
  return s;
}

StateVector apply_gate(StateVector s, Gate g, std::size_t qubit) {
  s.gate(g, qubit);
  return s;
}

StateVector apply_cnot(StateVector s, std::size_t control, std::size_t target) {
  s.cnot(control, target);
  return s;
}

StateVector apply_pauli_string(StateVector s, const PauliString& p) {
  s.pauli(p);
  return s;
}

StateVector hadamard_all(StateVector s) {
  s.hadamard_all();
  return s;
}

amp_t overlap(const StateVector& a, const StateVector& b) {
  check_same_size(a, b);
  return QKDFORGE_DISPATCH(a.qubits(), inner, a.amps(), b.amps());
}

double fidelity(const StateVector& a, const StateVector& b) {
  return std::abs(overlap(a, b));
}

amp_t expectation(const StateVector& s, const PauliString& p) {
  if (p.size() != s.qubits()) {
    throw DimensionError("Pauli string length differs from qubit count");
  }
  return QKDFORGE_DISPATCH(s.qubits(), pauli_expectation, s.amps(), p.mask());
}

// ------------------------------------------------------------ measurement

namespace {

void check_kets(const StateVector& s, const BasisProjector& p) {
  for (const auto& k : p.kets) {
    if (k.size() != s.qubits()) {
      throw DimensionError("projector ket length differs from qubit count");
    }
  }
}

double computational_weight(const StateVector& s, const BasisProjector& p) {
  double w = 0;
  for (const auto& k : p.kets) w += std::norm(s[k.to_index()]);
  return w;
}

// Keeps only the amplitudes on the projector's kets and renormalizes.
StateVector project_computational(const StateVector& s,
                                  const BasisProjector& p) {
  std::vector<amp_t> out(s.dim(), amp_t{0});
  for (const auto& k : p.kets) {
    const auto i = k.to_index();
    out[i] = s[i];
  }
  return StateVector::from_amplitudes(std::move(out));
}

}  // namespace

double projector_probability(const StateVector& s, const BasisProjector& p) {
  check_kets(s, p);
  if (p.basis == Basis::hadamard) {
    return computational_weight(hadamard_all(s), p);
  }
  return computational_weight(s, p);
}

std::pair<MeasurementRecord, StateVector> measure_projective(
    const StateVector& s, const std::vector<BasisProjector>& projectors,
    Rng& rng) {
  if (projectors.empty()) throw DomainError("empty projector set");
  const Basis basis = projectors.front().basis;
  std::set<BitVector> seen;
  for (const auto& p : projectors) {
    check_kets(s, p);
    if (p.basis != basis) {
      throw DomainError("projectors mix computational and Hadamard bases");
    }
    for (const auto& k : p.kets) {
      if (!seen.insert(k).second) {
        throw DomainError("projectors are not orthogonal: ket " +
                          k.to_string() + " appears twice");
      }
    }
  }

  const StateVector work = basis == Basis::hadamard ? hadamard_all(s) : s;
  std::vector<double> probs;
  double total = 0;
  for (const auto& p : projectors) {
    probs.push_back(computational_weight(work, p));
    total += probs.back();
  }
  if (std::abs(total - 1.0) > kTol) {
    throw DomainError("projector set is incomplete on this state (total "
                      "probability " + std::to_string(total) + ")");
  }

  const double u = rng.uniform();
  std::size_t pick = projectors.size() - 1;
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc && probs[i] > 0) {
      pick = i;
      break;
    }
  }
  // Guard against landing on a zero-probability tail through rounding.
  while (probs[pick] <= 0 && pick > 0) --pick;

  StateVector post = project_computational(work, projectors[pick]);
  if (basis == Basis::hadamard) post.hadamard_all();
  return {MeasurementRecord{pick, probs[pick], 0}, std::move(post)};
}

std::pair<MeasurementRecord, StateVector> measure_pauli_observable(
    const StateVector& s, const PauliString& p, Rng& rng) {
  const double e = expectation(s, p).real();
  const double p_plus = std::clamp((1.0 + e) / 2.0, 0.0, 1.0);
  const double u = rng.uniform();
  const bool plus = u < p_plus;

  // (I + sign P)/2 applied to psi.
  StateVector ps = apply_pauli_string(s, p);
  auto& out = ps.mutable_amps();
  const double sign = plus ? 1.0 : -1.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.5 * (s[i] + sign * out[i]);
  }
  ps.normalize();
  return {MeasurementRecord{plus ? 0U : 1U, plus ? p_plus : 1.0 - p_plus,
                            plus ? 1 : -1},
          std::move(ps)};
}

std::pair<BitVector, StateVector> measure_all_z(const StateVector& s,
                                                Rng& rng) {
  const double u = rng.uniform() * s.norm() * s.norm();
  std::size_t pick = 0;
  double acc = 0;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const double w = std::norm(s[i]);
    if (w == 0) continue;
    pick = i;
    acc += w;
    if (u < acc) break;
  }
  auto bits = BitVector::from_index(s.qubits(), pick);
  return {bits, basis_state(bits)};
}

nlohmann::json debug_dump(const StateVector& s) {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < s.dim(); ++i) {
    if (std::abs(s[i]) > 1e-12) {
      out.push_back({BitVector::from_index(s.qubits(), i).to_string(),
                     s[i].real(), s[i].imag()});
    }
  }
  return out;
}

}  // namespace qkdforge
