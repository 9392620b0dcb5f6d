#include "qkdforge/bb84.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qkdforge/error.hpp"
#include "qkdforge/qsim.hpp"

namespace qkdforge {

namespace {

BasisChoice draw_basis(BasisPolicy policy, Rng& rng) {
  switch (policy) {
    case BasisPolicy::always_z: return BasisChoice::Z;
    case BasisPolicy::always_x: return BasisChoice::X;
    case BasisPolicy::uniform_random: break;
  }
  return rng.bit() ? BasisChoice::X : BasisChoice::Z;
}

StateVector prepare(bool bit, BasisChoice basis) {
  auto s = basis_state(BitVector::from_index(1, bit ? 1 : 0));
  if (basis == BasisChoice::X) s.hadamard_all();
  return s;
}

bool measure_in(StateVector s, BasisChoice basis, Rng& rng) {
  if (basis == BasisChoice::X) s.hadamard_all();
  return measure_all_z(s, rng).first[0];
}

// Chooses m of the given positions uniformly (partial Fisher-Yates) and
// returns them sorted; the rest go to `rest`, also sorted.
std::vector<std::size_t> choose(std::vector<std::size_t> pool, std::size_t m,
                                Rng& rng, std::vector<std::size_t>* rest) {
  for (std::size_t i = 0; i < m; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::size_t> picked(pool.begin(), pool.begin() + m);
  std::sort(picked.begin(), picked.end());
  if (rest) {
    rest->assign(pool.begin() + m, pool.end());
    std::sort(rest->begin(), rest->end());
  }
  return picked;
}

BitVector gather(const BitVector& src, const std::vector<std::size_t>& idx) {
  BitVectorBuilder b(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) b.set(i, src[idx[i]]);
  return std::move(b).build();
}

void validate(const SessionConfig& cfg) {
  if (cfg.n == 0) throw DomainError("block size n must be positive");
  if (!(cfg.delta >= 0)) throw DomainError("delta must be non-negative");
  auto prob = [](double p) { return p >= 0 && p <= 1; };
  if (!prob(cfg.channel.px) || !prob(cfg.channel.pz)) {
    throw DomainError("channel probabilities must lie in [0, 1]");
  }
  if (cfg.t_abort && *cfg.t_abort > cfg.n) throw DomainError("t_abort exceeds n");
  if (cfg.abort_qber && !prob(*cfg.abort_qber)) {
    throw DomainError("abort_qber must lie in [0, 1]");
  }
}

// Steps shared by both modes up to the check-bit comparison. Returns false
// when the session aborted.
bool transmit_and_check(const SessionConfig& cfg, SessionTranscript& t,
                        Rng& rng, const std::function<void()>& before_select) {
  validate(cfg);
  const std::size_t raw = cfg.raw_length();
  const std::size_t n = cfg.n;
  t.mode = cfg.mode;
  t.seed = cfg.seed;
  t.n = n;

  BitVectorBuilder d(raw), b(raw);
  for (std::size_t i = 0; i < raw; ++i) d.set(i, rng.bit());
  for (std::size_t i = 0; i < raw; ++i) {
    b.set(i, draw_basis(cfg.alice_basis, rng) == BasisChoice::X);
  }
  t.d = std::move(d).build();
  t.b = std::move(b).build();

  BitVectorBuilder bases(raw), results(raw), learned(raw);
  for (std::size_t i = 0; i < raw; ++i) {
    const auto basis = t.b[i] ? BasisChoice::X : BasisChoice::Z;
    const auto out = transmit_qubit(t.d[i], basis, cfg.channel, cfg.eve, rng);
    bases.set(i, out.bob_basis == BasisChoice::X);
    results.set(i, out.bob_bit);
    learned.set(i, out.eve_learned);
  }
  t.bob_bases = std::move(bases).build();
  t.bob_results = std::move(results).build();
  t.eve_learned = std::move(learned).build();

  before_select();

  for (std::size_t i = 0; i < raw; ++i) {
    if (t.b[i] == t.bob_bases[i]) t.sifted.push_back(i);
  }
  if (t.sifted.size() < 2 * n) {
    t.aborted = true;
    t.abort_reason = "fewer than 2n sifted bits";
    return false;
  }

  t.selected = choose(t.sifted, 2 * n, rng, nullptr);
  t.check_idx = choose(t.selected, n, rng, &t.key_idx);

  for (auto i : t.check_idx) {
    if (t.d[i] != t.bob_results[i]) ++t.mismatches;
  }
  t.qber = static_cast<double>(t.mismatches) / static_cast<double>(n);

  t.alice_block = gather(t.d, t.key_idx);
  t.bob_block = gather(t.bob_results, t.key_idx);
  if (cfg.key_block_errors) {
    if (cfg.key_block_errors->size() != n) {
      throw DimensionError("key_block_errors must have length n");
    }
    t.bob_block = t.bob_block + *cfg.key_block_errors;
  }

  if (cfg.t_abort && t.mismatches > *cfg.t_abort) {
    t.aborted = true;
    t.abort_reason = "check-bit mismatches exceed t";
    return false;
  }
  if (cfg.abort_qber && t.qber > *cfg.abort_qber) {
    t.aborted = true;
    t.abort_reason = "check-bit error rate exceeds threshold";
    return false;
  }
  return true;
}

nlohmann::json bits_or_null(const std::optional<BitVector>& v) {
  return v ? nlohmann::json(v->to_string()) : nlohmann::json(nullptr);
}

}  // namespace

std::size_t SessionConfig::raw_length() const {
  return static_cast<std::size_t>(
      std::ceil((4.0 + delta) * static_cast<double>(n) - 1e-9));
}

QubitOutcome transmit_qubit(bool bit, BasisChoice basis,
                            const ChannelModel& channel, const EveStrategy& eve,
                            Rng& rng) {
  QubitOutcome out;
  StateVector q = prepare(bit, basis);
  if (eve.kind == EveStrategy::Kind::intercept_resend) {
    const auto eb = draw_basis(eve.basis, rng);
    const bool seen = measure_in(q, eb, rng);
    out.eve_learned = eb == basis;
    q = prepare(seen, eb);
  }
  const bool fx = rng.bernoulli(channel.px);
  const bool fz = rng.bernoulli(channel.pz);
  if (fx) q.gate(Gate::X, 1);
  if (fz) q.gate(Gate::Z, 1);
  out.bob_basis = rng.bit() ? BasisChoice::X : BasisChoice::Z;
  out.bob_bit = measure_in(std::move(q), out.bob_basis, rng);
  return out;
}

SessionTranscript run_standard(const SessionConfig& cfg) {
  if (cfg.mode != Mode::standard) throw DomainError("run_standard needs standard mode");
  Rng rng(cfg.seed);
  SessionTranscript t;
  if (!transmit_and_check(cfg, t, rng, [] {})) return t;

  BitVector bob = t.bob_block;
  if (cfg.reconcile) bob = cfg.reconcile(t.alice_block, bob);
  t.alice_key = t.alice_block;
  t.bob_key = bob;
  t.keys_match = *t.alice_key == *t.bob_key;

  t.pa_r = t.mismatches;
  t.pa_s = cfg.shed_bits;
  t.pa_target = static_cast<long long>(cfg.n) - static_cast<long long>(t.pa_r) -
                static_cast<long long>(t.pa_s);
  t.pa_bound = bennett_bound(t.pa_s);
  return t;
}

SessionTranscript run_shor_preskill(const SessionConfig& cfg) {
  if (cfg.mode != Mode::shor_preskill) {
    throw DomainError("run_shor_preskill needs shor_preskill mode");
  }
  if (!cfg.code) throw DomainError("shor_preskill mode needs a CSS code");
  const CssCode& code = *cfg.code;
  if (code.n() != cfg.n) {
    throw DomainError("code length " + std::to_string(code.n()) +
                      " differs from block size " + std::to_string(cfg.n));
  }
  SessionConfig local = cfg;
  if (!local.t_abort) local.t_abort = code.t();

  Rng rng(cfg.seed);
  SessionTranscript t;
  BitVector u;
  const bool ok = transmit_and_check(local, t, rng, [&] {
    BitVectorBuilder m(code.C1().k());
    for (std::size_t i = 0; i < code.C1().k(); ++i) m.set(i, rng.bit());
    u = code.C1().encode(std::move(m).build());
  });
  t.u = u;
  if (!ok) return t;

  t.x_minus_u = t.alice_block + u;
  const auto received = t.bob_block + *t.x_minus_u;  // u + e1
  const auto dec = decode(code.C1(), code.bit_table(), received);
  if (dec.status != DecodeStatus::ok) {
    t.aborted = true;
    t.abort_reason = "decode failure";
    return t;
  }
  t.u_hat = dec.word;
  t.alice_key = key_from_coset(code.quotient(), u);
  t.bob_key = key_from_coset(code.quotient(), dec.word);
  t.keys_match = *t.alice_key == *t.bob_key;
  return t;
}

SessionTranscript run_session(const SessionConfig& cfg) {
  return cfg.mode == Mode::standard ? run_standard(cfg) : run_shor_preskill(cfg);
}

double bennett_bound(std::size_t s) {
  return std::ldexp(1.0, -static_cast<int>(s)) / std::numbers::ln2;
}

double eve_info_estimate(const SessionTranscript& t) {
  if (t.sifted.empty()) return 0;
  std::size_t learned = 0;
  for (auto i : t.sifted) learned += t.eve_learned[i] ? 1 : 0;
  return static_cast<double>(learned) / static_cast<double>(t.sifted.size());
}

std::optional<BitVector> replay_bob_key(const SessionTranscript& t,
                                        const CssCode& code) {
  if (t.aborted || !t.x_minus_u) return std::nullopt;
  // Sifting from the announced b and Bob's own bases.
  std::vector<std::size_t> sifted;
  for (std::size_t i = 0; i < t.b.size(); ++i) {
    if (t.b[i] == t.bob_bases[i]) sifted.push_back(i);
  }
  if (sifted != t.sifted) return std::nullopt;
  // Key block = announced 2n selection minus announced check positions.
  std::vector<std::size_t> key;
  std::set_difference(t.selected.begin(), t.selected.end(), t.check_idx.begin(),
                      t.check_idx.end(), std::back_inserter(key));
  const auto received = gather(t.bob_results, key) + *t.x_minus_u;
  // A replay cannot see injected test errors; callers compare against runs
  // without them.
  const auto dec = decode(code.C1(), code.bit_table(), received);
  if (dec.status != DecodeStatus::ok) return std::nullopt;
  return key_from_coset(code.quotient(), dec.word);
}

nlohmann::json SessionTranscript::to_json() const {
  nlohmann::json j;
  j["mode"] = mode == Mode::standard ? "standard" : "shor-preskill";
  j["seed"] = seed;
  j["n"] = n;
  j["d"] = d.to_string();
  j["b"] = b.to_string();
  j["bobBases"] = bob_bases.to_string();
  j["bobResults"] = bob_results.to_string();
  j["sifted"] = sifted;
  j["selectedIdx"] = selected;
  j["checkIdx"] = check_idx;
  j["keyIdx"] = key_idx;
  j["mismatches"] = mismatches;
  j["qber"] = qber;
  j["aborted"] = aborted;
  j["abortReason"] = aborted ? nlohmann::json(abort_reason) : nlohmann::json(nullptr);
  j["xMinusU"] = bits_or_null(x_minus_u);
  j["uHat"] = bits_or_null(u_hat);
  j["key"] = bits_or_null(alice_key);
  j["bobKey"] = bits_or_null(bob_key);
  j["keysMatch"] = keys_match;
  j["eveLearned"] = eve_info_estimate(*this);
  if (mode == Mode::standard && !aborted) {
    j["privacy"] = {{"r", pa_r}, {"s", pa_s}, {"k", pa_target},
                    {"bound", pa_bound}};
  }
  return j;
}

std::vector<SweepRow> sweep(const SessionConfig& base,
                            const std::vector<std::uint64_t>& seeds) {
  std::vector<SweepRow> rows(seeds.size());
  const auto count = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    SessionConfig cfg = base;
    cfg.seed = seeds[static_cast<std::size_t>(i)];
    const auto t = run_session(cfg);
    rows[static_cast<std::size_t>(i)] =
        SweepRow{cfg.seed, t.qber, t.sifted.size(), t.aborted,
                 t.alice_key ? t.alice_key->to_string() : "", t.keys_match};
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "seed,qber,sifted_len,aborted,key,keys_match\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.qber << ',' << r.sifted_len << ','
        << (r.aborted ? "true" : "false") << ',' << r.key << ','
        << (r.keys_match ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace qkdforge
