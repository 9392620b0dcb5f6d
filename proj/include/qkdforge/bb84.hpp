#pragma once

// BB84 in its standard form and in the Shor-Preskill form, with per-qubit
// transmission through the state-vector simulator.
//
// Random draw order for one session (single Rng seeded from the config):
//   1. d bits, then b bits (b skipped when Alice's basis is fixed)
//   2. per qubit, in order: Eve basis (uniform policy only), Eve measurement,
//      channel X draw, channel Z draw, Bob basis, Bob measurement
//   3. Shor-Preskill only: k1 message bits for u
//   4. the 2n-subset of sifted positions, then the n check positions

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qkdforge/css.hpp"
#include "qkdforge/rng.hpp"

namespace qkdforge {

enum class Mode { standard, shor_preskill };
enum class BasisChoice { Z = 0, X = 1 };
enum class BasisPolicy { uniform_random, always_z, always_x };

struct ChannelModel {
  double px = 0;  // X error probability per qubit
  double pz = 0;  // Z error probability per qubit
};

struct EveStrategy {
  enum class Kind { none, intercept_resend } kind = Kind::none;
  BasisPolicy basis = BasisPolicy::uniform_random;
};

struct QubitOutcome {
  BasisChoice bob_basis = BasisChoice::Z;
  bool bob_bit = false;
  bool eve_learned = false;
};

QubitOutcome transmit_qubit(bool bit, BasisChoice basis,
                            const ChannelModel& channel, const EveStrategy& eve,
                            Rng& rng);

// Standard-mode reconciliation: (alice block, bob block) -> corrected bob
// block. Null means no reconciliation.
using ReconcileHook =
    std::function<BitVector(const BitVector& alice, const BitVector& bob)>;

struct SessionConfig {
  std::size_t n = 7;
  double delta = 0.25;
  // Absolute check-bit mismatch limit. Shor-Preskill defaults to the code's t.
  std::optional<std::size_t> t_abort;
  // Standard mode: abort when mismatches / n exceeds this rate.
  std::optional<double> abort_qber;
  std::uint64_t seed = 0;
  Mode mode = Mode::standard;
  ChannelModel channel;
  EveStrategy eve;
  BasisPolicy alice_basis = BasisPolicy::uniform_random;
  std::shared_ptr<const CssCode> code;  // required for shor_preskill
  // XOR pattern applied to Bob's key block after transmission, for
  // deterministic e1 experiments.
  std::optional<BitVector> key_block_errors;
  ReconcileHook reconcile;
  // Extra bits shed in privacy amplification (standard mode report only).
  std::size_t shed_bits = 0;

  std::size_t raw_length() const;
};

struct SessionTranscript {
  Mode mode = Mode::standard;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  BitVector d, b;
  BitVector bob_bases, bob_results;
  BitVector eve_learned;                // per raw position
  std::vector<std::size_t> sifted;      // raw indices with matching bases
  std::vector<std::size_t> selected;    // the 2n chosen sifted positions
  std::vector<std::size_t> check_idx;   // raw indices of check bits
  std::vector<std::size_t> key_idx;     // raw indices of the key block
  std::size_t mismatches = 0;
  double qber = 0;
  bool aborted = false;
  std::string abort_reason;
  BitVector alice_block, bob_block;     // x and x + e1
  std::optional<BitVector> u, x_minus_u, u_hat;
  std::optional<BitVector> alice_key, bob_key;
  bool keys_match = false;
  // Standard mode privacy-amplification target k = n - r - s.
  std::size_t pa_r = 0, pa_s = 0;
  long long pa_target = 0;
  double pa_bound = 0;

  nlohmann::json to_json() const;
};

SessionTranscript run_standard(const SessionConfig& config);
SessionTranscript run_shor_preskill(const SessionConfig& config);
SessionTranscript run_session(const SessionConfig& config);

// 2^{-s} / ln 2.
double bennett_bound(std::size_t s);

// Fraction of sifted positions on which Eve measured in the preparation
// basis.
double eve_info_estimate(const SessionTranscript& t);

// Recomputes Bob's key from his own measurements and Alice's public
// announcements only.
std::optional<BitVector> replay_bob_key(const SessionTranscript& t,
                                        const CssCode& code);

struct SweepRow {
  std::uint64_t seed = 0;
  double qber = 0;
  std::size_t sifted_len = 0;
  bool aborted = false;
  std::string key;
  bool keys_match = false;
};

// One session per seed, run in parallel; rows are returned in seed order.
std::vector<SweepRow> sweep(const SessionConfig& base,
                            const std::vector<std::uint64_t>& seeds);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace qkdforge
