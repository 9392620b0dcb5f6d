#pragma once

// Command-line dispatch and the worked-example reproduction harness.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qkdforge/codes.hpp"

namespace qkdforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Reports go to out, diagnostics to err.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

// A built-in name, a path to a generator matrix file, or "dual" (the dual of
// `context`, which must then be given).
LinearCode load_code(const std::string& source,
                     const std::optional<LinearCode>& context = std::nullopt);

// Seed from QKDFORGE_SEED, else 0.
std::uint64_t default_seed();

struct ReproduceOptions {
  std::uint64_t seed = 1;
  // Replaces the hamming74 check matrix everywhere (fault injection).
  std::optional<BitMatrix> hamming_h;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ReproduceReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool ok() const;
  std::size_t failed() const;
  nlohmann::json to_json() const;
};

ReproduceReport reproduce_all(const ReproduceOptions& options = {});

}  // namespace qkdforge::cli
