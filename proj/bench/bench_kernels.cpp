// Serial vs OpenMP amplitude kernels on random states.
//
//   bench_kernels [min_qubits] [max_qubits] [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "qkdforge/kernels.hpp"
#include "qkdforge/rng.hpp"

namespace k = qkdforge::kernels;

namespace {

double time_ms(int repeats, const std::function<void()>& f) {
  f();  // warm-up
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
             .count() / repeats;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t lo = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 10;
  const std::size_t hi = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 22;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 20;

  qkdforge::Rng rng(1);
  const double r = 1 / std::sqrt(2.0);
  const k::Mat2 h{r, r, r, -r};
  const k::PauliMask p{0b1011, 0b0110, 1};

  std::printf("%-6s %-14s %12s %12s %8s\n", "qubits", "kernel", "serial_ms", "omp_ms",
              "speedup");
  for (std::size_t n = lo; n <= hi; n += 2) {
    std::vector<k::amp_t> a(std::size_t{1} << n), b;
    for (auto& x : a) x = {rng.uniform() - 0.5, rng.uniform() - 0.5};
    b = a;
    const std::uint64_t mid = std::uint64_t{1} << (n / 2);

    struct Case {
      const char* name;
      std::function<void()> serial, parallel;
    };
    volatile double sink = 0;
    const Case cases[] = {
        {"apply_1q", [&] { k::serial::apply_1q(a, mid, h); },
         [&] { k::parallel::apply_1q(a, mid, h); }},
        {"apply_cnot", [&] { k::serial::apply_cnot(a, 1, mid); },
         [&] { k::parallel::apply_cnot(a, 1, mid); }},
        {"apply_pauli", [&] { k::serial::apply_pauli(a, p); },
         [&] { k::parallel::apply_pauli(a, p); }},
        {"hadamard_all", [&] { k::serial::hadamard_all(a); },
         [&] { k::parallel::hadamard_all(a); }},
        {"inner", [&] { sink = sink + k::serial::inner(a, b).real(); },
         [&] { sink = sink + k::parallel::inner(a, b).real(); }},
        {"expectation", [&] { sink = sink + k::serial::pauli_expectation(a, p).real(); },
         [&] { sink = sink + k::parallel::pauli_expectation(a, p).real(); }},
    };
    for (const auto& c : cases) {
      const double s = time_ms(repeats, c.serial);
      const double o = time_ms(repeats, c.parallel);
      std::printf("%-6zu %-14s %12.4f %12.4f %8.2f\n", n, c.name, s, o, s / o);
    }
  }
  return 0;
}
