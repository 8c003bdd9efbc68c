// Compares the OpenMP and serial sparse matrix-vector kernels on a realistic
// Liouvillian, and reports the steady-state solve time for context.

#include <chrono>
#include <cstdio>
#include <random>

#include "tcsim/model.hpp"
#include "tcsim/steady_state.hpp"

using Clock = std::chrono::steady_clock;

int main() {
    tcsim::SystemParams params;
    params.n_emitters = 4;
    params.g = 0.5;
    params.pump = 1.0;
    params.n_max = 15;

    const tcsim::Liouvillian liouvillian = tcsim::build_liouvillian(params);
    const auto n = static_cast<std::size_t>(liouvillian.matrix.rows());
    std::printf("Liouvillian: %d x %d, nnz = %lld\n", liouvillian.matrix.rows(),
                liouvillian.matrix.cols(), static_cast<long long>(liouvillian.matrix.nnz()));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<tcsim::Complex> x(n), y(n);
    for (auto& v : x) v = tcsim::Complex(dist(rng), dist(rng));

    const int reps = 50;
    auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) liouvillian.matrix.apply_serial(x, y);
    auto t1 = Clock::now();
    for (int r = 0; r < reps; ++r) liouvillian.matrix.apply(x, y);
    auto t2 = Clock::now();

    const double serial_ms = std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
    const double parallel_ms = std::chrono::duration<double, std::milli>(t2 - t1).count() / reps;
    std::printf("matvec serial:   %.3f ms\n", serial_ms);
    std::printf("matvec parallel: %.3f ms  (speedup %.2fx)\n", parallel_ms, serial_ms / parallel_ms);

    auto t3 = Clock::now();
    const tcsim::SteadyStateResult result = tcsim::solve_steady(liouvillian);
    auto t4 = Clock::now();
    std::printf("steady solve:    %.1f ms (residual %.2e, n = %.4f)\n",
                std::chrono::duration<double, std::milli>(t4 - t3).count(), result.residual,
                tcsim::cavity_population(result.rho));
    return 0;
}
