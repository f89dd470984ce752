// Timing comparison of the OpenMP kernels against their serial reference
// implementations: exhaustive radius sweeps and invariant-polytope rounds.

#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wjsr/ipa.hpp"
#include "wjsr/weighted.hpp"

using namespace wjsr;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

WeightedSystem random_system(int m, int d, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    WeightedSystem sys;
    for (int i = 0; i < m; ++i) {
        Mat a(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) a(r, c) = entry(rng);
        sys.matrices.push_back(a);
    }
    sys.weights = Vec(m, 1.0);
    return sys;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both columns run serially\n");
#endif

    std::printf("\n%-34s %10s %10s %8s\n", "kernel", "serial[s]", "parallel[s]",
                "speedup");

    {
        WeightedSystem sys = random_system(3, 2, 7);
        const int k = 13;
        auto t0 = std::chrono::steady_clock::now();
        RadiusSample serial = rho_k_exact_serial(sys, k);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        RadiusSample parallel = rho_k_exact(sys, k);
        const double tp = seconds_since(t0);
        std::printf("%-34s %10.3f %10.3f %8.2f\n", "rho_k_exact (m=3, d=2, k=13)",
                    ts, tp, ts / tp);
        if (serial.value != parallel.value || serial.word != parallel.word)
            std::printf("  MISMATCH: serial %.17g vs parallel %.17g\n",
                        serial.value, parallel.value);
    }

    {
        // Jordan-block pair: the polytope construction runs long enough to
        // exercise the batched norm evaluations.
        WeightedSystem sys;
        sys.matrices = {Mat{{1, 1}, {0, 1}}, Mat{{0.8, 0}, {0.8, 0.8}}};
        sys.weights = Vec{1.0, 2.0};
        auto cands = find_candidates(sys);

        IpaOptions opt;
        opt.parallel = false;
        auto t0 = std::chrono::steady_clock::now();
        IpaResult serial = invariant_polytope_from(sys, cands, opt);
        const double ts = seconds_since(t0);

        opt.parallel = true;
        t0 = std::chrono::steady_clock::now();
        IpaResult parallel = invariant_polytope_from(sys, cands, opt);
        const double tp = seconds_since(t0);
        std::printf("%-34s %10.3f %10.3f %8.2f\n",
                    "invariant polytope (2-matrix)", ts, tp, ts / tp);
        if (serial.polytope.vertices.size() != parallel.polytope.vertices.size())
            std::printf("  MISMATCH: %zu vs %zu vertex pairs\n",
                        serial.polytope.vertices.size(),
                        parallel.polytope.vertices.size());
    }

    {
        WeightedSystem sys = random_system(4, 3, 11);
        const int k = 10;
        auto t0 = std::chrono::steady_clock::now();
        RadiusSample serial = rho_k_exact_serial(sys, k);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        RadiusSample parallel = rho_k_exact(sys, k);
        const double tp = seconds_since(t0);
        std::printf("%-34s %10.3f %10.3f %8.2f\n", "rho_k_exact (m=4, d=3, k=10)",
                    ts, tp, ts / tp);
        if (serial.value != parallel.value)
            std::printf("  MISMATCH: serial %.17g vs parallel %.17g\n",
                        serial.value, parallel.value);
    }

    return 0;
}
