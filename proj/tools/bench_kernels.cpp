#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "sketchml/kernels.hpp"

// Times the serial reference against the OpenMP implementation for the Gram
// matrix and the linear score kernels, and checks they agree bitwise.

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() / reps;
}

}  // namespace

int main() {
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> dist;

    for (std::size_t n : {128u, 512u, 1024u}) {
        const std::size_t d = 64;
        sketchml::Matrix a(n, d), b(n, d);
        for (std::size_t i = 0; i < n * d; ++i) {
            a.data()[i] = dist(rng);
            b.data()[i] = dist(rng);
        }
        sketchml::KernelParams kp;
        kp.kind = sketchml::KernelKind::rbf;
        kp.gamma = 1.0 / static_cast<double>(d);

        sketchml::Matrix gs, gp;
        const double serial_ms =
            time_ms([&] { gs = sketchml::gram_matrix_serial(a, b, kp); }, 3);
        const double parallel_ms =
            time_ms([&] { gp = sketchml::gram_matrix_parallel(a, b, kp); }, 3);
        const bool match = gs == gp;
        std::printf("gram  n=%4zu d=%zu  serial %8.2f ms  parallel %8.2f ms  speedup %5.2fx  %s\n",
                    n, d, serial_ms, parallel_ms, serial_ms / parallel_ms,
                    match ? "bitwise-equal" : "MISMATCH");
        if (!match) return 1;

        sketchml::Matrix w(8, d), scores_s, scores_p;
        for (std::size_t i = 0; i < w.rows() * d; ++i) w.data()[i] = dist(rng);
        const std::vector<double> intercepts(w.rows(), 0.1);
        const double ls_serial =
            time_ms([&] { scores_s = sketchml::linear_scores_serial(a, w, intercepts); }, 10);
        const double ls_parallel =
            time_ms([&] { scores_p = sketchml::linear_scores_parallel(a, w, intercepts); }, 10);
        const bool ls_match = scores_s == scores_p;
        std::printf("score n=%4zu d=%zu  serial %8.2f ms  parallel %8.2f ms  speedup %5.2fx  %s\n",
                    n, d, ls_serial, ls_parallel, ls_serial / ls_parallel,
                    ls_match ? "bitwise-equal" : "MISMATCH");
        if (!ls_match) return 1;
    }
    return 0;
}
