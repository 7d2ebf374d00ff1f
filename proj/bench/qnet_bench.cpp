// Compares the serial reference paths with the OpenMP shard-and-merge
// kernels: dataset generation and estimator accumulation.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qnet/io.hpp"

using namespace qnet;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

QualityModel bench_model() {
    const NetworkTopology topo = validate_topology({4, 3, 2, 4});
    QualityModel model(topo, NodeDistribution(GaussianDist{0.0, 1.0}));
    model.set_node(2, 2, NodeDistribution(GaussianDist{2.0, 1.0}));
    model.set_node(1, 3, NodeDistribution(GaussianDist{0.0, 4.0}));
    return model;
}

double max_rel_diff(const Estimates& a, const Estimates& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.t.rows(); ++i) {
        for (std::size_t j = 0; j < a.t.cols(); ++j) {
            const auto rel = [](double x, double y) {
                const double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
                return std::fabs(x - y) / scale;
            };
            worst = std::max(worst, rel(a.t(i, j), b.t(i, j)));
            worst = std::max(worst, rel(a.sigma(i, j), b.sigma(i, j)));
            worst = std::max(worst, rel(a.tau2(i, j), b.tau2(i, j)));
        }
    }
    return worst;
}

}  // namespace

int main() {
    constexpr std::size_t n = 2'000'000;
    constexpr std::uint64_t seed = 42;
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    const int shards = 4 * threads;
    std::printf("n = %zu, threads = %d, shards = %d\n\n", n, threads, shards);

    const QualityModel model = bench_model();

    double t0 = now_ms();
    const auto serial_data = generate_dataset(model, n, seed);
    const double gen_serial = now_ms() - t0;

    t0 = now_ms();
    const auto parallel_data = generate_dataset_parallel(model, n, seed, shards);
    const double gen_parallel = now_ms() - t0;

    std::printf("generate   serial %8.1f ms   parallel %8.1f ms   speedup %.2fx\n", gen_serial,
                gen_parallel, gen_serial / gen_parallel);

    t0 = now_ms();
    const Estimates ref = accumulate(model.topology(), serial_data).finalize();
    const double acc_serial = now_ms() - t0;

    t0 = now_ms();
    const Estimates par = accumulate_parallel(model.topology(), serial_data, shards).finalize();
    const double acc_parallel = now_ms() - t0;

    std::printf("accumulate serial %8.1f ms   parallel %8.1f ms   speedup %.2fx\n", acc_serial,
                acc_parallel, acc_serial / acc_parallel);

    const double diff = max_rel_diff(ref, par);
    std::printf("\nmax rel diff serial vs parallel estimates: %.3g (%s)\n", diff,
                diff < 1e-12 ? "ok" : "MISMATCH");
    std::printf("parallel dataset mean quality: %.4f (serial %.4f)\n",
                accumulate(model.topology(), parallel_data).finalize().t(0, 0), ref.t(0, 0));
    return diff < 1e-12 ? 0 : 1;
}
