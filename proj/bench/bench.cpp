// Benchmark: OpenMP-parallel kernels against the serial reference
// implementations, with an equality check on every result.
//
//   loadshield_bench           full sizes
//   loadshield_bench --quick   small sizes (CI smoke)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "loadshield/cluster.hpp"
#include "loadshield/features.hpp"
#include "loadshield/redteam.hpp"
#include "loadshield/scoring.hpp"
#include "reference.hpp"

using namespace loadshield;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct BenchRow {
    const char* kernel;
    std::string size;
    double serial_ms;
    double parallel_ms;
    double max_diff;
};

void print_row(const BenchRow& row) {
    std::printf("%-22s %-14s %10.1f ms %10.1f ms %7.2fx   %.3g\n", row.kernel, row.size.c_str(),
                row.serial_ms, row.parallel_ms,
                row.parallel_ms > 0 ? row.serial_ms / row.parallel_ms : 0.0, row.max_diff);
}

FeatureMatrix random_feature_matrix(Rng& rng, int n) {
    FeatureMatrix m;
    m.row_ids.reserve(n);
    m.rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        m.row_ids.push_back("b" + std::to_string(i));
        FeatureArray row{};
        for (double& x : row) x = 2.0 * rng.uniform() - 1.0;
        m.rows.push_back(row);
    }
    return m;
}

BenchRow bench_proximity(int n) {
    Rng rng(1);
    const FeatureMatrix m = random_feature_matrix(rng, n);

    const double t0 = now_ms();
    const ProximityMatrix serial = ref::proximity(m);
    const double t1 = now_ms();
    const ProximityMatrix parallel = proximity(m);
    const double t2 = now_ms();

    double max_diff = 0;
    for (std::size_t i = 0; i < serial.d.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(serial.d[i] - parallel.d[i]));
    }
    return {"proximity", std::to_string(n) + "x20", t1 - t0, t2 - t1, max_diff};
}

BenchRow bench_silhouette(int n, int k) {
    Rng rng(2);
    const FeatureMatrix m = random_feature_matrix(rng, n);
    const ProximityMatrix prox = proximity(m);
    ClusterAssignment assignment;
    assignment.k = k;
    assignment.labels.resize(n);
    for (int i = 0; i < n; ++i) assignment.labels[i] = i % k;

    const double t0 = now_ms();
    const std::vector<double> serial = ref::silhouette_values(prox, assignment.labels, k);
    const double t1 = now_ms();
    const SilhouetteDiagnostics parallel = silhouette(prox, assignment);
    const double t2 = now_ms();

    double max_diff = 0;
    for (int i = 0; i < n; ++i) {
        max_diff = std::max(max_diff, std::abs(serial[i] - parallel.per_point[i]));
    }
    return {"silhouette", std::to_string(n) + " pts, k=" + std::to_string(k), t1 - t0, t2 - t1,
            max_diff};
}

BenchRow bench_features(int n_sets, int n_days) {
    SyntheticPopulationSpec spec;
    spec.groups = {{"midday_peak", n_sets / 2}, {"nocturnal", n_sets - n_sets / 2}};
    spec.noise_std = 0.05;
    spec.n_days = n_days;
    spec.seed = 3;
    const SyntheticPopulation population = synthesize_population(spec);

    const double t0 = now_ms();
    std::vector<FeatureArray> serial(population.sets.size());
    for (std::size_t i = 0; i < population.sets.size(); ++i) {
        serial[i] = ref::extract_features(profile_representative(population.sets[i]));
    }
    const double t1 = now_ms();
    const FeatureMatrix parallel = build_feature_matrix(population.sets);
    const double t2 = now_ms();

    double max_diff = 0;
    for (std::size_t i = 0; i < serial.size(); ++i) {
        for (int c = 0; c < kFeatureCount; ++c) {
            max_diff = std::max(max_diff, std::abs(serial[i][c] - parallel.rows[i][c]));
        }
    }
    return {"feature extraction",
            std::to_string(n_sets) + " sets x" + std::to_string(n_days) + "d", t1 - t0, t2 - t1,
            max_diff};
}

BenchRow bench_scoring(int n_sets, int n_days) {
    SyntheticPopulationSpec spec;
    spec.groups = {{"double_hump", n_sets}};
    spec.noise_std = 0.05;
    spec.n_days = n_days;
    spec.seed = 4;
    const SyntheticPopulation population = synthesize_population(spec);

    ClusterModel model;
    model.industry_label = spec.industry_label;
    model.ac = archetype_template("double_hump");
    model.asd.fill(0.05);
    model.member_ids = {"m"};

    IncentiveWeights weights;
    weights.flat_price = 0.1;
    Rng rng(5);
    for (double& w : weights.wsp) w = rng.uniform() - 0.5;

    const int n = static_cast<int>(population.sets.size());
    std::vector<double> serial_scores(n), parallel_scores(n);

    const double t0 = now_ms();
    for (int i = 0; i < n; ++i) {
        const double vsp = ref::violation_vsp(population.sets[i], model, 2.0, 1e-6);
        const double isc = ref::incentive_score(population.sets[i], model, weights);
        serial_scores[i] = isc * vsp;
    }
    const double t1 = now_ms();
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const auto report = score_business(population.sets[i], {model}, weights, {}, {});
        parallel_scores[i] = report.wivs;
    }
    const double t2 = now_ms();

    double max_diff = 0;
    for (int i = 0; i < n; ++i) {
        max_diff = std::max(max_diff, std::abs(serial_scores[i] - parallel_scores[i]));
    }
    return {"scoring", std::to_string(n_sets) + " sets x" + std::to_string(n_days) + "d", t1 - t0,
            t2 - t1, max_diff};
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both columns run serially\n");
#endif
    std::printf("%-22s %-14s %13s %13s %9s   %s\n", "kernel", "size", "serial", "parallel",
                "speedup", "max|diff|");

    std::vector<BenchRow> results;
    if (quick) {
        results.push_back(bench_proximity(200));
        results.push_back(bench_silhouette(200, 4));
        results.push_back(bench_features(100, 10));
        results.push_back(bench_scoring(200, 10));
    } else {
        results.push_back(bench_proximity(3000));
        results.push_back(bench_silhouette(3000, 4));
        results.push_back(bench_features(2000, 30));
        results.push_back(bench_scoring(5000, 30));
    }

    bool ok = true;
    for (const auto& row : results) {
        print_row(row);
        // The parallel kernels must agree with the serial reference.
        if (row.max_diff > 1e-12) ok = false;
    }
    if (!ok) {
        std::printf("FAIL: parallel and serial results diverged\n");
        return 1;
    }
    return 0;
}
