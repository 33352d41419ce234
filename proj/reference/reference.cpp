#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace loadshield::ref {

PeriodVector normalize_values(const PeriodVector& values) {
    double lo = values[0], hi = values[0];
    for (int t = 1; t < kPeriodsPerDay; ++t) {
        if (values[t] < lo) lo = values[t];
        if (values[t] > hi) hi = values[t];
    }
    PeriodVector out{};
    if (hi == lo) return out;
    for (int t = 0; t < kPeriodsPerDay; ++t) out[t] = (values[t] - lo) / (hi - lo);
    return out;
}

FeatureArray extract_features(const PeriodVector& v) {
    const int n = kPeriodsPerDay;

    double sum = 0;
    for (int i = 0; i < n; ++i) sum += v[i];
    const double mean = sum / n;

    double mx = v[0], mn = v[0];
    int mx_at = 0, mn_at = 0;
    for (int i = 1; i < n; ++i) {
        if (v[i] > mx) {
            mx = v[i];
            mx_at = i;
        }
        if (v[i] < mn) {
            mn = v[i];
            mn_at = i;
        }
    }

    double s2 = 0, s3 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double d = v[i] - mean;
        s2 += d * d;
        s3 += d * d * d;
        s4 += d * d * d * d;
    }
    const double var = s2 / n;
    const double sd = std::sqrt(var);
    double skew = 0, kurt = 0;
    if (var > 0) {
        skew = (s3 / n) / (var * sd);
        kurt = (s4 / n) / (var * var) - 3.0;
    }

    double qsum[4];
    double qstd[4];
    for (int q = 0; q < 4; ++q) {
        double bsum = 0;
        for (int i = q * 12; i < (q + 1) * 12; ++i) bsum += v[i];
        const double bmean = bsum / 12.0;
        double bacc = 0;
        for (int i = q * 12; i < (q + 1) * 12; ++i) bacc += (v[i] - bmean) * (v[i] - bmean);
        qsum[q] = bsum;
        qstd[q] = std::sqrt(bacc / 12.0);
    }

    int above = 0, below = 0;
    for (int i = 0; i < n; ++i) {
        if (v[i] > mean) ++above;
        if (v[i] < mean) ++below;
    }

    return {mean,
            sd,
            mx,
            mn,
            mx - mn,
            sum,
            skew,
            kurt,
            qsum[0],
            qsum[1],
            qsum[2],
            qsum[3],
            qstd[0],
            qstd[1],
            qstd[2],
            qstd[3],
            static_cast<double>(mx_at + 1),
            static_cast<double>(mn_at + 1),
            static_cast<double>(above),
            static_cast<double>(below)};
}

ProximityMatrix proximity(const FeatureMatrix& matrix) {
    const int n = matrix.n_rows();
    ProximityMatrix prox;
    prox.n = n;
    prox.d.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = 0;
            for (int c = 0; c < kFeatureCount; ++c) {
                const double d = matrix.rows[i][c] - matrix.rows[j][c];
                acc += d * d;
            }
            prox.at(i, j) = std::sqrt(acc);
        }
    }
    return prox;
}

std::vector<double> silhouette_values(const ProximityMatrix& prox, const std::vector<int>& labels,
                                      int k) {
    const int n = prox.n;
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        int own_count = 0;
        double own_sum = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            if (labels[j] == labels[i]) {
                own_sum += prox.at(i, j);
                ++own_count;
            }
        }
        if (own_count == 0) {
            out[i] = 0.0;
            continue;
        }
        const double a = own_sum / own_count;

        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == labels[i]) continue;
            double csum = 0;
            int ccount = 0;
            for (int j = 0; j < n; ++j) {
                if (labels[j] == c) {
                    csum += prox.at(i, j);
                    ++ccount;
                }
            }
            if (ccount > 0) b = std::min(b, csum / ccount);
        }
        const double denom = a > b ? a : b;
        out[i] = denom == 0.0 ? 0.0 : (b - a) / denom;
    }
    return out;
}

double mean_silhouette(const ProximityMatrix& prox, const std::vector<int>& labels, int k) {
    const std::vector<double> values = silhouette_values(prox, labels, k);
    double sum = 0;
    for (double s : values) sum += s;
    return sum / static_cast<double>(values.size());
}

namespace {

double cluster_pair_distance(const ProximityMatrix& prox, const std::vector<int>& a,
                             const std::vector<int>& b, Linkage linkage) {
    switch (linkage) {
        case Linkage::single: {
            double best = std::numeric_limits<double>::infinity();
            for (int i : a)
                for (int j : b) best = std::min(best, prox.at(i, j));
            return best;
        }
        case Linkage::complete: {
            double best = 0;
            for (int i : a)
                for (int j : b) best = std::max(best, prox.at(i, j));
            return best;
        }
        case Linkage::average: {
            double sum = 0;
            for (int i : a)
                for (int j : b) sum += prox.at(i, j);
            return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
        }
        case Linkage::ward: {
            // Increase in within-cluster sum of squares, expressed through
            // pairwise squared distances: |A||B|/(|A|+|B|) * ||mu_A - mu_B||^2.
            const double na = static_cast<double>(a.size());
            const double nb = static_cast<double>(b.size());
            double cross = 0;
            for (int i : a)
                for (int j : b) cross += prox.at(i, j) * prox.at(i, j);
            double within_a = 0;
            for (int i : a)
                for (int j : a) within_a += prox.at(i, j) * prox.at(i, j);
            double within_b = 0;
            for (int i : b)
                for (int j : b) within_b += prox.at(i, j) * prox.at(i, j);
            const double mu_dist2 = cross / (na * nb) - within_a / (2 * na * na) -
                                    within_b / (2 * nb * nb);
            return std::sqrt(2.0 * (na * nb / (na + nb)) * mu_dist2);
        }
    }
    return 0;
}

}  // namespace

std::vector<int> agglomerate_recompute(const ProximityMatrix& prox, int k, Linkage linkage) {
    const int n = prox.n;
    std::vector<std::vector<int>> clusters(n);
    for (int i = 0; i < n; ++i) clusters[i] = {i};

    while (static_cast<int>(clusters.size()) > k) {
        int best_a = -1, best_b = -1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double d = cluster_pair_distance(prox, clusters[a], clusters[b], linkage);
                if (d < best) {
                    best = d;
                    best_a = static_cast<int>(a);
                    best_b = static_cast<int>(b);
                }
            }
        }
        auto& target = clusters[best_a];
        target.insert(target.end(), clusters[best_b].begin(), clusters[best_b].end());
        std::sort(target.begin(), target.end());
        clusters.erase(clusters.begin() + best_b);
        // Keep clusters ordered by smallest member so the tie rule matches
        // the lexicographic-id convention.
        std::sort(clusters.begin(), clusters.end(),
                  [](const std::vector<int>& x, const std::vector<int>& y) {
                      return x.front() < y.front();
                  });
    }

    std::vector<int> labels(n);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (int i : clusters[c]) labels[i] = static_cast<int>(c);
    }
    return labels;
}

std::vector<std::vector<int>> enumerate_partitions(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> labels(n, 0);
    // Restricted growth strings: labels[i] <= 1 + max(labels[0..i-1]).
    auto recurse = [&](auto&& self, int i, int used) -> void {
        if (i == n) {
            if (used == k) out.push_back(labels);
            return;
        }
        // Prune: remaining positions must be able to reach k blocks.
        if (used + (n - i) < k) return;
        const int limit = std::min(used, k - 1);
        for (int c = 0; c <= limit; ++c) {
            labels[i] = c;
            self(self, i + 1, std::max(used, c + 1));
        }
    };
    recurse(recurse, 0, 0);
    return out;
}

double partition_spacing(const ProximityMatrix& prox, const std::vector<int>& labels) {
    double spacing = std::numeric_limits<double>::infinity();
    for (int i = 0; i < prox.n; ++i) {
        for (int j = i + 1; j < prox.n; ++j) {
            if (labels[i] != labels[j]) spacing = std::min(spacing, prox.at(i, j));
        }
    }
    return spacing;
}

std::vector<int> max_spacing_partition(const ProximityMatrix& prox, int k) {
    std::vector<int> best;
    double best_spacing = -1;
    for (const auto& labels : enumerate_partitions(prox.n, k)) {
        const double spacing = partition_spacing(prox, labels);
        if (spacing > best_spacing) {
            best_spacing = spacing;
            best = labels;
        }
    }
    return best;
}

void pooled_mean_std(const std::vector<const PeriodVector*>& days, PeriodVector& mean_out,
                     PeriodVector& std_out) {
    const double n = static_cast<double>(days.size());
    for (int t = 0; t < kPeriodsPerDay; ++t) {
        double sum = 0;
        for (const auto* d : days) sum += (*d)[t];
        mean_out[t] = sum / n;
        double acc = 0;
        for (const auto* d : days) {
            const double dev = (*d)[t] - mean_out[t];
            acc += dev * dev;
        }
        std_out[t] = std::sqrt(acc / n);
    }
}

double violation_vsp(const ProfileSet& set, const ClusterModel& model, double confidence,
                     double asd_floor) {
    long count = 0;
    for (const auto& p : set.profiles) {
        for (int t = 0; t < kPeriodsPerDay; ++t) {
            const double asd = model.asd[t] < asd_floor ? asd_floor : model.asd[t];
            const double dev = std::abs(p.values[t] - model.ac[t]);
            if (confidence * asd - dev < 0) ++count;
        }
    }
    return static_cast<double>(count) /
           (static_cast<double>(set.profiles.size()) * kPeriodsPerDay);
}

double incentive_score(const ProfileSet& set, const ClusterModel& model,
                       const IncentiveWeights& weights) {
    double sum = 0;
    for (const auto& p : set.profiles) {
        for (int t = 0; t < kPeriodsPerDay; ++t) {
            sum += (model.ac[t] - p.values[t]) * weights.wsp[t];
        }
    }
    const double mean_gain = sum / static_cast<double>(set.profiles.size());
    return mean_gain < 0 ? -mean_gain : mean_gain;
}

}  // namespace loadshield::ref
