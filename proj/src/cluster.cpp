#include "loadshield/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace loadshield {

std::optional<Linkage> linkage_from_string(std::string_view s) {
    if (s == "single") return Linkage::single;
    if (s == "complete") return Linkage::complete;
    if (s == "average") return Linkage::average;
    if (s == "ward") return Linkage::ward;
    return std::nullopt;
}

std::string to_string(Linkage l) {
    switch (l) {
        case Linkage::single: return "single";
        case Linkage::complete: return "complete";
        case Linkage::average: return "average";
        case Linkage::ward: return "ward";
    }
    return "average";
}

ProximityMatrix proximity(const FeatureMatrix& matrix) {
    const int n = matrix.n_rows();
    for (const auto& row : matrix.rows) {
        for (double v : row) {
            if (!std::isfinite(v)) throw DataError("proximity: non-finite feature value");
        }
    }
    ProximityMatrix prox;
    prox.n = n;
    prox.d.assign(static_cast<std::size_t>(n) * n, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double acc = 0;
            for (int c = 0; c < kFeatureCount; ++c) {
                const double d = matrix.rows[i][c] - matrix.rows[j][c];
                acc += d * d;
            }
            const double dist = std::sqrt(acc);
            prox.at(i, j) = dist;
        }
    }
    // Mirror after the parallel fill so no two threads touch one cell.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) prox.at(j, i) = prox.at(i, j);
    return prox;
}

namespace {

// Lance-Williams update for d(merged, other). Ward operates on squared
// distances; callers square on entry and take sqrt when reporting heights.
double lw_update(Linkage linkage, double d_im, double d_jm, double d_ij, double n_i, double n_j,
                 double n_m) {
    switch (linkage) {
        case Linkage::single:
            return std::min(d_im, d_jm);
        case Linkage::complete:
            return std::max(d_im, d_jm);
        case Linkage::average:
            return (n_i * d_im + n_j * d_jm) / (n_i + n_j);
        case Linkage::ward: {
            const double total = n_i + n_j + n_m;
            return ((n_i + n_m) * d_im + (n_j + n_m) * d_jm - n_m * d_ij) / total;
        }
    }
    return 0;
}

}  // namespace

ClusterAssignment agglomerate(const ProximityMatrix& prox, int k, Linkage linkage) {
    const int n = prox.n;
    if (k < 1 || k > n) {
        throw DataError("agglomerate: k must be in [1, " + std::to_string(n) + "], got " +
                        std::to_string(k));
    }

    const bool squared = linkage == Linkage::ward;
    std::vector<double> d(prox.d);
    if (squared) {
        for (double& v : d) v *= v;
    }
    auto dist = [&](int i, int j) -> double& { return d[static_cast<std::size_t>(i) * n + j]; };

    std::vector<bool> active(n, true);
    std::vector<int> size(n, 1);
    // A cluster is addressed by its smallest member row index, so merging
    // j into i (i < j) keeps the address stable.
    ClusterAssignment result;
    result.linkage = linkage;
    result.k = k;
    result.merge_trace.reserve(n - k);

    for (int step = 0; step < n - k; ++step) {
        int best_i = -1, best_j = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                if (dist(i, j) < best) {
                    best = dist(i, j);
                    best_i = i;
                    best_j = j;
                }
            }
        }
        result.merge_trace.push_back({best_i, best_j, squared ? std::sqrt(best) : best});
        for (int m = 0; m < n; ++m) {
            if (!active[m] || m == best_i || m == best_j) continue;
            const double updated = lw_update(linkage, dist(best_i, m), dist(best_j, m), best,
                                             size[best_i], size[best_j], size[m]);
            dist(best_i, m) = updated;
            dist(m, best_i) = updated;
        }
        size[best_i] += size[best_j];
        active[best_j] = false;
    }

    result.labels = labels_from_trace(n, result.merge_trace, k);
    return result;
}

std::vector<int> labels_from_trace(int n, std::span<const Merge> trace, int k) {
    if (static_cast<int>(trace.size()) < n - k) {
        throw DataError("labels_from_trace: trace too short for requested k");
    }
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int s = 0; s < n - k; ++s) {
        const int ra = find(trace[s].a);
        const int rb = find(trace[s].b);
        parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    // Final ids ordered by smallest member row index.
    std::map<int, int> id_of_root;
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        const int root = find(i);
        const auto it = id_of_root.try_emplace(root, static_cast<int>(id_of_root.size())).first;
        labels[i] = it->second;
    }
    return labels;
}

SilhouetteDiagnostics silhouette(const ProximityMatrix& prox, const ClusterAssignment& assignment) {
    const int n = prox.n;
    const int k = assignment.k;
    if (k < 2) throw DataError("silhouette undefined for k < 2");

    std::vector<int> cluster_size(k, 0);
    for (int label : assignment.labels) ++cluster_size[label];
    for (int c = 0; c < k; ++c) {
        if (cluster_size[c] == 0) throw DataError("silhouette: empty cluster");
    }

    SilhouetteDiagnostics diag;
    diag.per_point.assign(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const int own = assignment.labels[i];
        if (cluster_size[own] == 1) continue;  // singleton convention: s = 0

        std::vector<double> total(k, 0.0);
        for (int j = 0; j < n; ++j) {
            if (j != i) total[assignment.labels[j]] += prox.at(i, j);
        }
        const double a = total[own] / (cluster_size[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own) continue;
            b = std::min(b, total[c] / cluster_size[c]);
        }
        const double denom = std::max(a, b);
        diag.per_point[i] = denom == 0.0 ? 0.0 : (b - a) / denom;
    }

    double sum = 0;
    for (double s : diag.per_point) sum += s;
    diag.mean = sum / n;
    return diag;
}

std::pair<ClusterAssignment, SilhouetteDiagnostics> select_k(const ProximityMatrix& prox,
                                                             int k_max, Linkage linkage) {
    const int n = prox.n;
    if (n < 3) throw DataError("select_k needs at least 3 businesses, got " + std::to_string(n));
    const int hi = std::min(k_max, n - 1);
    if (hi < 2) throw DataError("select_k: empty candidate range");

    ClusterAssignment best_assignment;
    SilhouetteDiagnostics best_diag;
    std::map<int, double> mean_by_k;
    bool have_best = false;
    for (int k = 2; k <= hi; ++k) {
        ClusterAssignment assignment = agglomerate(prox, k, linkage);
        SilhouetteDiagnostics diag = silhouette(prox, assignment);
        mean_by_k[k] = diag.mean;
        if (!have_best || diag.mean > best_diag.mean) {  // ties keep the smaller k
            best_assignment = std::move(assignment);
            best_diag = std::move(diag);
            have_best = true;
        }
    }
    best_diag.mean_by_k = std::move(mean_by_k);
    best_diag.selected_k = best_assignment.k;
    return {std::move(best_assignment), std::move(best_diag)};
}

std::vector<ClusterModel> build_cluster_models(const std::vector<ProfileSet>& sets,
                                               const ClusterAssignment& assignment,
                                               const std::string& industry_label) {
    if (sets.size() != assignment.labels.size()) {
        throw DataError("build_cluster_models: sets/labels size mismatch");
    }
    std::vector<ClusterModel> models(assignment.k);
    for (int c = 0; c < assignment.k; ++c) {
        models[c].industry_label = industry_label;
        models[c].cluster_id = c;
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (sets[i].profiles.empty()) {
            throw DataError("build_cluster_models: business " + sets[i].business_id +
                            " has no profiles");
        }
        models[assignment.labels[i]].member_ids.push_back(sets[i].business_id);
    }

#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < assignment.k; ++c) {
        // Day-level pooling over every member business-day.
        PeriodVector sum{};
        long n_days = 0;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (assignment.labels[i] != c) continue;
            for (const auto& p : sets[i].profiles) {
                for (int t = 0; t < kPeriodsPerDay; ++t) sum[t] += p.values[t];
                ++n_days;
            }
        }
        for (int t = 0; t < kPeriodsPerDay; ++t) models[c].ac[t] = sum[t] / n_days;

        PeriodVector acc{};
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (assignment.labels[i] != c) continue;
            for (const auto& p : sets[i].profiles) {
                for (int t = 0; t < kPeriodsPerDay; ++t) {
                    const double d = p.values[t] - models[c].ac[t];
                    acc[t] += d * d;
                }
            }
        }
        for (int t = 0; t < kPeriodsPerDay; ++t) models[c].asd[t] = std::sqrt(acc[t] / n_days);
    }
    return models;
}

nlohmann::json model_to_json(const ClusterModel& model, const ModelProvenance& provenance) {
    return {{"industry", model.industry_label},
            {"cluster_id", model.cluster_id},
            {"ac", model.ac},
            {"asd", model.asd},
            {"members", model.member_ids},
            {"provenance",
             {{"season", {{"start", provenance.season_start}, {"end", provenance.season_end}}},
              {"day_class", provenance.day_class},
              {"linkage", provenance.linkage},
              {"selected_k", provenance.selected_k},
              {"silhouette_mean", provenance.silhouette_mean}}}};
}

ClusterModel model_from_json(const nlohmann::json& j, ModelProvenance* provenance_out) {
    ClusterModel model;
    model.industry_label = j.at("industry").get<std::string>();
    model.cluster_id = j.at("cluster_id").get<int>();
    const auto ac = j.at("ac").get<std::vector<double>>();
    const auto asd = j.at("asd").get<std::vector<double>>();
    if (ac.size() != kPeriodsPerDay || asd.size() != kPeriodsPerDay) {
        throw DataError("model JSON: ac/asd must have 48 entries");
    }
    std::copy(ac.begin(), ac.end(), model.ac.begin());
    std::copy(asd.begin(), asd.end(), model.asd.begin());
    model.member_ids = j.at("members").get<std::vector<std::string>>();
    if (provenance_out && j.contains("provenance")) {
        const auto& p = j.at("provenance");
        provenance_out->season_start = p.at("season").at("start").get<std::string>();
        provenance_out->season_end = p.at("season").at("end").get<std::string>();
        provenance_out->day_class = p.at("day_class").get<std::string>();
        provenance_out->linkage = p.at("linkage").get<std::string>();
        provenance_out->selected_k = p.at("selected_k").get<int>();
        provenance_out->silhouette_mean = p.at("silhouette_mean").get<double>();
    }
    return model;
}

nlohmann::json merge_trace_to_json(std::span<const Merge> trace) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& m : trace) {
        out.push_back({{"a", m.a}, {"b", m.b}, {"distance", m.distance}});
    }
    return out;
}

}  // namespace loadshield
