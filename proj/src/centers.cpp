#include "agp/centers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "agp/rng.hpp"

namespace agp {

std::string to_string(CenterMethod m) {
    switch (m) {
        case CenterMethod::kmeans: return "kmeans";
        case CenterMethod::random: return "random";
        case CenterMethod::fixed: return "fixed";
    }
    return "unknown";
}

CenterMethod center_method_from_string(const std::string& s) {
    if (s == "kmeans") return CenterMethod::kmeans;
    if (s == "random") return CenterMethod::random;
    if (s == "fixed") return CenterMethod::fixed;
    throw std::invalid_argument("unknown center method: " + s);
}

namespace {

double sq_dist(const Matrix& a, int i, const Matrix& b, int j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

// k-means++: first center uniform, subsequent centers proportional to the
// squared distance to the nearest chosen center.
Matrix kmeanspp_seed(const Dataset& data, int k, Rng& rng) {
    const int m = data.size();
    Matrix centers(k, data.dim());
    std::vector<char> chosen(m, 0);

    int first = rng.uniform_int(m);
    centers.row(0) = data.features.row(first);
    chosen[first] = 1;

    std::vector<double> d2(m);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (int i = 0; i < m; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < c; ++j) best = std::min(best, sq_dist(data.features, i, centers, j));
            d2[i] = best;
            total += best;
        }
        int pick = -1;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            for (int i = 0; i < m; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) pick = m - 1;
        }
        if (pick < 0 || chosen[pick]) {
            // all remaining mass on duplicates: fall back to an unused index
            for (int i = 0; i < m; ++i) {
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }
        centers.row(c) = data.features.row(pick);
        chosen[pick] = 1;
    }
    return centers;
}

}  // namespace

CenterSet kmeans(const Dataset& data, int n_centers, uint64_t seed, int max_iter) {
    const int m = data.size();
    if (n_centers < 1 || n_centers > m) {
        throw std::invalid_argument("kmeans: n_centers must be in [1, sample count]");
    }
    Rng rng(seed);
    Matrix centers = kmeanspp_seed(data, n_centers, rng);

    std::vector<int> assign(m, -1);
    std::vector<double> dist_to_own(m, 0.0);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (int i = 0; i < m; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_j = 0;
            for (int j = 0; j < n_centers; ++j) {
                const double d = sq_dist(data.features, i, centers, j);
                if (d < best) {
                    best = d;
                    best_j = j;
                }
            }
            dist_to_own[i] = best;
            if (assign[i] != best_j) {
                assign[i] = best_j;
                changed = true;
            }
        }

        // re-seed empty clusters from the farthest point
        std::vector<int> sizes(n_centers, 0);
        for (int i = 0; i < m; ++i) sizes[assign[i]]++;
        for (int j = 0; j < n_centers; ++j) {
            if (sizes[j] > 0) continue;
            int far = 0;
            for (int i = 1; i < m; ++i) {
                if (dist_to_own[i] > dist_to_own[far]) far = i;
            }
            sizes[assign[far]]--;
            assign[far] = j;
            sizes[j] = 1;
            dist_to_own[far] = 0.0;
            centers.row(j) = data.features.row(far);
            changed = true;
        }

        if (!changed && iter > 0) break;

        Matrix sums = Matrix::Zero(n_centers, data.dim());
        for (int i = 0; i < m; ++i) sums.row(assign[i]) += data.features.row(i);
        for (int j = 0; j < n_centers; ++j) centers.row(j) = sums.row(j) / sizes[j];
    }

    CenterSet out;
    out.method = CenterMethod::kmeans;
    out.centers = centers;
    out.member_indices = assign;
    out.targets = Vector::Zero(n_centers);
    std::vector<int> sizes(n_centers, 0);
    for (int i = 0; i < m; ++i) {
        out.targets(assign[i]) += data.targets(i);
        sizes[assign[i]]++;
    }
    for (int j = 0; j < n_centers; ++j) out.targets(j) /= sizes[j];
    return out;
}

CenterSet random_centers(const Dataset& data, int n_centers, uint64_t seed) {
    const int m = data.size();
    if (n_centers < 1 || n_centers > m) {
        throw std::invalid_argument("random_centers: n_centers must be in [1, sample count]");
    }
    Rng rng(seed);
    CenterSet out;
    out.method = CenterMethod::random;
    out.source_indices = rng.sample_indices(m, n_centers);
    out.centers.resize(n_centers, data.dim());
    out.targets.resize(n_centers);
    for (int j = 0; j < n_centers; ++j) {
        out.centers.row(j) = data.features.row(out.source_indices[j]);
        out.targets(j) = data.targets(out.source_indices[j]);
    }
    return out;
}

Dataset non_center_samples(const Dataset& data, const CenterSet& centers) {
    std::vector<char> drop(data.size(), 0);
    if (centers.method == CenterMethod::random) {
        for (int idx : centers.source_indices) {
            if (idx >= 0 && idx < data.size()) drop[idx] = 1;
        }
    } else if (centers.method == CenterMethod::fixed) {
        for (int i = 0; i < data.size(); ++i) {
            for (int j = 0; j < centers.count(); ++j) {
                if (data.features.row(i) == centers.centers.row(j)) {
                    drop[i] = 1;
                    break;
                }
            }
        }
    }
    // kmeans centroids are synthetic points; nothing to drop

    Dataset out;
    const int keep = data.size() - static_cast<int>(std::count(drop.begin(), drop.end(), 1));
    out.features.resize(keep, data.dim());
    out.targets.resize(keep);
    int w = 0;
    for (int i = 0; i < data.size(); ++i) {
        if (drop[i]) continue;
        out.features.row(w) = data.features.row(i);
        out.targets(w) = data.targets(i);
        ++w;
    }
    out.standardization = data.standardization;
    return out;
}

CenterSet fixed_centers(Matrix points, Vector targets) {
    if (points.rows() != targets.size() || points.rows() < 1) {
        throw std::invalid_argument("fixed_centers: need one target per center");
    }
    CenterSet out;
    out.method = CenterMethod::fixed;
    out.centers = std::move(points);
    out.targets = std::move(targets);
    return out;
}

CenterSet all_samples_as_centers(const Dataset& data) {
    CenterSet out;
    out.method = CenterMethod::fixed;
    out.centers = data.features;
    out.targets = data.targets;
    return out;
}

}  // namespace agp
