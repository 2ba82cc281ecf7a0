#include "dtseg/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dtseg/rng.hpp"

namespace dtseg {

namespace {

double sq_dist(const float* a, const double* b, std::uint32_t dim) {
    double acc = 0.0;
    for (std::uint32_t d = 0; d < dim; ++d) {
        const double diff = static_cast<double>(a[d]) - b[d];
        acc += diff * diff;
    }
    return acc;
}

// k-means++: first center uniform, each next with probability
// proportional to the squared distance to the closest chosen center.
std::vector<double> plus_plus_centroids(const FeatureMatrix& points, int clusters, Rng& rng) {
    const std::uint32_t dim = points.dim;
    const std::uint32_t rows = points.rows;
    std::vector<double> centroids(static_cast<std::size_t>(clusters) * dim);

    const auto copy_point = [&](std::uint32_t src, int dst) {
        const float* p = points.row(src);
        double* c = centroids.data() + static_cast<std::size_t>(dst) * dim;
        for (std::uint32_t d = 0; d < dim; ++d) c[d] = p[d];
    };

    copy_point(static_cast<std::uint32_t>(rng.bounded(rows)), 0);

    std::vector<double> best(rows, std::numeric_limits<double>::infinity());
    for (int c = 1; c < clusters; ++c) {
        const double* prev = centroids.data() + static_cast<std::size_t>(c - 1) * dim;
        double total = 0.0;
        for (std::uint32_t i = 0; i < rows; ++i) {
            best[i] = std::min(best[i], sq_dist(points.row(i), prev, dim));
            total += best[i];
        }
        std::uint32_t pick;
        if (total <= 0.0) {
            pick = static_cast<std::uint32_t>(rng.bounded(rows)); // all mass duplicated
        } else {
            const double r = rng.uniform01() * total;
            double cum = 0.0;
            pick = rows - 1;
            for (std::uint32_t i = 0; i < rows; ++i) {
                cum += best[i];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
        }
        copy_point(pick, c);
    }
    return centroids;
}

} // namespace

KmeansResult kmeans(const FeatureMatrix& points, int height, int width,
                    const KmeansParams& params) {
    const std::uint32_t rows = points.rows;
    const std::uint32_t dim = points.dim;
    if (params.clusters < 1) throw std::invalid_argument("kmeans: clusters must be >= 1");
    if (rows < static_cast<std::uint32_t>(params.clusters))
        throw std::invalid_argument("kmeans: fewer points (" + std::to_string(rows) +
                                    ") than clusters (" + std::to_string(params.clusters) + ")");
    if (static_cast<std::uint32_t>(height) * width != rows)
        throw std::invalid_argument("kmeans: grid does not match row count");

    Rng rng(params.seed);
    const int clusters = params.clusters;
    std::vector<double> centroids = plus_plus_centroids(points, clusters, rng);

    std::vector<int> assign(rows, 0);
    std::vector<double> best_dist(rows, 0.0);
    double prev_inertia = std::numeric_limits<double>::infinity();
    double inertia = 0.0;
    int iterations = 0;

    for (int iter = 0; iter < params.max_iter; ++iter) {
        // assignment: per-point, independent, ties keep the lowest index
#pragma omp parallel for schedule(static)
        for (int i = 0; i < static_cast<int>(rows); ++i) {
            const float* p = points.row(static_cast<std::uint32_t>(i));
            int best_c = 0;
            double best_d = sq_dist(p, centroids.data(), dim);
            for (int c = 1; c < clusters; ++c) {
                const double d = sq_dist(p, centroids.data() + static_cast<std::size_t>(c) * dim, dim);
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            assign[i] = best_c;
            best_dist[i] = best_d;
        }

        // serial reduction in index order keeps results independent of
        // the thread count
        inertia = 0.0;
        for (std::uint32_t i = 0; i < rows; ++i) inertia += best_dist[i];
        ++iterations;

        if (inertia > prev_inertia * (1.0 + 1e-9) + 1e-12)
            throw std::logic_error("kmeans: inertia increased across iterations");

        const bool converged =
            (inertia == 0.0) ||
            (prev_inertia != std::numeric_limits<double>::infinity() &&
             (prev_inertia - inertia) < params.tol * prev_inertia);
        prev_inertia = inertia;
        if (converged) break;

        // centroid update; empty clusters keep their previous position
        std::vector<double> sums(static_cast<std::size_t>(clusters) * dim, 0.0);
        std::vector<std::int64_t> counts(clusters, 0);
        for (std::uint32_t i = 0; i < rows; ++i) {
            const float* p = points.row(i);
            double* s = sums.data() + static_cast<std::size_t>(assign[i]) * dim;
            for (std::uint32_t d = 0; d < dim; ++d) s[d] += p[d];
            ++counts[assign[i]];
        }
        for (int c = 0; c < clusters; ++c) {
            if (counts[c] == 0) continue;
            const double inv = 1.0 / static_cast<double>(counts[c]);
            double* ctr = centroids.data() + static_cast<std::size_t>(c) * dim;
            const double* s = sums.data() + static_cast<std::size_t>(c) * dim;
            for (std::uint32_t d = 0; d < dim; ++d) ctr[d] = s[d] * inv;
        }
    }

    SegmentationMap map;
    map.height = height;
    map.width = width;
    map.num_labels = clusters;
    map.labels.resize(rows);
    for (std::uint32_t i = 0; i < rows; ++i) map.labels[i] = static_cast<std::uint16_t>(assign[i]);

    KmeansResult result;
    result.map = compact_labels(map); // drops empty clusters, orders by size
    result.inertia = inertia;
    result.iterations = iterations;
    return result;
}

} // namespace dtseg
