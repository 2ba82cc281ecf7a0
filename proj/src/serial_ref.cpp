#include "dtseg/serial_ref.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dtseg/rng.hpp"

namespace dtseg::serial {

LbpVolume lbp_volume(const VideoCube& cube, PlaneFamily plane, const LbpParams& params) {
    params.validate();
    LbpVolume volume;
    volume.plane = plane;
    volume.num_slices = slice_count(cube, plane);
    volume.bins = params.bins;
    {
        const Slice first = slice(cube, plane, 0);
        volume.slice_rows = first.rows;
        volume.slice_cols = first.cols;
    }
    volume.codes.resize(static_cast<std::size_t>(volume.num_slices) * volume.slice_rows *
                        volume.slice_cols);
    const std::size_t slice_len =
        static_cast<std::size_t>(volume.slice_rows) * volume.slice_cols;
    for (int s = 0; s < volume.num_slices; ++s) {
        const auto codes = lbp_code_map(slice(cube, plane, s), params);
        std::copy(codes.begin(), codes.end(), volume.codes.begin() + s * slice_len);
    }
    return volume;
}

FeatureMatrix feature_matrix(const LbpVolume& volume, const FeatureParams& params) {
    params.validate();
    int height, width, frames;
    switch (volume.plane) {
        case PlaneFamily::XY:
            height = volume.slice_rows; width = volume.slice_cols; frames = volume.num_slices;
            break;
        case PlaneFamily::XT:
            height = volume.num_slices; width = volume.slice_cols; frames = volume.slice_rows;
            break;
        default: // YT
            height = volume.slice_cols; width = volume.num_slices; frames = volume.slice_rows;
            break;
    }
    const int bins = volume.bins;
    const int half = params.window / 2;
    const int blocks = (frames + params.stride_t - 1) / params.stride_t;

    FeatureMatrix out;
    out.rows = static_cast<std::uint32_t>(height) * width;
    out.dim = static_cast<std::uint32_t>(blocks) * bins;
    out.values.assign(static_cast<std::size_t>(out.rows) * out.dim, 0.0f);

    const int sr = volume.slice_rows;
    const int sc = volume.slice_cols;
    for (int pix = 0; pix < static_cast<int>(out.rows); ++pix) {
        const int y = pix / width;
        const int x = pix % width;
        float* row = out.row(static_cast<std::uint32_t>(pix));
        for (int block = 0; block < blocks; ++block) {
            const int t = block * params.stride_t;
            int s, cr, cc;
            switch (volume.plane) {
                case PlaneFamily::XY: s = t; cr = y; cc = x; break;
                case PlaneFamily::XT: s = y; cr = t; cc = x; break;
                default:              s = x; cr = t; cc = y; break;
            }
            float* hist = row + static_cast<std::size_t>(block) * bins;
            for (int r = std::max(cr - half, 0); r <= std::min(cr + half, sr - 1); ++r)
                for (int c = std::max(cc - half, 0); c <= std::min(cc + half, sc - 1); ++c)
                    hist[volume.at(s, r, c)] += 1.0f;
        }
    }
    return out;
}

FeatureMatrix apply_projection(const FeatureMatrix& x, const std::vector<float>& rp,
                               std::uint32_t output_dim) {
    if (rp.size() != static_cast<std::size_t>(x.dim) * output_dim)
        throw std::invalid_argument("serial::apply_projection: RP shape does not match");
    const double scale = 1.0 / std::sqrt(static_cast<double>(output_dim));

    FeatureMatrix out;
    out.rows = x.rows;
    out.dim = output_dim;
    out.values.resize(static_cast<std::size_t>(out.rows) * out.dim);
    std::vector<double> acc(output_dim);
    for (std::uint32_t i = 0; i < x.rows; ++i) {
        const float* xi = x.row(i);
        float* oi = out.row(i);
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::uint32_t d = 0; d < x.dim; ++d) {
            const double v = xi[d];
            if (v == 0.0) continue;
            const float* rp_row = rp.data() + static_cast<std::size_t>(d) * output_dim;
            for (std::uint32_t j = 0; j < output_dim; ++j) acc[j] += v * rp_row[j];
        }
        for (std::uint32_t j = 0; j < output_dim; ++j)
            oi[j] = static_cast<float>(acc[j] * scale);
    }
    return out;
}

namespace {

double sq_dist(const float* a, const double* b, std::uint32_t dim) {
    double acc = 0.0;
    for (std::uint32_t d = 0; d < dim; ++d) {
        const double diff = static_cast<double>(a[d]) - b[d];
        acc += diff * diff;
    }
    return acc;
}

} // namespace

KmeansResult kmeans(const FeatureMatrix& points, int height, int width,
                    const KmeansParams& params) {
    const std::uint32_t rows = points.rows;
    const std::uint32_t dim = points.dim;
    if (params.clusters < 1) throw std::invalid_argument("serial::kmeans: clusters must be >= 1");
    if (rows < static_cast<std::uint32_t>(params.clusters))
        throw std::invalid_argument("serial::kmeans: fewer points than clusters");
    if (static_cast<std::uint32_t>(height) * width != rows)
        throw std::invalid_argument("serial::kmeans: grid does not match row count");

    Rng rng(params.seed);
    const int clusters = params.clusters;

    // k-means++ seeding, identical draw sequence to the parallel kernel
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
            pick = static_cast<std::uint32_t>(rng.bounded(rows));
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

    std::vector<int> assign(rows, 0);
    std::vector<double> best_dist(rows, 0.0);
    double prev_inertia = std::numeric_limits<double>::infinity();
    double inertia = 0.0;
    int iterations = 0;

    for (int iter = 0; iter < params.max_iter; ++iter) {
        for (std::uint32_t i = 0; i < rows; ++i) {
            const float* p = points.row(i);
            int best_c = 0;
            double best_d = sq_dist(p, centroids.data(), dim);
            for (int c = 1; c < clusters; ++c) {
                const double d =
                    sq_dist(p, centroids.data() + static_cast<std::size_t>(c) * dim, dim);
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            assign[i] = best_c;
            best_dist[i] = best_d;
        }
        inertia = 0.0;
        for (std::uint32_t i = 0; i < rows; ++i) inertia += best_dist[i];
        ++iterations;

        const bool converged =
            (inertia == 0.0) ||
            (prev_inertia != std::numeric_limits<double>::infinity() &&
             (prev_inertia - inertia) < params.tol * prev_inertia);
        prev_inertia = inertia;
        if (converged) break;

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
    result.map = compact_labels(map);
    result.inertia = inertia;
    result.iterations = iterations;
    return result;
}

} // namespace dtseg::serial
