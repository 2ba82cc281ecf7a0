#pragma once

#include <cstdint>

#include "dtseg/features.hpp"
#include "dtseg/segmentation_map.hpp"

namespace dtseg {

struct KmeansParams {
    int clusters = 2; // C
    std::uint64_t seed = 0;
    int max_iter = 100;
    double tol = 1e-4; // stop when relative inertia improvement drops below
};

struct KmeansResult {
    SegmentationMap map; // compacted, labels ordered by decreasing size
    double inertia = 0.0;
    int iterations = 0;
};

// k-means++ seeding followed by Lloyd iterations. Point i maps to grid
// cell (i / width, i % width). Empty clusters are dropped, not
// reseeded. Fully deterministic for a given seed, independent of the
// number of threads.
KmeansResult kmeans(const FeatureMatrix& points, int height, int width,
                    const KmeansParams& params);

} // namespace dtseg
