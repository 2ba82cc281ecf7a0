#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtseg/lbp.hpp"

namespace dtseg {

struct FeatureParams {
    int window = 7;   // Nw, odd window edge for local histograms
    int stride_t = 1; // s_t, temporal stride over retained frames

    void validate() const;
};

// One row per spatial pixel in (y, x) row-major order; each row is a
// concatenation of Q-bin local histograms, one block per retained
// frame, so dim = ceil(T / s_t) * Q.
struct FeatureMatrix {
    std::uint32_t rows = 0;
    std::uint32_t dim = 0;
    std::vector<float> values; // row-major

    const float* row(std::uint32_t i) const { return values.data() + static_cast<std::size_t>(i) * dim; }
    float* row(std::uint32_t i) { return values.data() + static_cast<std::size_t>(i) * dim; }
};

// Builds the per-pixel histogram features for one plane family. The
// window is centered on the pixel's projection into each slice of the
// family (XY: (y,x) in slice t; XT: (t,x) in slice y; YT: (t,y) in
// slice x) and clipped at slice borders.
FeatureMatrix feature_matrix(const LbpVolume& volume, const FeatureParams& params);

// Raw feature file: magic "DTF1", u32le rows, u32le dim, f32le values
// row-major.
void save_features(const FeatureMatrix& features, const std::string& path);
FeatureMatrix load_features(const std::string& path);

} // namespace dtseg
