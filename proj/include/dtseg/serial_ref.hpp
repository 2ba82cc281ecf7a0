#pragma once

#include "dtseg/features.hpp"
#include "dtseg/kmeans.hpp"
#include "dtseg/lbp.hpp"
#include "dtseg/projection.hpp"

// Plain single-threaded implementations of the hot kernels. Kept as
// the reference the OpenMP versions are tested and benchmarked
// against; results must match bit for bit.
namespace dtseg::serial {

LbpVolume lbp_volume(const VideoCube& cube, PlaneFamily plane, const LbpParams& params);

FeatureMatrix feature_matrix(const LbpVolume& volume, const FeatureParams& params);

FeatureMatrix apply_projection(const FeatureMatrix& x, const std::vector<float>& rp,
                               std::uint32_t output_dim);

KmeansResult kmeans(const FeatureMatrix& points, int height, int width,
                    const KmeansParams& params);

} // namespace dtseg::serial
