#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dtseg/features.hpp"
#include "dtseg/kmeans.hpp"
#include "dtseg/lbp.hpp"
#include "dtseg/segmentation_map.hpp"
#include "dtseg/video_cube.hpp"

namespace dtseg {

struct EnsembleConfig {
    int replicates = 4;            // K, members per plane family
    int clusters = 2;              // C
    std::uint32_t reduced_dim = 100; // k
    int kmeans_max_iter = 100;
    double kmeans_tol = 1e-4;
    std::uint64_t master_seed = 1;

    int member_count() const { return 3 * replicates; } // J = 3K
    void validate() const;
};

struct EnsembleMember {
    SegmentationMap map;
    PlaneFamily plane = PlaneFamily::XY;
    int replicate = 0;
    std::uint64_t projection_seed = 0;
    std::uint64_t kmeans_seed = 0;
    double inertia = 0.0;
};

std::uint64_t member_stream_seed(std::uint64_t master_seed, PlaneFamily plane, int replicate);

// The three per-family feature matrices, indexed XY, XT, YT.
using FamilyFeatures = std::array<FeatureMatrix, 3>;

FamilyFeatures build_family_features(const VideoCube& cube, const LbpParams& lbp,
                                     const FeatureParams& features);

// K independent (projection + k-means) jobs per family; members are
// ordered family-major (all XY replicates, then XT, then YT).
std::vector<EnsembleMember> ensemble_from_features(const FamilyFeatures& features,
                                                   int height, int width,
                                                   const EnsembleConfig& config);

std::vector<EnsembleMember> generate_ensemble(const VideoCube& cube, const LbpParams& lbp,
                                              const FeatureParams& features,
                                              const EnsembleConfig& config);

std::vector<SegmentationMap> member_maps(const std::vector<EnsembleMember>& members);

} // namespace dtseg
