#include "dtseg/ensemble.hpp"

#include <stdexcept>

#include "dtseg/projection.hpp"
#include "dtseg/rng.hpp"

namespace dtseg {

namespace {

constexpr std::uint64_t kProjectionTag = 0x50524f4aULL; // "PROJ"
constexpr std::uint64_t kKmeansTag = 0x4b4d4e53ULL;     // "KMNS"

constexpr PlaneFamily kFamilies[3] = {PlaneFamily::XY, PlaneFamily::XT, PlaneFamily::YT};

} // namespace

void EnsembleConfig::validate() const {
    if (replicates < 1) throw std::invalid_argument("EnsembleConfig: replicates must be >= 1");
    if (clusters < 2) throw std::invalid_argument("EnsembleConfig: clusters must be >= 2");
    if (reduced_dim < 1) throw std::invalid_argument("EnsembleConfig: reduced_dim must be >= 1");
    if (kmeans_max_iter < 1)
        throw std::invalid_argument("EnsembleConfig: kmeans_max_iter must be >= 1");
    if (kmeans_tol < 0.0) throw std::invalid_argument("EnsembleConfig: kmeans_tol must be >= 0");
}

std::uint64_t member_stream_seed(std::uint64_t master_seed, PlaneFamily plane, int replicate) {
    return mix_seed(mix_seed(master_seed, static_cast<std::uint64_t>(plane)),
                    static_cast<std::uint64_t>(replicate));
}

FamilyFeatures build_family_features(const VideoCube& cube, const LbpParams& lbp,
                                     const FeatureParams& features) {
    FamilyFeatures out;
    for (int f = 0; f < 3; ++f) {
        const LbpVolume volume = lbp_volume(cube, kFamilies[f], lbp);
        out[f] = feature_matrix(volume, features);
    }
    return out;
}

std::vector<EnsembleMember> ensemble_from_features(const FamilyFeatures& features, int height,
                                                   int width, const EnsembleConfig& config) {
    config.validate();
    for (const auto& f : features) {
        if (f.rows != static_cast<std::uint32_t>(height) * width)
            throw std::invalid_argument("ensemble_from_features: feature rows do not match grid");
        if (config.reduced_dim > f.dim)
            throw std::invalid_argument("ensemble_from_features: reduced_dim " +
                                        std::to_string(config.reduced_dim) +
                                        " exceeds feature dim " + std::to_string(f.dim));
        if (f.rows < static_cast<std::uint32_t>(config.clusters))
            throw std::invalid_argument("ensemble_from_features: fewer pixels than clusters");
    }

    const int total = config.member_count();
    std::vector<EnsembleMember> members(total);
    std::string job_error;

    // jobs are independent; each touches only its own output slot.
    // exceptions cannot cross the parallel region, so the first error
    // is captured and rethrown afterwards.
#pragma omp parallel for schedule(dynamic)
    for (int job = 0; job < total; ++job) {
        try {
            const int family = job / config.replicates;
            const int replicate = job % config.replicates;
            const std::uint64_t stream =
                member_stream_seed(config.master_seed, kFamilies[family], replicate);

            ProjectionSpec spec;
            spec.input_dim = features[family].dim;
            spec.output_dim = config.reduced_dim;
            spec.seed = mix_seed(stream, kProjectionTag);

            const FeatureMatrix reduced = random_projection(features[family], spec);

            KmeansParams km;
            km.clusters = config.clusters;
            km.seed = mix_seed(stream, kKmeansTag);
            km.max_iter = config.kmeans_max_iter;
            km.tol = config.kmeans_tol;
            KmeansResult kmr = kmeans(reduced, height, width, km);

            EnsembleMember& m = members[job];
            m.map = std::move(kmr.map);
            m.plane = kFamilies[family];
            m.replicate = replicate;
            m.projection_seed = spec.seed;
            m.kmeans_seed = km.seed;
            m.inertia = kmr.inertia;
        } catch (const std::exception& e) {
#pragma omp critical(dtseg_ensemble_error)
            if (job_error.empty()) job_error = e.what();
        }
    }
    if (!job_error.empty())
        throw std::runtime_error("ensemble member failed: " + job_error);
    return members;
}

std::vector<EnsembleMember> generate_ensemble(const VideoCube& cube, const LbpParams& lbp,
                                              const FeatureParams& features,
                                              const EnsembleConfig& config) {
    const FamilyFeatures fams = build_family_features(cube, lbp, features);
    return ensemble_from_features(fams, cube.height, cube.width, config);
}

std::vector<SegmentationMap> member_maps(const std::vector<EnsembleMember>& members) {
    std::vector<SegmentationMap> maps;
    maps.reserve(members.size());
    for (const auto& m : members) maps.push_back(m.map);
    return maps;
}

} // namespace dtseg
