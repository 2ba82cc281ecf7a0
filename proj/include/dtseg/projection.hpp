#pragma once

#include <cstdint>
#include <vector>

#include "dtseg/features.hpp"

namespace dtseg {

struct ProjectionSpec {
    std::uint32_t input_dim = 0;  // D
    std::uint32_t output_dim = 100; // k
    std::uint64_t seed = 0;

    void validate() const; // 1 <= k <= D
};

// D x k matrix of i.i.d. standard normals, row-major, fully
// determined by the seed.
std::vector<float> make_projection_matrix(const ProjectionSpec& spec);

// (1 / sqrt(k)) * X * RP. Exposed separately from the matrix draw so
// tests can substitute a known RP (e.g. the identity).
FeatureMatrix apply_projection(const FeatureMatrix& x, const std::vector<float>& rp,
                               std::uint32_t output_dim);

FeatureMatrix random_projection(const FeatureMatrix& x, const ProjectionSpec& spec);

} // namespace dtseg
