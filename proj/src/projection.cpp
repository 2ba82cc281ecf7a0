#include "dtseg/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dtseg/rng.hpp"

namespace dtseg {

void ProjectionSpec::validate() const {
    if (output_dim < 1) throw std::invalid_argument("ProjectionSpec: output_dim must be >= 1");
    if (output_dim > input_dim)
        throw std::invalid_argument("ProjectionSpec: output_dim " + std::to_string(output_dim) +
                                    " exceeds input_dim " + std::to_string(input_dim));
}

std::vector<float> make_projection_matrix(const ProjectionSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<float> rp(static_cast<std::size_t>(spec.input_dim) * spec.output_dim);
    for (auto& v : rp) v = static_cast<float>(rng.normal());
    return rp;
}

FeatureMatrix apply_projection(const FeatureMatrix& x, const std::vector<float>& rp,
                               std::uint32_t output_dim) {
    if (rp.size() != static_cast<std::size_t>(x.dim) * output_dim)
        throw std::invalid_argument("apply_projection: RP shape does not match");
    const double scale = 1.0 / std::sqrt(static_cast<double>(output_dim));

    FeatureMatrix out;
    out.rows = x.rows;
    out.dim = output_dim;
    out.values.resize(static_cast<std::size_t>(out.rows) * out.dim);

#pragma omp parallel
    {
        std::vector<double> acc(output_dim);
#pragma omp for schedule(static)
        for (int i = 0; i < static_cast<int>(x.rows); ++i) {
            const float* xi = x.row(static_cast<std::uint32_t>(i));
            float* oi = out.row(static_cast<std::uint32_t>(i));
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
    }
    return out;
}

FeatureMatrix random_projection(const FeatureMatrix& x, const ProjectionSpec& spec) {
    if (spec.input_dim != x.dim)
        throw std::invalid_argument("random_projection: spec input_dim does not match matrix");
    return apply_projection(x, make_projection_matrix(spec), spec.output_dim);
}

} // namespace dtseg
