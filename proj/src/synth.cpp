#include "dtseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dtseg/rng.hpp"

namespace dtseg {

namespace {

constexpr double kPi = 3.14159265358979323846;

int region_of(RegionLayout layout, int y, int x, int height, int width) {
    switch (layout) {
        case RegionLayout::VerticalSplit:
            return x < width / 2 ? 0 : 1;
        case RegionLayout::Quadrant:
            return (y < height / 2 ? 0 : 2) + (x < width / 2 ? 0 : 1);
        case RegionLayout::HorizontalThirds: {
            const int band = height / 3;
            if (y < band) return 0;
            if (y < 2 * band) return 1;
            return 2;
        }
    }
    throw std::logic_error("region_of: bad layout");
}

bool textures_identical(const std::vector<RegionTexture>& ts) {
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts[i].spatial_freq != ts[0].spatial_freq ||
            ts[i].orientation != ts[0].orientation ||
            ts[i].temporal_speed != ts[0].temporal_speed)
            return false;
    }
    return true;
}

} // namespace

int region_count(RegionLayout layout) {
    switch (layout) {
        case RegionLayout::VerticalSplit: return 2;
        case RegionLayout::Quadrant: return 4;
        case RegionLayout::HorizontalThirds: return 3;
    }
    throw std::logic_error("region_count: bad layout");
}

std::vector<RegionTexture> default_textures(RegionLayout layout) {
    const int count = region_count(layout);
    std::vector<RegionTexture> textures(count);
    for (int r = 0; r < count; ++r) {
        textures[r].spatial_freq = 0.18;
        textures[r].orientation = (r % 2 == 0) ? 0.0 : kPi / 2.0;
        textures[r].temporal_speed = (r < 2) ? 0.9 : -0.9;
    }
    return textures;
}

SynthResult generate_synthetic(const SynthSpec& spec) {
    const int regions = region_count(spec.layout);
    std::vector<RegionTexture> textures =
        spec.textures.empty() ? default_textures(spec.layout) : spec.textures;
    if (static_cast<int>(textures.size()) != regions)
        throw std::invalid_argument("generate_synthetic: texture count does not match layout (" +
                                    std::to_string(textures.size()) + " vs " +
                                    std::to_string(regions) + ")");

    SynthResult result;
    result.cube = VideoCube::create(spec.height, spec.width, spec.frames);
    result.degenerate = spec.noise_sigma == 0.0 && textures_identical(textures);

    result.truth.height = spec.height;
    result.truth.width = spec.width;
    result.truth.num_labels = regions;
    result.truth.labels.resize(static_cast<std::size_t>(spec.height) * spec.width);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            result.truth.at(y, x) =
                static_cast<std::uint16_t>(region_of(spec.layout, y, x, spec.height, spec.width));

    Rng rng(mix_seed(spec.seed, 0x53594e54ULL)); // "SYNT"
    std::vector<double> phases(regions);
    for (auto& phase : phases) phase = rng.uniform01() * 2.0 * kPi;

    for (int t = 0; t < spec.frames; ++t) {
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                const int r = result.truth.at(y, x);
                const RegionTexture& tex = textures[r];
                const double u = x * std::cos(tex.orientation) + y * std::sin(tex.orientation);
                double v = spec.mean_level +
                           spec.amplitude * std::sin(2.0 * kPi * tex.spatial_freq * u +
                                                     tex.temporal_speed * t + phases[r]);
                if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
                const double q = std::round(v);
                result.cube.at(y, x, t) =
                    static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
            }
        }
    }
    return result;
}

} // namespace dtseg
