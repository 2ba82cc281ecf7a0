#pragma once

#include <cstdint>
#include <vector>

#include "dtseg/segmentation_map.hpp"
#include "dtseg/video_cube.hpp"

namespace dtseg {

enum class RegionLayout { VerticalSplit, Quadrant, HorizontalThirds };

int region_count(RegionLayout layout); // 2, 4, 3

// One oriented moving sinusoidal grating:
//   I(y,x,t) = mean + A sin(2 pi f (x cos th + y sin th) + w t + phase)
struct RegionTexture {
    double spatial_freq = 0.18;   // cycles per pixel
    double orientation = 0.0;     // radians
    double temporal_speed = 0.9;  // phase radians per frame
};

struct SynthSpec {
    int height = 64;
    int width = 64;
    int frames = 16;
    RegionLayout layout = RegionLayout::VerticalSplit;
    std::vector<RegionTexture> textures; // one per region; empty -> defaults
    double amplitude = 45.0;  // shared across regions so moments match
    double mean_level = 128.0;
    double noise_sigma = 3.0;
    std::uint64_t seed = 1;
};

struct SynthResult {
    VideoCube cube;
    SegmentationMap truth;
    // true when all regions carry the identical texture and there is
    // no noise: nothing distinguishes the regions
    bool degenerate = false;
};

// Regions share amplitude, mean and noise level and differ only in
// orientation / speed, so first and second moments match across the
// ground-truth boundary. Deterministic in the seed.
SynthResult generate_synthetic(const SynthSpec& spec);

// Default texture set for a layout: regions alternate orientation
// (0 / 90 degrees) and temporal direction.
std::vector<RegionTexture> default_textures(RegionLayout layout);

} // namespace dtseg
