#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dtseg {

// Label map over the spatial H x W grid. Invariant: labels are dense,
// every id in [0, num_labels) occurs at least once.
struct SegmentationMap {
    int height = 0;
    int width = 0;
    int num_labels = 0;
    std::vector<std::uint16_t> labels; // (y, x) row-major

    int pixels() const { return height * width; }
    std::uint16_t at(int y, int x) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::uint16_t& at(int y, int x) { return labels[static_cast<std::size_t>(y) * width + x]; }
};

// Throws std::invalid_argument when an invariant is broken.
void validate(const SegmentationMap& map);

// Drops unused ids and renumbers by decreasing region size (ties keep
// the lower old id first).
SegmentationMap compact_labels(const SegmentationMap& map);

std::vector<std::int64_t> label_histogram(const SegmentationMap& map);

// Writes an 8-bit P5 PGM whose pixel values are the label ids, plus a
// sidecar JSON ("<stem>.json") with {H, W, C, histogram}. Requires
// num_labels <= 255.
void write_labelmap(const SegmentationMap& map, const std::string& pgm_path);

// Reads a PGM back into a map; ids are compacted in first-occurrence
// order so the density invariant holds.
SegmentationMap load_labelmap(const std::string& pgm_path);

} // namespace dtseg
