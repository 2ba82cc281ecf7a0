#pragma once

#include <cstdint>
#include <vector>

#include "dtseg/video_cube.hpp"

namespace dtseg {

struct LbpParams {
    int neighbors = 8; // P, sampling points on the ring
    int radius = 1;    // R, ring radius in pixels
    int bins = 16;     // Q, requantization bin count

    void validate() const; // P in [4,16], R >= 1, 2 <= Q <= 2^P
};

// Code of the ring around (row, col): sum over p of s(q_p - q_c) 2^p,
// s(x) = 1 iff x >= 0. Fractional neighbor positions are bilinearly
// interpolated and compared unrounded. Throws when the ring does not
// fit inside the slice.
std::uint32_t lbp_code(const Slice& slice, int row, int col, const LbpParams& params);

// floor(code * Q / 2^P); order-preserving, onto [0, Q) when Q | 2^P.
int requantize(std::uint32_t code, int bins, int neighbors);

// Requantized code per slice pixel. Interior pixels carry their own
// code; the border band of width R replicates the nearest interior
// code. This is the narrow seam other texture operators could plug
// into.
std::vector<std::uint16_t> lbp_code_map(const Slice& slice, const LbpParams& params);

// Requantized codes for every slice of one plane family, aligned to
// the slice coordinates of that family.
struct LbpVolume {
    PlaneFamily plane = PlaneFamily::XY;
    int slice_rows = 0;
    int slice_cols = 0;
    int num_slices = 0;
    int bins = 0;
    std::vector<std::uint16_t> codes; // slice-major

    std::size_t index(int s, int r, int c) const {
        return (static_cast<std::size_t>(s) * slice_rows + r) * slice_cols + c;
    }
    std::uint16_t at(int s, int r, int c) const { return codes[index(s, r, c)]; }
};

LbpVolume lbp_volume(const VideoCube& cube, PlaneFamily plane, const LbpParams& params);

} // namespace dtseg
