#include "dtseg/lbp.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dtseg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSnapEps = 1e-6; // sin/cos round-off near grid points

struct NeighborOffset {
    int y0 = 0, x0 = 0;     // top-left of the interpolation cell
    double fy = 0.0, fx = 0.0; // fractional part; 0 means on-grid
};

std::vector<NeighborOffset> ring_offsets(const LbpParams& params) {
    std::vector<NeighborOffset> offsets(params.neighbors);
    for (int p = 0; p < params.neighbors; ++p) {
        const double angle = 2.0 * kPi * p / params.neighbors;
        double dy = params.radius * std::sin(angle);
        double dx = params.radius * std::cos(angle);
        if (std::abs(dy - std::round(dy)) < kSnapEps) dy = std::round(dy);
        if (std::abs(dx - std::round(dx)) < kSnapEps) dx = std::round(dx);
        NeighborOffset o;
        o.y0 = static_cast<int>(std::floor(dy));
        o.x0 = static_cast<int>(std::floor(dx));
        o.fy = dy - o.y0;
        o.fx = dx - o.x0;
        offsets[p] = o;
    }
    return offsets;
}

// Bilinear sample in the "base value plus weighted differences" form:
// exact when the four cell corners are equal, and exact under integer
// intensity shifts, which keeps the shift/scale invariance of the
// codes free of rounding artifacts.
inline double sample(const Slice& slice, int row, int col, const NeighborOffset& o) {
    const int y = row + o.y0;
    const int x = col + o.x0;
    const double v00 = slice.at(y, x);
    if (o.fy == 0.0 && o.fx == 0.0) return v00;
    if (o.fy == 0.0) {
        const double v01 = slice.at(y, x + 1);
        return v00 + o.fx * (v01 - v00);
    }
    if (o.fx == 0.0) {
        const double v10 = slice.at(y + 1, x);
        return v00 + o.fy * (v10 - v00);
    }
    const double v01 = slice.at(y, x + 1);
    const double v10 = slice.at(y + 1, x);
    const double v11 = slice.at(y + 1, x + 1);
    return v00 + o.fx * (v01 - v00) + o.fy * (v10 - v00) +
           o.fy * o.fx * (v11 - v01 - v10 + v00);
}

inline std::uint32_t code_at(const Slice& slice, int row, int col,
                             const std::vector<NeighborOffset>& offsets) {
    const double center = slice.at(row, col);
    std::uint32_t code = 0;
    for (std::size_t p = 0; p < offsets.size(); ++p) {
        if (sample(slice, row, col, offsets[p]) - center >= 0.0)
            code |= (1u << p);
    }
    return code;
}

} // namespace

void LbpParams::validate() const {
    if (neighbors < 4 || neighbors > 16)
        throw std::invalid_argument("LbpParams: neighbors must be in [4, 16]");
    if (radius < 1) throw std::invalid_argument("LbpParams: radius must be >= 1");
    const int code_space = 1 << neighbors;
    if (bins < 2 || bins > code_space)
        throw std::invalid_argument("LbpParams: bins must be in [2, 2^neighbors]");
}

std::uint32_t lbp_code(const Slice& slice, int row, int col, const LbpParams& params) {
    params.validate();
    const int margin = params.radius;
    if (row < margin || col < margin || row >= slice.rows - margin || col >= slice.cols - margin)
        throw std::out_of_range("lbp_code: ring of radius " + std::to_string(params.radius) +
                                " around (" + std::to_string(row) + ", " + std::to_string(col) +
                                ") leaves the slice");
    return code_at(slice, row, col, ring_offsets(params));
}

int requantize(std::uint32_t code, int bins, int neighbors) {
    return static_cast<int>((static_cast<std::uint64_t>(code) * bins) >> neighbors);
}

std::vector<std::uint16_t> lbp_code_map(const Slice& slice, const LbpParams& params) {
    params.validate();
    const int margin = params.radius;
    const int rows = slice.rows;
    const int cols = slice.cols;
    if (rows <= 2 * margin || cols <= 2 * margin)
        throw std::invalid_argument("lbp_code_map: slice too small for radius " +
                                    std::to_string(params.radius));
    const auto offsets = ring_offsets(params);

    std::vector<std::uint16_t> codes(static_cast<std::size_t>(rows) * cols);
    for (int r = margin; r < rows - margin; ++r)
        for (int c = margin; c < cols - margin; ++c)
            codes[static_cast<std::size_t>(r) * cols + c] = static_cast<std::uint16_t>(
                requantize(code_at(slice, r, c, offsets), params.bins, params.neighbors));

    // replicate the nearest interior code into the border band
    for (int r = 0; r < rows; ++r) {
        const int rc = std::min(std::max(r, margin), rows - 1 - margin);
        for (int c = 0; c < cols; ++c) {
            if (r >= margin && r < rows - margin && c >= margin && c < cols - margin) continue;
            const int cc = std::min(std::max(c, margin), cols - 1 - margin);
            codes[static_cast<std::size_t>(r) * cols + c] =
                codes[static_cast<std::size_t>(rc) * cols + cc];
        }
    }
    return codes;
}

LbpVolume lbp_volume(const VideoCube& cube, PlaneFamily plane, const LbpParams& params) {
    params.validate();
    LbpVolume volume;
    volume.plane = plane;
    volume.num_slices = slice_count(cube, plane);
    volume.bins = params.bins;
    {
        const Slice first = slice(cube, plane, 0);
        volume.slice_rows = first.rows;
        volume.slice_cols = first.cols;
    }
    volume.codes.resize(static_cast<std::size_t>(volume.num_slices) * volume.slice_rows *
                        volume.slice_cols);

    // validate before the parallel region; a throw inside it would terminate
    if (volume.slice_rows <= 2 * params.radius || volume.slice_cols <= 2 * params.radius)
        throw std::invalid_argument(std::string("lbp_volume: ") + plane_name(plane) +
                                    " slices are too small for radius " +
                                    std::to_string(params.radius));

    const std::size_t slice_len =
        static_cast<std::size_t>(volume.slice_rows) * volume.slice_cols;
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < volume.num_slices; ++s) {
        const Slice sl = slice(cube, plane, s);
        const auto codes = lbp_code_map(sl, params);
        std::copy(codes.begin(), codes.end(), volume.codes.begin() + s * slice_len);
    }
    return volume;
}

} // namespace dtseg
