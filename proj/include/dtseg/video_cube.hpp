#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dtseg {

// Smallest edge that still admits a 7x7 histogram window plus an LBP
// ring of radius 1 somewhere in every plane family.
constexpr int kMinCubeEdge = 9;

enum class PlaneFamily { XY, XT, YT };

const char* plane_name(PlaneFamily plane); // "xy", "xt", "yt"

// Grayscale video volume. Data is stored frame-major, (t, y, x)
// row-major, so a frame directory can be streamed straight in.
struct VideoCube {
    int height = 0; // H, y axis
    int width = 0;  // W, x axis
    int frames = 0; // T, t axis
    std::vector<std::uint8_t> data;

    std::size_t index(int y, int x, int t) const {
        return (static_cast<std::size_t>(t) * height + y) * width + x;
    }
    std::uint8_t at(int y, int x, int t) const { return data[index(y, x, t)]; }
    std::uint8_t& at(int y, int x, int t) { return data[index(y, x, t)]; }

    // zero-filled cube; throws if any dimension is below kMinCubeEdge
    static VideoCube create(int height, int width, int frames);
};

// One 2D cross-section of the cube. Axis mapping:
//   XY: rows = H, cols = W, fixed t
//   XT: rows = T, cols = W, fixed y
//   YT: rows = T, cols = H, fixed x
struct Slice {
    int rows = 0;
    int cols = 0;
    PlaneFamily plane = PlaneFamily::XY;
    int fixed_index = 0;
    std::vector<std::uint8_t> data;

    std::uint8_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    std::uint8_t& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
};

enum class CubeFormat { Auto, RawCube, FrameDirectory };

// Raw cube file: magic "DTC1", u32le H, u32le W, u32le T, then
// H*W*T bytes in (t, y, x) row-major order.
VideoCube load_cube(const std::string& path, CubeFormat format = CubeFormat::Auto);
void save_cube_raw(const VideoCube& cube, const std::string& path);

int slice_count(const VideoCube& cube, PlaneFamily plane);
Slice slice(const VideoCube& cube, PlaneFamily plane, int index);

} // namespace dtseg
