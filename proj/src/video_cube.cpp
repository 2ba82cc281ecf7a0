#include "dtseg/video_cube.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "dtseg/image_io.hpp"

namespace fs = std::filesystem;

namespace dtseg {

namespace {

constexpr char kCubeMagic[4] = {'D', 'T', 'C', '1'};

void check_dims(int h, int w, int t, const std::string& what) {
    if (h < kMinCubeEdge || w < kMinCubeEdge || t < kMinCubeEdge)
        throw std::runtime_error(what + ": cube dimensions " + std::to_string(h) + "x" +
                                 std::to_string(w) + "x" + std::to_string(t) +
                                 " below the minimum of " + std::to_string(kMinCubeEdge) +
                                 " per axis");
}

std::uint32_t read_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32le(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>((v >> 8) & 0xff),
                                static_cast<unsigned char>((v >> 16) & 0xff),
                                static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

VideoCube load_cube_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kCubeMagic, 4) != 0)
        throw std::runtime_error(path + ": not a DTC1 cube file");

    const std::uint32_t h = read_u32le(in);
    const std::uint32_t w = read_u32le(in);
    const std::uint32_t t = read_u32le(in);
    if (!in) throw std::runtime_error(path + ": truncated cube header");
    check_dims(static_cast<int>(h), static_cast<int>(w), static_cast<int>(t), path);

    VideoCube cube;
    cube.height = static_cast<int>(h);
    cube.width = static_cast<int>(w);
    cube.frames = static_cast<int>(t);
    const std::size_t expected = static_cast<std::size_t>(h) * w * t;
    cube.data.resize(expected);
    in.read(reinterpret_cast<char*>(cube.data.data()), static_cast<std::streamsize>(expected));
    if (in.gcount() != static_cast<std::streamsize>(expected))
        throw std::runtime_error(path + ": truncated cube data (expected " +
                                 std::to_string(expected) + " bytes, got " +
                                 std::to_string(in.gcount()) + ")");
    if (in.get() != std::char_traits<char>::eof())
        throw std::runtime_error(path + ": trailing bytes after cube data");
    return cube;
}

VideoCube load_cube_frames(const std::string& path) {
    std::vector<std::string> frames;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == ".pgm" || ext == ".pnm" || ext == ".png")
            frames.push_back(entry.path().string());
    }
    std::sort(frames.begin(), frames.end());
    if (frames.empty()) throw std::runtime_error(path + ": no PGM/PNG frames found");

    VideoCube cube;
    cube.frames = static_cast<int>(frames.size());
    for (int t = 0; t < cube.frames; ++t) {
        const GrayImage img = read_gray_image(frames[t]);
        if (t == 0) {
            cube.height = img.rows;
            cube.width = img.cols;
            check_dims(cube.height, cube.width, cube.frames, path);
            cube.data.resize(static_cast<std::size_t>(cube.height) * cube.width * cube.frames);
        } else if (img.rows != cube.height || img.cols != cube.width) {
            throw std::runtime_error(frames[t] + ": frame dimensions " + std::to_string(img.cols) +
                                     "x" + std::to_string(img.rows) + " differ from first frame " +
                                     std::to_string(cube.width) + "x" + std::to_string(cube.height));
        }
        std::copy(img.pixels.begin(), img.pixels.end(),
                  cube.data.begin() + static_cast<std::size_t>(t) * cube.height * cube.width);
    }
    return cube;
}

} // namespace

const char* plane_name(PlaneFamily plane) {
    switch (plane) {
        case PlaneFamily::XY: return "xy";
        case PlaneFamily::XT: return "xt";
        case PlaneFamily::YT: return "yt";
    }
    return "?";
}

VideoCube VideoCube::create(int height, int width, int frames) {
    check_dims(height, width, frames, "VideoCube::create");
    VideoCube cube;
    cube.height = height;
    cube.width = width;
    cube.frames = frames;
    cube.data.assign(static_cast<std::size_t>(height) * width * frames, 0);
    return cube;
}

VideoCube load_cube(const std::string& path, CubeFormat format) {
    if (format == CubeFormat::Auto)
        format = fs::is_directory(path) ? CubeFormat::FrameDirectory : CubeFormat::RawCube;
    if (format == CubeFormat::FrameDirectory) {
        if (!fs::is_directory(path)) throw std::runtime_error(path + ": not a directory");
        return load_cube_frames(path);
    }
    if (!fs::exists(path)) throw std::runtime_error(path + ": no such file");
    return load_cube_raw(path);
}

void save_cube_raw(const VideoCube& cube, const std::string& path) {
    check_dims(cube.height, cube.width, cube.frames, "save_cube_raw");
    if (cube.data.size() != static_cast<std::size_t>(cube.height) * cube.width * cube.frames)
        throw std::invalid_argument("save_cube_raw: data length does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out.write(kCubeMagic, 4);
    write_u32le(out, static_cast<std::uint32_t>(cube.height));
    write_u32le(out, static_cast<std::uint32_t>(cube.width));
    write_u32le(out, static_cast<std::uint32_t>(cube.frames));
    out.write(reinterpret_cast<const char*>(cube.data.data()),
              static_cast<std::streamsize>(cube.data.size()));
    if (!out) throw std::runtime_error(path + ": write failed");
}

int slice_count(const VideoCube& cube, PlaneFamily plane) {
    switch (plane) {
        case PlaneFamily::XY: return cube.frames;
        case PlaneFamily::XT: return cube.height;
        case PlaneFamily::YT: return cube.width;
    }
    return 0;
}

Slice slice(const VideoCube& cube, PlaneFamily plane, int index) {
    if (index < 0 || index >= slice_count(cube, plane))
        throw std::out_of_range("slice: index " + std::to_string(index) + " out of range for " +
                                plane_name(plane) + " plane");
    Slice s;
    s.plane = plane;
    s.fixed_index = index;
    switch (plane) {
        case PlaneFamily::XY:
            s.rows = cube.height;
            s.cols = cube.width;
            s.data.resize(static_cast<std::size_t>(s.rows) * s.cols);
            // frames are contiguous
            std::copy_n(cube.data.begin() + cube.index(0, 0, index), s.data.size(),
                        s.data.begin());
            break;
        case PlaneFamily::XT:
            s.rows = cube.frames;
            s.cols = cube.width;
            s.data.resize(static_cast<std::size_t>(s.rows) * s.cols);
            for (int t = 0; t < cube.frames; ++t)
                std::copy_n(cube.data.begin() + cube.index(index, 0, t), cube.width,
                            s.data.begin() + static_cast<std::size_t>(t) * cube.width);
            break;
        case PlaneFamily::YT:
            s.rows = cube.frames;
            s.cols = cube.height;
            s.data.resize(static_cast<std::size_t>(s.rows) * s.cols);
            for (int t = 0; t < cube.frames; ++t)
                for (int y = 0; y < cube.height; ++y)
                    s.at(t, y) = cube.at(y, index, t);
            break;
    }
    return s;
}

} // namespace dtseg
