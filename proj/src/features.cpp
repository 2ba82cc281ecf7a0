#include "dtseg/features.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dtseg {

namespace {

constexpr char kFeatureMagic[4] = {'D', 'T', 'F', '1'};

// Recovers (H, W, T) from the volume's slice geometry.
struct CubeDims {
    int height, width, frames;
};

CubeDims cube_dims(const LbpVolume& v) {
    switch (v.plane) {
        case PlaneFamily::XY: return {v.slice_rows, v.slice_cols, v.num_slices};
        case PlaneFamily::XT: return {v.num_slices, v.slice_cols, v.slice_rows};
        case PlaneFamily::YT: return {v.slice_cols, v.num_slices, v.slice_rows};
    }
    throw std::logic_error("cube_dims: bad plane");
}

void write_u32le(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>((v >> 8) & 0xff),
                                static_cast<unsigned char>((v >> 16) & 0xff),
                                static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

void FeatureParams::validate() const {
    if (window < 1 || window % 2 == 0)
        throw std::invalid_argument("FeatureParams: window must be odd and positive");
    if (stride_t < 1) throw std::invalid_argument("FeatureParams: stride_t must be >= 1");
}

FeatureMatrix feature_matrix(const LbpVolume& volume, const FeatureParams& params) {
    params.validate();
    const auto [height, width, frames] = cube_dims(volume);
    const int bins = volume.bins;
    const int half = params.window / 2;
    const int blocks = (frames + params.stride_t - 1) / params.stride_t;

    FeatureMatrix out;
    out.rows = static_cast<std::uint32_t>(height) * width;
    out.dim = static_cast<std::uint32_t>(blocks) * bins;
    out.values.assign(static_cast<std::size_t>(out.rows) * out.dim, 0.0f);

    const int sr = volume.slice_rows;
    const int sc = volume.slice_cols;

#pragma omp parallel for schedule(static)
    for (int pix = 0; pix < static_cast<int>(out.rows); ++pix) {
        const int y = pix / width;
        const int x = pix % width;
        float* row = out.row(static_cast<std::uint32_t>(pix));
        for (int block = 0; block < blocks; ++block) {
            const int t = block * params.stride_t;
            // projection of (y, x, t) into this family's slice
            int s, cr, cc;
            switch (volume.plane) {
                case PlaneFamily::XY: s = t; cr = y; cc = x; break;
                case PlaneFamily::XT: s = y; cr = t; cc = x; break;
                default:              s = x; cr = t; cc = y; break; // YT
            }
            float* hist = row + static_cast<std::size_t>(block) * bins;
            const int r_lo = std::max(cr - half, 0);
            const int r_hi = std::min(cr + half, sr - 1);
            const int c_lo = std::max(cc - half, 0);
            const int c_hi = std::min(cc + half, sc - 1);
            const std::uint16_t* codes = volume.codes.data() + static_cast<std::size_t>(s) * sr * sc;
            for (int r = r_lo; r <= r_hi; ++r) {
                const std::uint16_t* line = codes + static_cast<std::size_t>(r) * sc;
                for (int c = c_lo; c <= c_hi; ++c) hist[line[c]] += 1.0f;
            }
        }
    }
    return out;
}

void save_features(const FeatureMatrix& features, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out.write(kFeatureMagic, 4);
    write_u32le(out, features.rows);
    write_u32le(out, features.dim);
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(features.values.data()),
              static_cast<std::streamsize>(features.values.size() * sizeof(float)));
    if (!out) throw std::runtime_error(path + ": write failed");
}

FeatureMatrix load_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kFeatureMagic, 4) != 0)
        throw std::runtime_error(path + ": not a DTF1 feature file");
    FeatureMatrix features;
    features.rows = read_u32le(in);
    features.dim = read_u32le(in);
    if (!in) throw std::runtime_error(path + ": truncated feature header");
    features.values.resize(static_cast<std::size_t>(features.rows) * features.dim);
    in.read(reinterpret_cast<char*>(features.values.data()),
            static_cast<std::streamsize>(features.values.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(features.values.size() * sizeof(float)))
        throw std::runtime_error(path + ": truncated feature data");
    return features;
}

} // namespace dtseg
