#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dtseg {

struct GrayImage {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> pixels; // row-major

    std::uint8_t at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * cols + c]; }
    std::uint8_t& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * cols + c]; }
};

// Binary (P5) and ASCII (P2) PGM, maxval <= 255. Color formats are
// rejected, not converted.
GrayImage read_pgm(const std::string& path);

// Writes binary P5 with maxval 255.
void write_pgm(const GrayImage& img, const std::string& path);

// 8-bit grayscale PNG. Throws when built without libpng or when the
// file is color / 16-bit.
GrayImage read_png_gray8(const std::string& path);

bool png_supported();

// Dispatches on extension (.pgm / .png, case-insensitive).
GrayImage read_gray_image(const std::string& path);

} // namespace dtseg
