#include "dtseg/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#ifdef DTSEG_HAVE_PNG
#include <png.h>
#endif

namespace dtseg {

namespace {

// Skips whitespace and '#' comments between PNM header tokens.
int next_header_int(std::istream& in, const std::string& path) {
    for (;;) {
        int c = in.peek();
        if (c == EOF) throw std::runtime_error(path + ": truncated PNM header");
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int value = 0;
    if (!(in >> value)) throw std::runtime_error(path + ": malformed PNM header");
    return value;
}

} // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || (m1 != '5' && m1 != '2')) {
        if (m0 == 'P' && (m1 == '6' || m1 == '3'))
            throw std::runtime_error(path + ": color PPM input is not supported");
        throw std::runtime_error(path + ": not a PGM file");
    }
    const bool binary = (m1 == '5');

    const int cols = next_header_int(in, path);
    const int rows = next_header_int(in, path);
    const int maxval = next_header_int(in, path);
    if (cols <= 0 || rows <= 0) throw std::runtime_error(path + ": bad PGM dimensions");
    if (maxval < 1 || maxval > 255)
        throw std::runtime_error(path + ": only 8-bit PGM is supported (maxval 1..255)");

    GrayImage img;
    img.rows = rows;
    img.cols = cols;
    img.pixels.resize(static_cast<std::size_t>(rows) * cols);

    if (binary) {
        in.get(); // single whitespace byte after maxval
        in.read(reinterpret_cast<char*>(img.pixels.data()),
                static_cast<std::streamsize>(img.pixels.size()));
        if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
            throw std::runtime_error(path + ": truncated PGM pixel data");
    } else {
        for (auto& p : img.pixels) {
            int v = 0;
            if (!(in >> v)) throw std::runtime_error(path + ": truncated PGM pixel data");
            if (v < 0 || v > maxval) throw std::runtime_error(path + ": PGM sample out of range");
            p = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
    if (img.rows <= 0 || img.cols <= 0 ||
        img.pixels.size() != static_cast<std::size_t>(img.rows) * img.cols)
        throw std::invalid_argument("write_pgm: inconsistent image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "P5\n" << img.cols << " " << img.rows << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw std::runtime_error(path + ": write failed");
}

#ifdef DTSEG_HAVE_PNG

bool png_supported() { return true; }

GrayImage read_png_gray8(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error(path + ": cannot open");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        std::fclose(fp);
        throw std::runtime_error(path + ": libpng init failed");
    }

    GrayImage img;
    std::vector<png_bytep> row_ptrs;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error(path + ": PNG decode error");
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    if (color_type != PNG_COLOR_TYPE_GRAY || bit_depth > 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error(path + ": only 8-bit grayscale PNG is supported");
    }
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);

    img.cols = static_cast<int>(png_get_image_width(png, info));
    img.rows = static_cast<int>(png_get_image_height(png, info));
    img.pixels.resize(static_cast<std::size_t>(img.rows) * img.cols);
    row_ptrs.resize(img.rows);
    for (int r = 0; r < img.rows; ++r)
        row_ptrs[r] = img.pixels.data() + static_cast<std::size_t>(r) * img.cols;

    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

#else

bool png_supported() { return false; }

GrayImage read_png_gray8(const std::string& path) {
    throw std::runtime_error(path + ": built without PNG support");
}

#endif

GrayImage read_gray_image(const std::string& path) {
    std::string ext;
    const auto dot = path.find_last_of('.');
    if (dot != std::string::npos) {
        ext = path.substr(dot + 1);
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    if (ext == "png") return read_png_gray8(path);
    if (ext == "pgm" || ext == "pnm") return read_pgm(path);
    throw std::runtime_error(path + ": unsupported image extension (expected .pgm or .png)");
}

} // namespace dtseg
