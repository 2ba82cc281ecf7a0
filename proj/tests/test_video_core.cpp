#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dtseg/image_io.hpp"
#include "dtseg/segmentation_map.hpp"
#include "dtseg/video_cube.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace dtseg;

namespace {

fs::path temp_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> raw_header(std::uint32_t h, std::uint32_t w, std::uint32_t t) {
    std::vector<std::uint8_t> bytes = {'D', 'T', 'C', '1'};
    for (const std::uint32_t v : {h, w, t})
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    return bytes;
}

} // namespace

TEST_CASE("slice axis bookkeeping") {
    VideoCube cube = VideoCube::create(10, 12, 14);
    cube.at(2, 3, 5) = 77;

    CHECK(slice(cube, PlaneFamily::XT, 2).at(5, 3) == 77);
    CHECK(slice(cube, PlaneFamily::XY, 5).at(2, 3) == 77);
    CHECK(slice(cube, PlaneFamily::YT, 3).at(5, 2) == 77);
}

TEST_CASE("slice dimensions per plane family on a non-square cube") {
    const VideoCube cube = VideoCube::create(10, 12, 14);

    const Slice xy = slice(cube, PlaneFamily::XY, 0);
    CHECK(xy.rows == 10);
    CHECK(xy.cols == 12);
    const Slice xt = slice(cube, PlaneFamily::XT, 0);
    CHECK(xt.rows == 14);
    CHECK(xt.cols == 12);
    const Slice yt = slice(cube, PlaneFamily::YT, 0);
    CHECK(yt.rows == 14);
    CHECK(yt.cols == 10);

    CHECK(slice_count(cube, PlaneFamily::XY) == 14);
    CHECK(slice_count(cube, PlaneFamily::XT) == 10);
    CHECK(slice_count(cube, PlaneFamily::YT) == 12);
}

TEST_CASE("the three slice accessors agree with direct cube access") {
    Rng rng(101);
    const VideoCube cube = oracle::random_cube(rng, 11, 13, 9);
    for (int trial = 0; trial < 200; ++trial) {
        const int y = static_cast<int>(rng.bounded(11));
        const int x = static_cast<int>(rng.bounded(13));
        const int t = static_cast<int>(rng.bounded(9));
        const std::uint8_t expected = cube.at(y, x, t);
        CHECK(slice(cube, PlaneFamily::XY, t).at(y, x) == expected);
        CHECK(slice(cube, PlaneFamily::XT, y).at(t, x) == expected);
        CHECK(slice(cube, PlaneFamily::YT, x).at(t, y) == expected);
    }
}

TEST_CASE("constant cube yields constant slices") {
    VideoCube cube = VideoCube::create(9, 9, 9);
    std::fill(cube.data.begin(), cube.data.end(), 10);
    for (const auto plane : {PlaneFamily::XY, PlaneFamily::XT, PlaneFamily::YT}) {
        const Slice s = slice(cube, plane, 4);
        for (const auto v : s.data) CHECK(v == 10);
    }
}

TEST_CASE("slice count matches the dataset geometry") {
    // 160 x 110 x 60 video: 60 xy + 110 xt + 160 yt = 330 slices
    const VideoCube cube = VideoCube::create(110, 160, 60);
    const int total = slice_count(cube, PlaneFamily::XY) + slice_count(cube, PlaneFamily::XT) +
                      slice_count(cube, PlaneFamily::YT);
    CHECK(slice_count(cube, PlaneFamily::XY) == 60);
    CHECK(slice_count(cube, PlaneFamily::XT) == 110);
    CHECK(slice_count(cube, PlaneFamily::YT) == 160);
    CHECK(total == 330);
}

TEST_CASE("slice index out of range") {
    const VideoCube cube = VideoCube::create(9, 10, 11);
    CHECK_THROWS_AS(slice(cube, PlaneFamily::XY, 11), std::out_of_range);
    CHECK_THROWS_AS(slice(cube, PlaneFamily::XT, 9), std::out_of_range);
    CHECK_THROWS_AS(slice(cube, PlaneFamily::YT, -1), std::out_of_range);
}

TEST_CASE("raw cube round trip is bit-identical") {
    const fs::path dir = temp_dir("dtseg_cube_rt");
    Rng rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const VideoCube cube = oracle::random_cube(rng, 9 + trial, 10, 12);
        const std::string path = (dir / ("c" + std::to_string(trial) + ".dtc")).string();
        save_cube_raw(cube, path);
        const VideoCube back = load_cube(path);
        CHECK(back.height == cube.height);
        CHECK(back.width == cube.width);
        CHECK(back.frames == cube.frames);
        CHECK(back.data == cube.data);
    }
}

TEST_CASE("raw cube loader rejects malformed files") {
    const fs::path dir = temp_dir("dtseg_cube_bad");

    SUBCASE("minimum size boundary is accepted") {
        auto bytes = raw_header(9, 9, 9);
        bytes.resize(bytes.size() + 729, 7);
        write_bytes(dir / "ok.dtc", bytes);
        const VideoCube cube = load_cube((dir / "ok.dtc").string());
        CHECK(cube.height == 9);
        CHECK(cube.data.size() == 729);
    }
    SUBCASE("one missing byte is a truncation error") {
        auto bytes = raw_header(9, 9, 9);
        bytes.resize(bytes.size() + 728, 7);
        write_bytes(dir / "short.dtc", bytes);
        CHECK_THROWS_WITH_AS(load_cube((dir / "short.dtc").string()),
                             doctest::Contains("truncated"), std::runtime_error);
    }
    SUBCASE("dimensions below the minimum are rejected") {
        auto bytes = raw_header(8, 9, 9);
        bytes.resize(bytes.size() + 8 * 9 * 9, 7);
        write_bytes(dir / "small.dtc", bytes);
        CHECK_THROWS_WITH_AS(load_cube((dir / "small.dtc").string()),
                             doctest::Contains("minimum"), std::runtime_error);
    }
    SUBCASE("bad magic") {
        write_bytes(dir / "junk.dtc", {'J', 'U', 'N', 'K', 0, 0, 0, 0});
        CHECK_THROWS(load_cube((dir / "junk.dtc").string()));
    }
    SUBCASE("missing path") {
        CHECK_THROWS(load_cube((dir / "nope.dtc").string()));
    }
}

TEST_CASE("frame directory loading") {
    const fs::path dir = temp_dir("dtseg_frames");
    Rng rng(7);
    const VideoCube cube = oracle::random_cube(rng, 11, 16, 12);
    for (int t = 0; t < cube.frames; ++t) {
        GrayImage img;
        img.rows = cube.height;
        img.cols = cube.width;
        img.pixels.assign(cube.data.begin() + static_cast<std::size_t>(t) * 11 * 16,
                          cube.data.begin() + static_cast<std::size_t>(t + 1) * 11 * 16);
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%03d.pgm", t);
        write_pgm(img, (dir / name).string());
    }

    const VideoCube loaded = load_cube(dir.string());
    CHECK(loaded.height == 11);
    CHECK(loaded.width == 16);
    CHECK(loaded.frames == 12);
    CHECK(loaded.data == cube.data);

    SUBCASE("mixed frame dimensions are rejected") {
        GrayImage odd;
        odd.rows = 12;
        odd.cols = 16;
        odd.pixels.assign(12 * 16, 0);
        write_pgm(odd, (dir / "frame_zzz.pgm").string());
        CHECK_THROWS_WITH_AS(load_cube(dir.string()), doctest::Contains("differ"),
                             std::runtime_error);
    }
}

TEST_CASE("a 60-frame directory of 110-row, 160-column frames") {
    const fs::path dir = temp_dir("dtseg_frames_paper");
    GrayImage img;
    img.rows = 110;
    img.cols = 160;
    img.pixels.assign(static_cast<std::size_t>(110) * 160, 3);
    for (int t = 0; t < 60; ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "f%02d.pgm", t);
        write_pgm(img, (dir / name).string());
    }
    const VideoCube cube = load_cube(dir.string());
    CHECK(cube.height == 110);
    CHECK(cube.width == 160);
    CHECK(cube.frames == 60);
}

TEST_CASE("PGM reader rejects color and 16-bit input") {
    const fs::path dir = temp_dir("dtseg_pgm_bad");
    {
        std::ofstream out(dir / "color.ppm", std::ios::binary);
        out << "P6\n2 2\n255\n";
        out.write("aaabbbcccddd", 12);
    }
    CHECK_THROWS_WITH_AS(read_pgm((dir / "color.ppm").string()), doctest::Contains("color"),
                         std::runtime_error);
    {
        std::ofstream out(dir / "deep.pgm", std::ios::binary);
        out << "P5\n2 2\n65535\n";
        out.write("aabbccdd", 8);
    }
    CHECK_THROWS_WITH_AS(read_pgm((dir / "deep.pgm").string()), doctest::Contains("8-bit"),
                         std::runtime_error);
}

TEST_CASE("ascii P2 PGM reads like binary P5") {
    const fs::path dir = temp_dir("dtseg_pgm_ascii");
    {
        std::ofstream out(dir / "a.pgm");
        out << "P2\n# comment\n3 2\n255\n0 10 20\n30 40 50\n";
    }
    const GrayImage img = read_pgm((dir / "a.pgm").string());
    CHECK(img.rows == 2);
    CHECK(img.cols == 3);
    CHECK(img.at(1, 2) == 50);
}

TEST_CASE("label map writer") {
    const fs::path dir = temp_dir("dtseg_labelmap");

    SUBCASE("two labels write as pixel values 0 and 1") {
        SegmentationMap map;
        map.height = 4;
        map.width = 4;
        map.num_labels = 2;
        map.labels.assign(16, 0);
        for (int i = 8; i < 16; ++i) map.labels[i] = 1;
        write_labelmap(map, (dir / "two.pgm").string());

        const GrayImage img = read_pgm((dir / "two.pgm").string());
        for (int i = 0; i < 16; ++i) CHECK(img.pixels[i] == (i < 8 ? 0 : 1));

        const SegmentationMap back = load_labelmap((dir / "two.pgm").string());
        CHECK(back.num_labels == 2);
        CHECK(back.labels == map.labels);
    }
    SUBCASE("256 labels exceed the format bound") {
        SegmentationMap map;
        map.height = 16;
        map.width = 16;
        map.num_labels = 256;
        map.labels.resize(256);
        for (int i = 0; i < 256; ++i) map.labels[i] = static_cast<std::uint16_t>(i);
        CHECK_THROWS_AS(write_labelmap(map, (dir / "many.pgm").string()), std::invalid_argument);
    }
    SUBCASE("all-zero map: zero PGM and a full histogram") {
        SegmentationMap map;
        map.height = 3;
        map.width = 5;
        map.num_labels = 1;
        map.labels.assign(15, 0);
        write_labelmap(map, (dir / "zero.pgm").string());

        const GrayImage img = read_pgm((dir / "zero.pgm").string());
        for (const auto v : img.pixels) CHECK(v == 0);

        std::ifstream side(dir / "zero.json");
        const auto j = nlohmann::json::parse(side);
        CHECK(j["H"] == 3);
        CHECK(j["W"] == 5);
        CHECK(j["C"] == 1);
        CHECK(j["histogram"][0] == 15);
    }
    SUBCASE("unwritable path") {
        SegmentationMap map;
        map.height = 2;
        map.width = 2;
        map.num_labels = 1;
        map.labels.assign(4, 0);
        CHECK_THROWS(write_labelmap(map, "/nonexistent_dir_zz/x.pgm"));
    }
}

TEST_CASE("grayscale PNG frames decode when built with libpng") {
    if (!png_supported()) return;
    // 6x4 gray8 PNG, pixel (y, x) = 10 y + x
    const std::uint8_t png_bytes[] = {
        0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
        0x44, 0x52, 0x00, 0x00, 0x00, 0x06, 0x00, 0x00, 0x00, 0x04, 0x08, 0x00, 0x00, 0x00,
        0x00, 0x88, 0x6f, 0x11, 0x9f, 0x00, 0x00, 0x00, 0x24, 0x49, 0x44, 0x41, 0x54, 0x78,
        0x9c, 0x63, 0x60, 0x60, 0x64, 0x62, 0x66, 0x61, 0x65, 0xe0, 0xe2, 0xe6, 0xe1, 0xe5,
        0xe3, 0x67, 0x10, 0x11, 0x15, 0x13, 0x97, 0x90, 0x64, 0x90, 0x93, 0x57, 0x50, 0x54,
        0x52, 0x06, 0x00, 0x0e, 0x9a, 0x01, 0xa5, 0x57, 0x14, 0x26, 0x8d, 0x00, 0x00, 0x00,
        0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};
    const fs::path dir = temp_dir("dtseg_png");
    write_bytes(dir / "tiny.png", std::vector<std::uint8_t>(std::begin(png_bytes),
                                                            std::end(png_bytes)));
    const GrayImage img = read_png_gray8((dir / "tiny.png").string());
    CHECK(img.cols == 6);
    CHECK(img.rows == 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x) CHECK(img.at(y, x) == 10 * y + x);
    CHECK(read_gray_image((dir / "tiny.png").string()).pixels == img.pixels);
}

TEST_CASE("compact_labels orders by decreasing size and validates") {
    SegmentationMap map;
    map.height = 2;
    map.width = 4;
    map.num_labels = 7; // sparse ids on purpose
    map.labels = {5, 5, 5, 2, 2, 6, 6, 6};
    const SegmentationMap compact = compact_labels(map);
    CHECK(compact.num_labels == 3);
    // ids 5 and 6 tie at size 3; the lower old id keeps rank 0
    CHECK(compact.labels == std::vector<std::uint16_t>{0, 0, 0, 2, 2, 1, 1, 1});
    CHECK_NOTHROW(validate(compact));
    CHECK_THROWS_AS(validate(map), std::invalid_argument); // id 0 never occurs
}
