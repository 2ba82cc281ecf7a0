#include "dtseg/segmentation_map.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "dtseg/image_io.hpp"

namespace dtseg {

namespace {

std::string sidecar_path(const std::string& pgm_path) {
    const auto dot = pgm_path.find_last_of('.');
    const auto slash = pgm_path.find_last_of("/\\");
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        return pgm_path.substr(0, dot) + ".json";
    return pgm_path + ".json";
}

} // namespace

void validate(const SegmentationMap& map) {
    if (map.height <= 0 || map.width <= 0)
        throw std::invalid_argument("SegmentationMap: non-positive dimensions");
    if (map.labels.size() != static_cast<std::size_t>(map.height) * map.width)
        throw std::invalid_argument("SegmentationMap: label count does not match dimensions");
    if (map.num_labels <= 0)
        throw std::invalid_argument("SegmentationMap: num_labels must be positive");
    std::vector<bool> seen(map.num_labels, false);
    for (const auto label : map.labels) {
        if (label >= map.num_labels)
            throw std::invalid_argument("SegmentationMap: label id out of range");
        seen[label] = true;
    }
    for (int c = 0; c < map.num_labels; ++c)
        if (!seen[c]) throw std::invalid_argument("SegmentationMap: label id " +
                                                  std::to_string(c) + " never occurs");
}

std::vector<std::int64_t> label_histogram(const SegmentationMap& map) {
    std::vector<std::int64_t> hist(map.num_labels, 0);
    for (const auto label : map.labels) ++hist[label];
    return hist;
}

SegmentationMap compact_labels(const SegmentationMap& map) {
    int max_label = -1;
    for (const auto label : map.labels) max_label = std::max(max_label, static_cast<int>(label));
    if (max_label < 0) throw std::invalid_argument("compact_labels: empty map");

    std::vector<std::int64_t> sizes(max_label + 1, 0);
    for (const auto label : map.labels) ++sizes[label];

    std::vector<int> order;
    for (int c = 0; c <= max_label; ++c)
        if (sizes[c] > 0) order.push_back(c);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sizes[a] > sizes[b]; });

    std::vector<std::uint16_t> remap(max_label + 1, 0);
    for (std::size_t i = 0; i < order.size(); ++i)
        remap[order[i]] = static_cast<std::uint16_t>(i);

    SegmentationMap out;
    out.height = map.height;
    out.width = map.width;
    out.num_labels = static_cast<int>(order.size());
    out.labels.resize(map.labels.size());
    for (std::size_t i = 0; i < map.labels.size(); ++i) out.labels[i] = remap[map.labels[i]];
    return out;
}

void write_labelmap(const SegmentationMap& map, const std::string& pgm_path) {
    validate(map);
    if (map.num_labels > 255)
        throw std::invalid_argument("write_labelmap: " + std::to_string(map.num_labels) +
                                    " labels exceed the 8-bit PGM limit of 255");
    GrayImage img;
    img.rows = map.height;
    img.cols = map.width;
    img.pixels.resize(map.labels.size());
    for (std::size_t i = 0; i < map.labels.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(map.labels[i]);
    write_pgm(img, pgm_path);

    nlohmann::json side;
    side["H"] = map.height;
    side["W"] = map.width;
    side["C"] = map.num_labels;
    side["histogram"] = label_histogram(map);
    std::ofstream out(sidecar_path(pgm_path));
    if (!out) throw std::runtime_error(sidecar_path(pgm_path) + ": cannot open for writing");
    out << side.dump(2) << "\n";
}

SegmentationMap load_labelmap(const std::string& pgm_path) {
    const GrayImage img = read_pgm(pgm_path);
    SegmentationMap map;
    map.height = img.rows;
    map.width = img.cols;
    map.labels.resize(img.pixels.size());

    // compact in first-occurrence order
    std::vector<int> remap(256, -1);
    int next = 0;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        int& slot = remap[img.pixels[i]];
        if (slot < 0) slot = next++;
        map.labels[i] = static_cast<std::uint16_t>(slot);
    }
    map.num_labels = next;
    return map;
}

} // namespace dtseg
