#include "dtseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "dtseg/fusion.hpp"

namespace dtseg {

namespace {

void check_same_grid(const SegmentationMap& a, const SegmentationMap& b, const char* what) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument(std::string(what) + ": segmentation dimensions differ");
}

struct PairCounts {
    std::int64_t pairs = 0;     // C(N,2)
    std::int64_t same_a = 0;    // same-label pairs in A
    std::int64_t same_b = 0;    // same-label pairs in B
    std::int64_t same_both = 0; // same-label pairs in both
};

PairCounts pair_counts(const ContingencyTable& t) {
    PairCounts pc;
    pc.pairs = t.total * (t.total - 1) / 2;
    for (const auto r : t.row_sums) pc.same_a += r * (r - 1) / 2;
    for (const auto c : t.col_sums) pc.same_b += c * (c - 1) / 2;
    for (const auto m : t.counts) pc.same_both += m * (m - 1) / 2;
    return pc;
}

double entropy(const std::vector<std::int64_t>& counts, std::int64_t total) {
    double h = 0.0;
    for (const auto c : counts) {
        if (c <= 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    return h;
}

} // namespace

ContingencyTable ContingencyTable::build(const SegmentationMap& a, const SegmentationMap& b) {
    check_same_grid(a, b, "ContingencyTable::build");
    ContingencyTable t;
    t.labels_a = a.num_labels;
    t.labels_b = b.num_labels;
    t.total = a.pixels();
    t.counts.assign(static_cast<std::size_t>(t.labels_a) * t.labels_b, 0);
    t.row_sums.assign(t.labels_a, 0);
    t.col_sums.assign(t.labels_b, 0);
    for (int i = 0; i < a.pixels(); ++i) {
        const int la = a.labels[i];
        const int lb = b.labels[i];
        ++t.counts[static_cast<std::size_t>(la) * t.labels_b + lb];
        ++t.row_sums[la];
        ++t.col_sums[lb];
    }
    return t;
}

double pr_index(const SegmentationMap& aut, const SegmentationMap& gt) {
    check_same_grid(aut, gt, "pr_index");
    if (aut.pixels() < 2) throw std::invalid_argument("pr_index: need at least 2 pixels");
    const ContingencyTable t = ContingencyTable::build(aut, gt);
    const PairCounts pc = pair_counts(t);
    // agreements = both-same + both-different
    const std::int64_t agree = pc.pairs + 2 * pc.same_both - pc.same_a - pc.same_b;
    return static_cast<double>(agree) / static_cast<double>(pc.pairs);
}

double voi(const SegmentationMap& aut, const SegmentationMap& gt) {
    check_same_grid(aut, gt, "voi");
    const ContingencyTable t = ContingencyTable::build(aut, gt);
    const double h_a = entropy(t.row_sums, t.total);
    const double h_b = entropy(t.col_sums, t.total);
    const double h_ab = entropy(t.counts, t.total);
    // 2 H(A,B) - H(A) - H(B); exact zero for identical partitions
    return std::max(0.0, 2.0 * h_ab - h_a - h_b);
}

double pri(const SegmentationMap& aut, const std::vector<SegmentationMap>& ground_truths) {
    if (ground_truths.empty()) throw std::invalid_argument("pri: empty ground-truth set");
    if (aut.pixels() < 2) throw std::invalid_argument("pri: need at least 2 pixels");

    // per pair (i,j): agreement = c_ij p_ij + (1 - c_ij)(1 - p_ij),
    // with p_ij the fraction of ground truths labeling i,j the same.
    // Summing over pairs factors through per-truth pair counts.
    const double g = static_cast<double>(ground_truths.size());
    double pairs = 0.0, same_aut = 0.0, mean_same_gt = 0.0, mean_same_both = 0.0;
    for (const auto& gt : ground_truths) {
        check_same_grid(aut, gt, "pri");
        const ContingencyTable t = ContingencyTable::build(aut, gt);
        const PairCounts pc = pair_counts(t);
        pairs = static_cast<double>(pc.pairs);
        same_aut = static_cast<double>(pc.same_a);
        mean_same_gt += static_cast<double>(pc.same_b) / g;
        mean_same_both += static_cast<double>(pc.same_both) / g;
    }
    return (pairs - same_aut - mean_same_gt + 2.0 * mean_same_both) / pairs;
}

double f_measure(const SegmentationMap& aut, const SegmentationMap& gt) {
    check_same_grid(aut, gt, "f_measure");
    const ContingencyTable t = ContingencyTable::build(aut, gt);
    const PairCounts pc = pair_counts(t);
    if (pc.same_a == 0 || pc.same_b == 0)
        throw std::invalid_argument("f_measure: undefined, a map has no same-label pair");
    // harmonic mean of tp/same_a and tp/same_b
    return 2.0 * static_cast<double>(pc.same_both) /
           static_cast<double>(pc.same_a + pc.same_b);
}

MetricsReport evaluate(const SegmentationMap& aut, const SegmentationMap& gt) {
    MetricsReport report;
    report.pr = pr_index(aut, gt);
    report.gce = gce_star(aut, gt);
    report.voi = voi(aut, gt);
    report.pri = pri(aut, {gt});
    report.f_measure = f_measure(aut, gt);
    report.pixels = aut.pixels();
    return report;
}

std::string report_to_json(const MetricsReport& report, int indent) {
    nlohmann::json j;
    j["pr"] = report.pr;
    j["gce"] = report.gce;
    j["voi"] = report.voi;
    j["pri"] = report.pri;
    j["f_measure"] = report.f_measure;
    j["n_pixels"] = report.pixels;
    return j.dump(indent);
}

} // namespace dtseg
