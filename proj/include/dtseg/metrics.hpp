#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtseg/segmentation_map.hpp"

namespace dtseg {

// Overlap counts between two partitions of the same grid; all
// evaluation metrics factor through it.
struct ContingencyTable {
    int labels_a = 0;
    int labels_b = 0;
    std::int64_t total = 0; // N
    std::vector<std::int64_t> counts; // labels_a x labels_b
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;

    std::int64_t at(int a, int b) const {
        return counts[static_cast<std::size_t>(a) * labels_b + b];
    }

    static ContingencyTable build(const SegmentationMap& a, const SegmentationMap& b);
};

// Fraction of the C(N,2) pixel pairs on which the two maps agree
// (same label in both, or different in both). Exact integer
// arithmetic internally.
double pr_index(const SegmentationMap& aut, const SegmentationMap& gt);

// Variation of information, in nats: 2 H(A,B) - H(A) - H(B).
double voi(const SegmentationMap& aut, const SegmentationMap& gt);

// Mean pairwise-agreement probability against a set of ground truths;
// reduces to pr_index when the set has one element.
double pri(const SegmentationMap& aut, const std::vector<SegmentationMap>& ground_truths);

// Harmonic mean of pair-precision and pair-recall. Throws when either
// map has no same-label pair.
double f_measure(const SegmentationMap& aut, const SegmentationMap& gt);

struct MetricsReport {
    double pr = 0.0;
    double gce = 0.0;
    double voi = 0.0;
    double pri = 0.0;
    double f_measure = 0.0;
    std::int64_t pixels = 0;
};

MetricsReport evaluate(const SegmentationMap& aut, const SegmentationMap& gt);

std::string report_to_json(const MetricsReport& report, int indent = 2);

} // namespace dtseg
