#pragma once

#include <cstdint>
#include <vector>

#include "dtseg/segmentation_map.hpp"

namespace dtseg {

// Local refinement error at one pixel: |s_a(p) \ s_b(p)| / |s_a(p)|,
// where s_x(p) is the segment of x containing p. 0 means s_a(p) lies
// inside s_b(p).
double lre(const SegmentationMap& a, const SegmentationMap& b, int pixel);

// Symmetrized, pixel-averaged refinement error in [0, 1]. Computed
// from a contingency table in O(n + |A|*|B|):
//   sum_p LRE(A,B,p) = sum_{a,b} n_ab * (|a| - n_ab) / |a|
double gce_star(const SegmentationMap& a, const SegmentationMap& b);

// Mean gce_star between the candidate and every ensemble member; the
// fusion objective.
double consensus_energy(const SegmentationMap& candidate,
                        const std::vector<SegmentationMap>& ensemble);

// Index of the member with minimal consensus energy (ties -> lowest).
int init_candidate_index(const std::vector<SegmentationMap>& ensemble);
SegmentationMap init_candidate(const std::vector<SegmentationMap>& ensemble);

// Segment-overlap counts between the mutable candidate and one fixed
// ensemble member, plus the running sums of squares that make a
// single-pixel relabel an O(1) energy update.
struct IntersectionTable {
    int cand_labels = 0;   // candidate label space (fixed, may have empty ids)
    int member_labels = 0;
    std::vector<std::int64_t> counts;       // cand_labels x member_labels
    std::vector<std::int64_t> cand_sizes;   // |a|, mutates with the candidate
    std::vector<std::int64_t> member_sizes; // |b|, fixed
    std::vector<std::int64_t> row_sumsq;    // per a: sum_b n_ab^2
    std::vector<std::int64_t> col_sumsq;    // per b: sum_a n_ab^2

    std::int64_t at(int a, int b) const {
        return counts[static_cast<std::size_t>(a) * member_labels + b];
    }
    std::int64_t& at(int a, int b) {
        return counts[static_cast<std::size_t>(a) * member_labels + b];
    }

    static IntersectionTable build(const SegmentationMap& candidate,
                                   const SegmentationMap& member, int cand_label_space);
};

// Candidate map + one IntersectionTable per member + incrementally
// tracked consensus energy. audit_energy() recomputes everything from
// scratch and throws if the tracked value drifted beyond 1e-9.
class FusionState {
public:
    FusionState(SegmentationMap candidate, const std::vector<SegmentationMap>& ensemble,
                int cand_label_space);

    double energy() const;

    // Energy change of relabeling `pixel` to `label`; 0 for the
    // current label. O(J).
    double trial_delta(int pixel, int label) const;

    // Commits the relabel and updates every table in place.
    void set_label(int pixel, int label);

    double audit_energy();

    const SegmentationMap& candidate() const { return candidate_; }
    const std::vector<IntersectionTable>& tables() const { return tables_; }
    int label_space() const { return cand_label_space_; }

private:
    SegmentationMap candidate_;
    const std::vector<SegmentationMap>* ensemble_;
    int cand_label_space_;
    std::int64_t pixel_count_;
    std::vector<IntersectionTable> tables_;
    std::vector<double> row_score_; // per member: sum_a row_sumsq[a] / |a|
    std::vector<double> col_score_; // per member: sum_b col_sumsq[b] / |b|

    void rebuild_scores();
};

struct FusionResult {
    SegmentationMap map;
    std::vector<double> trace; // energy at start and after each sweep
    int sweeps = 0;
    int initial_member = 0;
};

// Greedy single-site descent over seeded random scan orders. Each
// pixel takes the label with the strictly lowest energy among
// [0, out_labels); ties keep the current label. Stops after a sweep
// with no changes or after max_sweeps. The result is compacted.
FusionResult icm_fuse(const std::vector<SegmentationMap>& ensemble, int out_labels,
                      int max_sweeps, std::uint64_t seed);

} // namespace dtseg
