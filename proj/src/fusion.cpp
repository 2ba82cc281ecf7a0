#include "dtseg/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dtseg/rng.hpp"

namespace dtseg {

namespace {

// commit threshold; keeps rounding noise from breaking strict descent
constexpr double kTieEps = 1e-12;
constexpr double kAuditTol = 1e-9;

void check_same_grid(const SegmentationMap& a, const SegmentationMap& b, const char* what) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument(std::string(what) + ": segmentation dimensions differ");
}

} // namespace

double lre(const SegmentationMap& a, const SegmentationMap& b, int pixel) {
    check_same_grid(a, b, "lre");
    if (pixel < 0 || pixel >= a.pixels()) throw std::out_of_range("lre: pixel out of range");
    const std::uint16_t la = a.labels[pixel];
    const std::uint16_t lb = b.labels[pixel];
    std::int64_t size = 0, inter = 0;
    for (int i = 0; i < a.pixels(); ++i) {
        if (a.labels[i] != la) continue;
        ++size;
        if (b.labels[i] == lb) ++inter;
    }
    return static_cast<double>(size - inter) / static_cast<double>(size);
}

IntersectionTable IntersectionTable::build(const SegmentationMap& candidate,
                                           const SegmentationMap& member,
                                           int cand_label_space) {
    check_same_grid(candidate, member, "IntersectionTable::build");
    IntersectionTable t;
    t.cand_labels = cand_label_space;
    t.member_labels = member.num_labels;
    t.counts.assign(static_cast<std::size_t>(t.cand_labels) * t.member_labels, 0);
    t.cand_sizes.assign(t.cand_labels, 0);
    t.member_sizes.assign(t.member_labels, 0);

    const int n = candidate.pixels();
    for (int i = 0; i < n; ++i) {
        const int a = candidate.labels[i];
        const int b = member.labels[i];
        if (a >= cand_label_space)
            throw std::invalid_argument("IntersectionTable::build: candidate label outside space");
        ++t.at(a, b);
        ++t.cand_sizes[a];
        ++t.member_sizes[b];
    }

    t.row_sumsq.assign(t.cand_labels, 0);
    t.col_sumsq.assign(t.member_labels, 0);
    for (int a = 0; a < t.cand_labels; ++a)
        for (int b = 0; b < t.member_labels; ++b) {
            const std::int64_t c = t.at(a, b);
            t.row_sumsq[a] += c * c;
            t.col_sumsq[b] += c * c;
        }
    return t;
}

namespace {

double row_score(const IntersectionTable& t) {
    double s = 0.0;
    for (int a = 0; a < t.cand_labels; ++a)
        if (t.cand_sizes[a] > 0)
            s += static_cast<double>(t.row_sumsq[a]) / static_cast<double>(t.cand_sizes[a]);
    return s;
}

double col_score(const IntersectionTable& t) {
    double s = 0.0;
    for (int b = 0; b < t.member_labels; ++b)
        if (t.member_sizes[b] > 0)
            s += static_cast<double>(t.col_sumsq[b]) / static_cast<double>(t.member_sizes[b]);
    return s;
}

} // namespace

double gce_star(const SegmentationMap& a, const SegmentationMap& b) {
    check_same_grid(a, b, "gce_star");
    const IntersectionTable t = IntersectionTable::build(a, b, a.num_labels);
    const double n = static_cast<double>(a.pixels());
    const double sum_ab = n - row_score(t); // sum_p LRE(A,B,p)
    const double sum_ba = n - col_score(t); // sum_p LRE(B,A,p)
    return (sum_ab + sum_ba) / (2.0 * n);
}

double consensus_energy(const SegmentationMap& candidate,
                        const std::vector<SegmentationMap>& ensemble) {
    if (ensemble.empty()) throw std::invalid_argument("consensus_energy: empty ensemble");
    double sum = 0.0;
    for (const auto& member : ensemble) sum += gce_star(candidate, member);
    return sum / static_cast<double>(ensemble.size());
}

int init_candidate_index(const std::vector<SegmentationMap>& ensemble) {
    if (ensemble.empty()) throw std::invalid_argument("init_candidate: empty ensemble");
    int best = 0;
    double best_energy = consensus_energy(ensemble[0], ensemble);
    for (std::size_t j = 1; j < ensemble.size(); ++j) {
        const double e = consensus_energy(ensemble[j], ensemble);
        if (e < best_energy) {
            best_energy = e;
            best = static_cast<int>(j);
        }
    }
    return best;
}

SegmentationMap init_candidate(const std::vector<SegmentationMap>& ensemble) {
    return ensemble[init_candidate_index(ensemble)];
}

FusionState::FusionState(SegmentationMap candidate, const std::vector<SegmentationMap>& ensemble,
                         int cand_label_space)
    : candidate_(std::move(candidate)),
      ensemble_(&ensemble),
      cand_label_space_(cand_label_space),
      pixel_count_(candidate_.pixels()) {
    if (ensemble.empty()) throw std::invalid_argument("FusionState: empty ensemble");
    tables_.reserve(ensemble.size());
    for (const auto& member : ensemble)
        tables_.push_back(IntersectionTable::build(candidate_, member, cand_label_space_));
    rebuild_scores();
}

void FusionState::rebuild_scores() {
    row_score_.resize(tables_.size());
    col_score_.resize(tables_.size());
    for (std::size_t j = 0; j < tables_.size(); ++j) {
        row_score_[j] = row_score(tables_[j]);
        col_score_[j] = col_score(tables_[j]);
    }
}

double FusionState::energy() const {
    double score = 0.0;
    for (std::size_t j = 0; j < tables_.size(); ++j) score += row_score_[j] + col_score_[j];
    const double denom = 2.0 * static_cast<double>(pixel_count_) *
                         static_cast<double>(tables_.size());
    return 1.0 - score / denom;
}

namespace {

// Effect on one member's table of moving a pixel from candidate
// segment `a` to `l`, given the pixel lies in member segment `b`.
// Only cells (a,b) and (l,b) and the two candidate sizes change, so
// the score terms update in O(1):
//   row score = sum_alpha (sum_beta n^2) / |alpha|
//   col score = sum_beta (sum_alpha n^2) / |beta|
struct FlipEffect {
    std::int64_t n_ab, n_lb;
    std::int64_t new_row_a, new_row_l;
    double d_row, d_col;
};

FlipEffect flip_effect(const IntersectionTable& t, int a, int l, int b) {
    FlipEffect e;
    e.n_ab = t.at(a, b);
    e.n_lb = t.at(l, b);
    const std::int64_t sa = t.cand_sizes[a];
    const std::int64_t sl = t.cand_sizes[l];
    const std::int64_t ta = t.row_sumsq[a];
    const std::int64_t tl = t.row_sumsq[l];
    e.new_row_a = ta - 2 * e.n_ab + 1;
    e.new_row_l = tl + 2 * e.n_lb + 1;

    // the a-term vanishes when the segment empties (new_row_a is 0 then)
    e.d_row = static_cast<double>(e.new_row_l) / static_cast<double>(sl + 1) -
              static_cast<double>(ta) / static_cast<double>(sa);
    if (sa > 1) e.d_row += static_cast<double>(e.new_row_a) / static_cast<double>(sa - 1);
    if (sl > 0) e.d_row -= static_cast<double>(tl) / static_cast<double>(sl);

    e.d_col = 2.0 * static_cast<double>(e.n_lb - e.n_ab + 1) /
              static_cast<double>(t.member_sizes[b]);
    return e;
}

} // namespace

double FusionState::trial_delta(int pixel, int label) const {
    const int a = candidate_.labels[pixel];
    if (label == a) return 0.0;
    double delta_score = 0.0;
    for (std::size_t j = 0; j < tables_.size(); ++j) {
        const FlipEffect e =
            flip_effect(tables_[j], a, label, (*ensemble_)[j].labels[pixel]);
        delta_score += e.d_row + e.d_col;
    }
    const double denom = 2.0 * static_cast<double>(pixel_count_) *
                         static_cast<double>(tables_.size());
    return -delta_score / denom;
}

void FusionState::set_label(int pixel, int label) {
    const int a = candidate_.labels[pixel];
    if (label == a) return;
    if (label < 0 || label >= cand_label_space_)
        throw std::out_of_range("FusionState::set_label: label outside candidate space");
    for (std::size_t j = 0; j < tables_.size(); ++j) {
        IntersectionTable& t = tables_[j];
        const int b = (*ensemble_)[j].labels[pixel];
        const FlipEffect e = flip_effect(t, a, label, b);

        t.at(a, b) = e.n_ab - 1;
        t.at(label, b) = e.n_lb + 1;
        --t.cand_sizes[a];
        ++t.cand_sizes[label];
        t.row_sumsq[a] = e.new_row_a;
        t.row_sumsq[label] = e.new_row_l;
        t.col_sumsq[b] += 2 * (e.n_lb - e.n_ab + 1);
        row_score_[j] += e.d_row;
        col_score_[j] += e.d_col;
    }
    candidate_.labels[pixel] = static_cast<std::uint16_t>(label);
}

double FusionState::audit_energy() {
    const double tracked = energy();
    std::vector<IntersectionTable> fresh;
    fresh.reserve(ensemble_->size());
    for (const auto& member : *ensemble_)
        fresh.push_back(IntersectionTable::build(candidate_, member, cand_label_space_));
    tables_ = std::move(fresh);
    rebuild_scores();
    const double actual = energy();
    if (std::abs(tracked - actual) > kAuditTol)
        throw std::logic_error("FusionState: tracked energy drifted from the from-scratch value");
    return actual;
}

FusionResult icm_fuse(const std::vector<SegmentationMap>& ensemble, int out_labels,
                      int max_sweeps, std::uint64_t seed) {
    if (ensemble.empty()) throw std::invalid_argument("icm_fuse: empty ensemble");
    if (out_labels < 2) throw std::invalid_argument("icm_fuse: out_labels must be >= 2");
    if (max_sweeps < 1) throw std::invalid_argument("icm_fuse: max_sweeps must be >= 1");
    for (std::size_t j = 1; j < ensemble.size(); ++j)
        check_same_grid(ensemble[0], ensemble[j], "icm_fuse");

    const int start = init_candidate_index(ensemble);
    SegmentationMap candidate = ensemble[start];
    // squeeze into the consensus label space; ids are ordered by
    // decreasing size, so the merged tail holds the smallest regions
    for (auto& label : candidate.labels)
        label = static_cast<std::uint16_t>(std::min<int>(label, out_labels - 1));
    candidate.num_labels = out_labels;

    FusionState state(std::move(candidate), ensemble, out_labels);

    FusionResult result;
    result.initial_member = start;
    result.trace.push_back(state.energy());

    const int n = ensemble[0].pixels();
    std::vector<int> scan(n);
    std::iota(scan.begin(), scan.end(), 0);

    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(sweep)));
        rng.shuffle(scan);

        int changes = 0;
        for (const int pixel : scan) {
            const int current = state.candidate().labels[pixel];
            int best = current;
            double best_delta = 0.0;
            for (int label = 0; label < out_labels; ++label) {
                if (label == current) continue;
                const double delta = state.trial_delta(pixel, label);
                if (delta < best_delta - kTieEps) {
                    best_delta = delta;
                    best = label;
                }
            }
            if (best != current) {
                state.set_label(pixel, best);
                ++changes;
            }
        }

        result.trace.push_back(state.audit_energy());
        result.sweeps = sweep;
        if (changes == 0) break;
    }

    result.map = compact_labels(state.candidate());
    return result;
}

} // namespace dtseg
