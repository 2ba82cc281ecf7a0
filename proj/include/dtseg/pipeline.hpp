#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtseg/config_file.hpp"
#include "dtseg/ensemble.hpp"
#include "dtseg/fusion.hpp"
#include "dtseg/lbp.hpp"
#include "dtseg/segmentation_map.hpp"

namespace dtseg {

// Every tunable of the full pipeline in one place.
struct PipelineConfig {
    LbpParams lbp;                 // P, R, Q
    FeatureParams features;        // Nw, s_t
    EnsembleConfig ensemble;       // K, C, k, k-means settings, master seed
    int fusion_labels = 0;         // C_out; 0 = modal member label count
    int max_sweeps = 20;
    std::uint64_t fusion_seed = 0; // 0 = derived from the master seed
    bool dump_ensemble = false;
    int threads = 0;               // 0 = runtime default
    std::string input;
    std::string output_dir;       // empty = compute only, write nothing

    void validate() const;
};

// Applies "key = value" pairs onto a base config; throws on unknown
// keys or unparsable values.
PipelineConfig config_from_map(const ConfigMap& map, PipelineConfig base = {});

ConfigMap config_to_map(const PipelineConfig& config);
void save_config_file(const PipelineConfig& config, const std::string& path);

struct StageTimes {
    double load = 0.0;
    double features = 0.0;
    double ensemble = 0.0;
    double fusion = 0.0;
    double write = 0.0;
    double total = 0.0;
};

struct SegmentOutcome {
    SegmentationMap consensus;
    std::vector<double> trace;
    std::vector<double> member_energies;
    std::vector<int> member_label_counts;
    double final_energy = 0.0;
    int sweeps = 0;
    int fusion_labels_used = 0;
    int initial_member = 0;
    StageTimes times;
    std::vector<EnsembleMember> members; // kept for dumps / diagnostics
};

// load -> slice -> LBP -> features -> ensemble -> fuse. When
// output_dir is set, writes consensus.pgm (+ sidecar), trace.json,
// manifest.json and timings.json, and member maps under members/ when
// dump_ensemble is on. Stage errors are rethrown with a stage tag.
SegmentOutcome run_segment(const PipelineConfig& config);

struct SweepInput {
    std::string cube_path;
    std::string truth_path;
};

struct SweepRow {
    std::uint32_t k = 0;
    double avg_pr = 0.0;
    double wall_seconds = 0.0;
};

// Full pipeline per k over the input set; one CSV row per k.
std::vector<SweepRow> sweep_k(const PipelineConfig& base, const std::vector<std::uint32_t>& ks,
                              const std::vector<SweepInput>& inputs);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Resolved consensus label count: explicit config value, else the
// modal member label count (ties -> smaller), floored at 2.
int resolve_fusion_labels(const PipelineConfig& config, const std::vector<EnsembleMember>& members);

} // namespace dtseg
