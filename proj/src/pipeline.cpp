#include "dtseg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dtseg/metrics.hpp"
#include "dtseg/rng.hpp"
#include "dtseg/video_cube.hpp"

namespace fs = std::filesystem;

namespace dtseg {

namespace {

constexpr std::uint64_t kFusionTag = 0x46555345ULL; // "FUSE"

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void stage_fail(const char* stage, const std::exception& e) {
    throw std::runtime_error(std::string(stage) + ": " + e.what());
}

std::uint64_t parse_u64(const std::string& v) { return std::stoull(v); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace

void PipelineConfig::validate() const {
    lbp.validate();
    features.validate();
    ensemble.validate();
    if (fusion_labels < 0) throw std::invalid_argument("PipelineConfig: fusion_labels must be >= 0");
    if (fusion_labels == 1) throw std::invalid_argument("PipelineConfig: fusion_labels must be >= 2");
    if (max_sweeps < 1) throw std::invalid_argument("PipelineConfig: max_sweeps must be >= 1");
    if (threads < 0) throw std::invalid_argument("PipelineConfig: threads must be >= 0");
}

PipelineConfig config_from_map(const ConfigMap& map, PipelineConfig base) {
    for (const auto& [key, value] : map) {
        try {
            if (key == "input") base.input = value;
            else if (key == "output_dir") base.output_dir = value;
            else if (key == "lbp_p") base.lbp.neighbors = std::stoi(value);
            else if (key == "lbp_r") base.lbp.radius = std::stoi(value);
            else if (key == "bins") base.lbp.bins = std::stoi(value);
            else if (key == "window") base.features.window = std::stoi(value);
            else if (key == "stride_t") base.features.stride_t = std::stoi(value);
            else if (key == "k") base.ensemble.reduced_dim = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "replicates") base.ensemble.replicates = std::stoi(value);
            else if (key == "labels") base.ensemble.clusters = std::stoi(value);
            else if (key == "kmeans_max_iter") base.ensemble.kmeans_max_iter = std::stoi(value);
            else if (key == "kmeans_tol") base.ensemble.kmeans_tol = std::stod(value);
            else if (key == "seed") base.ensemble.master_seed = parse_u64(value);
            else if (key == "fusion_labels") base.fusion_labels = std::stoi(value);
            else if (key == "max_sweeps") base.max_sweeps = std::stoi(value);
            else if (key == "fusion_seed") base.fusion_seed = parse_u64(value);
            else if (key == "dump_ensemble") base.dump_ensemble = (value == "1" || value == "true");
            else if (key == "threads") base.threads = std::stoi(value);
            else throw std::runtime_error("unknown config key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("config key '" + key + "': cannot parse value '" + value + "'");
        } catch (const std::out_of_range&) {
            throw std::runtime_error("config key '" + key + "': value '" + value + "' out of range");
        }
    }
    return base;
}

ConfigMap config_to_map(const PipelineConfig& config) {
    ConfigMap map;
    map["input"] = config.input;
    map["output_dir"] = config.output_dir;
    map["lbp_p"] = std::to_string(config.lbp.neighbors);
    map["lbp_r"] = std::to_string(config.lbp.radius);
    map["bins"] = std::to_string(config.lbp.bins);
    map["window"] = std::to_string(config.features.window);
    map["stride_t"] = std::to_string(config.features.stride_t);
    map["k"] = std::to_string(config.ensemble.reduced_dim);
    map["replicates"] = std::to_string(config.ensemble.replicates);
    map["labels"] = std::to_string(config.ensemble.clusters);
    map["kmeans_max_iter"] = std::to_string(config.ensemble.kmeans_max_iter);
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", config.ensemble.kmeans_tol);
        map["kmeans_tol"] = buf;
    }
    map["seed"] = std::to_string(config.ensemble.master_seed);
    map["fusion_labels"] = std::to_string(config.fusion_labels);
    map["max_sweeps"] = std::to_string(config.max_sweeps);
    map["fusion_seed"] = std::to_string(config.fusion_seed);
    map["dump_ensemble"] = config.dump_ensemble ? "1" : "0";
    map["threads"] = std::to_string(config.threads);
    return map;
}

void save_config_file(const PipelineConfig& config, const std::string& path) {
    std::string text;
    for (const auto& [key, value] : config_to_map(config))
        text += key + " = " + value + "\n";
    write_text(path, text);
}

int resolve_fusion_labels(const PipelineConfig& config,
                          const std::vector<EnsembleMember>& members) {
    if (config.fusion_labels > 0) return config.fusion_labels;
    std::map<int, int> freq;
    for (const auto& m : members) ++freq[m.map.num_labels];
    int modal = 0, best = 0;
    for (const auto& [labels, count] : freq) {
        if (count > best) { // ties keep the smaller label count
            best = count;
            modal = labels;
        }
    }
    return std::max(2, modal);
}

SegmentOutcome run_segment(const PipelineConfig& config) {
    config.validate();
    if (config.input.empty()) throw std::runtime_error("segment: no input given");
#ifdef _OPENMP
    if (config.threads > 0) omp_set_num_threads(config.threads);
#endif

    const auto t_total = Clock::now();
    SegmentOutcome outcome;

    // --- load ---
    auto t_stage = Clock::now();
    VideoCube cube;
    try {
        cube = load_cube(config.input);
    } catch (const std::exception& e) {
        stage_fail("load", e);
    }
    outcome.times.load = seconds_since(t_stage);

    // --- features: LBP volumes + local histograms per plane family ---
    t_stage = Clock::now();
    FamilyFeatures features;
    try {
        features = build_family_features(cube, config.lbp, config.features);
    } catch (const std::exception& e) {
        stage_fail("features", e);
    }
    outcome.times.features = seconds_since(t_stage);

    // --- ensemble: J = 3K projection + k-means jobs ---
    t_stage = Clock::now();
    try {
        outcome.members =
            ensemble_from_features(features, cube.height, cube.width, config.ensemble);
    } catch (const std::exception& e) {
        stage_fail("ensemble", e);
    }
    outcome.times.ensemble = seconds_since(t_stage);

    // --- fusion ---
    t_stage = Clock::now();
    const std::uint64_t fusion_seed = config.fusion_seed != 0
                                          ? config.fusion_seed
                                          : mix_seed(config.ensemble.master_seed, kFusionTag);
    const int fusion_labels = resolve_fusion_labels(config, outcome.members);
    try {
        const std::vector<SegmentationMap> maps = member_maps(outcome.members);
        for (const auto& map : maps) outcome.member_label_counts.push_back(map.num_labels);
        for (const auto& map : maps)
            outcome.member_energies.push_back(consensus_energy(map, maps));

        FusionResult fused = icm_fuse(maps, fusion_labels, config.max_sweeps, fusion_seed);
        outcome.consensus = std::move(fused.map);
        outcome.trace = std::move(fused.trace);
        outcome.sweeps = fused.sweeps;
        outcome.initial_member = fused.initial_member;
        outcome.final_energy = outcome.trace.back();
        outcome.fusion_labels_used = fusion_labels;
    } catch (const std::exception& e) {
        stage_fail("fusion", e);
    }
    outcome.times.fusion = seconds_since(t_stage);

    // --- write ---
    t_stage = Clock::now();
    if (!config.output_dir.empty()) {
        try {
            fs::create_directories(config.output_dir);
            const fs::path dir(config.output_dir);

            write_labelmap(outcome.consensus, (dir / "consensus.pgm").string());

            nlohmann::json trace_json = outcome.trace;
            write_text((dir / "trace.json").string(), trace_json.dump(2) + "\n");

            if (config.dump_ensemble) {
                fs::create_directories(dir / "members");
                for (const auto& m : outcome.members) {
                    const std::string name = "member_" + std::string(plane_name(m.plane)) + "_" +
                                             std::to_string(m.replicate) + ".pgm";
                    write_labelmap(m.map, (dir / "members" / name).string());
                }
            }

            nlohmann::json manifest;
            manifest["command"] = "segment";
            manifest["input"] = config.input;
            manifest["parameters"] = {
                {"lbp_p", config.lbp.neighbors},
                {"lbp_r", config.lbp.radius},
                {"bins", config.lbp.bins},
                {"window", config.features.window},
                {"stride_t", config.features.stride_t},
                {"k", config.ensemble.reduced_dim},
                {"replicates", config.ensemble.replicates},
                {"labels", config.ensemble.clusters},
                {"kmeans_max_iter", config.ensemble.kmeans_max_iter},
                {"kmeans_tol", config.ensemble.kmeans_tol},
                {"fusion_labels", outcome.fusion_labels_used},
                {"max_sweeps", config.max_sweeps},
            };
            nlohmann::json member_seeds = nlohmann::json::array();
            for (const auto& m : outcome.members)
                member_seeds.push_back({{"plane", plane_name(m.plane)},
                                        {"replicate", m.replicate},
                                        {"projection_seed", m.projection_seed},
                                        {"kmeans_seed", m.kmeans_seed}});
            manifest["seeds"] = {
                {"master", config.ensemble.master_seed},
                {"fusion", fusion_seed},
                {"members", member_seeds},
            };
            manifest["ensemble"] = {
                {"member_label_counts", outcome.member_label_counts},
                {"member_energies", outcome.member_energies},
            };
            manifest["fusion"] = {
                {"initial_member", outcome.initial_member},
                {"sweeps", outcome.sweeps},
                {"final_energy", outcome.final_energy},
            };
            manifest["outputs"] = {
                {"consensus", "consensus.pgm"},
                {"trace", "trace.json"},
                {"timings", "timings.json"},
            };
            if (config.dump_ensemble) manifest["outputs"]["members_dir"] = "members";
            write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n");
        } catch (const std::exception& e) {
            stage_fail("write", e);
        }
    }
    outcome.times.write = seconds_since(t_stage);
    outcome.times.total = seconds_since(t_total);

    // wall times live in their own file so the manifest stays
    // byte-reproducible across runs
    if (!config.output_dir.empty()) {
        nlohmann::json timings;
        timings["load"] = outcome.times.load;
        timings["features"] = outcome.times.features;
        timings["ensemble"] = outcome.times.ensemble;
        timings["fusion"] = outcome.times.fusion;
        timings["write"] = outcome.times.write;
        timings["total"] = outcome.times.total;
        write_text((fs::path(config.output_dir) / "timings.json").string(),
                   timings.dump(2) + "\n");
    }
    return outcome;
}

std::vector<SweepRow> sweep_k(const PipelineConfig& base, const std::vector<std::uint32_t>& ks,
                              const std::vector<SweepInput>& inputs) {
    if (ks.empty()) throw std::invalid_argument("sweep_k: empty k list");
    if (inputs.empty()) throw std::invalid_argument("sweep_k: no inputs");

    std::vector<SweepRow> rows;
    for (const auto k : ks) {
        PipelineConfig config = base;
        config.ensemble.reduced_dim = k;
        config.output_dir.clear();

        SweepRow row;
        row.k = k;
        const auto t0 = Clock::now();
        double pr_sum = 0.0;
        for (const auto& input : inputs) {
            config.input = input.cube_path;
            const SegmentOutcome outcome = run_segment(config);
            const SegmentationMap truth = load_labelmap(input.truth_path);
            pr_sum += pr_index(outcome.consensus, truth);
        }
        row.wall_seconds = seconds_since(t0);
        row.avg_pr = pr_sum / static_cast<double>(inputs.size());
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string csv = "k,avg_pr,wall_seconds\n";
    char line[128];
    for (const auto& row : rows) {
        std::snprintf(line, sizeof(line), "%u,%.6f,%.3f\n", row.k, row.avg_pr, row.wall_seconds);
        csv += line;
    }
    return csv;
}

} // namespace dtseg
