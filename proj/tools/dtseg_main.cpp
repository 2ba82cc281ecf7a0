#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dtseg/config_file.hpp"
#include "dtseg/ensemble.hpp"
#include "dtseg/features.hpp"
#include "dtseg/metrics.hpp"
#include "dtseg/pipeline.hpp"
#include "dtseg/synth.hpp"
#include "dtseg/video_cube.hpp"

namespace fs = std::filesystem;
using namespace dtseg;

namespace {

// Shared tunables; CLI flags override config-file values which
// override defaults.
struct CommonOpts {
    std::string config_path;
    ConfigMap overrides;
};

void add_pipeline_flags(CLI::App* cmd, CommonOpts& opts) {
    const auto grab = [&opts](const std::string& key) {
        return [&opts, key](const std::string& v) { opts.overrides[key] = v; };
    };
    cmd->add_option_function<std::string>("--input", grab("input"), "input cube file or frame directory");
    cmd->add_option_function<std::string>("--output-dir", grab("output_dir"), "output directory");
    cmd->add_option_function<std::string>("--labels", grab("labels"), "cluster count C");
    cmd->add_option_function<std::string>("--k", grab("k"), "reduced feature dimension");
    cmd->add_option_function<std::string>("--replicates", grab("replicates"), "projections per plane family (K)");
    cmd->add_option_function<std::string>("--lbp-p", grab("lbp_p"), "LBP sampling points");
    cmd->add_option_function<std::string>("--lbp-r", grab("lbp_r"), "LBP radius");
    cmd->add_option_function<std::string>("--bins", grab("bins"), "requantization bins Q");
    cmd->add_option_function<std::string>("--window", grab("window"), "histogram window edge Nw");
    cmd->add_option_function<std::string>("--stride-t", grab("stride_t"), "temporal stride");
    cmd->add_option_function<std::string>("--max-sweeps", grab("max_sweeps"), "ICM sweep limit");
    cmd->add_option_function<std::string>("--fusion-seed", grab("fusion_seed"), "ICM scan-order seed");
    cmd->add_option_function<std::string>("--seed", grab("seed"), "master seed");
    cmd->add_option_function<std::string>("--threads", grab("threads"), "worker threads (0 = default)");
    cmd->add_flag_callback("--dump-ensemble",
                           [&opts] { opts.overrides["dump_ensemble"] = "1"; },
                           "write every ensemble member map");
    cmd->add_option("--config", opts.config_path, "key = value config file");
}

PipelineConfig resolve_config(const CommonOpts& opts) {
    PipelineConfig config;
    if (!opts.config_path.empty())
        config = config_from_map(load_config_file(opts.config_path), config);
    return config_from_map(opts.overrides, config);
}

std::vector<SweepInput> collect_inputs(const std::string& path) {
    // a directory produced by gen-synth, or a directory of such
    std::vector<SweepInput> inputs;
    const fs::path root(path);
    if (fs::exists(root / "cube.dtc") && fs::exists(root / "truth.pgm")) {
        inputs.push_back({(root / "cube.dtc").string(), (root / "truth.pgm").string()});
        return inputs;
    }
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) subdirs.push_back(entry.path());
    std::sort(subdirs.begin(), subdirs.end());
    for (const auto& sub : subdirs)
        if (fs::exists(sub / "cube.dtc") && fs::exists(sub / "truth.pgm"))
            inputs.push_back({(sub / "cube.dtc").string(), (sub / "truth.pgm").string()});
    if (inputs.empty())
        throw std::runtime_error(path + ": no cube.dtc/truth.pgm pairs found");
    return inputs;
}

std::vector<std::string> sorted_pgms(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".pgm") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    return files;
}

int cmd_evaluate(const std::string& pred, const std::string& gt, const std::string& out_path) {
    nlohmann::json doc;
    bool failed = false;

    if (fs::is_directory(pred) != fs::is_directory(gt))
        throw std::runtime_error("evaluate: prediction and ground truth must both be files or both directories");

    if (!fs::is_directory(pred)) {
        const MetricsReport report = evaluate(load_labelmap(pred), load_labelmap(gt));
        doc = nlohmann::json::parse(report_to_json(report));
    } else {
        const auto preds = sorted_pgms(pred);
        const auto gts = sorted_pgms(gt);
        if (preds.size() != gts.size())
            throw std::runtime_error("evaluate: directories hold different file counts");
        nlohmann::json rows = nlohmann::json::array();
        double pr_sum = 0, gce_sum = 0, voi_sum = 0, pri_sum = 0, f_sum = 0;
        int ok = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            nlohmann::json row;
            row["prediction"] = preds[i];
            row["ground_truth"] = gts[i];
            try {
                const MetricsReport r = evaluate(load_labelmap(preds[i]), load_labelmap(gts[i]));
                row["metrics"] = nlohmann::json::parse(report_to_json(r));
                pr_sum += r.pr; gce_sum += r.gce; voi_sum += r.voi;
                pri_sum += r.pri; f_sum += r.f_measure;
                ++ok;
            } catch (const std::exception& e) {
                row["error"] = e.what();
                failed = true;
            }
            rows.push_back(row);
        }
        doc["rows"] = rows;
        if (ok > 0)
            doc["average"] = {{"pr", pr_sum / ok}, {"gce", gce_sum / ok},  {"voi", voi_sum / ok},
                              {"pri", pri_sum / ok}, {"f_measure", f_sum / ok}, {"videos", ok}};
    }

    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
        out << text;
    }
    return failed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic-texture video segmentation by GCE-consensus fusion of LBP/k-means ensembles"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* segment = app.add_subcommand("segment", "segment a video cube");
    add_pipeline_flags(segment, opts);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "compare label maps against ground truth");
    std::string pred_path, gt_path, eval_out;
    evaluate_cmd->add_option("--pred", pred_path, "prediction PGM or directory")->required();
    evaluate_cmd->add_option("--gt", gt_path, "ground-truth PGM or directory")->required();
    evaluate_cmd->add_option("--output", eval_out, "write the JSON report here instead of stdout");

    auto* gen = app.add_subcommand("gen-synth", "generate a synthetic two-texture fixture");
    std::string gen_out, layout_name = "vertical-split";
    SynthSpec spec;
    gen->add_option("--output-dir", gen_out, "directory for cube.dtc + truth.pgm")->required();
    gen->add_option("--height", spec.height, "cube height");
    gen->add_option("--width", spec.width, "cube width");
    gen->add_option("--frames", spec.frames, "cube frames");
    gen->add_option("--layout", layout_name, "vertical-split | quadrant | horizontal-thirds");
    gen->add_option("--noise", spec.noise_sigma, "gaussian noise sigma");
    gen->add_option("--amplitude", spec.amplitude, "sinusoid amplitude");
    std::uint64_t gen_seed = 1;
    gen->add_option("--seed", gen_seed, "generator seed");

    auto* sweep = app.add_subcommand("sweep-k", "run the pipeline over a list of k values");
    add_pipeline_flags(sweep, opts);
    std::string k_list = "20,100";
    std::string sweep_out;
    sweep->add_option("--k-list", k_list, "comma-separated k values");
    sweep->add_option("--output", sweep_out, "CSV output path (default: stdout)");

    auto* dump = app.add_subcommand("dump-features", "write per-family DTF1 feature matrices");
    add_pipeline_flags(dump, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(segment)) {
            const PipelineConfig config = resolve_config(opts);
            if (config.output_dir.empty())
                throw std::runtime_error("segment: --output-dir is required");
            const SegmentOutcome outcome = run_segment(config);
            std::cout << "consensus labels: " << outcome.consensus.num_labels
                      << ", energy: " << outcome.final_energy
                      << ", sweeps: " << outcome.sweeps
                      << ", total " << outcome.times.total << " s\n";
            return 0;
        }
        if (app.got_subcommand(evaluate_cmd)) {
            return cmd_evaluate(pred_path, gt_path, eval_out);
        }
        if (app.got_subcommand(gen)) {
            if (layout_name == "vertical-split") spec.layout = RegionLayout::VerticalSplit;
            else if (layout_name == "quadrant") spec.layout = RegionLayout::Quadrant;
            else if (layout_name == "horizontal-thirds") spec.layout = RegionLayout::HorizontalThirds;
            else throw std::runtime_error("gen-synth: unknown layout '" + layout_name + "'");
            spec.seed = gen_seed;

            const SynthResult result = generate_synthetic(spec);
            if (result.degenerate)
                std::cerr << "warning: identical textures and zero noise; "
                             "the regions are indistinguishable by construction\n";
            fs::create_directories(gen_out);
            save_cube_raw(result.cube, (fs::path(gen_out) / "cube.dtc").string());
            write_labelmap(result.truth, (fs::path(gen_out) / "truth.pgm").string());

            nlohmann::json meta;
            meta["height"] = spec.height;
            meta["width"] = spec.width;
            meta["frames"] = spec.frames;
            meta["layout"] = layout_name;
            meta["regions"] = region_count(spec.layout);
            meta["noise_sigma"] = spec.noise_sigma;
            meta["amplitude"] = spec.amplitude;
            meta["seed"] = spec.seed;
            std::ofstream meta_out((fs::path(gen_out) / "synth.json").string());
            meta_out << meta.dump(2) << "\n";
            std::cout << "wrote " << gen_out << "/cube.dtc and truth.pgm ("
                      << region_count(spec.layout) << " regions)\n";
            return 0;
        }
        if (app.got_subcommand(sweep)) {
            const PipelineConfig config = resolve_config(opts);
            if (config.input.empty()) throw std::runtime_error("sweep-k: --input is required");
            std::vector<std::uint32_t> ks;
            std::stringstream ss(k_list);
            for (std::string item; std::getline(ss, item, ',');)
                if (!item.empty()) ks.push_back(static_cast<std::uint32_t>(std::stoul(item)));
            const auto rows = sweep_k(config, ks, collect_inputs(config.input));
            const std::string csv = sweep_to_csv(rows);
            if (sweep_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream out(sweep_out);
                if (!out) throw std::runtime_error(sweep_out + ": cannot open for writing");
                out << csv;
            }
            return 0;
        }
        if (app.got_subcommand(dump)) {
            const PipelineConfig config = resolve_config(opts);
            if (config.input.empty()) throw std::runtime_error("dump-features: --input is required");
            if (config.output_dir.empty())
                throw std::runtime_error("dump-features: --output-dir is required");
            const VideoCube cube = load_cube(config.input);
            const FamilyFeatures features =
                build_family_features(cube, config.lbp, config.features);
            fs::create_directories(config.output_dir);
            const PlaneFamily planes[3] = {PlaneFamily::XY, PlaneFamily::XT, PlaneFamily::YT};
            for (int f = 0; f < 3; ++f) {
                const std::string name = std::string("features_") + plane_name(planes[f]) + ".dtf";
                save_features(features[f], (fs::path(config.output_dir) / name).string());
            }
            std::cout << "wrote 3 feature files (" << features[0].rows << " x "
                      << features[0].dim << ") to " << config.output_dir << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "dtseg: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
