// clusterlab: train clusterable MLPs, discover clusters spectrally, and run
// the intervention / circuit-size / capacity analyses from the command line.
//
// Exit codes: 0 success, 2 configuration or validation problem, 3 runtime
// failure. CLUSTERLAB_OUT overrides --out when set.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clusterlab/analysis.hpp"
#include "clusterlab/bsgc.hpp"
#include "clusterlab/checkpoint.hpp"
#include "clusterlab/csv.hpp"
#include "clusterlab/dataset.hpp"
#include "clusterlab/metrics.hpp"
#include "clusterlab/rng.hpp"
#include "clusterlab/theory.hpp"
#include "clusterlab/trainer.hpp"

namespace {

using clusterlab::BiClustering;
using clusterlab::Checkpoint;
using clusterlab::ClusteringSource;
using clusterlab::CsvFile;
using clusterlab::Dataset;
using clusterlab::MlpModel;
using clusterlab::Split;
using clusterlab::TrainPlan;
using nlohmann::json;

constexpr std::uint64_t kSaltTrainData = 0xD5;
constexpr std::uint64_t kSaltTestData = 0xD6;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string checkpoint_path;
    std::string dataset_kind;  // "synthetic" or "mnist"
    std::string mnist_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> lambda;
    std::optional<int> k;
    json config;  // parsed --config document, empty object when absent
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool wants_checkpoint) {
    cmd->add_option("--config", opts.config_path, "JSON config file; flags override its fields");
    cmd->add_option("--out", opts.out_dir, "output directory (CLUSTERLAB_OUT overrides)");
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--lambda", opts.lambda, "clusterability loss weight");
    cmd->add_option("--k", opts.k, "number of clusters");
    cmd->add_option("--dataset", opts.dataset_kind, "dataset kind: synthetic or mnist");
    cmd->add_option("--mnist-dir", opts.mnist_dir, "directory with the four MNIST IDX files");
    if (wants_checkpoint) {
        cmd->add_option("--checkpoint", opts.checkpoint_path, "checkpoint to load");
    }
}

// config file -> opts fields that were not set by a flag
void finish_common(const CLI::App* cmd, CommonOpts& opts) {
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw std::domain_error("config: cannot open " + opts.config_path);
        try {
            opts.config = json::parse(in);
        } catch (const json::parse_error& e) {
            throw std::domain_error("config: " + opts.config_path + ": " + e.what());
        }
    } else {
        opts.config = json::object();
    }
    if (!cmd->count("--out") && opts.config.contains("out")) {
        opts.out_dir = opts.config.at("out").get<std::string>();
    }
    if (const char* env = std::getenv("CLUSTERLAB_OUT"); env && *env) {
        opts.out_dir = env;
    }
    if (!opts.checkpoint_path.empty()) {
        // flag wins
    } else if (opts.config.contains("checkpoint")) {
        opts.checkpoint_path = opts.config.at("checkpoint").get<std::string>();
    }
    if (opts.dataset_kind.empty()) {
        opts.dataset_kind = opts.config.value("dataset", std::string("synthetic"));
    }
    if (opts.dataset_kind != "synthetic" && opts.dataset_kind != "mnist") {
        throw std::domain_error("config: dataset must be \"synthetic\" or \"mnist\", got \"" +
                                opts.dataset_kind + "\"");
    }
    if (opts.mnist_dir.empty()) {
        opts.mnist_dir = opts.config.value("mnist_dir", std::string());
    }
    std::filesystem::create_directories(opts.out_dir);
}

ClusteringSource source_from_name(const std::string& name) {
    if (name == "contiguous") return ClusteringSource::Contiguous;
    if (name == "bsgc_weight" || name == "weight") return ClusteringSource::BsgcWeight;
    if (name == "bsgc_gradient" || name == "gradient") return ClusteringSource::BsgcGradient;
    throw std::domain_error("config: unknown clustering_source \"" + name + "\"");
}

TrainPlan plan_from_config(const CommonOpts& opts) {
    TrainPlan plan;
    if (opts.config.contains("plan")) {
        const json& p = opts.config.at("plan");
        plan.dims = p.value("dims", plan.dims);
        plan.warmup_steps = p.value("warmup_steps", plan.warmup_steps);
        plan.lambda = p.value("lambda", plan.lambda);
        plan.k = p.value("k", plan.k);
        plan.clustered_layers = p.value("clustered_layers", plan.clustered_layers);
        if (p.contains("clustering_source")) {
            plan.clustering_source =
                source_from_name(p.at("clustering_source").get<std::string>());
        }
        plan.epochs = p.value("epochs", plan.epochs);
        plan.batch_size = p.value("batch_size", plan.batch_size);
        plan.lr = p.value("lr", plan.lr);
        plan.seed = p.value("seed", plan.seed);
        plan.eval_every = p.value("eval_every", plan.eval_every);
        plan.record_grad_trace = p.value("record_grad_trace", plan.record_grad_trace);
        plan.allow_output_clustering =
            p.value("allow_output_clustering", plan.allow_output_clustering);
        plan.eval_train_cap = p.value("eval_train_cap", plan.eval_train_cap);
    }
    if (opts.seed) plan.seed = *opts.seed;
    if (opts.lambda) plan.lambda = *opts.lambda;
    if (opts.k) plan.k = *opts.k;
    return plan;
}

struct DataPair {
    Dataset train;
    Dataset test;
};

DataPair load_data(const CommonOpts& opts, const TrainPlan& plan) {
    DataPair data;
    if (opts.dataset_kind == "mnist") {
        if (opts.mnist_dir.empty()) {
            throw std::domain_error("config: --mnist-dir is required with --dataset mnist");
        }
        const std::filesystem::path dir(opts.mnist_dir);
        data.train = clusterlab::load_idx(dir / "train-images-idx3-ubyte",
                                          dir / "train-labels-idx1-ubyte", Split::Train);
        data.test = clusterlab::load_idx(dir / "t10k-images-idx3-ubyte",
                                         dir / "t10k-labels-idx1-ubyte", Split::Test);
        return data;
    }
    int n_classes = 10;
    int dim = plan.dims.front();
    int train_per_class = 1000;
    int test_per_class = 200;
    if (opts.config.contains("synthetic")) {
        const json& s = opts.config.at("synthetic");
        n_classes = s.value("n_classes", n_classes);
        dim = s.value("dim", dim);
        train_per_class = s.value("train_per_class", train_per_class);
        test_per_class = s.value("test_per_class", test_per_class);
    }
    data.train = clusterlab::synthetic_blobs(n_classes, dim, train_per_class,
                                             clusterlab::mix_seed(plan.seed, kSaltTrainData),
                                             Split::Train);
    data.test = clusterlab::synthetic_blobs(n_classes, dim, test_per_class,
                                            clusterlab::mix_seed(plan.seed, kSaltTestData),
                                            Split::Test);
    return data;
}

std::filesystem::path out_path(const CommonOpts& opts, const std::string& name) {
    return std::filesystem::path(opts.out_dir) / name;
}

void write_history_csv(const clusterlab::TrainHistory& history, const std::string& path) {
    CsvFile csv(path);
    std::vector<std::string> header = {"step", "ce_loss", "eff_loss"};
    for (int u : history.clustered_layers) {
        header.push_back("clusterability_layer" + std::to_string(u));
    }
    header.push_back("train_acc");
    header.push_back("test_acc");
    csv.row(header);
    for (const clusterlab::EvalRecord& r : history.records) {
        std::vector<std::string> row = {CsvFile::fmt(r.step), CsvFile::fmt(r.ce_loss),
                                        CsvFile::fmt(r.eff_loss)};
        for (double c : r.layer_clusterability) row.push_back(CsvFile::fmt(c));
        row.push_back(CsvFile::fmt(r.train_acc));
        row.push_back(CsvFile::fmt(r.test_acc));
        csv.row(row);
    }
}

int cmd_train(const CLI::App* cmd, CommonOpts& opts) {
    finish_common(cmd, opts);
    const TrainPlan plan = plan_from_config(opts);
    const DataPair data = load_data(opts, plan);

    clusterlab::TrainResult result = clusterlab::train(plan, data.train, data.test);

    Checkpoint ckpt;
    ckpt.model = std::move(result.model);
    ckpt.plan = plan;
    ckpt.history = result.history;
    ckpt.traces = std::move(result.traces);
    clusterlab::save_checkpoint(ckpt, out_path(opts, "checkpoint.json"));
    write_history_csv(result.history, out_path(opts, "history.csv"));

    const clusterlab::EvalRecord& last = result.history.records.back();
    std::cout << "trained " << last.step << " steps, test accuracy " << last.test_acc << "\n";
    return 0;
}

int cmd_bsgc(const CLI::App* cmd, CommonOpts& opts, const std::string& source_name,
             const std::string& sweep_ks) {
    finish_common(cmd, opts);
    if (opts.checkpoint_path.empty()) {
        throw std::domain_error("bsgc: --checkpoint is required");
    }
    const Checkpoint ckpt = clusterlab::load_checkpoint(opts.checkpoint_path);
    const MlpModel& model = ckpt.model;

    const bool gradient = source_name == "gradient";
    if (!gradient && source_name != "weight") {
        throw std::domain_error("bsgc: --source must be weight or gradient");
    }
    if (gradient && ckpt.traces.empty()) {
        throw std::domain_error("bsgc: checkpoint has no stored gradient trace; re-run "
                                "train with record_grad_trace");
    }

    auto similarity = [&](std::size_t layer) {
        return gradient ? clusterlab::gradient_similarity(ckpt.traces[layer])
                        : clusterlab::weight_similarity(model.weights[layer]);
    };

    std::vector<int> ks;
    {
        std::stringstream ss(sweep_ks);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) ks.push_back(std::stoi(tok));
        }
        if (ks.empty()) throw std::domain_error("bsgc: empty k sweep");
    }
    const int k_main = opts.k.value_or(ckpt.plan.k);

    json clusters;
    clusters["k"] = k_main;
    clusters["source"] = gradient ? "gradient" : "weight";
    clusters["layers"] = json::array();

    CsvFile csv(out_path(opts, "clusterability-vs-k.csv"));
    csv.row({"k", "layer", "c", "baseline"});
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        const clusterlab::Matrix sim = similarity(l);
        for (int k : ks) {
            if (k < 1 || static_cast<std::size_t>(k) > std::min(sim.rows(), sim.cols())) {
                continue;  // layer too small for this k
            }
            const BiClustering bc =
                clusterlab::bsgc(sim, k, clusterlab::mix_seed(ckpt.plan.seed, 0x33 + l));
            const double c = clusterlab::clusterability(model.weights[l], bc).c;
            csv.row({CsvFile::fmt(k), CsvFile::fmt(static_cast<long long>(l)), CsvFile::fmt(c),
                     CsvFile::fmt(clusterlab::random_baseline(k))});
        }
        if (static_cast<std::size_t>(k_main) <= std::min(sim.rows(), sim.cols())) {
            const BiClustering bc =
                clusterlab::bsgc(sim, k_main, clusterlab::mix_seed(ckpt.plan.seed, 0x33 + l));
            clusters["layers"].push_back(json{
                {"layer", l},
                {"row_assign", bc.row_assign},
                {"col_assign", bc.col_assign},
                {"c", clusterlab::clusterability(model.weights[l], bc).c}});
        }
    }

    std::ofstream jf(out_path(opts, "clusters.json"));
    if (!jf) throw std::runtime_error("bsgc: cannot write clusters.json");
    jf << clusters.dump(1, '\t') << "\n";
    std::cout << "wrote clusters.json and clusterability-vs-k.csv\n";
    return 0;
}

int first_clustered_layer(const MlpModel& model) {
    for (std::size_t l = 0; l < model.clusterings.size(); ++l) {
        if (model.clusterings[l]) return static_cast<int>(l);
    }
    return -1;
}

int cmd_analyze(const CLI::App* cmd, CommonOpts& opts, bool interventions, bool sufficiency,
                bool ecs, bool heatmap, bool null_dep, int layer_flag,
                const std::string& compare_path) {
    finish_common(cmd, opts);
    if (opts.checkpoint_path.empty()) {
        throw std::domain_error("analyze: --checkpoint is required");
    }
    const Checkpoint ckpt = clusterlab::load_checkpoint(opts.checkpoint_path);
    const MlpModel& model = ckpt.model;
    const DataPair data = load_data(opts, ckpt.plan);
    const Dataset& eval_set = data.test;

    if (!interventions && !sufficiency && !ecs && !heatmap && !null_dep) {
        interventions = sufficiency = heatmap = true;
    }

    int layer = layer_flag;
    if (layer < 0) layer = first_clustered_layer(model);
    const bool needs_clustering = interventions || sufficiency || heatmap || null_dep;
    if (needs_clustering && layer < 0) {
        throw std::domain_error("analyze: checkpoint has no clustered layer; the requested "
                                "reports need one");
    }

    if (interventions) {
        CsvFile csv(out_path(opts, "interventions.csv"));
        csv.row({"mode", "layer", "cluster", "class", "accuracy"});
        for (std::size_t l = 0; l < model.clusterings.size(); ++l) {
            if (!model.clusterings[l]) continue;
            for (const auto mode :
                 {clusterlab::InterventionMode::On, clusterlab::InterventionMode::Off}) {
                const clusterlab::InterventionMatrix m = clusterlab::intervention_matrix(
                    model, static_cast<int>(l), mode, eval_set);
                const char* mode_name = mode == clusterlab::InterventionMode::On ? "on" : "off";
                for (std::size_t c = 0; c < m.accuracy.rows(); ++c) {
                    for (std::size_t y = 0; y < m.accuracy.cols(); ++y) {
                        csv.row({mode_name, CsvFile::fmt(static_cast<long long>(l)),
                                 CsvFile::fmt(static_cast<long long>(c)),
                                 CsvFile::fmt(static_cast<long long>(y)),
                                 CsvFile::fmt(m.accuracy(c, y))});
                    }
                }
            }
        }
    }

    if (sufficiency) {
        const clusterlab::SufficiencyHistogram hist =
            clusterlab::sufficiency_histogram(model, layer, eval_set);
        CsvFile csv(out_path(opts, "sufficiency.csv"));
        csv.row({"s", "count", "fraction"});
        for (std::size_t s = 0; s < hist.counts.size(); ++s) {
            csv.row({CsvFile::fmt(static_cast<long long>(s)), CsvFile::fmt(hist.counts[s]),
                     CsvFile::fmt(static_cast<double>(hist.counts[s]) /
                                  static_cast<double>(hist.eligible_count))});
        }
    }

    if (null_dep) {
        const int k = model.clusterings[static_cast<std::size_t>(layer)]->k;
        std::vector<int> modules_on = {1};
        if (k >= 3) modules_on.push_back(3);
        if (opts.config.contains("analyze") &&
            opts.config.at("analyze").contains("modules_on")) {
            modules_on = opts.config.at("analyze").at("modules_on").get<std::vector<int>>();
        }
        CsvFile csv(out_path(opts, "null_dependency.csv"));
        csv.row({"modules_on", "fraction_unsolved"});
        for (int m : modules_on) {
            csv.row({CsvFile::fmt(m),
                     CsvFile::fmt(clusterlab::null_dependency(model, layer, eval_set, m))});
        }
    }

    if (heatmap) {
        const auto l = static_cast<std::size_t>(layer);
        const BiClustering& bc = *model.clusterings[l];
        const clusterlab::Matrix& w = model.weights[l];
        CsvFile csv(out_path(opts, "heatmap.csv"));
        csv.row({"row", "col", "weight", "same_module"});
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.cols(); ++j) {
                csv.row({CsvFile::fmt(static_cast<long long>(i)),
                         CsvFile::fmt(static_cast<long long>(j)), CsvFile::fmt(w(i, j)),
                         bc.same_module(i, j) ? "1" : "0"});
            }
        }
    }

    if (ecs) {
        clusterlab::EcsConfig config;
        if (opts.config.contains("analyze")) {
            const json& a = opts.config.at("analyze");
            config.chunk_fraction = a.value("chunk_fraction", config.chunk_fraction);
            config.accuracy_drop = a.value("accuracy_drop", config.accuracy_drop);
            config.loss_rise = a.value("loss_rise", config.loss_rise);
            config.include_negatives = a.value("include_negatives", config.include_negatives);
        }
        if (compare_path.empty()) {
            CsvFile csv(out_path(opts, "ecs.csv"));
            csv.row({"label", "ecs", "nonzero", "total"});
            for (int label = 0; label < eval_set.n_classes; ++label) {
                const clusterlab::EcsReport r =
                    clusterlab::effective_circuit(model, eval_set, label, config);
                csv.row({CsvFile::fmt(label), CsvFile::fmt(r.ecs), CsvFile::fmt(r.nonzero),
                         CsvFile::fmt(r.total)});
            }
        } else {
            const Checkpoint other = clusterlab::load_checkpoint(compare_path);
            const clusterlab::EcsComparison cmp =
                clusterlab::ecs_compare(model, other.model, eval_set, config);
            CsvFile csv(out_path(opts, "ecs_compare.csv"));
            csv.row({"label", "pct_increase"});
            for (std::size_t i = 0; i < cmp.pct_increase.size(); ++i) {
                csv.row({CsvFile::fmt(static_cast<long long>(i)),
                         CsvFile::fmt(cmp.pct_increase[i])});
            }
            csv.row({"mean", CsvFile::fmt(cmp.mean_pct_increase)});
        }
    }

    std::cout << "analysis written to " << opts.out_dir << "\n";
    return 0;
}

int cmd_theory(const CLI::App* cmd, CommonOpts& opts, std::string dense_widths,
               int modular_nprev, std::string modular_parts, int jl_n, double jl_eps,
               std::string capacity_parts) {
    finish_common(cmd, opts);
    if (opts.config.contains("theory")) {
        const json& t = opts.config.at("theory");
        if (!cmd->count("--dense")) dense_widths = t.value("dense", dense_widths);
        if (!cmd->count("--modular-nprev")) modular_nprev = t.value("modular_nprev", modular_nprev);
        if (!cmd->count("--modular-parts")) modular_parts = t.value("modular_parts", modular_parts);
        if (!cmd->count("--jl-n")) jl_n = t.value("jl_n", jl_n);
        if (!cmd->count("--jl-eps")) jl_eps = t.value("jl_eps", jl_eps);
        if (!cmd->count("--capacity-parts")) {
            capacity_parts = t.value("capacity_parts", capacity_parts);
        }
    }

    auto parse_ints = [](const std::string& csv_list) {
        std::vector<int> out;
        std::stringstream ss(csv_list);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) out.push_back(std::stoi(tok));
        }
        return out;
    };
    auto join = [](const std::vector<int>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += '|';
            s += std::to_string(xs[i]);
        }
        return s;
    };

    CsvFile csv(out_path(opts, "theory.csv"));
    csv.row({"calculator", "inputs", "value", "log2"});
    bool wrote = false;

    if (!dense_widths.empty()) {
        const std::vector<int> widths = parse_ints(dense_widths);
        const clusterlab::BigCount b = clusterlab::polytope_bound_dense(widths);
        csv.row({"polytope_bound_dense", join(widths), b.to_decimal(), CsvFile::fmt(b.log2)});
        wrote = true;
    }
    if (!modular_parts.empty()) {
        if (modular_nprev < 1) {
            throw std::domain_error("theory: --modular-nprev is required with --modular-parts");
        }
        clusterlab::ModularPartition part;
        part.output_widths = parse_ints(modular_parts);
        const clusterlab::BigCount m =
            clusterlab::polytope_pair_count_modular(modular_nprev, part);
        csv.row({"polytope_pair_count_modular",
                 "nprev=" + std::to_string(modular_nprev) + ";parts=" + join(part.output_widths),
                 m.to_decimal(), CsvFile::fmt(m.log2)});
        const clusterlab::BigCount d =
            clusterlab::polytope_pair_count_dense(modular_nprev, part.output_total());
        csv.row({"polytope_pair_count_dense",
                 "nprev=" + std::to_string(modular_nprev) +
                     ";nout=" + std::to_string(part.output_total()),
                 d.to_decimal(), CsvFile::fmt(d.log2)});
        wrote = true;
    }
    if (jl_n > 0) {
        const clusterlab::BigCount cap = clusterlab::jl_capacity(jl_n, jl_eps);
        csv.row({"jl_capacity",
                 "n=" + std::to_string(jl_n) + ";eps=" + CsvFile::fmt(jl_eps), cap.to_decimal(),
                 CsvFile::fmt(cap.log2)});
        wrote = true;
    }
    if (!capacity_parts.empty()) {
        const std::vector<int> parts = parse_ints(capacity_parts);
        const clusterlab::CapacityComparison cmp =
            clusterlab::modular_capacity_comparison(parts);
        csv.row({"modular_capacity_log", "parts=" + join(parts),
                 CsvFile::fmt(cmp.modular_log), ""});
        csv.row({"dense_capacity_log", "parts=" + join(parts), CsvFile::fmt(cmp.dense_log), ""});
        wrote = true;
    }
    if (!wrote) {
        throw std::domain_error("theory: nothing requested; pass --dense, --modular-parts, "
                                "--jl-n, or --capacity-parts");
    }
    std::cout << "wrote theory.csv\n";
    return 0;
}

int cmd_sweep(const CLI::App* cmd, CommonOpts& opts, int layer_flag) {
    finish_common(cmd, opts);
    if (opts.checkpoint_path.empty()) {
        throw std::domain_error("sweep-max-clusterability: --checkpoint is required");
    }
    const Checkpoint ckpt = clusterlab::load_checkpoint(opts.checkpoint_path);
    TrainPlan plan = ckpt.plan;
    if (opts.lambda) plan.lambda = *opts.lambda;
    const DataPair data = load_data(opts, plan);

    std::vector<int> layers;
    if (layer_flag >= 0) {
        layers.push_back(layer_flag);
    } else {
        for (std::size_t l = 0; l < ckpt.model.clusterings.size(); ++l) {
            if (ckpt.model.clusterings[l]) layers.push_back(static_cast<int>(l));
        }
    }
    if (layers.empty()) {
        throw std::domain_error("sweep-max-clusterability: checkpoint has no clustered layer");
    }

    clusterlab::SweepConfig config;
    if (opts.config.contains("sweep")) {
        const json& s = opts.config.at("sweep");
        config.tolerance = s.value("tolerance", config.tolerance);
        config.plateau_eps = s.value("plateau_eps", config.plateau_eps);
        config.plateau_window = s.value("plateau_window", config.plateau_window);
        config.max_steps = s.value("max_steps", config.max_steps);
        config.eval_every = s.value("eval_every", config.eval_every);
    }

    CsvFile csv(out_path(opts, "sweep.csv"));
    csv.row({"layer", "c_start", "c_max"});
    for (int l : layers) {
        const auto ll = static_cast<std::size_t>(l);
        const double start =
            clusterlab::clusterability(ckpt.model.weights[ll], *ckpt.model.clusterings[ll]).c;
        const double best = clusterlab::max_clusterability_sweep(ckpt.model, l, plan, data.train,
                                                                 data.test, config);
        csv.row({CsvFile::fmt(l), CsvFile::fmt(start), CsvFile::fmt(best)});
    }
    std::cout << "wrote sweep.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clusterable-MLP training and analysis"};
    app.require_subcommand(1);

    CommonOpts train_opts;
    CLI::App* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
    add_common(train_cmd, train_opts, false);

    CommonOpts bsgc_opts;
    std::string bsgc_source = "weight";
    std::string bsgc_ks = "2,3,4,6,8";
    CLI::App* bsgc_cmd =
        app.add_subcommand("bsgc", "spectral clustering of a checkpointed model");
    add_common(bsgc_cmd, bsgc_opts, true);
    bsgc_cmd->add_option("--source", bsgc_source, "similarity source: weight or gradient");
    bsgc_cmd->add_option("--sweep-ks", bsgc_ks, "comma-separated k values for the sweep");

    CommonOpts analyze_opts;
    bool t_interventions = false;
    bool t_sufficiency = false;
    bool t_ecs = false;
    bool t_heatmap = false;
    bool t_null = false;
    int analyze_layer = -1;
    std::string compare_path;
    CLI::App* analyze_cmd = app.add_subcommand("analyze", "intervention and circuit reports");
    add_common(analyze_cmd, analyze_opts, true);
    analyze_cmd->add_flag("--interventions", t_interventions, "write interventions.csv");
    analyze_cmd->add_flag("--sufficiency", t_sufficiency, "write sufficiency.csv");
    analyze_cmd->add_flag("--ecs", t_ecs, "write ecs.csv (or ecs_compare.csv with --compare)");
    analyze_cmd->add_flag("--heatmap", t_heatmap, "write heatmap.csv");
    analyze_cmd->add_flag("--null-dep", t_null, "write null_dependency.csv");
    analyze_cmd->add_option("--layer", analyze_layer,
                            "layer for sufficiency/heatmap/null-dep (default: first clustered)");
    analyze_cmd->add_option("--compare", compare_path, "second checkpoint for ecs_compare.csv");

    CommonOpts theory_opts;
    std::string dense_widths;
    int modular_nprev = 0;
    std::string modular_parts;
    int jl_n = 0;
    double jl_eps = 0.5;
    std::string capacity_parts;
    CLI::App* theory_cmd = app.add_subcommand("theory", "closed-form capacity calculators");
    add_common(theory_cmd, theory_opts, false);
    theory_cmd->add_option("--dense", dense_widths, "hidden widths, e.g. 64,64");
    theory_cmd->add_option("--modular-nprev", modular_nprev, "input width of the modular layer");
    theory_cmd->add_option("--modular-parts", modular_parts, "output sub-widths, e.g. 16,16,16,16");
    theory_cmd->add_option("--jl-n", jl_n, "space dimension for the capacity bound");
    theory_cmd->add_option("--jl-eps", jl_eps, "distortion in (0,1)");
    theory_cmd->add_option("--capacity-parts", capacity_parts,
                           "sub-widths for the log-capacity comparison");

    CommonOpts sweep_opts;
    int sweep_layer = -1;
    CLI::App* sweep_cmd = app.add_subcommand("sweep-max-clusterability",
                                             "push one layer's clusterability until accuracy "
                                             "degrades or C plateaus");
    add_common(sweep_cmd, sweep_opts, true);
    sweep_cmd->add_option("--layer", sweep_layer, "layer to sweep (default: all clustered)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_cmd, train_opts);
        if (bsgc_cmd->parsed()) return cmd_bsgc(bsgc_cmd, bsgc_opts, bsgc_source, bsgc_ks);
        if (analyze_cmd->parsed()) {
            return cmd_analyze(analyze_cmd, analyze_opts, t_interventions, t_sufficiency, t_ecs,
                               t_heatmap, t_null, analyze_layer, compare_path);
        }
        if (theory_cmd->parsed()) {
            return cmd_theory(theory_cmd, theory_opts, dense_widths, modular_nprev, modular_parts,
                              jl_n, jl_eps, capacity_parts);
        }
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_cmd, sweep_opts, sweep_layer);
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const clusterlab::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const clusterlab::CheckpointError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
