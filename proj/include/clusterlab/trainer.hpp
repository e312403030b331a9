#pragma once

#include <cstdint>
#include <vector>

#include "clusterlab/bsgc.hpp"
#include "clusterlab/dataset.hpp"
#include "clusterlab/mlp.hpp"

namespace clusterlab {

enum class ClusteringSource { Contiguous, BsgcWeight, BsgcGradient };

// Four-phase pipeline control: warmup_steps of plain cross-entropy, a single
// clustering selection, then joint optimization of
//   L_eff = L_CE + lambda * sum over clustered layers of (1 - C).
struct TrainPlan {
    std::vector<int> dims = {784, 64, 64, 10};
    int warmup_steps = 0;
    double lambda = 20.0;
    int k = 4;
    std::vector<int> clustered_layers = {0, 1};
    ClusteringSource clustering_source = ClusteringSource::Contiguous;
    int epochs = 5;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    int eval_every = 100;

    // keep per-layer gradient traces from the warmup phase even when the
    // clustering source does not need them (forced on for BsgcGradient)
    bool record_grad_trace = false;

    // the output layer splits poorly across few classes, so clustering it is
    // rejected unless explicitly allowed
    bool allow_output_clustering = false;

    // evaluation-time cap on train-set size, 0 = use all samples
    std::size_t eval_train_cap = 2048;

    void validate() const;
};

struct EvalRecord {
    long long step = 0;
    double ce_loss = 0.0;
    double eff_loss = 0.0;
    std::vector<double> layer_clusterability;  // one per clustered layer, plan order
    double train_acc = 0.0;
    double test_acc = 0.0;
};

struct TrainHistory {
    std::vector<int> clustered_layers;
    std::vector<EvalRecord> records;
};

struct TrainResult {
    MlpModel model;
    TrainHistory history;
    std::vector<GradTrace> traces;  // one per layer when recorded, else empty
};

// Runs the pipeline. History records start once the clusterings are fixed,
// so eff_loss = ce_loss + lambda * sum(1 - C) holds at every record.
// lambda = 0 skips the regularizer term entirely and reproduces the plain
// cross-entropy trajectory bit for bit.
// Throws std::domain_error for an invalid plan, including BsgcGradient with
// warmup_steps = 0 (no trace to cluster from).
TrainResult train(const TrainPlan& plan, const Dataset& train_set, const Dataset& test_set);

struct Evaluation {
    double accuracy = 0.0;
    double mean_ce = 0.0;
    std::vector<double> per_class;  // classes with no samples report 0
};

// Exact counting evaluation; argmax ties resolve to the lowest class index.
// Throws std::domain_error on an empty dataset.
Evaluation evaluate(const MlpModel& model, const Dataset& dataset);

struct SweepConfig {
    double tolerance = 0.01;    // allowed absolute test-accuracy drop
    double plateau_eps = 1e-4;  // minimum C improvement that counts
    int plateau_window = 3;     // evals without improvement before stopping
    int max_steps = 2000;
    int eval_every = 50;
};

// Continues training with the clusterability loss on a single layer until C
// plateaus or test accuracy degrades past the tolerance. Returns the highest
// C observed while accuracy stayed within tolerance of the entry baseline;
// never less than the layer's C at entry. The caller's model is not touched.
// A layer already at C = 1, or lambda = 0, returns immediately.
double max_clusterability_sweep(const MlpModel& model, int layer, const TrainPlan& plan,
                                const Dataset& train_set, const Dataset& test_set,
                                const SweepConfig& config = {});

}  // namespace clusterlab
