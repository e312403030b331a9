#pragma once

#include <vector>

#include "clusterlab/dataset.hpp"
#include "clusterlab/mlp.hpp"

namespace clusterlab {

// Per-cluster, per-class accuracy under ON or OFF interventions at one layer.
struct InterventionMatrix {
    InterventionMode mode = InterventionMode::On;
    int layer = -1;
    Matrix accuracy;  // k x n_classes
};

InterventionMatrix intervention_matrix(const MlpModel& model, int layer, InterventionMode mode,
                                       const Dataset& dataset);

// Distribution of s = number of clusters individually sufficient for a
// sample, over the eligible set (samples the plain model gets right).
// counts[s] for s = 0..k; the complement view N = k - s is the reversal.
struct SufficiencyHistogram {
    long long eligible_count = 0;
    std::vector<long long> counts;

    std::vector<long long> complement_counts() const {
        return std::vector<long long>(counts.rbegin(), counts.rend());
    }
};

// Throws std::domain_error for an unclustered layer or an empty eligible set.
SufficiencyHistogram sufficiency_histogram(const MlpModel& model, int layer,
                                           const Dataset& dataset);

// Fraction of eligible samples no size-modules_on cluster subset can solve.
// Subsets are enumerated exhaustively (k choose modules_on forward passes).
// modules_on must lie in [1, k]; modules_on = k always yields 0.
double null_dependency(const MlpModel& model, int layer, const Dataset& dataset, int modules_on);

struct EcsConfig {
    double chunk_fraction = 0.005;  // of the full parameter count
    double accuracy_drop = 0.01;    // gate: accuracy >= baseline - this
    double loss_rise = 0.10;        // gate: mean loss <= baseline * (1 + this)
    bool include_negatives = false;  // gate on the whole dataset, not just the label
    std::vector<int> prunable_layers;  // empty = all layers
};

struct EcsPassTrace {
    int pass = 0;
    long long removed = 0;
    long long restored = 0;
};

struct EcsReport {
    int label = -1;
    long long nonzero = 0;
    long long total = 0;
    double ecs = 0.0;
    EcsConfig config;
    std::vector<EcsPassTrace> trace;
};

// Iterative magnitude pruning of the effective circuit for one label:
// ascending |w| over the prunable layers, chunks of
// max(1, floor(chunk_fraction * params)); a chunk that breaks the
// performance gate is restored and frozen for the rest of the pass; passes
// repeat until one removes nothing. ecs = nonzero / total over all layers.
// Throws std::domain_error when the baseline accuracy on the label is zero.
EcsReport effective_circuit(const MlpModel& model, const Dataset& dataset, int label,
                            const EcsConfig& config = {});

struct EcsComparison {
    std::vector<double> pct_increase;  // per label: 100 * (ecs_b - ecs_a) / ecs_a
    double mean_pct_increase = 0.0;
    std::vector<EcsReport> reports_a;
    std::vector<EcsReport> reports_b;
};

// Per-label ECS increase of model_b over model_a on the same dataset.
// Throws std::domain_error when a label is classified by only one model.
EcsComparison ecs_compare(const MlpModel& model_a, const MlpModel& model_b,
                          const Dataset& dataset, const EcsConfig& config = {});

}  // namespace clusterlab
