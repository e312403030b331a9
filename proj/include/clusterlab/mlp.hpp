#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "clusterlab/biclustering.hpp"
#include "clusterlab/matrix.hpp"

namespace clusterlab {

// Bias-free ReLU MLP. weights[l] is dims[l] x dims[l+1] (input by output);
// a batch of row vectors flows left to right through plain matrix products.
// clusterings and masks are per-layer and optional.
struct MlpModel {
    std::vector<int> dims;
    std::vector<Matrix> weights;
    std::vector<std::optional<BiClustering>> clusterings;
    std::vector<std::optional<Matrix>> masks;  // 1 = weight active, 0 = pruned

    std::size_t layer_count() const { return weights.size(); }
    std::size_t param_count() const;

    // Checks the dims/weights/clusterings/masks shape agreement and that
    // masked weights are exactly zero. Throws std::domain_error.
    void validate() const;
};

// He-initialized model: zero-mean draws with variance 2/fan_in, fully
// determined by the seed. Throws std::domain_error for bad dims.
MlpModel mlp_init(const std::vector<int>& dims, std::uint64_t seed);

// Per-layer intermediate activations for one batch. pre[l] holds the linear
// output of layer l (the last entry is the logits); post[l] holds what flowed
// onward, i.e. ReLU output after any activation mask, and for the final
// layer the logits themselves (masked when an intervention targets it).
struct ForwardTrace {
    std::vector<Matrix> pre;
    std::vector<Matrix> post;
};

// Zero-ablation mask over one layer's output neurons.
struct ClusterMask {
    int layer = -1;
    std::vector<bool> keep;
};

// Forward pass. Hidden layers apply ReLU, the output layer does not. When
// mask is given, the kept/"zeroed" pattern is applied to that layer's output
// (post-ReLU for hidden layers, raw logits for the final layer).
// Throws std::domain_error when the batch width does not match dims[0].
Matrix forward(const MlpModel& model, const Matrix& batch, ForwardTrace* trace = nullptr,
               const ClusterMask* mask = nullptr);

enum class InterventionMode { On, Off };

// ON keeps only the activations of output neurons in cluster_id and zeroes
// the rest; OFF zeroes exactly that cluster. Requires the layer to carry a
// clustering; throws std::domain_error otherwise or for a bad cluster id.
ClusterMask intervention_mask(const MlpModel& model, int layer, int cluster_id,
                              InterventionMode mode);

// Convenience closure over forward with the intervention mask baked in.
// The model must outlive the returned function.
std::function<Matrix(const Matrix&)> apply_intervention(const MlpModel& model, int layer,
                                                        int cluster_id, InterventionMode mode);

// Mean over the batch of -log softmax(logits)[label], with max-subtraction.
// Throws std::domain_error for size mismatch or a label out of range.
double cross_entropy(const Matrix& logits, const std::vector<int>& labels);

// Exact gradients of mean cross-entropy w.r.t. every weight matrix.
// Positions with mask = 0 receive zero gradient.
std::vector<Matrix> backward(const MlpModel& model, const Matrix& batch,
                             const std::vector<int>& labels);

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    long long step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState adam_init(const MlpModel& model, double lr = 1e-3);

// Standard Adam update with bias correction. Masked weights are forced back
// to zero after the update so pruning survives optimization.
void adam_step(AdamState& state, MlpModel& model, const std::vector<Matrix>& grads);

// Installs a binary mask on one layer and zeroes the masked weights.
// Entries must be exactly 0 or 1.
void set_layer_mask(MlpModel& model, std::size_t layer, Matrix mask);

}  // namespace clusterlab
