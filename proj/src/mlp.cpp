#include "clusterlab/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "clusterlab/rng.hpp"

namespace clusterlab {

std::size_t MlpModel::param_count() const {
    std::size_t n = 0;
    for (const Matrix& w : weights) n += w.size();
    return n;
}

void MlpModel::validate() const {
    if (dims.size() < 2) throw std::domain_error("MlpModel: need at least two layer widths");
    for (int d : dims) {
        if (d < 1) throw std::domain_error("MlpModel: non-positive layer width");
    }
    if (weights.size() + 1 != dims.size()) {
        throw std::domain_error("MlpModel: " + std::to_string(weights.size()) +
                                " weight matrices for " + std::to_string(dims.size()) +
                                " layer widths");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != static_cast<std::size_t>(dims[l]) ||
            weights[l].cols() != static_cast<std::size_t>(dims[l + 1])) {
            throw std::domain_error("MlpModel: layer " + std::to_string(l) + " is " +
                                    std::to_string(weights[l].rows()) + "x" +
                                    std::to_string(weights[l].cols()) + ", expected " +
                                    std::to_string(dims[l]) + "x" + std::to_string(dims[l + 1]));
        }
    }
    if (!clusterings.empty() && clusterings.size() != weights.size()) {
        throw std::domain_error("MlpModel: clustering slots do not match layer count");
    }
    for (std::size_t l = 0; l < clusterings.size(); ++l) {
        if (!clusterings[l]) continue;
        clusterings[l]->validate();
        if (clusterings[l]->row_assign.size() != weights[l].rows() ||
            clusterings[l]->col_assign.size() != weights[l].cols()) {
            throw std::domain_error("MlpModel: clustering of layer " + std::to_string(l) +
                                    " does not match the layer shape");
        }
    }
    if (!masks.empty() && masks.size() != weights.size()) {
        throw std::domain_error("MlpModel: mask slots do not match layer count");
    }
    for (std::size_t l = 0; l < masks.size(); ++l) {
        if (!masks[l]) continue;
        if (!masks[l]->same_shape(weights[l])) {
            throw std::domain_error("MlpModel: mask of layer " + std::to_string(l) +
                                    " does not match the layer shape");
        }
        for (std::size_t i = 0; i < masks[l]->rows(); ++i) {
            for (std::size_t j = 0; j < masks[l]->cols(); ++j) {
                const double m = (*masks[l])(i, j);
                if (m != 0.0 && m != 1.0) {
                    throw std::domain_error("MlpModel: mask of layer " + std::to_string(l) +
                                            " has a non-binary entry");
                }
                if (m == 0.0 && weights[l](i, j) != 0.0) {
                    throw std::domain_error("MlpModel: masked weight (" + std::to_string(i) +
                                            "," + std::to_string(j) + ") of layer " +
                                            std::to_string(l) + " is nonzero");
                }
            }
        }
    }
}

MlpModel mlp_init(const std::vector<int>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw std::domain_error("mlp_init: need at least two layer widths");
    for (int d : dims) {
        if (d < 1) throw std::domain_error("mlp_init: non-positive layer width");
    }
    MlpModel model;
    model.dims = dims;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const auto rows = static_cast<std::size_t>(dims[l]);
        const auto cols = static_cast<std::size_t>(dims[l + 1]);
        Matrix w(rows, cols);
        const double scale = std::sqrt(2.0 / static_cast<double>(rows));
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) w(i, j) = scale * rng.gaussian();
        }
        model.weights.push_back(std::move(w));
    }
    model.clusterings.resize(model.weights.size());
    model.masks.resize(model.weights.size());
    return model;
}

namespace {

void check_mask(const MlpModel& model, const ClusterMask& mask) {
    if (mask.layer < 0 || static_cast<std::size_t>(mask.layer) >= model.layer_count()) {
        throw std::domain_error("forward: mask targets layer " + std::to_string(mask.layer) +
                                " of " + std::to_string(model.layer_count()));
    }
    const auto width = static_cast<std::size_t>(model.dims[static_cast<std::size_t>(mask.layer) + 1]);
    if (mask.keep.size() != width) {
        throw std::domain_error("forward: mask covers " + std::to_string(mask.keep.size()) +
                                " neurons, layer output width is " + std::to_string(width));
    }
}

}  // namespace

Matrix forward(const MlpModel& model, const Matrix& batch, ForwardTrace* trace,
               const ClusterMask* mask) {
    if (batch.cols() != static_cast<std::size_t>(model.dims.front())) {
        throw std::domain_error("forward: batch width " + std::to_string(batch.cols()) +
                                " does not match input width " +
                                std::to_string(model.dims.front()));
    }
    if (mask) check_mask(model, *mask);
    if (trace) {
        trace->pre.clear();
        trace->post.clear();
    }

    const std::size_t last = model.layer_count() - 1;
    Matrix h = batch;
    for (std::size_t l = 0; l <= last; ++l) {
        Matrix z = matmul(h, model.weights[l]);
        const bool masked_here = mask && static_cast<std::size_t>(mask->layer) == l;
        if (l == last) {
            if (masked_here) {
                for (std::size_t r = 0; r < z.rows(); ++r) {
                    for (std::size_t c = 0; c < z.cols(); ++c) {
                        if (!mask->keep[c]) z(r, c) = 0.0;
                    }
                }
            }
            if (trace) {
                trace->pre.push_back(z);
                trace->post.push_back(z);
            }
            return z;
        }
        Matrix a(z.rows(), z.cols());
        for (std::size_t r = 0; r < z.rows(); ++r) {
            for (std::size_t c = 0; c < z.cols(); ++c) {
                double v = z(r, c) > 0.0 ? z(r, c) : 0.0;
                if (masked_here && !mask->keep[c]) v = 0.0;
                a(r, c) = v;
            }
        }
        if (trace) {
            trace->pre.push_back(std::move(z));
            trace->post.push_back(a);
        }
        h = std::move(a);
    }
    throw std::logic_error("forward: unreachable");
}

ClusterMask intervention_mask(const MlpModel& model, int layer, int cluster_id,
                              InterventionMode mode) {
    if (layer < 0 || static_cast<std::size_t>(layer) >= model.layer_count()) {
        throw std::domain_error("intervention_mask: layer " + std::to_string(layer) +
                                " out of range");
    }
    const auto l = static_cast<std::size_t>(layer);
    if (l >= model.clusterings.size() || !model.clusterings[l]) {
        throw std::domain_error("intervention_mask: layer " + std::to_string(layer) +
                                " has no clustering");
    }
    const BiClustering& clustering = *model.clusterings[l];
    if (cluster_id < 0 || cluster_id >= clustering.k) {
        throw std::domain_error("intervention_mask: cluster " + std::to_string(cluster_id) +
                                " out of [0, " + std::to_string(clustering.k) + ")");
    }
    ClusterMask mask;
    mask.layer = layer;
    mask.keep.resize(clustering.col_assign.size());
    for (std::size_t j = 0; j < mask.keep.size(); ++j) {
        const bool in_cluster = clustering.col_assign[j] == cluster_id;
        mask.keep[j] = (mode == InterventionMode::On) ? in_cluster : !in_cluster;
    }
    return mask;
}

std::function<Matrix(const Matrix&)> apply_intervention(const MlpModel& model, int layer,
                                                        int cluster_id, InterventionMode mode) {
    ClusterMask mask = intervention_mask(model, layer, cluster_id, mode);
    return [&model, mask](const Matrix& batch) { return forward(model, batch, nullptr, &mask); };
}

double cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
    if (labels.size() != logits.rows()) {
        throw std::domain_error("cross_entropy: " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(logits.rows()) + " rows");
    }
    const auto n_classes = static_cast<int>(logits.cols());
    double total = 0.0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const int y = labels[r];
        if (y < 0 || y >= n_classes) {
            throw std::domain_error("cross_entropy: label " + std::to_string(y) +
                                    " out of [0, " + std::to_string(n_classes) + ")");
        }
        double zmax = logits(r, 0);
        for (std::size_t c = 1; c < logits.cols(); ++c) zmax = std::max(zmax, logits(r, c));
        double sum = 0.0;
        for (std::size_t c = 0; c < logits.cols(); ++c) sum += std::exp(logits(r, c) - zmax);
        total += std::log(sum) - (logits(r, static_cast<std::size_t>(y)) - zmax);
    }
    return total / static_cast<double>(logits.rows());
}

std::vector<Matrix> backward(const MlpModel& model, const Matrix& batch,
                             const std::vector<int>& labels) {
    if (labels.size() != batch.rows()) {
        throw std::domain_error("backward: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(batch.rows()) + " samples");
    }
    ForwardTrace trace;
    const Matrix logits = forward(model, batch, &trace);
    const auto n_classes = static_cast<int>(logits.cols());
    const auto batch_size = static_cast<double>(batch.rows());

    // dL/dlogits = (softmax - onehot) / batch
    Matrix delta(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const int y = labels[r];
        if (y < 0 || y >= n_classes) {
            throw std::domain_error("backward: label " + std::to_string(y) + " out of [0, " +
                                    std::to_string(n_classes) + ")");
        }
        double zmax = logits(r, 0);
        for (std::size_t c = 1; c < logits.cols(); ++c) zmax = std::max(zmax, logits(r, c));
        double sum = 0.0;
        for (std::size_t c = 0; c < logits.cols(); ++c) sum += std::exp(logits(r, c) - zmax);
        for (std::size_t c = 0; c < logits.cols(); ++c) {
            double p = std::exp(logits(r, c) - zmax) / sum;
            if (c == static_cast<std::size_t>(y)) p -= 1.0;
            delta(r, c) = p / batch_size;
        }
    }

    const std::size_t layers = model.layer_count();
    std::vector<Matrix> grads(layers);
    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& input = (l == 0) ? batch : trace.post[l - 1];
        grads[l] = matmul(input.transposed(), delta);
        if (l > 0) {
            Matrix next = matmul(delta, model.weights[l].transposed());
            const Matrix& z = trace.pre[l - 1];
            for (std::size_t r = 0; r < next.rows(); ++r) {
                for (std::size_t c = 0; c < next.cols(); ++c) {
                    if (z(r, c) <= 0.0) next(r, c) = 0.0;
                }
            }
            delta = std::move(next);
        }
    }

    for (std::size_t l = 0; l < layers; ++l) {
        if (l < model.masks.size() && model.masks[l]) {
            const Matrix& m = *model.masks[l];
            for (std::size_t i = 0; i < m.rows(); ++i) {
                for (std::size_t j = 0; j < m.cols(); ++j) {
                    if (m(i, j) == 0.0) grads[l](i, j) = 0.0;
                }
            }
        }
    }
    return grads;
}

AdamState adam_init(const MlpModel& model, double lr) {
    AdamState state;
    state.lr = lr;
    for (const Matrix& w : model.weights) {
        state.m.emplace_back(w.rows(), w.cols());
        state.v.emplace_back(w.rows(), w.cols());
    }
    return state;
}

void adam_step(AdamState& state, MlpModel& model, const std::vector<Matrix>& grads) {
    if (grads.size() != model.layer_count() || state.m.size() != model.layer_count()) {
        throw std::domain_error("adam_step: layer count mismatch");
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        Matrix& w = model.weights[l];
        if (!grads[l].same_shape(w)) {
            throw std::domain_error("adam_step: gradient shape mismatch at layer " +
                                    std::to_string(l));
        }
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.cols(); ++j) {
                const double g = grads[l](i, j);
                double& m = state.m[l](i, j);
                double& v = state.v[l](i, j);
                m = state.beta1 * m + (1.0 - state.beta1) * g;
                v = state.beta2 * v + (1.0 - state.beta2) * g * g;
                const double mhat = m / bc1;
                const double vhat = v / bc2;
                w(i, j) -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
            }
        }
        if (l < model.masks.size() && model.masks[l]) {
            const Matrix& mask = *model.masks[l];
            for (std::size_t i = 0; i < w.rows(); ++i) {
                for (std::size_t j = 0; j < w.cols(); ++j) {
                    if (mask(i, j) == 0.0) w(i, j) = 0.0;
                }
            }
        }
    }
}

void set_layer_mask(MlpModel& model, std::size_t layer, Matrix mask) {
    if (layer >= model.layer_count()) {
        throw std::domain_error("set_layer_mask: layer " + std::to_string(layer) +
                                " out of range");
    }
    if (!mask.same_shape(model.weights[layer])) {
        throw std::domain_error("set_layer_mask: mask shape does not match layer " +
                                std::to_string(layer));
    }
    for (std::size_t i = 0; i < mask.rows(); ++i) {
        for (std::size_t j = 0; j < mask.cols(); ++j) {
            const double m = mask(i, j);
            if (m != 0.0 && m != 1.0) {
                throw std::domain_error("set_layer_mask: non-binary entry at (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (m == 0.0) model.weights[layer](i, j) = 0.0;
        }
    }
    if (model.masks.size() < model.layer_count()) model.masks.resize(model.layer_count());
    model.masks[layer] = std::move(mask);
}

}  // namespace clusterlab
