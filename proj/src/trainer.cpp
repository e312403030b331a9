#include "clusterlab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "clusterlab/metrics.hpp"
#include "clusterlab/rng.hpp"

namespace clusterlab {

namespace {

constexpr std::uint64_t kSaltInit = 0x11;
constexpr std::uint64_t kSaltBsgc = 0x33;  // + layer index

}  // namespace

void TrainPlan::validate() const {
    if (dims.size() < 2) throw std::domain_error("TrainPlan: need at least two layer widths");
    for (int d : dims) {
        if (d < 1) throw std::domain_error("TrainPlan: non-positive layer width");
    }
    if (warmup_steps < 0) throw std::domain_error("TrainPlan: negative warmup_steps");
    if (lambda < 0.0) throw std::domain_error("TrainPlan: negative lambda");
    if (k < 1) throw std::domain_error("TrainPlan: k must be positive");
    if (epochs < 1) throw std::domain_error("TrainPlan: epochs must be positive");
    if (batch_size < 1) throw std::domain_error("TrainPlan: batch_size must be positive");
    if (!(lr > 0.0)) throw std::domain_error("TrainPlan: lr must be positive");
    if (eval_every < 1) throw std::domain_error("TrainPlan: eval_every must be positive");

    const int layers = static_cast<int>(dims.size()) - 1;
    for (int u : clustered_layers) {
        if (u < 0 || u >= layers) {
            throw std::domain_error("TrainPlan: clustered layer " + std::to_string(u) +
                                    " out of range [0, " + std::to_string(layers) + ")");
        }
        if (u == layers - 1 && !allow_output_clustering) {
            throw std::domain_error("TrainPlan: clustering the output layer requires "
                                    "allow_output_clustering");
        }
        const int in = dims[static_cast<std::size_t>(u)];
        const int out = dims[static_cast<std::size_t>(u) + 1];
        if (k > in || k > out) {
            throw std::domain_error("TrainPlan: k = " + std::to_string(k) +
                                    " exceeds a side of layer " + std::to_string(u));
        }
    }
    if (clustering_source == ClusteringSource::BsgcGradient && warmup_steps == 0) {
        throw std::domain_error("TrainPlan: gradient-based clustering needs warmup steps "
                                "to record a trace from");
    }
}

namespace {

void select_clusterings(MlpModel& model, const TrainPlan& plan,
                        const std::vector<GradTrace>& traces) {
    for (int u : plan.clustered_layers) {
        const auto l = static_cast<std::size_t>(u);
        const Matrix& w = model.weights[l];
        switch (plan.clustering_source) {
            case ClusteringSource::Contiguous:
                model.clusterings[l] = contiguous_clusters(w.rows(), w.cols(), plan.k);
                break;
            case ClusteringSource::BsgcWeight:
                model.clusterings[l] = bsgc(weight_similarity(w), plan.k,
                                            mix_seed(plan.seed, kSaltBsgc + l));
                break;
            case ClusteringSource::BsgcGradient:
                model.clusterings[l] = bsgc(gradient_similarity(traces[l]), plan.k,
                                            mix_seed(plan.seed, kSaltBsgc + l));
                break;
        }
    }
}

Dataset train_eval_subset(const Dataset& train_set, std::size_t cap) {
    if (cap == 0 || cap >= train_set.size()) return train_set;
    Dataset sub;
    sub.split = train_set.split;
    sub.n_classes = train_set.n_classes;
    sub.features = Matrix(cap, train_set.features.cols());
    sub.labels.assign(train_set.labels.begin(),
                      train_set.labels.begin() + static_cast<std::ptrdiff_t>(cap));
    for (std::size_t i = 0; i < cap; ++i) {
        for (std::size_t j = 0; j < train_set.features.cols(); ++j) {
            sub.features(i, j) = train_set.features(i, j);
        }
    }
    return sub;
}

EvalRecord make_record(const MlpModel& model, const TrainPlan& plan, long long step,
                       const Dataset& train_eval, const Dataset& test_set) {
    EvalRecord rec;
    rec.step = step;
    const Evaluation tr = evaluate(model, train_eval);
    const Evaluation te = evaluate(model, test_set);
    rec.ce_loss = tr.mean_ce;
    rec.train_acc = tr.accuracy;
    rec.test_acc = te.accuracy;
    double reg = 0.0;
    for (int u : plan.clustered_layers) {
        const auto l = static_cast<std::size_t>(u);
        const double c = clusterability(model.weights[l], *model.clusterings[l]).c;
        rec.layer_clusterability.push_back(c);
        reg += 1.0 - c;
    }
    rec.eff_loss = rec.ce_loss + plan.lambda * reg;
    return rec;
}

}  // namespace

TrainResult train(const TrainPlan& plan, const Dataset& train_set, const Dataset& test_set) {
    plan.validate();
    if (train_set.size() == 0 || test_set.size() == 0) {
        throw std::domain_error("train: empty dataset");
    }
    if (train_set.features.cols() != static_cast<std::size_t>(plan.dims.front())) {
        throw std::domain_error("train: dataset width " +
                                std::to_string(train_set.features.cols()) +
                                " does not match input width " +
                                std::to_string(plan.dims.front()));
    }

    TrainResult result;
    result.model = mlp_init(plan.dims, mix_seed(plan.seed, kSaltInit));
    result.history.clustered_layers = plan.clustered_layers;

    const bool record_trace =
        plan.record_grad_trace || plan.clustering_source == ClusteringSource::BsgcGradient;
    if (record_trace) {
        for (const Matrix& w : result.model.weights) {
            result.traces.emplace_back(w.rows(), w.cols());
        }
    }

    AdamState adam = adam_init(result.model, plan.lr);
    const Dataset train_eval = train_eval_subset(train_set, plan.eval_train_cap);

    bool clustering_done = false;
    long long step = 0;
    auto select_and_record = [&] {
        select_clusterings(result.model, plan, result.traces);
        clustering_done = true;
        result.history.records.push_back(
            make_record(result.model, plan, step, train_eval, test_set));
    };

    for (int epoch = 0; epoch < plan.epochs; ++epoch) {
        for (const Batch& batch : batches(train_set, plan.batch_size, epoch, plan.seed)) {
            if (!clustering_done && step >= plan.warmup_steps) select_and_record();

            std::vector<Matrix> grads = backward(result.model, batch.features, batch.labels);
            if (record_trace && !clustering_done) {
                for (std::size_t l = 0; l < grads.size(); ++l) {
                    record_gradient_step(result.traces[l], grads[l]);
                }
            }
            if (clustering_done && plan.lambda > 0.0) {
                for (int u : plan.clustered_layers) {
                    const auto l = static_cast<std::size_t>(u);
                    const Matrix reg_grad =
                        clusterability_grad(result.model.weights[l], *result.model.clusterings[l]);
                    for (std::size_t i = 0; i < reg_grad.rows(); ++i) {
                        for (std::size_t j = 0; j < reg_grad.cols(); ++j) {
                            grads[l](i, j) += plan.lambda * reg_grad(i, j);
                        }
                    }
                }
            }
            adam_step(adam, result.model, grads);
            ++step;

            if (clustering_done && step % plan.eval_every == 0) {
                result.history.records.push_back(
                    make_record(result.model, plan, step, train_eval, test_set));
            }
        }
    }
    if (!clustering_done) select_and_record();
    if (result.history.records.back().step != step) {
        result.history.records.push_back(
            make_record(result.model, plan, step, train_eval, test_set));
    }
    return result;
}

Evaluation evaluate(const MlpModel& model, const Dataset& dataset) {
    if (dataset.size() == 0) throw std::domain_error("evaluate: empty dataset");
    constexpr std::size_t kChunk = 512;

    Evaluation out;
    std::vector<long long> per_class_total(static_cast<std::size_t>(dataset.n_classes), 0);
    std::vector<long long> per_class_correct(static_cast<std::size_t>(dataset.n_classes), 0);
    long long correct = 0;
    double loss_sum = 0.0;

    const std::size_t n = dataset.size();
    const std::size_t width = dataset.features.cols();
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t count = std::min(kChunk, n - start);
        Matrix chunk(count, width);
        for (std::size_t r = 0; r < count; ++r) {
            for (std::size_t j = 0; j < width; ++j) {
                chunk(r, j) = dataset.features(start + r, j);
            }
        }
        const Matrix logits = forward(model, chunk);
        for (std::size_t r = 0; r < count; ++r) {
            const int y = dataset.labels[start + r];
            std::size_t arg = 0;
            double best = logits(r, 0);
            double zmax = logits(r, 0);
            for (std::size_t c = 1; c < logits.cols(); ++c) {
                if (logits(r, c) > best) {
                    best = logits(r, c);
                    arg = c;
                }
                zmax = std::max(zmax, logits(r, c));
            }
            double sum = 0.0;
            for (std::size_t c = 0; c < logits.cols(); ++c) {
                sum += std::exp(logits(r, c) - zmax);
            }
            loss_sum += std::log(sum) - (logits(r, static_cast<std::size_t>(y)) - zmax);

            ++per_class_total[static_cast<std::size_t>(y)];
            if (arg == static_cast<std::size_t>(y)) {
                ++correct;
                ++per_class_correct[static_cast<std::size_t>(y)];
            }
        }
    }

    out.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    out.mean_ce = loss_sum / static_cast<double>(n);
    out.per_class.resize(static_cast<std::size_t>(dataset.n_classes), 0.0);
    for (std::size_t c = 0; c < out.per_class.size(); ++c) {
        if (per_class_total[c] > 0) {
            out.per_class[c] =
                static_cast<double>(per_class_correct[c]) / static_cast<double>(per_class_total[c]);
        }
    }
    return out;
}

double max_clusterability_sweep(const MlpModel& model, int layer, const TrainPlan& plan,
                                const Dataset& train_set, const Dataset& test_set,
                                const SweepConfig& config) {
    if (layer < 0 || static_cast<std::size_t>(layer) >= model.layer_count()) {
        throw std::domain_error("max_clusterability_sweep: layer " + std::to_string(layer) +
                                " out of range");
    }
    const auto l = static_cast<std::size_t>(layer);
    if (l >= model.clusterings.size() || !model.clusterings[l]) {
        throw std::domain_error("max_clusterability_sweep: layer " + std::to_string(layer) +
                                " has no clustering");
    }

    double best = clusterability(model.weights[l], *model.clusterings[l]).c;
    if (best >= 1.0 || plan.lambda == 0.0) return best;

    const double baseline_acc = evaluate(model, test_set).accuracy;
    MlpModel work = model;
    AdamState adam = adam_init(work, plan.lr);

    std::vector<double> window;
    int step = 0;
    bool degraded = false;
    // epoch indices continue past the training run so the shuffles differ
    for (int epoch = plan.epochs; !degraded && step < config.max_steps; ++epoch) {
        for (const Batch& batch : batches(train_set, plan.batch_size, epoch, plan.seed)) {
            std::vector<Matrix> grads = backward(work, batch.features, batch.labels);
            const Matrix reg_grad = clusterability_grad(work.weights[l], *work.clusterings[l]);
            for (std::size_t i = 0; i < reg_grad.rows(); ++i) {
                for (std::size_t j = 0; j < reg_grad.cols(); ++j) {
                    grads[l](i, j) += plan.lambda * reg_grad(i, j);
                }
            }
            adam_step(adam, work, grads);
            ++step;

            if (step % config.eval_every == 0 || step >= config.max_steps) {
                const double c_now = clusterability(work.weights[l], *work.clusterings[l]).c;
                const double acc = evaluate(work, test_set).accuracy;
                if (acc < baseline_acc - config.tolerance) {
                    degraded = true;
                    break;
                }
                if (c_now > best) best = c_now;
                window.push_back(c_now);
                if (window.size() >= static_cast<std::size_t>(config.plateau_window) + 1) {
                    const std::size_t first =
                        window.size() - static_cast<std::size_t>(config.plateau_window) - 1;
                    double gain = 0.0;
                    for (std::size_t w = first + 1; w < window.size(); ++w) {
                        gain = std::max(gain, window[w] - window[first]);
                    }
                    if (gain <= config.plateau_eps) return best;
                }
                if (best >= 1.0) return best;
            }
            if (step >= config.max_steps) break;
        }
    }
    return best;
}

}  // namespace clusterlab
