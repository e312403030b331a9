#include "clusterlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace clusterlab {

namespace {

constexpr std::size_t kChunkRows = 512;

std::vector<int> predict(const MlpModel& model, const Dataset& dataset,
                         const ClusterMask* mask) {
    const std::size_t n = dataset.size();
    const std::size_t width = dataset.features.cols();
    std::vector<int> preds(n);
    for (std::size_t start = 0; start < n; start += kChunkRows) {
        const std::size_t count = std::min(kChunkRows, n - start);
        Matrix chunk(count, width);
        for (std::size_t r = 0; r < count; ++r) {
            for (std::size_t j = 0; j < width; ++j) chunk(r, j) = dataset.features(start + r, j);
        }
        const Matrix logits = forward(model, chunk, nullptr, mask);
        for (std::size_t r = 0; r < count; ++r) {
            std::size_t arg = 0;
            for (std::size_t c = 1; c < logits.cols(); ++c) {
                if (logits(r, c) > logits(r, arg)) arg = c;
            }
            preds[start + r] = static_cast<int>(arg);
        }
    }
    return preds;
}

const BiClustering& layer_clustering(const MlpModel& model, int layer, const char* who) {
    if (layer < 0 || static_cast<std::size_t>(layer) >= model.layer_count()) {
        throw std::domain_error(std::string(who) + ": layer " + std::to_string(layer) +
                                " out of range");
    }
    const auto l = static_cast<std::size_t>(layer);
    if (l >= model.clusterings.size() || !model.clusterings[l]) {
        throw std::domain_error(std::string(who) + ": layer " + std::to_string(layer) +
                                " has no clustering");
    }
    return *model.clusterings[l];
}

}  // namespace

InterventionMatrix intervention_matrix(const MlpModel& model, int layer, InterventionMode mode,
                                       const Dataset& dataset) {
    const BiClustering& clustering = layer_clustering(model, layer, "intervention_matrix");
    if (dataset.size() == 0) throw std::domain_error("intervention_matrix: empty dataset");

    InterventionMatrix out;
    out.mode = mode;
    out.layer = layer;
    out.accuracy = Matrix(static_cast<std::size_t>(clustering.k),
                          static_cast<std::size_t>(dataset.n_classes));

    std::vector<long long> class_total(static_cast<std::size_t>(dataset.n_classes), 0);
    for (int y : dataset.labels) ++class_total[static_cast<std::size_t>(y)];

    for (int c = 0; c < clustering.k; ++c) {
        const ClusterMask mask = intervention_mask(model, layer, c, mode);
        const std::vector<int> preds = predict(model, dataset, &mask);
        std::vector<long long> correct(static_cast<std::size_t>(dataset.n_classes), 0);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            if (preds[i] == dataset.labels[i]) ++correct[static_cast<std::size_t>(preds[i])];
        }
        for (int y = 0; y < dataset.n_classes; ++y) {
            const auto yy = static_cast<std::size_t>(y);
            out.accuracy(static_cast<std::size_t>(c), yy) =
                class_total[yy] > 0
                    ? static_cast<double>(correct[yy]) / static_cast<double>(class_total[yy])
                    : 0.0;
        }
    }
    return out;
}

SufficiencyHistogram sufficiency_histogram(const MlpModel& model, int layer,
                                           const Dataset& dataset) {
    const BiClustering& clustering = layer_clustering(model, layer, "sufficiency_histogram");
    const int k = clustering.k;

    const std::vector<int> plain = predict(model, dataset, nullptr);
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < plain.size(); ++i) {
        if (plain[i] == dataset.labels[i]) eligible.push_back(i);
    }
    if (eligible.empty()) {
        throw std::domain_error("sufficiency_histogram: the model classifies no sample "
                                "correctly, eligible set is empty");
    }

    std::vector<int> sufficient(eligible.size(), 0);
    for (int c = 0; c < k; ++c) {
        const ClusterMask mask = intervention_mask(model, layer, c, InterventionMode::On);
        const std::vector<int> preds = predict(model, dataset, &mask);
        for (std::size_t e = 0; e < eligible.size(); ++e) {
            if (preds[eligible[e]] == dataset.labels[eligible[e]]) ++sufficient[e];
        }
    }

    SufficiencyHistogram hist;
    hist.eligible_count = static_cast<long long>(eligible.size());
    hist.counts.assign(static_cast<std::size_t>(k) + 1, 0);
    for (int s : sufficient) ++hist.counts[static_cast<std::size_t>(s)];
    return hist;
}

double null_dependency(const MlpModel& model, int layer, const Dataset& dataset,
                       int modules_on) {
    const BiClustering& clustering = layer_clustering(model, layer, "null_dependency");
    const int k = clustering.k;
    if (modules_on < 1 || modules_on > k) {
        throw std::domain_error("null_dependency: modules_on = " + std::to_string(modules_on) +
                                " outside [1, " + std::to_string(k) + "]");
    }

    const std::vector<int> plain = predict(model, dataset, nullptr);
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < plain.size(); ++i) {
        if (plain[i] == dataset.labels[i]) eligible.push_back(i);
    }
    if (eligible.empty()) {
        throw std::domain_error("null_dependency: eligible set is empty");
    }

    std::vector<bool> solved(eligible.size(), false);
    // lexicographic enumeration of all size-modules_on cluster subsets
    std::vector<int> subset(static_cast<std::size_t>(modules_on));
    for (int i = 0; i < modules_on; ++i) subset[static_cast<std::size_t>(i)] = i;
    while (true) {
        ClusterMask mask;
        mask.layer = layer;
        mask.keep.resize(clustering.col_assign.size());
        for (std::size_t j = 0; j < mask.keep.size(); ++j) {
            mask.keep[j] = std::find(subset.begin(), subset.end(), clustering.col_assign[j]) !=
                           subset.end();
        }
        const std::vector<int> preds = predict(model, dataset, &mask);
        for (std::size_t e = 0; e < eligible.size(); ++e) {
            if (preds[eligible[e]] == dataset.labels[eligible[e]]) solved[e] = true;
        }

        int pos = modules_on - 1;
        while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == k - modules_on + pos) --pos;
        if (pos < 0) break;
        ++subset[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < modules_on; ++i) {
            subset[static_cast<std::size_t>(i)] = subset[static_cast<std::size_t>(i - 1)] + 1;
        }
    }

    long long unsolved = 0;
    for (bool s : solved) {
        if (!s) ++unsolved;
    }
    return static_cast<double>(unsolved) / static_cast<double>(eligible.size());
}

namespace {

struct GateSet {
    Dataset data;
    double baseline_acc = 0.0;
    double baseline_loss = 0.0;
};

double subset_accuracy(const MlpModel& model, const Dataset& ds) {
    const std::vector<int> preds = predict(model, ds, nullptr);
    long long correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == ds.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(ds.size());
}

double subset_mean_ce(const MlpModel& model, const Dataset& ds) {
    const std::size_t n = ds.size();
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += kChunkRows) {
        const std::size_t count = std::min(kChunkRows, n - start);
        Matrix chunk(count, ds.features.cols());
        for (std::size_t r = 0; r < count; ++r) {
            for (std::size_t j = 0; j < ds.features.cols(); ++j) {
                chunk(r, j) = ds.features(start + r, j);
            }
        }
        const Matrix logits = forward(model, chunk);
        for (std::size_t r = 0; r < count; ++r) {
            const auto y = static_cast<std::size_t>(ds.labels[start + r]);
            double zmax = logits(r, 0);
            for (std::size_t c = 1; c < logits.cols(); ++c) zmax = std::max(zmax, logits(r, c));
            double sum = 0.0;
            for (std::size_t c = 0; c < logits.cols(); ++c) sum += std::exp(logits(r, c) - zmax);
            total += std::log(sum) - (logits(r, y) - zmax);
        }
    }
    return total / static_cast<double>(n);
}

GateSet build_gate_set(const MlpModel& model, const Dataset& dataset, int label,
                       const EcsConfig& config) {
    if (label < 0 || label >= dataset.n_classes) {
        throw std::domain_error("effective_circuit: label " + std::to_string(label) +
                                " out of [0, " + std::to_string(dataset.n_classes) + ")");
    }
    GateSet gate;
    if (config.include_negatives) {
        gate.data = dataset;
    } else {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            if (dataset.labels[i] == label) keep.push_back(i);
        }
        if (keep.empty()) {
            throw std::domain_error("effective_circuit: no samples with label " +
                                    std::to_string(label));
        }
        gate.data.split = dataset.split;
        gate.data.n_classes = dataset.n_classes;
        gate.data.features = Matrix(keep.size(), dataset.features.cols());
        gate.data.labels.resize(keep.size());
        for (std::size_t r = 0; r < keep.size(); ++r) {
            for (std::size_t j = 0; j < dataset.features.cols(); ++j) {
                gate.data.features(r, j) = dataset.features(keep[r], j);
            }
            gate.data.labels[r] = dataset.labels[keep[r]];
        }
    }
    gate.baseline_acc = subset_accuracy(model, gate.data);
    gate.baseline_loss = subset_mean_ce(model, gate.data);
    if (gate.baseline_acc <= 0.0) {
        throw std::domain_error("effective_circuit: zero baseline accuracy for label " +
                                std::to_string(label));
    }
    return gate;
}

}  // namespace

EcsReport effective_circuit(const MlpModel& model, const Dataset& dataset, int label,
                            const EcsConfig& config) {
    std::vector<int> prunable = config.prunable_layers;
    if (prunable.empty()) {
        for (std::size_t l = 0; l < model.layer_count(); ++l) prunable.push_back(static_cast<int>(l));
    }
    for (int l : prunable) {
        if (l < 0 || static_cast<std::size_t>(l) >= model.layer_count()) {
            throw std::domain_error("effective_circuit: prunable layer " + std::to_string(l) +
                                    " out of range");
        }
    }

    const GateSet gate = build_gate_set(model, dataset, label, config);
    const double min_acc = gate.baseline_acc - config.accuracy_drop;
    const double max_loss = gate.baseline_loss * (1.0 + config.loss_rise);

    MlpModel work = model;
    const long long total = static_cast<long long>(work.param_count());
    const auto chunk_size = static_cast<std::size_t>(std::max<long long>(
        1, static_cast<long long>(config.chunk_fraction * static_cast<double>(total))));

    EcsReport report;
    report.label = label;
    report.total = total;
    report.config = config;

    struct Pos {
        double mag;
        int layer;
        std::size_t row;
        std::size_t col;
    };

    // Within a pass every candidate is visited exactly once, so a restored
    // chunk stays frozen for the rest of that pass and becomes a candidate
    // again only when the next pass rebuilds the order.
    int pass = 0;
    while (true) {
        ++pass;
        std::vector<Pos> order;
        for (int l : prunable) {
            const Matrix& w = work.weights[static_cast<std::size_t>(l)];
            for (std::size_t i = 0; i < w.rows(); ++i) {
                for (std::size_t j = 0; j < w.cols(); ++j) {
                    if (w(i, j) != 0.0) order.push_back({std::fabs(w(i, j)), l, i, j});
                }
            }
        }
        std::sort(order.begin(), order.end(), [](const Pos& a, const Pos& b) {
            return std::tie(a.mag, a.layer, a.row, a.col) < std::tie(b.mag, b.layer, b.row, b.col);
        });

        EcsPassTrace trace;
        trace.pass = pass;
        for (std::size_t start = 0; start < order.size(); start += chunk_size) {
            const std::size_t count = std::min(chunk_size, order.size() - start);
            std::vector<double> saved(count);
            for (std::size_t t = 0; t < count; ++t) {
                const Pos& p = order[start + t];
                saved[t] = work.weights[static_cast<std::size_t>(p.layer)](p.row, p.col);
                work.weights[static_cast<std::size_t>(p.layer)](p.row, p.col) = 0.0;
            }
            const double acc = subset_accuracy(work, gate.data);
            const bool acc_ok = acc >= min_acc;
            const bool loss_ok = !acc_ok ? false : subset_mean_ce(work, gate.data) <= max_loss;
            if (acc_ok && loss_ok) {
                trace.removed += static_cast<long long>(count);
            } else {
                for (std::size_t t = 0; t < count; ++t) {
                    const Pos& p = order[start + t];
                    work.weights[static_cast<std::size_t>(p.layer)](p.row, p.col) = saved[t];
                }
                trace.restored += static_cast<long long>(count);
            }
        }
        report.trace.push_back(trace);
        if (trace.removed == 0) break;
    }

    long long nonzero = 0;
    for (const Matrix& w : work.weights) {
        for (double x : w.data()) {
            if (x != 0.0) ++nonzero;
        }
    }
    report.nonzero = nonzero;
    report.ecs = static_cast<double>(nonzero) / static_cast<double>(total);
    return report;
}

EcsComparison ecs_compare(const MlpModel& model_a, const MlpModel& model_b,
                          const Dataset& dataset, const EcsConfig& config) {
    EcsComparison out;
    double sum = 0.0;
    for (int label = 0; label < dataset.n_classes; ++label) {
        auto label_ok = [&](const MlpModel& m) {
            try {
                build_gate_set(m, dataset, label, config);
                return true;
            } catch (const std::domain_error&) {
                return false;
            }
        };
        const bool a_ok = label_ok(model_a);
        const bool b_ok = label_ok(model_b);
        if (a_ok != b_ok) {
            throw std::domain_error("ecs_compare: label " + std::to_string(label) +
                                    " is classified by only one model");
        }
        if (!a_ok) {
            throw std::domain_error("ecs_compare: label " + std::to_string(label) +
                                    " is classified by neither model");
        }
        out.reports_a.push_back(effective_circuit(model_a, dataset, label, config));
        out.reports_b.push_back(effective_circuit(model_b, dataset, label, config));
        const double a = out.reports_a.back().ecs;
        const double b = out.reports_b.back().ecs;
        const double pct = 100.0 * (b - a) / a;
        out.pct_increase.push_back(pct);
        sum += pct;
    }
    out.mean_pct_increase = sum / static_cast<double>(dataset.n_classes);
    return out;
}

}  // namespace clusterlab
