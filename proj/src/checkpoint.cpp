#include "clusterlab/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace clusterlab {

namespace {

using nlohmann::json;

const char* source_name(ClusteringSource source) {
    switch (source) {
        case ClusteringSource::Contiguous: return "contiguous";
        case ClusteringSource::BsgcWeight: return "bsgc_weight";
        case ClusteringSource::BsgcGradient: return "bsgc_gradient";
    }
    return "contiguous";
}

ClusteringSource source_from_name(const std::string& name, const std::string& where) {
    if (name == "contiguous") return ClusteringSource::Contiguous;
    if (name == "bsgc_weight") return ClusteringSource::BsgcWeight;
    if (name == "bsgc_gradient") return ClusteringSource::BsgcGradient;
    throw CheckpointError(where + ": unknown clustering_source \"" + name + "\"");
}

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"row_major_weights", m.data()}};
}

Matrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
        !j.contains("row_major_weights")) {
        throw CheckpointError(where + ": expected {rows, cols, row_major_weights}");
    }
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    auto data = j.at("row_major_weights").get<std::vector<double>>();
    if (data.size() != rows * cols) {
        throw CheckpointError(where + ".row_major_weights: expected " +
                              std::to_string(rows * cols) + " values, found " +
                              std::to_string(data.size()));
    }
    try {
        return Matrix(rows, cols, std::move(data));
    } catch (const std::exception& e) {
        throw CheckpointError(where + ": " + e.what());
    }
}

json plan_to_json(const TrainPlan& plan) {
    return json{{"dims", plan.dims},
                {"warmup_steps", plan.warmup_steps},
                {"lambda", plan.lambda},
                {"k", plan.k},
                {"clustered_layers", plan.clustered_layers},
                {"clustering_source", source_name(plan.clustering_source)},
                {"epochs", plan.epochs},
                {"batch_size", plan.batch_size},
                {"lr", plan.lr},
                {"seed", plan.seed},
                {"eval_every", plan.eval_every},
                {"record_grad_trace", plan.record_grad_trace},
                {"allow_output_clustering", plan.allow_output_clustering},
                {"eval_train_cap", plan.eval_train_cap}};
}

TrainPlan plan_from_json(const json& j, const std::string& where) {
    TrainPlan plan;
    plan.dims = j.at("dims").get<std::vector<int>>();
    plan.warmup_steps = j.at("warmup_steps").get<int>();
    plan.lambda = j.at("lambda").get<double>();
    plan.k = j.at("k").get<int>();
    plan.clustered_layers = j.at("clustered_layers").get<std::vector<int>>();
    plan.clustering_source =
        source_from_name(j.at("clustering_source").get<std::string>(), where);
    plan.epochs = j.at("epochs").get<int>();
    plan.batch_size = j.at("batch_size").get<std::size_t>();
    plan.lr = j.at("lr").get<double>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.eval_every = j.at("eval_every").get<int>();
    plan.record_grad_trace = j.at("record_grad_trace").get<bool>();
    plan.allow_output_clustering = j.at("allow_output_clustering").get<bool>();
    plan.eval_train_cap = j.at("eval_train_cap").get<std::size_t>();
    return plan;
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
    const MlpModel& model = checkpoint.model;
    try {
        model.validate();
    } catch (const std::exception& e) {
        throw CheckpointError("checkpoint: " + path + ": refusing to save an invalid model: " +
                              e.what());
    }
    for (const Matrix& w : model.weights) {
        if (!w.all_finite()) {
            throw CheckpointError("checkpoint: " + path +
                                  ": refusing to save non-finite weights");
        }
    }

    json doc;
    doc["format_version"] = 1;
    doc["orientation"] = "input_by_output";
    doc["dims"] = model.dims;
    doc["layers"] = json::array();
    for (const Matrix& w : model.weights) doc["layers"].push_back(matrix_to_json(w));

    doc["clusterings"] = json::array();
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        if (l < model.clusterings.size() && model.clusterings[l]) {
            const BiClustering& c = *model.clusterings[l];
            doc["clusterings"].push_back(
                json{{"k", c.k}, {"row_assign", c.row_assign}, {"col_assign", c.col_assign}});
        } else {
            doc["clusterings"].push_back(nullptr);
        }
    }

    doc["masks"] = json::array();
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        if (l < model.masks.size() && model.masks[l]) {
            std::vector<int> bits(model.masks[l]->size());
            for (std::size_t i = 0; i < bits.size(); ++i) {
                bits[i] = (*model.masks[l]).data()[i] != 0.0 ? 1 : 0;
            }
            doc["masks"].push_back(json{{"rows", model.masks[l]->rows()},
                                        {"cols", model.masks[l]->cols()},
                                        {"bits", bits}});
        } else {
            doc["masks"].push_back(nullptr);
        }
    }

    doc["plan"] = plan_to_json(checkpoint.plan);

    json hist;
    hist["clustered_layers"] = checkpoint.history.clustered_layers;
    hist["records"] = json::array();
    for (const EvalRecord& r : checkpoint.history.records) {
        hist["records"].push_back(json{{"step", r.step},
                                       {"ce_loss", r.ce_loss},
                                       {"eff_loss", r.eff_loss},
                                       {"layer_clusterability", r.layer_clusterability},
                                       {"train_acc", r.train_acc},
                                       {"test_acc", r.test_acc}});
    }
    doc["history"] = hist;

    if (!checkpoint.traces.empty()) {
        doc["grad_traces"] = json::array();
        for (const GradTrace& t : checkpoint.traces) {
            doc["grad_traces"].push_back(json{{"rows", t.accumulator.rows()},
                                              {"cols", t.accumulator.cols()},
                                              {"step_count", t.step_count},
                                              {"accumulator", t.accumulator.data()}});
        }
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("checkpoint: cannot open " + path + " for writing");
    out << doc.dump(1, '\t') << "\n";
    if (!out) throw CheckpointError("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("checkpoint: cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw CheckpointError("checkpoint: " + path + ": " + e.what());
    }

    const std::string at = "checkpoint: " + path;
    try {
        if (!doc.contains("format_version") || !doc.at("format_version").is_number_integer()) {
            throw CheckpointError(at + ": missing format_version");
        }
        const int version = doc.at("format_version").get<int>();
        if (version != 1) {
            throw CheckpointError(at + ": unsupported format_version " +
                                  std::to_string(version));
        }
        if (doc.at("orientation").get<std::string>() != "input_by_output") {
            throw CheckpointError(at + ": unknown orientation \"" +
                                  doc.at("orientation").get<std::string>() + "\"");
        }

        Checkpoint ckpt;
        ckpt.model.dims = doc.at("dims").get<std::vector<int>>();
        const json& layers = doc.at("layers");
        if (!layers.is_array() || layers.size() + 1 != ckpt.model.dims.size()) {
            throw CheckpointError(at + ": layers count does not match dims");
        }
        for (std::size_t l = 0; l < layers.size(); ++l) {
            ckpt.model.weights.push_back(
                matrix_from_json(layers[l], at + ": layers[" + std::to_string(l) + "]"));
        }

        ckpt.model.clusterings.resize(layers.size());
        if (doc.contains("clusterings") && !doc.at("clusterings").is_null()) {
            const json& cs = doc.at("clusterings");
            if (!cs.is_array() || cs.size() != layers.size()) {
                throw CheckpointError(at + ": clusterings count does not match layers");
            }
            for (std::size_t l = 0; l < cs.size(); ++l) {
                if (cs[l].is_null()) continue;
                BiClustering c;
                c.k = cs[l].at("k").get<int>();
                c.row_assign = cs[l].at("row_assign").get<std::vector<int>>();
                c.col_assign = cs[l].at("col_assign").get<std::vector<int>>();
                ckpt.model.clusterings[l] = std::move(c);
            }
        }

        ckpt.model.masks.resize(layers.size());
        if (doc.contains("masks") && !doc.at("masks").is_null()) {
            const json& ms = doc.at("masks");
            if (!ms.is_array() || ms.size() != layers.size()) {
                throw CheckpointError(at + ": masks count does not match layers");
            }
            for (std::size_t l = 0; l < ms.size(); ++l) {
                if (ms[l].is_null()) continue;
                const std::string where = at + ": masks[" + std::to_string(l) + "]";
                const auto rows = ms[l].at("rows").get<std::size_t>();
                const auto cols = ms[l].at("cols").get<std::size_t>();
                const auto bits = ms[l].at("bits").get<std::vector<int>>();
                if (bits.size() != rows * cols) {
                    throw CheckpointError(where + ".bits: expected " +
                                          std::to_string(rows * cols) + " values, found " +
                                          std::to_string(bits.size()));
                }
                Matrix mask(rows, cols);
                for (std::size_t i = 0; i < bits.size(); ++i) {
                    if (bits[i] != 0 && bits[i] != 1) {
                        throw CheckpointError(where + ".bits: non-binary entry " +
                                              std::to_string(bits[i]));
                    }
                    mask.data()[i] = bits[i];
                }
                ckpt.model.masks[l] = std::move(mask);
            }
        }

        ckpt.plan = plan_from_json(doc.at("plan"), at + ": plan");

        const json& hist = doc.at("history");
        ckpt.history.clustered_layers = hist.at("clustered_layers").get<std::vector<int>>();
        for (const json& r : hist.at("records")) {
            EvalRecord rec;
            rec.step = r.at("step").get<long long>();
            rec.ce_loss = r.at("ce_loss").get<double>();
            rec.eff_loss = r.at("eff_loss").get<double>();
            rec.layer_clusterability = r.at("layer_clusterability").get<std::vector<double>>();
            rec.train_acc = r.at("train_acc").get<double>();
            rec.test_acc = r.at("test_acc").get<double>();
            ckpt.history.records.push_back(std::move(rec));
        }

        if (doc.contains("grad_traces") && !doc.at("grad_traces").is_null()) {
            const json& ts = doc.at("grad_traces");
            if (!ts.is_array() || ts.size() != layers.size()) {
                throw CheckpointError(at + ": grad_traces count does not match layers");
            }
            for (std::size_t l = 0; l < ts.size(); ++l) {
                const std::string where = at + ": grad_traces[" + std::to_string(l) + "]";
                const auto rows = ts[l].at("rows").get<std::size_t>();
                const auto cols = ts[l].at("cols").get<std::size_t>();
                const auto acc = ts[l].at("accumulator").get<std::vector<double>>();
                if (acc.size() != rows * cols) {
                    throw CheckpointError(where + ".accumulator: expected " +
                                          std::to_string(rows * cols) + " values, found " +
                                          std::to_string(acc.size()));
                }
                GradTrace trace(rows, cols);
                trace.step_count = ts[l].at("step_count").get<int>();
                for (std::size_t i = 0; i < acc.size(); ++i) trace.accumulator.data()[i] = acc[i];
                ckpt.traces.push_back(std::move(trace));
            }
        }

        try {
            ckpt.model.validate();
        } catch (const std::exception& e) {
            throw CheckpointError(at + ": " + e.what());
        }
        return ckpt;
    } catch (const json::exception& e) {
        throw CheckpointError(at + ": " + e.what());
    }
}

}  // namespace clusterlab
