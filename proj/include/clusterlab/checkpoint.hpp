#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "clusterlab/bsgc.hpp"
#include "clusterlab/mlp.hpp"
#include "clusterlab/trainer.hpp"

namespace clusterlab {

// Raised on any load failure; the message names the file and the offending
// field.
struct CheckpointError : std::runtime_error {
    explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

struct Checkpoint {
    MlpModel model;
    TrainPlan plan;
    TrainHistory history;
    std::vector<GradTrace> traces;  // empty when the run recorded none
};

// Single UTF-8 JSON document: format_version 1, dims, layers as
// {rows, cols, row_major_weights}, orientation "input_by_output",
// clusterings, masks, plan, history, and grad_traces when present.
// Weights round-trip bitwise: the serializer emits the shortest decimal
// that parses back to the same 64-bit value.
void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace clusterlab
