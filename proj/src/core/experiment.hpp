#pragma once

#include <memory>
#include <string>

#include "core/deeponet.hpp"

namespace don {

const char* version();

// Builds an operator from its JSON description (see README for the schema).
std::unique_ptr<Operator> operator_from_json(const std::string& text);

// Serializes a trained DeepONet (branch checkpoint per the Mlp JSON format,
// trunk descriptor, sensor locations) and restores it.
std::string deeponet_to_json(const DeepOnet& net);
DeepOnet deeponet_from_json(const std::string& text);

// Runs one tool given its JSON config, writing outputs under out_dir.
// Returns the manifest JSON. Tools: sample, oracle, encdec-error, spectrum,
// train, evaluate, emulate, experiment.
std::string run_tool(const std::string& config_json, const std::string& out_dir, int threads = 1);

// 64-bit FNV-1a of the canonical config dump, zero-padded hex.
std::string config_hash(const std::string& canonical_json);

}  // namespace don
