#pragma once

#include <string>

#include <json.hpp>

#include "prodhyp/config.hpp"

namespace prodhyp {

// Writes content to path atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

// Deterministic JSON text: keys sorted (nlohmann object order), doubles
// rendered through format_double, trailing newline.
std::string dump_json(const nlohmann::json& j);

nlohmann::json json_double(double v);   // {"approx": "...", "prec": "50-digit"}
nlohmann::json json_rat(const Rat& r);  // {"exact": "p/q"}

// Runs one experiment and writes its output files under out_dir; returns the
// one-line summary (also deterministic).
std::string run_experiment(const Workspace& ws, const Experiment& e,
                           const std::string& out_dir);

}  // namespace prodhyp
