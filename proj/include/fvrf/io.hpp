#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fvrf/grid.hpp"

namespace fvrf {

// FVRF binary tensor: magic "FVRF", u32 LE version = 1, u32 LE ndim,
// ndim x u64 LE dims, then f64 LE payload, row-major.
struct TensorFile {
    std::vector<uint64_t> dims;
    std::vector<double> data;
};

void write_tensor(const std::string& path, const std::vector<uint64_t>& dims,
                  const std::vector<double>& data);
TensorFile read_tensor(const std::string& path);

// n input/output pairs on a common grid. 1D samples are stored internally on
// the n_unique periodic nodes; files carry K = n_unique + 1 columns with the
// first node duplicated at the end.
struct Dataset {
    Grid grid;
    int n = 0;
    std::vector<double> inputs;   // [n, nodes]
    std::vector<double> outputs;  // [n, nodes]
    nlohmann::json manifest;

    int nodes() const { return num_nodes(grid); }
    GridFunction input(int i) const;
    GridFunction output(int i) const;
};

// Writes inputs.bin, outputs.bin and manifest.json (with payload digests).
void save_dataset(const Dataset& ds, const std::string& dir);

// Loads and verifies the digests recorded in manifest.json.
Dataset load_dataset(const std::string& dir);

Dataset restrict_dataset(const Dataset& ds, int factor);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace fvrf
