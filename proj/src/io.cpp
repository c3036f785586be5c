#include "fvrf/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "fvrf/common.hpp"

namespace fvrf {

namespace {

constexpr char kMagic[4] = {'F', 'V', 'R', 'F'};
constexpr uint32_t kVersion = 1;

void put_u32(std::FILE* f, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    std::fwrite(b, 1, 4, f);
}

void put_u64(std::FILE* f, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    std::fwrite(b, 1, 8, f);
}

uint32_t get_u32(std::FILE* f) {
    unsigned char b[4];
    if (std::fread(b, 1, 4, f) != 4) throw ConfigError("tensor file truncated");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
}

uint64_t get_u64(std::FILE* f) {
    unsigned char b[8];
    if (std::fread(b, 1, 8, f) != 8) throw ConfigError("tensor file truncated");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void write_tensor(const std::string& path, const std::vector<uint64_t>& dims,
                  const std::vector<double>& data) {
    uint64_t total = 1;
    for (uint64_t d : dims) total *= d;
    require(total == data.size(), "write_tensor: dims do not match payload size");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ConfigError("cannot open for writing: " + path);
    std::fwrite(kMagic, 1, 4, f);
    put_u32(f, kVersion);
    put_u32(f, static_cast<uint32_t>(dims.size()));
    for (uint64_t d : dims) put_u64(f, d);
    // Payload is little-endian f64; this code targets little-endian hosts.
    std::fwrite(data.data(), sizeof(double), data.size(), f);
    bool bad = std::ferror(f) != 0;
    std::fclose(f);
    if (bad) throw ConfigError("write failed: " + path);
}

TensorFile read_tensor(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw ConfigError("cannot open for reading: " + path);
    char magic[4];
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kMagic, 4) != 0) {
        std::fclose(f);
        throw ConfigError("bad magic in tensor file: " + path);
    }
    uint32_t version = get_u32(f);
    if (version != kVersion) {
        std::fclose(f);
        throw ConfigError("unsupported tensor version in " + path);
    }
    uint32_t ndim = get_u32(f);
    TensorFile t;
    uint64_t total = 1;
    for (uint32_t i = 0; i < ndim; ++i) {
        t.dims.push_back(get_u64(f));
        total *= t.dims.back();
    }
    t.data.resize(total);
    size_t got = std::fread(t.data.data(), sizeof(double), total, f);
    std::fclose(f);
    if (got != total) throw ConfigError("tensor payload truncated: " + path);
    return t;
}

GridFunction Dataset::input(int i) const {
    int k = nodes();
    GridFunction f{grid, std::vector<double>(inputs.begin() + static_cast<size_t>(i) * k,
                                             inputs.begin() + static_cast<size_t>(i + 1) * k)};
    return f;
}

GridFunction Dataset::output(int i) const {
    int k = nodes();
    GridFunction f{grid, std::vector<double>(outputs.begin() + static_cast<size_t>(i) * k,
                                             outputs.begin() + static_cast<size_t>(i + 1) * k)};
    return f;
}

namespace {

// 1D fields gain the duplicated endpoint on disk.
std::vector<double> to_external(const Dataset& ds, const std::vector<double>& flat) {
    const auto* g1 = std::get_if<Grid1D>(&ds.grid);
    if (!g1) return flat;
    int n_unique = g1->n_unique;
    int k = n_unique + 1;
    std::vector<double> out(static_cast<size_t>(ds.n) * k);
    for (int i = 0; i < ds.n; ++i) {
        const double* src = &flat[static_cast<size_t>(i) * n_unique];
        double* dst = &out[static_cast<size_t>(i) * k];
        std::memcpy(dst, src, sizeof(double) * static_cast<size_t>(n_unique));
        dst[n_unique] = src[0];
    }
    return out;
}

std::vector<double> from_external_1d(const std::vector<double>& flat, int n, int k) {
    int n_unique = k - 1;
    std::vector<double> out(static_cast<size_t>(n) * n_unique);
    for (int i = 0; i < n; ++i) {
        const double* src = &flat[static_cast<size_t>(i) * k];
        double scale = 1.0 + std::fabs(src[0]);
        if (std::fabs(src[0] - src[n_unique]) > 1e-10 * scale)
            throw ConfigError("1D tensor endpoint does not duplicate node 0");
        std::memcpy(&out[static_cast<size_t>(i) * n_unique], src,
                    sizeof(double) * static_cast<size_t>(n_unique));
    }
    return out;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<uint64_t> dims;
    if (const auto* g1 = std::get_if<Grid1D>(&ds.grid)) {
        dims = {static_cast<uint64_t>(ds.n), static_cast<uint64_t>(g1->external_k())};
    } else {
        auto r = static_cast<uint64_t>(std::get<Grid2D>(ds.grid).r);
        dims = {static_cast<uint64_t>(ds.n), r, r};
    }
    std::string in_path = dir + "/inputs.bin";
    std::string out_path = dir + "/outputs.bin";
    write_tensor(in_path, dims, to_external(ds, ds.inputs));
    write_tensor(out_path, dims, to_external(ds, ds.outputs));

    nlohmann::json manifest = ds.manifest;
    manifest["schema"] = "fvrf-dataset-v1";
    manifest["n"] = ds.n;
    manifest["digests"] = {{"inputs.bin", hex64(fnv1a64_file(in_path))},
                           {"outputs.bin", hex64(fnv1a64_file(out_path))}};
    write_json(dir + "/manifest.json", manifest);
}

Dataset load_dataset(const std::string& dir) {
    TensorFile in = read_tensor(dir + "/inputs.bin");
    TensorFile out = read_tensor(dir + "/outputs.bin");
    require(in.dims == out.dims, "inputs/outputs tensor dims differ in " + dir);

    Dataset ds;
    if (in.dims.size() == 2) {
        int k = static_cast<int>(in.dims[1]);
        ds.grid = make_grid1d(k - 1);
        ds.n = static_cast<int>(in.dims[0]);
        ds.inputs = from_external_1d(in.data, ds.n, k);
        ds.outputs = from_external_1d(out.data, ds.n, k);
    } else if (in.dims.size() == 3) {
        require(in.dims[1] == in.dims[2], "2D tensor must be square");
        ds.grid = make_grid2d(static_cast<int>(in.dims[1]));
        ds.n = static_cast<int>(in.dims[0]);
        ds.inputs = std::move(in.data);
        ds.outputs = std::move(out.data);
    } else {
        throw ConfigError("unsupported tensor rank in " + dir);
    }

    std::string manifest_path = dir + "/manifest.json";
    if (std::filesystem::exists(manifest_path)) {
        ds.manifest = read_json(manifest_path);
        if (ds.manifest.contains("digests")) {
            const auto& d = ds.manifest["digests"];
            if (d.value("inputs.bin", "") != hex64(fnv1a64_file(dir + "/inputs.bin")) ||
                d.value("outputs.bin", "") != hex64(fnv1a64_file(dir + "/outputs.bin")))
                throw ConfigError("dataset digest mismatch in " + dir);
        }
    }
    return ds;
}

Dataset restrict_dataset(const Dataset& ds, int factor) {
    if (factor == 1) return ds;
    Dataset out;
    out.n = ds.n;
    out.manifest = ds.manifest;
    out.manifest["restricted_by"] = factor;
    for (int i = 0; i < ds.n; ++i) {
        GridFunction fi = restrict_function(ds.input(i), factor);
        GridFunction fo = restrict_function(ds.output(i), factor);
        if (i == 0) {
            out.grid = fi.grid;
            out.inputs.reserve(static_cast<size_t>(ds.n) * fi.values.size());
            out.outputs.reserve(static_cast<size_t>(ds.n) * fi.values.size());
        }
        out.inputs.insert(out.inputs.end(), fi.values.begin(), fi.values.end());
        out.outputs.insert(out.outputs.end(), fo.values.begin(), fo.values.end());
    }
    return out;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open for reading: " + path);
    nlohmann::json j;
    f >> j;
    return j;
}

}  // namespace fvrf
