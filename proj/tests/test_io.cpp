#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "fvrf/io.hpp"
#include "fvrf/rng.hpp"

using namespace fvrf;

namespace {

std::string temp_dir(const char* tag) {
    auto dir = std::filesystem::temp_directory_path() / (std::string("fvrf_io_") + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("tensor files round-trip") {
    std::string dir = temp_dir("tensor");
    std::vector<double> data = draw_normals(1, 0, 24);
    write_tensor(dir + "/t.bin", {2, 3, 4}, data);
    TensorFile t = read_tensor(dir + "/t.bin");
    CHECK(t.dims == std::vector<uint64_t>{2, 3, 4});
    CHECK(t.data == data);
}

TEST_CASE("1D datasets carry the duplicated endpoint on disk") {
    std::string dir = temp_dir("ds1d");
    Dataset ds;
    ds.grid = make_grid1d(16);
    ds.n = 3;
    ds.inputs = draw_normals(2, 0, 3 * 16);
    ds.outputs = draw_normals(2, 1, 3 * 16);
    ds.manifest = {{"pde", "burgers"}};
    save_dataset(ds, dir);

    TensorFile raw = read_tensor(dir + "/inputs.bin");
    CHECK(raw.dims == std::vector<uint64_t>{3, 17});
    for (int i = 0; i < 3; ++i)
        CHECK(raw.data[static_cast<size_t>(i) * 17 + 16] == raw.data[static_cast<size_t>(i) * 17]);

    Dataset back = load_dataset(dir);
    CHECK(back.n == 3);
    CHECK(back.inputs == ds.inputs);
    CHECK(back.outputs == ds.outputs);
    CHECK(std::get<Grid1D>(back.grid).n_unique == 16);
}

TEST_CASE("digest verification catches corruption") {
    std::string dir = temp_dir("digest");
    Dataset ds;
    ds.grid = make_grid1d(16);
    ds.n = 1;
    ds.inputs = draw_normals(3, 0, 16);
    ds.outputs = draw_normals(3, 1, 16);
    save_dataset(ds, dir);

    // flip one payload byte behind the manifest's back
    std::FILE* f = std::fopen((dir + "/inputs.bin").c_str(), "rb+");
    REQUIRE(f != nullptr);
    std::fseek(f, 40, SEEK_SET);
    int c = std::fgetc(f);
    std::fseek(f, 40, SEEK_SET);
    std::fputc(c ^ 0xff, f);
    std::fclose(f);
    CHECK_THROWS_AS((void)load_dataset(dir), ConfigError);
}

TEST_CASE("dataset restriction produces a valid coarser dataset") {
    Dataset ds;
    ds.grid = make_grid2d(33);
    ds.n = 2;
    ds.inputs = draw_normals(4, 0, 2 * 33 * 33);
    ds.outputs = draw_normals(4, 1, 2 * 33 * 33);
    Dataset c = restrict_dataset(ds, 2);
    CHECK(std::get<Grid2D>(c.grid).r == 17);
    CHECK(c.n == 2);
    GridFunction f0 = c.input(0);
    GridFunction expect = restrict_function(ds.input(0), 2);
    CHECK(f0.values == expect.values);
}
