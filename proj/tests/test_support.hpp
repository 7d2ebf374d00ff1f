#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "qnet/io.hpp"

namespace qnet_test {

// The simulation study model: columns [4,3,2,4], standard normal machines
// except a mean-2 machine at (2,2) and a variance-4 machine at (1,3).
inline qnet::QualityModel study_model() {
    const qnet::NetworkTopology topo = qnet::validate_topology({4, 3, 2, 4});
    qnet::QualityModel model(topo, qnet::NodeDistribution(qnet::GaussianDist{0.0, 1.0}));
    model.set_node(2, 2, qnet::NodeDistribution(qnet::GaussianDist{2.0, 1.0}));
    model.set_node(1, 3, qnet::NodeDistribution(qnet::GaussianDist{0.0, 4.0}));
    return model;
}

inline std::string study_model_json() {
    return R"({
  "columns": [4, 3, 2, 4],
  "default": {"kind": "gaussian", "mean": 0, "var": 1},
  "nodes": [
    {"col": 2, "row": 2, "dist": {"kind": "gaussian", "mean": 2, "var": 1}},
    {"col": 3, "row": 1, "dist": {"kind": "gaussian", "mean": 0, "var": 4}}
  ]
})";
}

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / ("qnet_test_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(counter_++));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

    std::filesystem::path write_file(const std::string& name, const std::string& content) const {
        auto p = path_ / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string qnet_binary() {
    if (const char* env = std::getenv("QNET_BIN")) return env;
#ifdef QNET_DEFAULT_BIN
    return QNET_DEFAULT_BIN;
#else
    return "qnet";
#endif
}

}  // namespace qnet_test
