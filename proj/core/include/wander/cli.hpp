#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "wander/verify.hpp"

namespace wander {

struct RunConfig {
    std::string mode;  // build | verify | orbit | density | render
    std::string config_path;
    std::string manifest_path;
    std::string out_dir = ".";
    std::optional<double> lambda;
    std::optional<int> stages;
    long long k = 1000000;       // density horizon
    long long shift = 0;         // density: shifted schedule
    std::optional<cplx> seed;    // orbit start
    std::optional<long long> steps;
    Viewport view;
    int width = 256, height = 256, budget = 64;
    bool quiet = false;
};

// Worker count from WANDER_WORKERS, at least 1.
int worker_count();

// Exit status: 0 success, 1 verification failure, 2 configuration error.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace wander
