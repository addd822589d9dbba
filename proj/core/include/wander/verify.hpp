#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wander/driver.hpp"

namespace wander {

struct LabelRules {
    Region D;
    Region B0;
    Region A;
    std::optional<Region> Dhat;
    double margin = 0.0;  // points this close to the boundary of D are indeterminate
    double bailout = 12.0;
    int max_band = 16;

    static LabelRules from(const Construction& ctx);
};

struct OrbitStep {
    long long n = 0;
    cplx z{};
    std::string label;              // D, Dhat, band, A, other, indeterminate
    int band = -1;                  // k when the label is band
    std::optional<bool> expected;   // schedule says in D
    bool match = true;
};

struct OrbitLog {
    cplx seed{};
    long long horizon = 0;
    bool escaped = false;
    std::vector<OrbitStep> steps;  // steps[0] is the seed itself
};

OrbitLog iterate(const Polynomial& f, cplx z, long long steps, const LabelRules* rules = nullptr,
                 const Schedule* s = nullptr);
std::string orbit_csv(const OrbitLog& log);

struct Report {
    std::string name;
    bool pass = true;
    long long checked = 0;
    long long failures = 0;
    long long indeterminate = 0;
    double worst_margin = 0.0;
    std::vector<std::string> notes;

    nlohmann::json to_json() const;
};

// At least `count` seeds from a square grid over K.
PointCloud grid_seeds(const Region& K, int count);

Report verify_schedule(const Construction& ctx, int j, const PointCloud& seeds, long long horizon);
Report verify_attractor(const Construction& ctx);
Report verify_escape_and_halfplane(const Construction& ctx, int j);

struct CMeasurement {
    struct Block {
        long long p = 0;
        long long n = 0;
        long long inside = 0;  // leading iterates of the block inside Dhat
        bool prefix = true;    // inside iterates form an initial segment
        long long lower = 0;   // C >= lower
        bool exact = false;    // C == lower when some iterate is inside
    };
    std::vector<Block> blocks;
    long long C = 0;           // smallest value consistent with every block
    long long spread = 0;      // max - min over exact blocks
    bool consistent = true;    // spread <= 1 and prefixes hold
};

CMeasurement measure_C_for(const Construction& ctx, int j, const Region& Dhat);

// Delta(k) for k = 1..horizon: share of iterates 1..k in target.
std::vector<Rational> empirical_density(const OrbitLog& log, const Region& target);

struct Viewport {
    double x0 = -0.5, x1 = 0.5, y0 = -0.5, y1 = 0.5;
};

// Portable pixmap (P6) classifying each pixel by where its orbit goes.
std::vector<std::uint8_t> render(const Construction& ctx, const Viewport& view, int width, int height, int budget);

}  // namespace wander
