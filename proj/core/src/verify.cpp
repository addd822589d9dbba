#include "wander/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wander {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::vector<cplx> boundary_points(const Region& r, int count) {
    std::vector<cplx> out;
    for (const auto& c : r.boundary_curves(count)) out.insert(out.end(), c.begin(), c.end());
    return out;
}

std::vector<cplx> set_samples(const Region& K, int boundary, int grid) {
    auto pts = boundary_points(K, boundary);
    auto in = K.interior_grid(grid);
    pts.insert(pts.end(), in.begin(), in.end());
    return pts;
}

void label(OrbitStep& st, const LabelRules& r) {
    double sd = r.D.signed_distance(st.z);
    if (std::abs(sd) < r.margin) {
        st.label = "indeterminate";
        return;
    }
    if (sd > 0) {
        st.label = r.Dhat && r.Dhat->contains(st.z) ? "Dhat" : "D";
        return;
    }
    if (r.A.contains(st.z)) {
        st.label = "A";
        return;
    }
    int k = static_cast<int>(std::floor(st.z.real()));
    for (int c : {k, k - 1})
        if (c >= 0 && c <= r.max_band && r.B0.translated(double(c)).contains(st.z)) {
            st.label = "band";
            st.band = c;
            return;
        }
    st.label = "other";
}

}  // namespace

LabelRules LabelRules::from(const Construction& ctx) {
    const auto& c = ctx.config.constants;
    double eps = ctx.stages.empty() ? 0.0 : ctx.stages.back().eps;
    int J = ctx.J();
    long long mJ = ctx.schedule.m(std::max(J, 0) + 1);
    return {c.D(), c.B0(), c.A(), std::nullopt, 2 * eps, double(ctx.schedule.m(std::max(J, 0))) + 10.0,
            static_cast<int>(mJ) + 1};
}

OrbitLog iterate(const Polynomial& f, cplx z, long long steps, const LabelRules* rules, const Schedule* s) {
    OrbitLog log;
    log.seed = z;
    log.horizon = steps;
    for (long long n = 0; n <= steps; ++n) {
        OrbitStep st;
        st.n = n;
        st.z = z;
        if (rules) {
            label(st, *rules);
            if (s && n >= 1) {
                st.expected = in_D(*s, n);
                if (st.label != "indeterminate") st.match = (st.label == "D" || st.label == "Dhat") == *st.expected;
            }
        }
        log.steps.push_back(st);
        if (n == steps) break;
        double bail = rules ? rules->bailout : inf;
        if (!(std::abs(z) <= bail)) {
            log.escaped = true;
            break;
        }
        z = f(z);
    }
    return log;
}

std::string orbit_csv(const OrbitLog& log) {
    std::ostringstream os;
    os.precision(17);
    os << "n,re,im,label,expected,match\n";
    for (const auto& s : log.steps) {
        std::string lab = s.label == "band" ? "band" + std::to_string(s.band) : s.label;
        os << s.n << ',' << s.z.real() << ',' << s.z.imag() << ',' << lab << ','
           << (s.expected ? (*s.expected ? "D" : "notD") : "") << ',' << (s.match ? 1 : 0) << '\n';
    }
    return os.str();
}

nlohmann::json Report::to_json() const {
    return {{"name", name},           {"pass", pass},
            {"checked", checked},     {"failures", failures},
            {"indeterminate", indeterminate}, {"worst_margin", worst_margin},
            {"notes", notes}};
}

PointCloud grid_seeds(const Region& K, int count) {
    PointCloud pc;
    for (int n = 4; static_cast<int>(pc.points.size()) < count && n <= 4096; n += 2) pc.points = K.interior_grid(n);
    Box b = K.bbox();
    pc.spacing = std::max(b.x1 - b.x0, b.y1 - b.y0) / std::sqrt(double(pc.points.size()));
    return pc;
}

Report verify_schedule(const Construction& ctx, int j, const PointCloud& seeds, long long horizon) {
    Report r;
    r.name = "schedule itinerary of K_" + std::to_string(j);
    r.worst_margin = inf;
    const Polynomial& f = ctx.f();
    LabelRules rules = LabelRules::from(ctx);
    for (auto z : seeds.points) {
        auto log = iterate(f, z, horizon, &rules, &ctx.schedule);
        for (const auto& st : log.steps) {
            if (st.n == 0) continue;
            ++r.checked;
            if (st.label == "indeterminate") ++r.indeterminate;
            else if (!st.match) ++r.failures;
        }
        if (log.escaped && static_cast<long long>(log.steps.size()) <= horizon) {
            ++r.failures;
            r.notes.push_back("seed escaped before the horizon");
        }
    }
    // dichotomy on the whole image set
    Region K = nested_compacts(ctx.seed, j).K;
    auto pts = set_samples(K, ctx.config.boundary_samples, ctx.config.interior_grid);
    double tol = rules.margin;
    for (long long l = 1; l <= horizon; ++l) {
        for (auto& z : pts) z = f(z);
        double lo = inf, hi = -inf;
        for (auto z : pts) {
            double sd = ctx.config.constants.D().signed_distance(z);
            lo = std::min(lo, sd);
            hi = std::max(hi, sd);
        }
        bool inside = lo > tol, outside = hi < -tol;
        double m = inside ? lo - tol : (outside ? -hi - tol : std::max(lo, -hi) - tol);
        r.worst_margin = std::min(r.worst_margin, m);
        if (!(inside || outside)) {
            ++r.failures;
            r.notes.push_back("iterate " + std::to_string(l) + " straddles the boundary of D");
        }
        if (inside != in_D(ctx.schedule, l)) {
            ++r.failures;
            r.notes.push_back("iterate " + std::to_string(l) + " set disagrees with the schedule");
        }
    }
    r.pass = r.failures == 0;
    return r;
}

Report verify_attractor(const Construction& ctx) {
    Report r;
    r.name = "attractor";
    const auto& c = ctx.config.constants;
    const Polynomial& f = ctx.f();
    double eps = ctx.stages.back().eps;
    Region target = Region::disk(-0.25, 1.0 / 18.0 + 2 * eps);
    double m = inf;
    for (auto z : set_samples(c.A(), ctx.config.boundary_samples, ctx.config.interior_grid)) {
        m = std::min(m, target.signed_distance(f(z)));
        ++r.checked;
    }
    r.notes.push_back("f(A) margin in D(-1/4, 1/18 + 2 eps_J): " + std::to_string(m));
    double mp = inf;
    for (int j = 1; j <= ctx.J(); ++j) {
        auto P = nested_compacts(ctx.seed, j - 1).P;
        for (auto z : forward(f, P.points, cumulative_N(ctx.schedule, j) + 1)) {
            mp = std::min(mp, c.A().signed_distance(z));
            ++r.checked;
        }
    }
    if (ctx.J() >= 1) r.notes.push_back("P cloud margin in A: " + std::to_string(mp));
    r.worst_margin = std::min(m, mp);
    r.pass = r.worst_margin > 0;
    if (!r.pass) r.failures = 1;
    return r;
}

Report verify_escape_and_halfplane(const Construction& ctx, int j) {
    Report r;
    r.name = "escape and half-plane for K_" + std::to_string(j);
    const Polynomial& f = ctx.f();
    double tol = 2 * ctx.stages.back().eps;
    Region K = nested_compacts(ctx.seed, j).K;
    auto pts = set_samples(K, ctx.config.boundary_samples, ctx.config.interior_grid);
    long long N = cumulative_N(ctx.schedule, j + 1);
    double rad = j == 0 ? 0.0 : double(ctx.schedule.m(j) - 1);
    double re_min = inf;
    for (auto z : pts) re_min = std::min(re_min, z.real());
    for (long long l = 1; l <= N; ++l) {
        for (auto& z : pts) z = f(z);
        for (auto z : pts) re_min = std::min(re_min, z.real());
    }
    double esc = inf;
    for (auto z : pts) esc = std::min(esc, std::abs(z) - rad);
    r.checked = static_cast<long long>(pts.size());
    double m1 = esc - tol, m2 = re_min + 1.0 - tol;
    r.notes.push_back("escape margin outside Delta_j: " + std::to_string(m1));
    r.notes.push_back("half-plane margin Re > -1: " + std::to_string(m2));
    r.worst_margin = std::min(m1, m2);
    r.pass = m1 > 0 && m2 > 0;
    r.failures = (m1 > 0 ? 0 : 1) + (m2 > 0 ? 0 : 1);
    return r;
}

CMeasurement measure_C_for(const Construction& ctx, int j, const Region& Dhat) {
    CMeasurement out;
    const Polynomial& f = ctx.f();
    const auto& s = ctx.schedule;
    Region K = nested_compacts(ctx.seed, j).K;
    auto pts = set_samples(K, ctx.config.boundary_samples / 4, ctx.config.interior_grid / 2);
    long long N = cumulative_N(s, j + 1);
    std::vector<bool> in_hat(N + 1, false);
    for (long long l = 1; l <= N; ++l) {
        for (auto& z : pts) z = f(z);
        in_hat[l] = std::all_of(pts.begin(), pts.end(), [&](cplx z) { return Dhat.contains(z); });
    }
    long long lo_exact = std::numeric_limits<long long>::max(), hi_exact = -1, bound = 0;
    for (long long p = 0; p <= j && cumulative_N(s, p) + s.n(p + 1) <= N; ++p) {
        CMeasurement::Block b;
        b.p = p;
        b.n = s.n(p + 1);
        if (b.n == 0) continue;
        long long start = cumulative_N(s, p);
        bool seen_out = false;
        for (long long l = start + 1; l <= start + b.n; ++l) {
            if (in_hat[l]) {
                ++b.inside;
                if (seen_out) b.prefix = false;
            } else {
                seen_out = true;
            }
        }
        b.lower = b.n - b.inside;
        b.exact = b.inside > 0;
        if (b.exact) {
            lo_exact = std::min(lo_exact, b.lower);
            hi_exact = std::max(hi_exact, b.lower);
        } else {
            bound = std::max(bound, b.lower);
        }
        out.consistent = out.consistent && b.prefix;
        out.blocks.push_back(b);
    }
    if (hi_exact >= 0) {
        out.spread = hi_exact - lo_exact;
        out.consistent = out.consistent && out.spread <= 1 && bound <= hi_exact + 1;
        out.C = std::max(hi_exact, bound);
    } else {
        out.C = bound;
    }
    return out;
}

std::vector<Rational> empirical_density(const OrbitLog& log, const Region& target) {
    std::vector<Rational> out;
    long long hits = 0, k = 0;
    for (const auto& st : log.steps) {
        if (st.n == 0) continue;
        ++k;
        if (target.contains(st.z)) ++hits;
        out.emplace_back(hits, k);
    }
    return out;
}

std::vector<std::uint8_t> render(const Construction& ctx, const Viewport& view, int width, int height, int budget) {
    if (width < 1 || height < 1) throw std::invalid_argument("render needs a positive resolution");
    std::string header = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    std::vector<std::uint8_t> img(header.begin(), header.end());
    img.reserve(img.size() + 3ull * width * height);
    const Polynomial& f = ctx.f();
    LabelRules rules = LabelRules::from(ctx);
    Region K0 = nested_compacts(ctx.seed, 0).K;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double re = view.x0 + (view.x1 - view.x0) * (x + 0.5) / width;
            double im = view.y1 - (view.y1 - view.y0) * (y + 0.5) / height;
            cplx z(re, im);
            std::uint8_t rgb[3] = {20, 20, 28};
            if (budget > 0 && K0.contains(z)) {
                rgb[0] = 250, rgb[1] = 200, rgb[2] = 40;
            } else {
                int n = 0;
                bool absorbed = false;
                for (; n < budget; ++n) {
                    if (!(std::abs(z) <= rules.bailout)) break;
                    if (n > 0 && rules.A.contains(z)) {
                        absorbed = true;
                        break;
                    }
                    z = f(z);
                }
                if (absorbed) {
                    rgb[0] = 40, rgb[1] = static_cast<std::uint8_t>(120 + 10 * std::min(n, 13)), rgb[2] = 90;
                } else if (n < budget) {
                    auto t = static_cast<std::uint8_t>(255 - std::min(n, 24) * 9);
                    rgb[0] = 60, rgb[1] = 80, rgb[2] = t;
                }
            }
            img.insert(img.end(), rgb, rgb + 3);
        }
    return img;
}

}  // namespace wander
