#include "wander/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace wander {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

cplx parse_point(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("points are [x, y] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<cplx> boundary_points(const Region& r, int count) {
    std::vector<cplx> out;
    for (const auto& c : r.boundary_curves(count)) out.insert(out.end(), c.begin(), c.end());
    return out;
}

Region image_hull(const Polynomial& f, long long k, const Region& src, int count) {
    auto curves = src.boundary_curves(count);
    std::vector<Region> parts;
    for (auto& c : curves) parts.push_back(Region::polygonal_hull(forward(f, c, k)));
    return Region::finite_union(std::move(parts));
}

// Samples of the seeds used for perturbation claims: boundary plus a coarse interior grid.
std::vector<cplx> claim_seeds(const Region& K, int count) {
    auto pts = boundary_points(K, count);
    auto inner = K.interior_grid(6);
    pts.insert(pts.end(), inner.begin(), inner.end());
    return pts;
}

// Model orbits of claim seeds. Inside D every correction vanishes to second order at 0, so a
// perturbation there is charged eps (|z| / r1)^2 instead of eps.
struct OrbitStep {
    double piece_margin;
    double slope;
    double radius;                 // |z|, used inside D
    std::optional<double> d_margin;  // signed margin of the scheduled side of D after the step
};

struct SeedOrbit {
    std::vector<OrbitStep> steps;
    bool lost = false;
    double final_margin = inf;
    cplx final_point{};
};

struct OrbitClaim {
    std::vector<SeedOrbit> orbits;
    double r1 = 0.0;

    double at(double eps) const {
        double m = inf;
        for (const auto& o : orbits) {
            if (o.lost) return -inf;
            double dev = 0.0;
            for (const auto& st : o.steps) {
                m = std::min(m, st.piece_margin - dev);
                double w = 1.0;
                if (st.radius + dev < r1) w = std::pow((st.radius + dev) / r1, 2);
                dev = st.slope * dev + eps * w;
                if (st.d_margin) m = std::min(m, *st.d_margin - dev);
            }
            m = std::min(m, o.final_margin - dev);
        }
        return m;
    }
};

OrbitClaim orbit_claim(const PiecewiseModel& model, const std::vector<cplx>& seeds, long long steps,
                       const Region& final_region, const Schedule* s, const Region& D) {
    OrbitClaim out;
    out.r1 = D.radius();
    for (auto z : seeds) {
        SeedOrbit o;
        cplx p = z;
        for (long long l = 0; l < steps; ++l) {
            int idx = model.locate(p);
            if (idx < 0) {
                o.lost = true;
                break;
            }
            const auto& e = model.entries()[idx];
            OrbitStep st{e.region.signed_distance(p), std::abs(e.map.derivative(p)),
                         e.name == "D" ? std::abs(p) : inf, std::nullopt};
            p = e.map(p);
            if (s) {
                double sd = D.signed_distance(p);
                st.d_margin = in_D(*s, l + 1) ? sd : -sd;
            }
            o.steps.push_back(st);
        }
        if (!o.lost) o.final_margin = final_region.signed_distance(p);
        out.orbits.push_back(std::move(o));
    }
    return out;
}

Claim make_claim(std::string name, OrbitClaim c) {
    auto shared = std::make_shared<OrbitClaim>(std::move(c));
    return {std::move(name), [shared](double eps) { return shared->at(eps); }};
}

// Names of the claims that would fail at twice eps.
std::string binding_claims(const std::vector<Claim>& claims, double eps) {
    std::string out;
    for (const auto& c : claims)
        if (!(c.margin(2 * eps) >= 4 * eps)) out += ", limited by " + c.name;
    return out;
}

std::string stage_prefix(int j) { return "s" + std::to_string(j) + "."; }

}  // namespace

// ---------------------------------------------------------------------------------------------
// configuration

Region Shape::region() const {
    switch (kind) {
    case Kind::disk: return Region::disk(center, radius);
    case Kind::square:
        return Region::polygonal_hull({center + cplx(-radius, -radius), center + cplx(radius, -radius),
                                       center + cplx(radius, radius), center + cplx(-radius, radius)});
    case Kind::polygon: return Region::polygonal_hull(vertices);
    }
    throw ConfigError("unknown shape");
}

BuildConfig BuildConfig::defaults() {
    BuildConfig c;
    c.lambda = 1.0;
    c.m_offset = 1;
    c.constants.half_angle = 0.12;
    c.constants.a_radius = 1.0 / 18.0;
    return c;
}

Schedule BuildConfig::schedule() const {
    if (lambda) return lambda_schedule(*lambda, m_offset);
    return Schedule::explicit_lists(n_list, m_list);
}

int BuildConfig::max_degree_for(int j) const {
    if (max_degree.empty()) return 1600;
    return max_degree[std::min<std::size_t>(static_cast<std::size_t>(j), max_degree.size() - 1)];
}

BuildConfig BuildConfig::from_json(const nlohmann::json& j) {
    BuildConfig c = defaults();
    try {
        if (j.contains("lambda") && j.contains("schedule")) throw ConfigError("give either lambda or schedule");
        if (j.contains("lambda")) {
            c.lambda = j.at("lambda").get<double>();
            c.m_offset = j.value("m_offset", c.m_offset);
        } else if (j.contains("schedule")) {
            const auto& s = j.at("schedule");
            if (s.contains("lambda")) {
                c.lambda = s.at("lambda").get<double>();
                c.m_offset = s.value("m_offset", c.m_offset);
            } else {
                c.lambda.reset();
                c.n_list = s.at("n").get<std::vector<long long>>();
                c.m_list = s.at("m").get<std::vector<long long>>();
            }
        }
        c.stages = j.value("stages", c.stages);
        if (j.contains("r1")) c.constants.r1 = j.at("r1").get<double>();
        if (j.contains("constants")) {
            const auto& k = j.at("constants");
            c.constants.r1 = k.value("r1", c.constants.r1);
            c.constants.r2 = k.value("r2", c.constants.r2);
            c.constants.r3 = k.value("r3", c.constants.r3);
            c.constants.eps = k.value("eps", c.constants.eps);
            c.constants.half_angle = k.value("half_angle", c.constants.half_angle);
            c.constants.a_radius = k.value("a_radius", c.constants.a_radius);
        }
        if (j.contains("shape")) {
            const auto& s = j.at("shape");
            std::string kind = s.is_string() ? s.get<std::string>() : s.at("kind").get<std::string>();
            if (kind == "disk") c.shape.kind = Shape::Kind::disk;
            else if (kind == "square") c.shape.kind = Shape::Kind::square;
            else if (kind == "polygon") c.shape.kind = Shape::Kind::polygon;
            else throw ConfigError("unknown shape kind: " + kind);
            if (s.is_object()) {
                if (s.contains("center")) c.shape.center = parse_point(s.at("center"));
                c.shape.radius = s.value("radius", c.shape.radius);
                c.shape.placed = s.value("placed", false);
                if (s.contains("vertices"))
                    for (const auto& v : s.at("vertices")) c.shape.vertices.push_back(parse_point(v));
            }
            if (c.shape.kind == Shape::Kind::polygon && c.shape.vertices.size() < 3)
                throw ConfigError("polygon shape needs at least three vertices");
            if (!(c.shape.radius > 0)) throw ConfigError("shape radius must be positive");
        }
        if (j.contains("seed")) {
            const auto& s = j.at("seed");
            c.fill = s.value("fill", c.fill);
            c.delta_ratio = s.value("delta_ratio", c.delta_ratio);
            c.shrink = s.value("shrink", c.shrink);
            c.l_gap = s.value("l_gap", c.l_gap);
        }
        c.guard_tolerance = j.value("guard_tolerance", c.guard_tolerance);
        c.full_delta = j.value("full_delta", c.full_delta);
        c.image_fraction = j.value("image_fraction", c.image_fraction);
        c.x_margin = j.value("x_margin", c.x_margin);
        if (j.contains("approx")) {
            const auto& a = j.at("approx");
            if (a.contains("max_degree")) {
                if (a.at("max_degree").is_array()) c.max_degree = a.at("max_degree").get<std::vector<int>>();
                else c.max_degree = {a.at("max_degree").get<int>()};
            }
            c.samples_per_piece = a.value("samples_per_piece", c.samples_per_piece);
            c.safety = a.value("safety", c.safety);
        }
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            c.boundary_samples = g.value("boundary", c.boundary_samples);
            c.interior_grid = g.value("interior", c.interior_grid);
            c.claim_samples = g.value("claim", c.claim_samples);
        }
        c.precision = j.value("precision", c.precision);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (c.precision != "binary64")
        throw ConfigError("precision '" + c.precision + "' is not available; only binary64 is built in");
    if (c.stages < 0 || c.stages > 3) throw ConfigError("stages must lie in 0..3 in binary64");
    if (!(c.fill > 0 && c.fill <= 0.75)) throw ConfigError("seed fill must lie in (0, 0.75]");
    if (!(c.shrink > 0 && c.shrink < 1)) throw ConfigError("seed shrink must lie in (0, 1)");
    if (!(c.l_gap > 0 && c.l_gap < 1)) throw ConfigError("seed l_gap must lie in (0, 1)");
    if (!(c.delta_ratio > 0)) throw ConfigError("seed delta_ratio must be positive");
    try {
        Schedule s = c.schedule();
        s.validate(c.stages + 1);
        if (s.m(1) < 2) throw ConfigError("the construction needs m_1 >= 2");
    } catch (const InvalidSchedule& e) {
        throw ConfigError(e.what());
    } catch (const std::out_of_range&) {
        throw ConfigError("schedule lists are shorter than stages + 1");
    }
    return c;
}

nlohmann::json BuildConfig::to_json() const {
    nlohmann::json j;
    if (lambda) j["schedule"] = {{"lambda", *lambda}, {"m_offset", m_offset}};
    else j["schedule"] = {{"n", n_list}, {"m", m_list}};
    j["stages"] = stages;
    const char* kinds[] = {"disk", "square", "polygon"};
    nlohmann::json shp = {{"kind", kinds[static_cast<int>(shape.kind)]},
                          {"center", {shape.center.real(), shape.center.imag()}},
                          {"radius", shape.radius},
                          {"placed", shape.placed}};
    if (!shape.vertices.empty()) {
        nlohmann::json v = nlohmann::json::array();
        for (auto z : shape.vertices) v.push_back({z.real(), z.imag()});
        shp["vertices"] = v;
    }
    j["shape"] = shp;
    j["constants"] = {{"r1", constants.r1},   {"r2", constants.r2},
                      {"r3", constants.r3},   {"eps", constants.eps},
                      {"half_angle", constants.half_angle}, {"a_radius", constants.a_radius}};
    j["seed"] = {{"fill", fill}, {"delta_ratio", delta_ratio}, {"shrink", shrink}, {"l_gap", l_gap}};
    j["guard_tolerance"] = guard_tolerance;
    j["full_delta"] = full_delta;
    j["image_fraction"] = image_fraction;
    j["x_margin"] = x_margin;
    j["approx"] = {{"max_degree", max_degree}, {"samples_per_piece", samples_per_piece}, {"safety", safety}};
    j["grid"] = {{"boundary", boundary_samples}, {"interior", interior_grid}, {"claim", claim_samples}};
    j["precision"] = precision;
    return j;
}

// ---------------------------------------------------------------------------------------------
// seed domain

double SeedDomain::delta(int j) const { return delta0 * std::pow(shrink, j); }

Region neighborhood(const Region& r, double delta) {
    if (delta < 0) throw InvalidRegion("negative neighbourhood radius");
    switch (r.kind()) {
    case Region::Kind::disk: return Region::disk(r.center(), r.radius() + delta);
    case Region::Kind::translate: return neighborhood(r.base(), delta).translated(r.offset());
    case Region::Kind::polygonal_hull: {
        const auto& v = r.vertices();
        std::size_t n = v.size();
        std::vector<cplx> out;
        for (std::size_t i = 0; i < n; ++i) {
            cplx a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
            cplx ein = (b - a) / std::abs(b - a), eout = (c - b) / std::abs(c - b);
            cplx nin = ein * cplx(0, -1), nout = eout * cplx(0, -1);
            double turn = std::imag(std::conj(ein) * eout);
            if (turn >= 0) {
                double t0 = std::arg(nin), t1 = std::arg(nout);
                while (t1 < t0) t1 += 2 * pi;
                int steps = std::max(2, static_cast<int>(std::ceil((t1 - t0) / (pi / 16))));
                for (int k = 0; k <= steps; ++k) out.push_back(b + delta * std::polar(1.0, t0 + (t1 - t0) * k / steps));
            } else {
                double cosang = std::real(nin * std::conj(nout));
                out.push_back(b + delta * (nin + nout) / (1.0 + cosang));
            }
        }
        return Region::polygonal_hull(std::move(out));
    }
    default: throw InvalidRegion("neighbourhoods are defined for disks and polygons");
    }
}

SeedDomain normalize_seed(const Shape& shape, const Schedule& s, const Constants& c, double fill, double delta_ratio,
                          double shrink, double l_gap) {
    Region base = shape.region();
    double f = std::pow(3.0, static_cast<double>(s.n(1) + 1));
    Region window = Region::annular_sector(c.r2 / f, c.r3 / f, c.half_angle);
    // incentre of the window lies on the positive axis
    double lo = c.r2 / f, hi = c.r3 / f;
    for (int it = 0; it < 200; ++it) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (window.signed_distance(m1) < window.signed_distance(m2)) lo = m1;
        else hi = m2;
    }
    cplx inc = 0.5 * (lo + hi);
    double rho = window.signed_distance(inc);

    cplx cen = base.centroid();
    double R = 0.0;
    for (auto z : boundary_points(base, 1024)) R = std::max(R, std::abs(z - cen));
    if (!(R > 0)) throw PlacementInfeasible("degenerate shape");

    SeedDomain sd{shape, base, 1.0, 0.0, 0.0, shrink, window, l_gap};
    if (shape.placed) {
        sd.delta0 = delta_ratio * R;
        Region K0 = neighborhood(base, sd.delta0);
        if (containment_margin(K0, window) < 0.25 * rho)
            throw PlacementInfeasible("placed shape does not sit inside the window with 25% margins");
    } else {
        double a = fill * rho / (R * (1.0 + delta_ratio));
        sd.scale = a;
        sd.shift = inc - a * cen;
        sd.core = affine_image(base, a, sd.shift);
        sd.delta0 = delta_ratio * a * R;
    }
    Region K0 = neighborhood(sd.core, sd.delta0);
    for (long long l = 0; l <= s.n(1); ++l)
        if (!(containment_margin(affine_image(K0, std::pow(3.0, double(l)), 0.0), c.D()) > 0))
            throw PlacementInfeasible("Phi^l(K0) leaves D");
    if (!(containment_margin(affine_image(K0, f, 0.0), c.B0()) > 0))
        throw PlacementInfeasible("Phi^(n1+1)(K0) is not inside B0");
    return sd;
}

Compacts nested_compacts(const SeedDomain& sd, int j) {
    if (j < 0) throw std::invalid_argument("nested_compacts needs j >= 0");
    Region K = neighborhood(sd.core, sd.delta(j));
    PointCloud P = dense_boundary_subset(K, std::ldexp(1.0, -j));
    std::optional<Region> L;
    if (j >= 1) L = neighborhood(sd.core, sd.delta(j) + sd.l_gap * (sd.delta(j - 1) - sd.delta(j)));
    return {K, P, L};
}

// ---------------------------------------------------------------------------------------------
// construction state

bool StageRecord::passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const NamedCheck& c) { return c.pass; });
}

Construction::Construction(BuildConfig cfg)
    : config(cfg), schedule(cfg.schedule()),
      seed(normalize_seed(cfg.shape, schedule, cfg.constants, cfg.fill, cfg.delta_ratio, cfg.shrink, cfg.l_gap)) {}

Region Construction::B(int l) const {
    if (l == 0) return config.constants.B0();
    return *stages.at(l).X;
}

std::vector<Region> Construction::band_chain(int j) const {
    std::vector<Region> out;
    for (int l = 0; l <= j && l < static_cast<int>(stages.size()); ++l)
        out.insert(out.end(), stages[l].bands.begin(), stages[l].bands.end());
    return out;
}

PiecewiseModel Construction::model(int j) const {
    std::vector<PiecewiseModel::Entry> e;
    for (const auto& p : stages.at(j).pieces) e.push_back({p.name, p.region, p.map});
    return PiecewiseModel(std::move(e));
}

std::vector<cplx> forward(const Polynomial& f, std::vector<cplx> pts, long long k) {
    for (auto& z : pts) z = f.iterate(z, static_cast<int>(k));
    return pts;
}

double image_margin(const Polynomial& f, long long k, const Region& src, const Region& dst, int boundary,
                    int interior) {
    double m = inf;
    for (auto z : forward(f, boundary_points(src, boundary), k)) m = std::min(m, dst.signed_distance(z));
    for (auto z : forward(f, src.interior_grid(interior), k)) m = std::min(m, dst.signed_distance(z));
    return m;
}

Holomorphic iterate_map(const Polynomial& f, long long k) {
    return [&f, k](cplx z) {
        cplx d = 1.0;
        for (long long i = 0; i < k; ++i) {
            auto [v, dv] = f.with_derivative(z);
            d *= dv;
            z = v;
        }
        return std::pair<cplx, cplx>{z, d};
    };
}

namespace {

ApproxOptions approx_options(const BuildConfig& cfg, int j, const Progress& log) {
    ApproxOptions o;
    o.max_degree = cfg.max_degree_for(j);
    o.samples_per_piece = cfg.samples_per_piece;
    o.safety = cfg.safety;
    if (log)
        o.progress = [log, j](int n, double ratio) {
            if (n % 100 < 50)
                log("stage " + std::to_string(j) + ": degree " + std::to_string(n) + ", error/tolerance " +
                    fmt_double(ratio));
        };
    return o;
}

std::vector<Region> guard_sectors(const Construction& ctx, int j) {
    const auto& s = ctx.schedule;
    std::vector<Region> out;
    int J = ctx.config.stages;
    for (long long i = s.m(j + 1) - 1; i <= s.m(J) - 1; ++i) out.push_back(ctx.config.constants.B0().translated(double(i)));
    return out;
}

// Claims on every compact of stages 0..j under the model of stage j.
std::vector<Claim> stage_claims(const Construction& ctx, const PiecewiseModel& model, int j,
                                const std::vector<StageRecord>& recs) {
    const auto& s = ctx.schedule;
    Region D = ctx.config.constants.D();
    std::vector<Claim> claims;
    for (int l = 0; l <= j; ++l) {
        Region K = nested_compacts(ctx.seed, l).K;
        auto terms = orbit_claim(model, claim_seeds(K, ctx.config.claim_samples), cumulative_N(s, l + 1),
                                 *recs[l].Bhat, &s, D);
        claims.push_back(make_claim("K_" + std::to_string(l) + " reaches Bhat_" + std::to_string(l), terms));
    }
    for (int l = 1; l <= j; ++l) {
        auto P = nested_compacts(ctx.seed, l - 1).P;
        Region V = Region::finite_union(recs[l].V);
        auto terms = orbit_claim(model, P.points, cumulative_N(s, l), V, nullptr, D);
        claims.push_back(make_claim("P_" + std::to_string(l - 1) + " reaches V_" + std::to_string(l), terms));
    }
    return claims;
}

void fit_and_record(const Construction& ctx, StageRecord& rec, const ApproximationTask& task,
                    std::shared_ptr<const Polynomial> prev, const Progress& log) {
    ApproxResult res;
    try {
        res = approximate(task, approx_options(ctx.config, rec.j, log));
    } catch (const DegreeBudgetExceeded& e) {
        std::string detail;
        const auto& c = e.best.certificate;
        for (std::size_t i = 0; i < c.names.size(); ++i)
            detail += "; " + c.names[i] + " " + fmt_double(c.certified[i]) + "/" + fmt_double(c.tolerance[i]);
        throw StageFailed(rec.j, std::string("approximation: ") + e.what() + detail);
    } catch (const ConstraintConflict& e) {
        throw StageFailed(rec.j, std::string("constraints: ") + e.what());
    }
    rec.degree = res.degree;
    rec.seconds = res.seconds;
    rec.error = res.certificate;
    auto f = std::make_shared<Polynomial>(prev ? *prev + res.poly : res.poly);
    rec.f = f;
    rec.constraint_residual = std::max(std::abs((*f)(0.0)), std::abs(f->derivative(0.0) - 3.0));
    if (prev) {
        double m = 0.0;
        long long r = ctx.schedule.m(rec.j) - 1;
        if (r > 0)
            for (auto z : boundary_points(Region::disk(0.0, double(r)), 4096)) m = std::max(m, std::abs(res.poly(z)));
        rec.delta_sup = m;
    }
    if (log)
        log("stage " + std::to_string(rec.j) + ": degree " + std::to_string(res.degree) + ", certified " +
            fmt_double(res.certificate.worst_certified()) + " <= " + fmt_double(rec.eps));
}

}  // namespace

StageRecord init_stage0(const Construction& ctx, const Progress& log) {
    const auto& c = ctx.config.constants;
    const auto& s = ctx.schedule;
    if (s.m(1) < 2) throw StageFailed(0, "m_1 >= 2 is required");
    StageRecord rec;
    rec.j = 0;
    rec.pieces.push_back({"D", c.D(), MapSpec::phi()});
    rec.pieces.push_back({"A", c.A(), MapSpec::constant(-0.25)});
    for (long long k = 0; k <= s.m(1) - 2; ++k) {
        Region b = c.B0().translated(double(k));
        rec.pieces.push_back({"B0+" + std::to_string(k), b, MapSpec::tau()});
        rec.bands.push_back(b);
    }
    rec.Bhat = c.B0().translated(double(s.m(1) - 1));
    rec.guards = guard_sectors(ctx, 0);

    PiecewiseModel model = phi0(c, s);
    std::vector<StageRecord> recs{rec};
    auto claims = stage_claims(ctx, model, 0, recs);
    try {
        rec.eps = epsilon_search(claims, c.eps / 8.0);
    } catch (const NoFeasibleEpsilon& e) {
        throw StageFailed(0, e.what());
    }
    if (log) log("stage 0: epsilon " + fmt_double(rec.eps) + binding_claims(claims, rec.eps));

    ApproximationTask task;
    task.epsilon = rec.eps;
    for (const auto& p : rec.pieces) {
        MapSpec m = p.map;
        task.pieces.push_back({p.name, p.region, [m](cplx z) { return m(z); }});
    }
    for (std::size_t i = 0; i < rec.guards.size(); ++i)
        task.pieces.push_back({"guard" + std::to_string(i), rec.guards[i], [](cplx z) { return z + 1.0; },
                               ctx.config.guard_tolerance, 1.0, true});
    task.constraints.push_back({0.0, 0.0, cplx(3.0)});
    fit_and_record(ctx, rec, task, nullptr, log);
    return rec;
}

StageRecord advance_stage(const Construction& ctx, int j, const Progress& log) {
    if (j < 1 || j > static_cast<int>(ctx.stages.size())) throw std::invalid_argument("advance_stage needs j >= 1");
    const auto& s = ctx.schedule;
    const auto& c = ctx.config.constants;
    const StageRecord& prev = ctx.stages[j - 1];
    const Polynomial& f = *prev.f;
    int nb = ctx.config.boundary_samples;

    auto prevc = nested_compacts(ctx.seed, j - 1);
    auto cur = nested_compacts(ctx.seed, j);
    long long Nj = cumulative_N(s, j);

    StageRecord rec;
    rec.j = j;
    rec.L = cur.L;
    rec.blob = image_hull(f, Nj, prevc.K, nb);
    rec.Q = image_hull(f, Nj, *cur.L, nb);
    const Region& Bh = *prev.Bhat;

    auto pimg = forward(f, prevc.P.points, Nj);
    double rv = inf;
    for (std::size_t a = 0; a < pimg.size(); ++a) {
        rv = std::min(rv, 0.5 * std::min(-rec.Q->signed_distance(pimg[a]), Bh.signed_distance(pimg[a])));
        for (std::size_t b = a + 1; b < pimg.size(); ++b) rv = std::min(rv, 0.25 * std::abs(pimg[a] - pimg[b]));
    }
    if (!(rv > 0)) throw StageFailed(j, "no room for V_j between Q_j and the boundary of Bhat");
    for (auto p : pimg) rec.V.push_back(Region::disk(p, rv));

    // X inside E = f(last band) n Bhat_{j-1}, away from the image of K_{j-1}
    auto chain = ctx.band_chain(j - 1);
    std::optional<Region> fimg;
    if (!chain.empty()) fimg = image_hull(f, 1, chain.back(), nb);
    auto inside = [&](cplx z) {
        double d = Bh.signed_distance(z);
        if (fimg) d = std::min(d, fimg->signed_distance(z));
        return d;
    };
    std::vector<Region> excl{*rec.blob};
    excl.insert(excl.end(), rec.V.begin(), rec.V.end());
    Region excluded = Region::finite_union(excl);
    PullbackTrace trace = [&] {
        try {
            return construct_Cj(inside, Bh.bbox(), excluded, ctx.config.x_margin * rec.blob->inradius(),
                                branch_F(f, chain), branch_G(f, c.D(), static_cast<int>(s.n(j + 1))));
        } catch (const std::exception& e) {
            throw StageFailed(j, std::string("pullback: ") + e.what());
        }
    }();
    rec.X = trace.X;
    rec.C = trace.C;
    try {
        rec.h = build_contraction(*rec.Q, *rec.C, ctx.config.image_fraction);
    } catch (const InfeasibleContraction& e) {
        throw StageFailed(j, std::string("contraction: ") + e.what());
    }
    if (log)
        log("stage " + std::to_string(j) + ": blob radius " + fmt_double(rec.blob->diameter() / 2) + ", Q radius " +
            fmt_double(rec.Q->diameter() / 2) + ", V radius " + fmt_double(rv) + ", X radius " +
            fmt_double(rec.X->radius()) + ", C inradius " + fmt_double(rec.C->inradius()) + ", h scale " +
            fmt_double(std::abs(rec.h->s)));
    if (log) {
        std::ostringstream os;
        os.precision(6);
        os << "stage " << j << ": centres Q " << rec.Q->centroid() << " X " << rec.X->center() << " C " << rec.C->centroid();
        for (const auto& v : rec.V) os << " V " << v.center();
        log(os.str());
    }
    long long span = s.m(j + 1) - s.m(j);
    for (long long k = 0; k < span; ++k) rec.bands.push_back(rec.X->translated(double(k)));
    rec.Bhat = rec.X->translated(double(span));
    rec.guards = guard_sectors(ctx, j);

    auto fp = prev.f;
    std::string pre = stage_prefix(j);
    for (const auto& p : prev.pieces) rec.pieces.push_back({p.name, p.region, MapSpec::prior_stage(fp), j - 1});
    for (std::size_t i = 0; i < rec.V.size(); ++i)
        rec.pieces.push_back({pre + "V" + std::to_string(i), rec.V[i], MapSpec::constant(-0.25)});
    rec.pieces.push_back({pre + "Q", *rec.Q, *rec.h});
    for (std::size_t k = 0; k < rec.bands.size(); ++k)
        rec.pieces.push_back({pre + "B+" + std::to_string(k), rec.bands[k], MapSpec::tau()});

    PiecewiseModel model = [&] {
        std::vector<PiecewiseModel::Entry> e;
        if (ctx.config.full_delta && s.m(j) - 1 > 0) {
            Region delta = Region::disk(0.0, double(s.m(j) - 1));
            e.push_back({"Delta", delta, MapSpec::prior_stage(fp)});
            for (const auto& p : rec.pieces)
                if (p.prior_stage < 0 || region_distance(p.region, delta, 256) > 0) e.push_back({p.name, p.region, p.map});
        } else {
            for (const auto& p : rec.pieces) e.push_back({p.name, p.region, p.map});
        }
        try {
            return PiecewiseModel(std::move(e));
        } catch (const OverlapDetected& ex) {
            throw StageFailed(j, std::string("pieces overlap: ") + ex.what());
        }
    }();
    if (ctx.config.full_delta && s.m(j) - 1 > 0) {
        std::vector<PieceRecord> kept;
        for (const auto& e : model.entries())
            kept.push_back({e.name, e.region, e.map, e.map.kind == MapSpec::Kind::prior ? j - 1 : -1});
        rec.pieces = std::move(kept);
    }

    std::vector<StageRecord> recs(ctx.stages.begin(), ctx.stages.end());
    recs.push_back(rec);
    auto claims = stage_claims(ctx, model, j, recs);
    try {
        rec.eps = epsilon_search(claims, prev.eps / 8.0);
    } catch (const NoFeasibleEpsilon& e) {
        throw StageFailed(j, e.what());
    }
    if (log) log("stage " + std::to_string(j) + ": epsilon " + fmt_double(rec.eps) + binding_claims(claims, rec.eps));

    ApproximationTask task;
    task.epsilon = rec.eps;
    for (const auto& p : rec.pieces) {
        if (p.map.kind == MapSpec::Kind::prior) {
            task.pieces.push_back({p.name, p.region, [](cplx) { return cplx(0.0); }});
        } else {
            MapSpec m = p.map;
            task.pieces.push_back({p.name, p.region, [m, fp](cplx z) { return m(z) - (*fp)(z); }});
        }
    }
    for (std::size_t i = 0; i < rec.guards.size(); ++i)
        task.pieces.push_back({"guard" + std::to_string(i), rec.guards[i], [](cplx) { return cplx(0.0); },
                               ctx.config.guard_tolerance, 1.0, true});
    task.constraints.push_back({0.0, 0.0, cplx(0.0)});
    fit_and_record(ctx, rec, task, fp, log);
    return rec;
}

// ---------------------------------------------------------------------------------------------
// verdicts

std::vector<NamedCheck> stage_verdicts(const Construction& ctx, int j, std::vector<UnivalenceCertificate>* univ) {
    const auto& s = ctx.schedule;
    const auto& c = ctx.config.constants;
    const StageRecord& rec = ctx.stages.at(j);
    const Polynomial& f = *rec.f;
    int nb = ctx.config.boundary_samples, ng = ctx.config.interior_grid;
    auto cur = nested_compacts(ctx.seed, j);
    std::vector<NamedCheck> out;

    {
        Region next_delta = Region::disk(0.0, double(s.m(j + 1) - 1));
        double m = inf;
        for (const auto& p : rec.pieces) m = std::min(m, containment_margin(p.region, next_delta, nb));
        out.push_back({"T_j inside Delta_{j+1}", m > 0, m});
        if (j > 0) {
            bool kept = true;
            if (ctx.config.full_delta && s.m(j) - 1 > 0) {
                kept = std::any_of(rec.pieces.begin(), rec.pieces.end(), [](const PieceRecord& p) { return p.name == "Delta"; });
            } else {
                for (const auto& p : ctx.stages[j - 1].pieces)
                    kept = kept && std::any_of(rec.pieces.begin(), rec.pieces.end(),
                                               [&](const PieceRecord& q) { return q.name == p.name; });
            }
            out.push_back({"earlier pieces kept in T_j", kept, 0.0});
        }
        double sep = inf;
        for (std::size_t a = 0; a < rec.pieces.size(); ++a)
            for (std::size_t b = a + 1; b < rec.pieces.size(); ++b)
                sep = std::min(sep, region_distance(rec.pieces[a].region, rec.pieces[b].region, 512));
        out.push_back({"T_j pieces pairwise disjoint, complement connected", sep > 0, sep});
    }
    long long N1 = cumulative_N(s, j + 1);
    {
        double m = image_margin(f, N1, cur.K, *rec.Bhat, nb, ng);
        out.push_back({"f^N_{j+1}(K_j) compactly inside Bhat_j", m > 0, m});
        double mb = containment_margin(*rec.Bhat, c.B0().translated(double(s.m(j + 1) - 1)), nb);
        out.push_back({"Bhat_j inside B0 + m_{j+1} - 1", mb >= -1e-12, mb});
    }
    {
        auto u = certify_univalence(iterate_map(f, N1), cur.K, 64, 0.0, ng);
        out.push_back({"f^N_{j+1} univalent on K_j", u.granted, u.mu});
    }
    {
        std::vector<Region> U{c.D()};
        auto chain = ctx.band_chain(j);
        U.insert(U.end(), chain.begin(), chain.end());
        bool ok = true;
        double mu = inf;
        for (const auto& r : U) {
            auto u = certify_univalence(f, r, 64, 0.0, ng);
            if (univ) univ->push_back(u);
            ok = ok && u.granted;
            mu = std::min(mu, u.mu);
        }
        std::vector<Region> images;
        for (const auto& r : U) images.push_back(image_hull(f, 1, r, nb));
        double sep = inf;
        for (std::size_t a = 0; a < images.size(); ++a)
            for (std::size_t b = a + 1; b < images.size(); ++b)
                sep = std::min(sep, region_distance(images[a], images[b], 512));
        out.push_back({"f_j univalent on U_j", ok && sep > 0, std::min(mu, sep)});
    }
    {
        double closed = inf, open = inf;
        for (int l = 0; l <= j; ++l) {
            long long base = cumulative_N(s, l) + s.n(l + 1) + std::max<long long>(s.m(l), 1);
            long long kmax = s.m(l + 1) - std::max<long long>(s.m(l), 1);
            for (long long k = 0; k <= kmax; ++k) {
                double m = image_margin(f, base + k, cur.K, ctx.B(l).translated(double(k)), nb / 4, ng / 4);
                closed = std::min(closed, m);
                if (k < kmax) open = std::min(open, m);
            }
        }
        out.push_back({"itinerary through B_l + k, closed range", closed > 0, closed});
        out.push_back({"itinerary through B_l + k, half-open range", open > 0, open});
    }
    {
        double bound = c.eps / std::pow(4.0, j);
        out.push_back({"eps_j < eps / 4^j", rec.eps < bound, bound - rec.eps});
        double cap = j == 0 ? c.eps / 4 : ctx.stages[j - 1].eps / 4;
        out.push_back({"eps_j < eps_{j-1} / 4", rec.eps < cap, cap - rec.eps});
    }
    {
        double r = std::max(std::abs(f(0.0)), std::abs(f.derivative(0.0) - 3.0));
        out.push_back({"f_j(0) = 0 and f_j'(0) = 3", r <= 1e-12, r});
    }
    {
        PiecewiseModel model = ctx.model(j);
        double worst = 0.0;
        for (const auto& e : model.entries())
            for (auto z : boundary_points(e.region, 2 * nb)) worst = std::max(worst, std::abs(f(z) - e.map(z)));
        double cert = worst * ctx.config.safety;
        out.push_back({"certified |f_j - phi_j| <= eps_j on T_j", cert <= rec.eps, rec.eps - cert});
    }
    if (j == 0) {
        double m = inf;
        for (long long l = 0; l <= s.n(1); ++l) m = std::min(m, image_margin(f, l, cur.K, c.D(), nb, ng));
        out.push_back({"f_0^l(K_0) inside D for l <= n_1", m > 0, m});
    } else {
        auto P = nested_compacts(ctx.seed, j - 1).P;
        double m = inf;
        for (auto z : forward(f, P.points, cumulative_N(s, j) + 1)) m = std::min(m, c.A().signed_distance(z));
        out.push_back({"f^{N_j+1}(P_{j-1}) inside A", m > 0, m});
        long long top = s.m(j + 1) - s.m(j) - 1;
        double mb = containment_margin(rec.X->translated(double(top)), c.B0().translated(double(s.m(j + 1) - 2)), nb);
        double md = containment_margin(c.B0().translated(double(s.m(j + 1) - 2)),
                                       Region::disk(0.0, double(s.m(j + 1) - 1)), nb);
        out.push_back({"B_j + m_{j+1} - m_j - 1 inside B0 + m_{j+1} - 2 inside Delta_{j+1}", mb > 0 && md > 0,
                       std::min(mb, md)});
        double mq = image_margin(f, cumulative_N(s, j), cur.K, *rec.Q, nb, ng);
        out.push_back({"f^{N_j}(K_j) inside Q_j", mq > 0, mq});
        double mc = image_margin(f, 1, *rec.Q, *rec.C, nb, ng);
        out.push_back({"f_j(Q_j) inside C_j", mc > 0, mc});
    }
    return out;
}

std::vector<TailBound> tail_report(const Construction& ctx) {
    std::vector<TailBound> out;
    int J = ctx.J();
    const Polynomial& fJ = ctx.f();
    for (int j = 0; j < J; ++j) {
        TailBound t;
        t.j = j;
        const Polynomial& fj = *ctx.stages[j].f;
        for (const auto& p : ctx.stages[j].pieces)
            for (auto z : boundary_points(p.region, 512)) t.measured = std::max(t.measured, std::abs(fJ(z) - fj(z)));
        for (int k = j + 1; k <= J; ++k) t.bound += ctx.stages[k].eps;
        t.geometric = 4.0 / 3.0 * ctx.stages[j].eps;
        out.push_back(t);
    }
    return out;
}

Construction build(const BuildConfig& cfg, const Progress& log) {
    Construction ctx(cfg);
    for (int j = 0; j <= cfg.stages; ++j) {
        try {
            StageRecord rec = j == 0 ? init_stage0(ctx, log) : advance_stage(ctx, j, log);
            ctx.stages.push_back(std::move(rec));
        } catch (const StageFailed& e) {
            ctx.failure = e.what();
            if (log) log(e.what());
            break;
        }
        auto& last = ctx.stages.back();
        last.verdicts = stage_verdicts(ctx, j, &last.univalence);
        if (log)
            for (const auto& v : ctx.stages.back().verdicts)
                log("stage " + std::to_string(j) + " " + (v.pass ? "ok   " : "FAIL ") + v.name + " (" +
                    fmt_double(v.margin) + ")");
    }
    if (!ctx.stages.empty()) ctx.tail = tail_report(ctx);
    return ctx;
}

}  // namespace wander
