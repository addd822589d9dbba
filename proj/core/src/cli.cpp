#include "wander/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wander {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure {
    int code;
    std::string what;
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure{2, "cannot open " + path};
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Failure{2, "malformed JSON in " + path + ": " + e.what()};
    }
}

void write_file(const fs::path& p, const std::string& data) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Failure{2, "cannot write " + p.string()};
    out << data;
}

BuildConfig load_config(const RunConfig& rc) {
    json j = rc.config_path.empty() ? json::object() : read_json(rc.config_path);
    if (rc.lambda) {
        j.erase("schedule");
        j["lambda"] = *rc.lambda;
    }
    if (rc.stages) j["stages"] = *rc.stages;
    return BuildConfig::from_json(j);
}

Construction load(const RunConfig& rc) {
    if (rc.manifest_path.empty()) throw Failure{2, "--manifest is required"};
    json m = read_json(rc.manifest_path);
    Construction ctx = load_manifest(m);
    if (ctx.stages.empty()) throw Failure{1, "manifest holds no stage"};
    return ctx;
}

int do_build(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    BuildConfig cfg = load_config(rc);
    auto t0 = std::chrono::steady_clock::now();
    Progress log;
    if (!rc.quiet) log = [&err](const std::string& s) { err << s << '\n'; };
    Construction ctx = build(cfg, log);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fs::path dir(rc.out_dir);
    write_file(dir / "manifest.json", manifest(ctx).dump(1));
    json rep;
    bool ok = !ctx.failure;
    json st = json::array();
    for (const auto& s : ctx.stages) {
        json v = json::array();
        for (const auto& c : s.verdicts) v.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
        st.push_back({{"j", s.j}, {"eps", s.eps}, {"degree", s.degree}, {"fit_seconds", s.seconds}, {"verdicts", v}});
        ok = ok && s.passed();
    }
    rep["stages"] = st;
    rep["seconds"] = secs;
    rep["pass"] = ok;
    if (ctx.failure) rep["failure"] = *ctx.failure;
    write_file(dir / "report.json", rep.dump(2));
    out << (ok ? "build ok" : "build FAILED") << ": " << ctx.stages.size() << " stage(s) in " << secs << " s\n";
    return ok ? 0 : 1;
}

int do_verify(const RunConfig& rc, std::ostream& out, std::ostream&) {
    Construction ctx = load(rc);
    json rep;
    bool ok = !ctx.failure;
    json stages = json::array();
    for (int j = 0; j <= ctx.J(); ++j) {
        auto fresh = stage_verdicts(ctx, j);
        const auto& stored = ctx.stages[j].verdicts;
        bool same = fresh.size() == stored.size();
        json v = json::array();
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            bool agree = same && stored[i].name == fresh[i].name && stored[i].pass == fresh[i].pass;
            same = same && agree;
            v.push_back({{"name", fresh[i].name}, {"pass", fresh[i].pass}, {"margin", fresh[i].margin}, {"matches_stored", agree}});
            ok = ok && fresh[i].pass;
            out << "stage " << j << (fresh[i].pass ? "  ok    " : "  FAIL  ") << fresh[i].name << '\n';
        }
        ok = ok && same;
        stages.push_back({{"j", j}, {"verdicts", v}, {"reproduces_manifest", same}});
    }
    rep["stages"] = stages;
    json checks = json::array();
    int J = ctx.J();
    Region KJ = nested_compacts(ctx.seed, J).K;
    std::vector<Report> reports{verify_schedule(ctx, J, grid_seeds(KJ, 100), cumulative_N(ctx.schedule, J + 1)),
                                verify_attractor(ctx)};
    for (int j = 0; j <= J; ++j) reports.push_back(verify_escape_and_halfplane(ctx, j));
    for (const auto& r : reports) {
        checks.push_back(r.to_json());
        ok = ok && r.pass;
        out << (r.pass ? "ok    " : "FAIL  ") << r.name << '\n';
    }
    rep["checks"] = checks;
    rep["pass"] = ok;
    fs::path dir = rc.out_dir;
    write_file(dir / "verify_report.json", rep.dump(2));
    out << (ok ? "verify ok\n" : "verify FAILED\n");
    return ok ? 0 : 1;
}

int do_orbit(const RunConfig& rc, std::ostream& out, std::ostream&) {
    Construction ctx = load(rc);
    int J = ctx.J();
    cplx z = rc.seed ? *rc.seed : nested_compacts(ctx.seed, J).K.centroid();
    long long steps = rc.steps ? *rc.steps : cumulative_N(ctx.schedule, J + 1);
    if (steps < 0) throw Failure{2, "steps must be nonnegative"};
    LabelRules rules = LabelRules::from(ctx);
    auto log = iterate(ctx.f(), z, steps, &rules, &ctx.schedule);
    out << orbit_csv(log);
    bool ok = std::all_of(log.steps.begin(), log.steps.end(), [](const OrbitStep& s) { return s.match; });
    return ok ? 0 : 1;
}

int do_density(const RunConfig& rc, std::ostream& out, std::ostream&) {
    if (rc.k < 1) throw Failure{2, "k must be positive"};
    Schedule s = [&] {
        if (rc.lambda) return lambda_schedule(*rc.lambda, 0);
        return load_config(rc).schedule();
    }();
    if (rc.shift < 0) throw Failure{2, "shift must be nonnegative"};
    Schedule t = rc.shift > 0 ? shifted_schedule(s, rc.shift) : s;
    out << "k,count,num,den,lower,upper\n";
    std::vector<long long> ks;
    for (long long p = 1; p <= rc.k; p *= 10)
        for (long long m : {1LL, 2LL, 5LL})
            if (p * m <= rc.k) ks.push_back(p * m);
    if (ks.empty() || ks.back() != rc.k) ks.push_back(rc.k);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (long long k : ks) {
        Rational d = density(t, k);
        auto [lo, hi] = density_bounds(t, k);
        long long count = d.numerator() * (k / d.denominator());
        out << k << ',' << count << ',' << d.numerator() << ',' << d.denominator() << ','
            << boost::rational_cast<double>(lo) << ',' << boost::rational_cast<double>(hi) << '\n';
    }
    return 0;
}

int do_render(const RunConfig& rc, std::ostream& out, std::ostream&) {
    Construction ctx = load(rc);
    if (rc.width < 1 || rc.height < 1 || rc.budget < 0) throw Failure{2, "bad render size or budget"};
    if (!(rc.view.x1 > rc.view.x0 && rc.view.y1 > rc.view.y0)) throw Failure{2, "empty viewport"};
    auto img = render(ctx, rc.view, rc.width, rc.height, rc.budget);
    fs::path p = fs::path(rc.out_dir) / "render.ppm";
    write_file(p, std::string(img.begin(), img.end()));
    out << "wrote " << p.string() << '\n';
    return 0;
}

}  // namespace

int worker_count() {
    const char* v = std::getenv("WANDER_WORKERS");
    if (!v) return 1;
    int n = std::atoi(v);
    return n > 0 ? n : 1;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.mode == "build") return do_build(cfg, out, err);
        if (cfg.mode == "verify") return do_verify(cfg, out, err);
        if (cfg.mode == "orbit") return do_orbit(cfg, out, err);
        if (cfg.mode == "density") return do_density(cfg, out, err);
        if (cfg.mode == "render") return do_render(cfg, out, err);
        err << json{{"error", "config"}, {"message", "unknown mode: " + cfg.mode}}.dump() << '\n';
        return 2;
    } catch (const Failure& f) {
        err << json{{"error", f.code == 2 ? "config" : "verification"}, {"message", f.what}}.dump() << '\n';
        return f.code;
    } catch (const ConfigError& e) {
        err << json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const InvalidSchedule& e) {
        err << json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const PlacementInfeasible& e) {
        err << json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const json::exception& e) {
        err << json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << json{{"error", "runtime"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
}

}  // namespace wander
