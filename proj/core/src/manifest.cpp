#include "wander/driver.hpp"
#include "wander/hexfloat.hpp"

namespace wander {

namespace {

using nlohmann::json;

json map_to_json(const PieceRecord& p) {
    const MapSpec& m = p.map;
    json j = {{"kind", m.tag()}};
    switch (m.kind) {
    case MapSpec::Kind::linear: j["s"] = hex_pair(m.s); break;
    case MapSpec::Kind::constant:
    case MapSpec::Kind::translation: j["c"] = hex_pair(m.c); break;
    case MapSpec::Kind::affine:
        j["c"] = hex_pair(m.c);
        j["s"] = hex_pair(m.s);
        j["q"] = hex_pair(m.q);
        break;
    case MapSpec::Kind::prior: j["stage"] = p.prior_stage; break;
    }
    return j;
}

json affine_to_json(const MapSpec& m) { return {{"c", hex_pair(m.c)}, {"s", hex_pair(m.s)}, {"q", hex_pair(m.q)}}; }

MapSpec map_from_json(const json& j, const std::vector<StageRecord>& stages, int& prior) {
    std::string k = j.at("kind").get<std::string>();
    prior = -1;
    if (k == "linear") return MapSpec{MapSpec::Kind::linear, 0.0, parse_hex_pair(j.at("s")), 0.0, nullptr};
    if (k == "constant") return MapSpec::constant(parse_hex_pair(j.at("c")));
    if (k == "translation") return MapSpec{MapSpec::Kind::translation, parse_hex_pair(j.at("c")), 1.0, 0.0, nullptr};
    if (k == "affine")
        return MapSpec::affine(parse_hex_pair(j.at("c")), parse_hex_pair(j.at("s")), parse_hex_pair(j.at("q")));
    if (k == "prior") {
        prior = j.at("stage").get<int>();
        if (prior < 0 || prior >= static_cast<int>(stages.size())) throw UnresolvedPriorStage("manifest prior stage");
        return MapSpec::prior_stage(stages[prior].f);
    }
    throw std::invalid_argument("unknown map kind in manifest: " + k);
}

json regions(const std::vector<Region>& rs) {
    json a = json::array();
    for (const auto& r : rs) a.push_back(to_json(r));
    return a;
}

std::vector<Region> regions_from(const json& a) {
    std::vector<Region> out;
    for (const auto& r : a) out.push_back(region_from_json(r));
    return out;
}

void put(json& j, const char* key, const std::optional<Region>& r) {
    if (r) j[key] = to_json(*r);
}

std::optional<Region> get(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    return region_from_json(j.at(key));
}

}  // namespace

json manifest(const Construction& ctx) {
    json m;
    m["format"] = "wander-manifest/1";
    m["config"] = ctx.config.to_json();
    const auto& s = ctx.schedule;
    std::vector<long long> n, mm;
    for (int j = 1; j <= ctx.config.stages + 1; ++j) {
        n.push_back(s.n(j));
        mm.push_back(s.m(j));
    }
    m["schedule"] = {{"label", s.label()}, {"n", n}, {"m", mm}};
    m["seed"] = {{"core", to_json(ctx.seed.core)},
                 {"scale", hex_pair(ctx.seed.scale)},
                 {"shift", hex_pair(ctx.seed.shift)},
                 {"delta0", hex_double(ctx.seed.delta0)},
                 {"shrink", hex_double(ctx.seed.shrink)},
                 {"l_gap", hex_double(ctx.seed.l_gap)}};
    json stages = json::array();
    for (const auto& r : ctx.stages) {
        json st;
        st["j"] = r.j;
        st["eps"] = hex_double(r.eps);
        st["degree"] = r.degree;
        st["constraint_residual"] = r.constraint_residual;
        st["delta_sup"] = r.delta_sup;
        st["f"] = r.f->to_json();
        json pieces = json::array();
        for (const auto& p : r.pieces) pieces.push_back({{"name", p.name}, {"region", to_json(p.region)}, {"map", map_to_json(p)}});
        st["pieces"] = pieces;
        st["guards"] = regions(r.guards);
        st["bands"] = regions(r.bands);
        st["V"] = regions(r.V);
        put(st, "Bhat", r.Bhat);
        put(st, "L", r.L);
        put(st, "Q", r.Q);
        put(st, "C", r.C);
        put(st, "X", r.X);
        put(st, "blob", r.blob);
        if (r.h) st["h"] = affine_to_json(*r.h);
        json cert = json::array();
        for (std::size_t i = 0; i < r.error.names.size(); ++i)
            cert.push_back({{"piece", r.error.names[i]},
                            {"certified", r.error.certified[i]},
                            {"measured", r.error.measured[i]},
                            {"tolerance", r.error.tolerance[i]},
                            {"guard", static_cast<bool>(r.error.guard[i])}});
        st["error_certificate"] = {{"pieces", cert},
                                   {"grid_density", r.error.grid_density},
                                   {"safety", r.error.safety},
                                   {"doubling_agrees", r.error.doubling_agrees}};
        json uni = json::array();
        for (const auto& u : r.univalence)
            uni.push_back({{"region", to_json(u.region)},
                           {"mu", u.mu},
                           {"granted", u.granted},
                           {"winding_ok", u.winding_ok},
                           {"probes", u.probes}});
        st["univalence"] = uni;
        json ver = json::array();
        for (const auto& v : r.verdicts) ver.push_back({{"name", v.name}, {"pass", v.pass}, {"margin", v.margin}});
        st["verdicts"] = ver;
        stages.push_back(st);
    }
    m["stages"] = stages;
    json tail = json::array();
    for (const auto& t : ctx.tail)
        tail.push_back({{"j", t.j}, {"measured", t.measured}, {"bound", t.bound}, {"geometric", t.geometric}});
    m["tail"] = tail;
    if (ctx.failure) m["failure"] = *ctx.failure;
    return m;
}

Construction load_manifest(const json& m) {
    if (m.value("format", "") != "wander-manifest/1") throw ConfigError("not a stage manifest");
    Construction ctx(BuildConfig::from_json(m.at("config")));
    for (const auto& st : m.at("stages")) {
        StageRecord r;
        r.j = st.at("j").get<int>();
        r.eps = parse_hex_double(st.at("eps"));
        r.degree = st.at("degree").get<int>();
        r.constraint_residual = st.at("constraint_residual").get<double>();
        r.delta_sup = st.at("delta_sup").get<double>();
        r.f = std::make_shared<Polynomial>(Polynomial::from_json(st.at("f")));
        for (const auto& p : st.at("pieces")) {
            int prior = -1;
            MapSpec map = map_from_json(p.at("map"), ctx.stages, prior);
            r.pieces.push_back({p.at("name").get<std::string>(), region_from_json(p.at("region")), map, prior});
        }
        r.guards = regions_from(st.at("guards"));
        r.bands = regions_from(st.at("bands"));
        r.V = regions_from(st.at("V"));
        r.Bhat = get(st, "Bhat");
        r.L = get(st, "L");
        r.Q = get(st, "Q");
        r.C = get(st, "C");
        r.X = get(st, "X");
        r.blob = get(st, "blob");
        if (st.contains("h")) {
            const auto& h = st.at("h");
            r.h = MapSpec::affine(parse_hex_pair(h.at("c")), parse_hex_pair(h.at("s")), parse_hex_pair(h.at("q")));
        }
        const auto& ec = st.at("error_certificate");
        for (const auto& p : ec.at("pieces")) {
            r.error.names.push_back(p.at("piece").get<std::string>());
            r.error.certified.push_back(p.at("certified").get<double>());
            r.error.measured.push_back(p.at("measured").get<double>());
            r.error.tolerance.push_back(p.at("tolerance").get<double>());
            r.error.guard.push_back(p.at("guard").get<bool>());
        }
        r.error.grid_density = ec.at("grid_density").get<int>();
        r.error.safety = ec.at("safety").get<double>();
        r.error.doubling_agrees = ec.at("doubling_agrees").get<bool>();
        for (const auto& u : st.at("univalence")) {
            UnivalenceCertificate c{region_from_json(u.at("region"))};
            c.mu = u.at("mu").get<double>();
            c.granted = u.at("granted").get<bool>();
            c.winding_ok = u.at("winding_ok").get<bool>();
            c.probes = u.at("probes").get<int>();
            r.univalence.push_back(std::move(c));
        }
        for (const auto& v : st.at("verdicts"))
            r.verdicts.push_back({v.at("name").get<std::string>(), v.at("pass").get<bool>(), v.at("margin").get<double>()});
        ctx.stages.push_back(std::move(r));
    }
    for (const auto& t : m.at("tail"))
        ctx.tail.push_back({t.at("j").get<int>(), t.at("measured").get<double>(), t.at("bound").get<double>(),
                            t.at("geometric").get<double>()});
    if (m.contains("failure")) ctx.failure = m.at("failure").get<std::string>();
    return ctx;
}

}  // namespace wander
