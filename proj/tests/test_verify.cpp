#include <gtest/gtest.h>

#include "wander/verify.hpp"

using namespace wander;

namespace {

// Stage 0 data replaced by the exact model map 3z.
Construction tripling_ctx() {
    BuildConfig cfg = BuildConfig::defaults();
    cfg.stages = 0;
    Construction ctx(cfg);
    StageRecord s;
    s.f = std::make_shared<const Polynomial>(Polynomial::monomial({0.0, 3.0}));
    s.eps = 0.0;
    ctx.stages.push_back(s);
    return ctx;
}

const Construction& stage0() {
    static const Construction ctx = [] {
        BuildConfig cfg = BuildConfig::defaults();
        cfg.stages = 0;
        return build(cfg);
    }();
    return ctx;
}

}  // namespace

TEST(Iterate, TriplingOrbit) {
    auto f = Polynomial::monomial({0.0, 3.0});
    auto log = iterate(f, cplx(0.001, 0.002), 5);
    ASSERT_EQ(log.steps.size(), 6u);
    cplx z(0.001, 0.002);
    for (const auto& st : log.steps) {
        EXPECT_LT(std::abs(st.z - z), 1e-15 * std::abs(z) + 1e-300);
        z *= 3.0;
    }
    EXPECT_FALSE(log.escaped);
}

TEST(Iterate, ZeroHorizonKeepsOnlySeed) {
    auto log = iterate(Polynomial::monomial({0.0, 3.0}), 0.5, 0);
    ASSERT_EQ(log.steps.size(), 1u);
    EXPECT_EQ(log.steps[0].z, cplx(0.5));
    EXPECT_TRUE(empirical_density(log, Region::disk(0.0, 1.0)).empty());
}

TEST(Iterate, EscapeStopsEarly) {
    auto ctx = tripling_ctx();
    LabelRules rules = LabelRules::from(ctx);
    auto log = iterate(ctx.f(), 1.0, 100, &rules);
    EXPECT_TRUE(log.escaped);
    EXPECT_LT(log.steps.size(), 101u);
}

TEST(Iterate, LabelsFollowThePieces) {
    auto ctx = tripling_ctx();
    LabelRules rules = LabelRules::from(ctx);
    auto log = iterate(ctx.f(), cplx(0.025, 0.0), 2, &rules);
    EXPECT_EQ(log.steps[0].label, "D");
    EXPECT_EQ(log.steps[1].label, "D");
    EXPECT_EQ(log.steps[2].label, "band");  // 0.225 in B0
    EXPECT_EQ(log.steps[2].band, 0);
    auto a = iterate(ctx.f(), -0.25, 0, &rules);
    EXPECT_EQ(a.steps[0].label, "A");
}

TEST(OrbitCsv, HeaderAndRows) {
    auto ctx = tripling_ctx();
    LabelRules rules = LabelRules::from(ctx);
    auto csv = orbit_csv(iterate(ctx.f(), cplx(0.025, 0.0), 3, &rules, &ctx.schedule));
    EXPECT_EQ(csv.rfind("n,re,im,label,expected,match\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_NE(csv.find("band0"), std::string::npos);
}

TEST(EmpiricalDensity, WholePlaneAndDisjoint) {
    auto log = iterate(Polynomial::monomial({0.1, 0.5}), 0.3, 50);
    for (const auto& d : empirical_density(log, Region::disk(0.0, 100.0))) EXPECT_EQ(d, Rational(1));
    for (const auto& d : empirical_density(log, Region::disk(40.0, 1.0))) EXPECT_EQ(d, Rational(0));
    EXPECT_EQ(empirical_density(log, Region::disk(0.0, 100.0)).size(), 50u);
}

TEST(EmpiricalDensity, AlternatingOrbit) {
    // z -> -z alternates between two disks
    auto log = iterate(Polynomial::monomial({0.0, -1.0}), 1.0, 10);
    auto d = empirical_density(log, Region::disk(1.0, 0.5));
    EXPECT_EQ(d[0], Rational(0));
    EXPECT_EQ(d[1], Rational(1, 2));
    EXPECT_EQ(d[9], Rational(1, 2));
}

TEST(Render, SinglePixel) {
    auto img = render(tripling_ctx(), Viewport{}, 1, 1, 8);
    std::string head = "P6\n1 1\n255\n";
    ASSERT_EQ(img.size(), head.size() + 3);
    EXPECT_EQ(std::string(img.begin(), img.begin() + head.size()), head);
}

TEST(Render, ZeroBudgetIsUniform) {
    auto img = render(tripling_ctx(), Viewport{}, 7, 5, 0);
    std::string head = "P6\n7 5\n255\n";
    ASSERT_EQ(img.size(), head.size() + 3 * 35);
    for (std::size_t i = head.size(); i < img.size(); i += 3) {
        EXPECT_EQ(img[i], img[head.size()]);
        EXPECT_EQ(img[i + 1], img[head.size() + 1]);
        EXPECT_EQ(img[i + 2], img[head.size() + 2]);
    }
}

TEST(Render, BadSizeRejected) { EXPECT_THROW(render(tripling_ctx(), Viewport{}, 0, 3, 4), std::invalid_argument); }

TEST(MeasureC, ExactModelWithFullDisk) {
    auto ctx = tripling_ctx();
    auto m = measure_C_for(ctx, 0, ctx.config.constants.D());
    EXPECT_EQ(m.C, 0);
    EXPECT_TRUE(m.consistent);
    ASSERT_FALSE(m.blocks.empty());
    EXPECT_TRUE(m.blocks[0].exact);
}

TEST(MeasureC, SmallerTargetNeverLowersC) {
    auto ctx = tripling_ctx();
    const auto& c = ctx.config.constants;
    long long prev = measure_C_for(ctx, 0, c.D()).C;
    for (double r : {0.05, 0.01, 1e-4}) {
        long long cur = measure_C_for(ctx, 0, Region::disk(0.0, r)).C;
        EXPECT_GE(cur, prev) << r;
        prev = cur;
    }
    EXPECT_EQ(prev, 1);
}

TEST(Checks, ExactModelFailsTheItinerary) {
    auto ctx = tripling_ctx();
    Region K = nested_compacts(ctx.seed, 0).K;
    auto r = verify_schedule(ctx, 0, grid_seeds(K, 10), cumulative_N(ctx.schedule, 2));
    EXPECT_FALSE(r.pass);
    EXPECT_GT(r.failures, 0);
    EXPECT_FALSE(verify_attractor(ctx).pass);
}

TEST(Checks, GridSeedsCoverK) {
    Region K = Region::disk(cplx(0.3, 0.1), 0.01);
    auto pc = grid_seeds(K, 100);
    EXPECT_GE(pc.points.size(), 100u);
    for (auto z : pc.points) EXPECT_TRUE(K.contains(z));
}

TEST(Stage0, ItineraryAttractorAndEscape) {
    const auto& ctx = stage0();
    ASSERT_FALSE(ctx.failure);
    Region K = nested_compacts(ctx.seed, 0).K;
    auto s = verify_schedule(ctx, 0, grid_seeds(K, 100), cumulative_N(ctx.schedule, 1));
    EXPECT_TRUE(s.pass) << s.failures;
    EXPECT_EQ(s.indeterminate, 0);
    auto a = verify_attractor(ctx);
    EXPECT_TRUE(a.pass) << a.worst_margin;
    auto e = verify_escape_and_halfplane(ctx, 0);
    EXPECT_TRUE(e.pass) << e.worst_margin;
    auto j = s.to_json();
    EXPECT_EQ(j.at("pass").get<bool>(), true);
}
