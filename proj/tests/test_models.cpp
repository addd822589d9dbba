#include <gtest/gtest.h>

#include "wander/models.hpp"

using namespace wander;

namespace {

Schedule bands(long long m1) { return Schedule::explicit_lists({1, 4, 9}, {m1, m1 + 1, m1 + 2}); }

}  // namespace

TEST(Phi0, FixesTheOrigin) { EXPECT_EQ(phi0(Constants{}, bands(2))(0.0), cplx(0.0)); }

TEST(Phi0, AttractorCentreIsFixed) { EXPECT_EQ(phi0(Constants{}, bands(2))(-0.25), cplx(-0.25)); }

TEST(Phi0, SectorPointIsTranslated) { EXPECT_EQ(phi0(Constants{}, bands(2))(0.2), cplx(1.2)); }

TEST(Phi0, SecondTranslateWhenBandIsLonger) {
    auto m = phi0(Constants{}, bands(3));
    EXPECT_EQ(m(1.2), cplx(2.2));
    EXPECT_EQ(m.entries().size(), 4u);
}

TEST(Phi0, ThreePiecesForShortestBand) {
    auto m = phi0(Constants{}, bands(2));
    ASSERT_EQ(m.entries().size(), 3u);
    EXPECT_EQ(m.entries()[0].name, "D");
    EXPECT_EQ(m.entries()[1].name, "A");
    EXPECT_EQ(m.entries()[2].name, "B0+0");
}

TEST(Phi0, TriplesInsideD) {
    auto m = phi0(Constants{}, bands(2));
    for (cplx z : {cplx(0.05, 0.02), cplx(-0.1, 0.0), cplx(0.0, 0.107)}) {
        EXPECT_EQ(m(z), 3.0 * z);
        EXPECT_EQ(m.derivative(z), cplx(3.0));
    }
}

TEST(Phi0, FarPointIsOutside) {
    auto m = phi0(Constants{}, bands(2));
    EXPECT_THROW(m(10.0), OutsideDomain);
    EXPECT_EQ(m.locate(10.0), -1);
    try {
        m(cplx(10.0, 1.0));
    } catch (const OutsideDomain& e) {
        EXPECT_EQ(e.point, cplx(10.0, 1.0));
    }
}

TEST(Phi0, PiecesAreSeparated) { EXPECT_GT(phi0(Constants{}, bands(4)).min_separation(), 0.0); }

TEST(Model, OverlapIsRejected) {
    std::vector<PiecewiseModel::Entry> e{{"a", Region::disk(0.0, 1.0), MapSpec::phi()},
                                         {"b", Region::disk(1.5, 1.0), MapSpec::tau()}};
    EXPECT_THROW(PiecewiseModel{e}, OverlapDetected);
}

TEST(Model, PriorNeedsAPolynomial) {
    EXPECT_THROW(MapSpec::prior_stage(nullptr), UnresolvedPriorStage);
    MapSpec hollow = MapSpec::phi();
    hollow.kind = MapSpec::Kind::prior;
    std::vector<PiecewiseModel::Entry> e{{"a", Region::disk(0.0, 1.0), hollow}};
    EXPECT_THROW(PiecewiseModel{e}, UnresolvedPriorStage);
}

TEST(MapSpec, Kinds) {
    EXPECT_EQ(MapSpec::phi()(cplx(1, 2)), cplx(3, 6));
    EXPECT_EQ(MapSpec::constant(-0.25)(cplx(7, 7)), cplx(-0.25));
    EXPECT_EQ(MapSpec::constant(-0.25).derivative(1.0), cplx(0.0));
    EXPECT_EQ(MapSpec::tau()(cplx(0.2, 0.1)), cplx(1.2, 0.1));
    auto h = MapSpec::affine(cplx(1, 1), 0.5, 2.0);
    EXPECT_EQ(h(2.0), cplx(1, 1));
    EXPECT_EQ(h(4.0), cplx(2, 1));
    EXPECT_TRUE(h.is_contraction());
    auto p = std::make_shared<const Polynomial>(Polynomial::monomial({0.0, 0.0, 1.0}));
    auto prior = MapSpec::prior_stage(p);
    EXPECT_EQ(prior(cplx(0, 2)), cplx(-4, 0));
    EXPECT_EQ(prior.derivative(3.0), cplx(6.0));
}

TEST(PhiJ, DispatchesToEachPiece) {
    auto prev = std::make_shared<const Polynomial>(Polynomial::monomial({0.0, 3.0, 0.5}));
    StagePieces sp{Region::disk(0.0, 1.0), {Region::disk(1.5, 0.05)}, Region::disk(1.7, 0.05),
                   {Region::disk(2.0, 0.1), Region::disk(3.0, 0.1)}, {}};
    auto h = build_contraction(sp.Q, Region::disk(0.01, 0.001));
    auto m = phi_j(prev, sp, h, true);
    EXPECT_EQ(m(0.5), (*prev)(0.5));
    EXPECT_EQ(m(1.5), cplx(-0.25));
    EXPECT_EQ(m(2.05), cplx(3.05));
    EXPECT_EQ(m(3.0), cplx(4.0));
    EXPECT_LT(std::abs(m(1.7) - 0.01), 1e-12);
    EXPECT_THROW(m(5.0), OutsideDomain);
}

TEST(PhiJ, EarlierPiecesReplaceDelta) {
    auto prev = std::make_shared<const Polynomial>(Polynomial::monomial({0.0, 3.0}));
    StagePieces sp{Region::disk(0.0, 1.0), {Region::disk(1.5, 0.05)}, Region::disk(1.7, 0.05), {},
                   {{"D", Region::disk(0.0, 0.1), MapSpec::phi()}, {"A", Region::disk(-0.25, 0.05), MapSpec::phi()}}};
    auto m = phi_j(prev, sp, build_contraction(sp.Q, Region::disk(0.0, 0.01)), false);
    EXPECT_LT(std::abs(m(0.05) - 0.15), 1e-16);
    EXPECT_EQ(m(-0.25), cplx(-0.75));
    EXPECT_THROW(m(0.5), OutsideDomain);
}

TEST(PhiJ, MissingPreviousStage) {
    StagePieces sp{Region::disk(0.0, 1.0), {}, Region::disk(1.7, 0.05), {}, {}};
    EXPECT_THROW(phi_j(nullptr, sp, MapSpec::affine(0.0, 0.1, 1.7), true), UnresolvedPriorStage);
}

TEST(Contraction, WorkedExample) {
    Region Q = Region::disk(5.0, 0.1), C = Region::disk(0.0, 0.04);
    auto h = build_contraction(Q, C);
    EXPECT_LE(std::abs(h.s), 0.06 + 1e-12);
    EXPECT_GT(std::abs(h.s), 0.0);
    EXPECT_LT(std::abs(h(5.0)), 1e-12);
    // image radius 0.1 |s| sits inside C with room to spare
    EXPECT_GT(containment_margin(affine_image(Q, h.s, h.c - h.s * h.q), C), 0.25 * 0.04);
}

TEST(Contraction, SameDiskShrinksStrictly) {
    Region Q = Region::disk(cplx(0.3, 0.1), 0.2);
    auto h = build_contraction(Q, Q);
    EXPECT_LT(std::abs(h.s), 1.0);
    EXPECT_GT(containment_margin(affine_image(Q, h.s, h.c - h.s * h.q), Q), 0.0);
}

TEST(Contraction, DegenerateTargetIsInfeasible) {
    Region ring = Region::annular_sector(0.5, 0.50001, pi);
    EXPECT_THROW(build_contraction(Region::disk(5.0, 0.1), ring), InfeasibleContraction);
}

TEST(AffineImage, DiskAndPolygon) {
    Region d = affine_image(Region::disk(1.0, 0.5), cplx(0, 2), 1.0);
    EXPECT_NEAR(d.signed_distance(cplx(1, 2)), 1.0, 1e-12);
    Region sq = affine_image(Region::polygonal_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 2.0, cplx(0, 1));
    EXPECT_NEAR(sq.signed_distance(cplx(1, 2)), 1.0, 1e-12);
}
