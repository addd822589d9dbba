#include <gtest/gtest.h>

#include "wander/branches.hpp"

using namespace wander;

namespace {

const Polynomial& tripling() {
    static const Polynomial p = Polynomial::monomial({0.0, 3.0});
    return p;
}

Region disk_D() { return Region::disk(0.0, 0.108); }

}  // namespace

TEST(InvertBranch, TriplingOnD) {
    cplx z = invert_branch(tripling(), disk_D(), 0.3, 0.0);
    EXPECT_LT(std::abs(z - 0.1), 1e-14);
}

TEST(InvertBranch, PreimageOutsideDomain) {
    try {
        invert_branch(tripling(), disk_D(), 10.0, 0.0);
        FAIL() << "expected NoBranch";
    } catch (const NoBranch& e) {
        EXPECT_EQ(e.point, cplx(10.0));
    }
}

TEST(InvertBranch, SquareSelectsBranchByDomain) {
    auto sq = Polynomial::monomial({0.0, 0.0, 1.0});
    Region right = Region::disk(1.0, 0.5);
    EXPECT_LT(std::abs(invert_branch(sq, right, 1.21, 1.0) - 1.1), 1e-14);
    EXPECT_THROW(invert_branch(sq, right, 1.21, -1.0), NoBranch);
}

TEST(InvertBranch, ResidualPropertyOnRandomTargets) {
    auto f = Polynomial::monomial({0.0, 3.0, 0.4, -0.2});
    Region dom = Region::disk(0.0, 0.2);
    for (int k = 0; k < 24; ++k) {
        cplx z0 = std::polar(0.15, 2 * pi * k / 24);
        cplx w = f(z0);
        cplx z = invert_branch(f, dom, w, w / 3.0);
        EXPECT_LT(std::abs(f(z) - w), 1e-10);
        EXPECT_LT(std::abs(z - z0), 1e-9);
    }
}

TEST(Transport, DiskUnderTripling) {
    Region r = transport_region(tripling(), disk_D(), Region::disk(0.0, 0.3), [](cplx w) { return w / 3.0; });
    EXPECT_NEAR(r.signed_distance(0.0), 0.1, 1e-5);
    EXPECT_NEAR(r.signed_distance(cplx(0.0, 0.05)), 0.05, 1e-5);
    EXPECT_LT(r.signed_distance(0.11), 0.0);
}

TEST(Transport, DisjointTargetIsEmpty) {
    EXPECT_THROW(transport_region(tripling(), disk_D(), Region::disk(5.0, 0.1), [](cplx w) { return w / 3.0; }),
                 EmptyIntersection);
}

TEST(Transport, PartialCoverIsReported) {
    EXPECT_THROW(transport_region(tripling(), disk_D(), Region::disk(0.3, 0.1), [](cplx w) { return w / 3.0; }),
                 NoBranch);
}

TEST(BranchG, ZeroStepsIsIdentity) {
    auto g = branch_G(tripling(), disk_D(), 0);
    EXPECT_EQ(g.size(), 0u);
    EXPECT_EQ(g(cplx(0.2, 0.1)), cplx(0.2, 0.1));
}

TEST(BranchG, TwoSteps) {
    auto g = branch_G(tripling(), disk_D(), 2);
    EXPECT_LT(std::abs(g(0.27) - 0.03), 1e-15);
    auto tr = g.trace(0.27);
    ASSERT_EQ(tr.size(), 3u);
    EXPECT_LT(std::abs(tr[1] - 0.09), 1e-15);
}

TEST(BranchG, NegativeDepthRejected) { EXPECT_THROW(branch_G(tripling(), disk_D(), -1), std::invalid_argument); }

TEST(BranchF, WalksBandsBackwards) {
    auto shift = Polynomial::monomial({1.0, 1.0});
    std::vector<Region> bands{Region::disk(0.2, 0.1), Region::disk(1.2, 0.1)};
    auto F = branch_F(shift, bands);
    ASSERT_EQ(F.size(), 2u);
    EXPECT_LT(std::abs(F(2.2) - 0.2), 1e-14);
    auto tr = F.trace(2.25);
    EXPECT_LT(std::abs(tr[1] - 1.25), 1e-14);
    EXPECT_LT(std::abs(tr[2] - 0.25), 1e-14);
    EXPECT_THROW(F(5.0), NoBranch);
}

TEST(BranchF, EmptyBandIsRejected) {
    auto shift = Polynomial::monomial({1.0, 1.0});
    std::vector<Region> bands{Region::disk(0.2, 0.1), Region::polygonal_hull({{0, 0}, {1, 0}, {2, 0}})};
    EXPECT_THROW(branch_F(shift, bands), ChainDomainEmpty);
}

TEST(Ladder, ExactTriplingShrinksByThree) {
    const double r0 = 5.0 / 27, r1 = 7.0 / 27;
    Region B0 = Region::annular_sector(r0, r1, 0.12);
    auto L = build_preimage_ladder(tripling(), disk_D(), B0, 4);
    ASSERT_EQ(L.radii.size(), 4u);
    double expect = r1;
    for (double rho : L.radii) {
        expect /= 3;
        EXPECT_NEAR(rho, expect, 1e-12 * expect);
    }
    EXPECT_TRUE(L.disjoint);
    EXPECT_TRUE(L.shrinking);
    EXPECT_GT(L.min_gap, 0.0);
}

TEST(Ladder, DepthZeroIsEmpty) {
    auto L = build_preimage_ladder(tripling(), disk_D(), Region::annular_sector(5.0 / 27, 7.0 / 27, 0.12), 0);
    EXPECT_TRUE(L.pieces.empty());
    EXPECT_TRUE(L.disjoint);
    EXPECT_TRUE(L.shrinking);
}

TEST(ConstructC, LargestDiskPulledBack) {
    Region E = Region::disk(5.0, 1.0);
    auto inside = [&](cplx z) { return E.signed_distance(z); };
    auto F = branch_F(tripling(), {});
    auto G = branch_G(tripling(), Region::disk(0.0, 2.0), 1);
    auto t = construct_Cj(inside, Box{3.5, 6.5, -1.5, 1.5}, Region::disk(0.0, 0.1), 0.01, F, G);
    EXPECT_NEAR(t.x_radius, 1.0, 1e-4);
    EXPECT_NEAR(t.X.signed_distance(5.0), 0.8, 1e-4);
    EXPECT_NEAR(t.C.signed_distance(5.0 / 3), 0.8 / 3, 1e-4);
    EXPECT_GT(t.clearance, 0.0);
}

TEST(ConstructC, NoRoomThrows) {
    Region E = Region::disk(0.0, 0.05);
    auto inside = [&](cplx z) { return E.signed_distance(z); };
    auto F = branch_F(tripling(), {});
    auto G = branch_G(tripling(), disk_D(), 0);
    EXPECT_THROW(construct_Cj(inside, Box{-0.1, 0.1, -0.1, 0.1}, Region::disk(0.0, 0.2), 0.0, F, G), NoRoomForX);
}
