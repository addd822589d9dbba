#include <gtest/gtest.h>

#include <random>

#include "wander/approx.hpp"

using namespace wander;

namespace {

Piece piece(std::string name, Region r, Target t) { return {std::move(name), std::move(r), std::move(t)}; }

}  // namespace

TEST(Approximate, PolynomialTargetIsReproduced) {
    ApproximationTask task;
    task.pieces.push_back(piece("D", Region::disk(0.0, 1.0 / 9), [](cplx z) { return 3.0 * z; }));
    task.constraints.push_back({0.0, 0.0, cplx(3.0)});
    task.epsilon = 1e-6;
    auto res = approximate(task);
    EXPECT_TRUE(res.certificate.passes());
    EXPECT_LT(res.certificate.worst_certified(), 1e-12);
    EXPECT_LT(std::abs(res.poly(0.05) - 0.15), 1e-13);
    EXPECT_LT(res.constraint_residual, 1e-12);
}

TEST(Approximate, TwoDisksToTwoConstants) {
    ApproximationTask task;
    task.pieces.push_back(piece("left", Region::disk(0.0, 0.05), [](cplx) { return cplx(0.0); }));
    task.pieces.push_back(piece("right", Region::disk(1.0, 0.05), [](cplx) { return cplx(1.0); }));
    task.epsilon = 1e-3;
    auto res = approximate(task);
    ASSERT_TRUE(res.certificate.passes());
    // independent sup on a finer grid than the certificate used
    double worst = 0;
    for (int k = 0; k < 5000; ++k) {
        cplx u = std::polar(0.05, 2 * pi * k / 5000);
        worst = std::max({worst, std::abs(res.poly(u)), std::abs(res.poly(1.0 + u) - 1.0)});
    }
    EXPECT_LT(worst, 1e-3);
}

TEST(Approximate, ConstraintsHoldExactlyInCorrectionForm) {
    ApproximationTask task;
    task.pieces.push_back(piece("a", Region::disk(0.5, 0.1), [](cplx z) { return std::exp(z); }));
    task.pieces.push_back(piece("b", Region::disk(-0.5, 0.1), [](cplx) { return cplx(0.0); }));
    task.constraints.push_back({0.0, 0.0, cplx(0.0)});
    task.epsilon = 1e-6;
    auto res = approximate(task);
    ASSERT_TRUE(res.certificate.passes());
    auto [v, d] = res.poly.with_derivative(0.0);
    EXPECT_EQ(v, cplx(0.0));
    EXPECT_EQ(d, cplx(0.0));
}

TEST(Approximate, DegreeBudgetIsReported) {
    ApproximationTask task;
    task.pieces.push_back(piece("a", Region::disk(0.0, 0.2), [](cplx) { return cplx(0.0); }));
    task.pieces.push_back(piece("b", Region::disk(0.41, 0.2), [](cplx) { return cplx(1.0); }));
    task.epsilon = 1e-10;
    ApproxOptions opt;
    opt.max_degree = 20;
    try {
        approximate(task, opt);
        FAIL() << "expected DegreeBudgetExceeded";
    } catch (const DegreeBudgetExceeded& e) {
        EXPECT_FALSE(e.best.certificate.passes());
        EXPECT_LE(e.best.degree, 20);
    }
}

TEST(Approximate, EmptyTaskIsRejected) {
    EXPECT_THROW(approximate(ApproximationTask{}), std::invalid_argument);
}

TEST(CertifyError, ExactTargetGivesZero) {
    auto p = Polynomial::monomial({0.0, 3.0});
    Piece pc = piece("D", Region::disk(0.0, 0.108), [](cplx z) { return 3.0 * z; });
    EXPECT_EQ(certify_error(p, pc, 256), 0.0);
}

TEST(CertifyError, ConstantOffsetIsScaledBySafety) {
    auto p = Polynomial::monomial({1e-4, 3.0});
    Piece pc = piece("D", Region::disk(0.0, 0.108), [](cplx z) { return 3.0 * z; });
    EXPECT_NEAR(certify_error(p, pc, 256, 1.5), 1.5e-4, 1e-15);
    EXPECT_NEAR(certify_error(p, pc, 256, 1.0), 1e-4, 1e-15);
}

TEST(CertifyTask, DoublingAgreesOnEasyTask) {
    ApproximationTask task;
    task.pieces.push_back(piece("D", Region::disk(0.0, 0.108), [](cplx z) { return 3.0 * z; }));
    task.epsilon = 1e-3;
    auto c = certify_task(Polynomial::monomial({1e-4, 3.0}), task, 256);
    EXPECT_TRUE(c.passes());
    EXPECT_TRUE(c.doubling_agrees);
    auto bad = certify_task(Polynomial::monomial({1e-2, 3.0}), task, 256);
    EXPECT_FALSE(bad.passes());
}

TEST(Univalence, TriplingOnD) {
    auto u = certify_univalence(Polynomial::monomial({0.0, 3.0}), Region::disk(0.0, 0.108));
    EXPECT_TRUE(u.granted);
    EXPECT_NEAR(u.mu, 3.0, 1e-12);
}

TEST(Univalence, SquareOnUnitDiskIsRefused) {
    auto p = Polynomial::monomial({0.0, 0.0, 1.0});
    auto u = certify_univalence(p, Region::disk(0.0, 1.0));
    EXPECT_FALSE(u.granted);
    EXPECT_THROW(require_univalence(p, Region::disk(0.0, 1.0)), CertificationFailed);
}

TEST(Univalence, SquareAwayFromCriticalPoint) {
    auto u = certify_univalence(Polynomial::monomial({0.0, 0.0, 1.0}), Region::disk(1.0, 0.5));
    EXPECT_TRUE(u.granted);
    EXPECT_NEAR(u.mu, 1.0, 0.05);
}

TEST(Univalence, BoundIsEnforced) {
    auto p = Polynomial::monomial({0.0, 3.0});
    EXPECT_TRUE(certify_univalence(p, Region::disk(0.0, 0.1), 32, 1.5).granted);
    EXPECT_FALSE(certify_univalence(p, Region::disk(0.0, 0.1), 32, 3.5).granted);
}

TEST(EpsilonSearch, TrivialClaimsReturnCap) {
    std::vector<Claim> cs{{"always", [](double) { return 1.0; }}};
    EXPECT_EQ(epsilon_search(cs, 0.02), 0.02);
}

TEST(EpsilonSearch, MarginHalving) {
    std::vector<Claim> cs{{"margin", [](double) { return 0.01; }}};
    double e = epsilon_search(cs, 0.02);
    EXPECT_LE(e, 0.005);
    EXPECT_GE(2 * e, 0.005 / 2);
}

TEST(EpsilonSearch, AmplifiedClaim) {
    std::vector<Claim> cs{{"orbit", [](double eps) { return 0.01 - 100 * eps; }}};
    double e = epsilon_search(cs, 1.0);
    EXPECT_GE(0.01 - 100 * e, 2 * e);
    EXPECT_LT(0.01 - 200 * e, 4 * e);
}

TEST(EpsilonSearch, InfeasibleThrows) {
    std::vector<Claim> cs{{"never", [](double) { return -1.0; }}};
    EXPECT_THROW(epsilon_search(cs, 0.1), NoFeasibleEpsilon);
}

TEST(Hermite, InterpolatesValuesAndDerivatives) {
    std::vector<Constraint> cs{{0.0, 0.0, cplx(3.0)}, {cplx(0.5, 0.1), cplx(1.0, -1.0), std::nullopt},
                               {cplx(-0.3, 0.2), cplx(0.2), cplx(-1.0, 0.5)}};
    auto h = hermite_interpolant(cs);
    for (const auto& c : cs) {
        auto [v, d] = h.with_derivative(c.point);
        EXPECT_LT(std::abs(v - c.value), 1e-13);
        if (c.derivative) EXPECT_LT(std::abs(d - *c.derivative), 1e-12);
    }
    auto w = vanishing_factor(cs);
    EXPECT_EQ(w.degree(), 5);
    for (const auto& c : cs) {
        auto [v, d] = w.with_derivative(c.point);
        EXPECT_LT(std::abs(v), 1e-15);
        if (c.derivative) EXPECT_LT(std::abs(d), 1e-14);
    }
}
