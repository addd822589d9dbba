#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "wander/polynomial.hpp"

using namespace wander;

namespace {

std::vector<cplx> random_points(int n, std::mt19937& rng, double r = 1.0) {
    std::uniform_real_distribution<double> u(-r, r);
    std::vector<cplx> out;
    for (int i = 0; i < n; ++i) out.emplace_back(u(rng), u(rng));
    return out;
}

}  // namespace

TEST(Polynomial, MonomialMatchesPowerSum) {
    std::mt19937 rng(1);
    auto c = random_points(9, rng);
    auto p = Polynomial::monomial(c);
    EXPECT_EQ(p.degree(), 8);
    for (auto z : random_points(40, rng, 1.3)) EXPECT_LT(std::abs(p(z) - oracle::horner_free(c, z)), 1e-12);
}

TEST(Polynomial, NewtonMatchesExpandedCoefficients) {
    std::mt19937 rng(2);
    for (int deg : {0, 1, 4, 11}) {
        NewtonForm t;
        t.nodes = random_points(deg, rng, 0.5);
        t.coeffs = random_points(deg + 1, rng);
        auto mono = oracle::expand_newton(t.nodes, t.coeffs);
        auto p = Polynomial::from_newton(t);
        EXPECT_EQ(p.degree(), deg);
        for (auto z : random_points(30, rng)) EXPECT_LT(std::abs(p(z) - oracle::horner_free(mono, z)), 1e-11);
    }
}

TEST(Polynomial, ScaledNewtonForm) {
    NewtonForm t;
    t.nodes = {0.0, 0.0};
    t.coeffs = {1.0, 2.0, 3.0};
    t.scale = 2.0;
    // 1 + 2 (z/2) + 3 (z/2)^2
    for (cplx z : {cplx(0.3, 0.1), cplx(-1, 2)}) EXPECT_LT(std::abs(t(z) - (1.0 + z + 0.75 * z * z)), 1e-14);
}

TEST(Polynomial, DerivativeMatchesCentralDifference) {
    std::mt19937 rng(3);
    NewtonForm t;
    t.nodes = random_points(7, rng, 0.4);
    t.coeffs = random_points(8, rng);
    auto p = Polynomial::from_newton(t) + Polynomial::monomial({0.0, 3.0});
    const double h = 1e-5;
    for (auto z : random_points(20, rng, 0.8)) {
        cplx fd = (p(z + h) - p(z - h)) / (2 * h);
        EXPECT_LT(std::abs(p.derivative(z) - fd), 1e-6 * (1 + std::abs(fd)));
        EXPECT_LT(std::abs(p.with_derivative(z).first - p(z)), 1e-13);
    }
}

TEST(Polynomial, SumAddsPointwise) {
    std::mt19937 rng(4);
    auto a = Polynomial::monomial(random_points(5, rng));
    auto b = Polynomial::monomial(random_points(3, rng));
    auto s = a + b;
    EXPECT_EQ(s.degree(), 4);
    for (auto z : random_points(10, rng)) EXPECT_LT(std::abs(s(z) - a(z) - b(z)), 1e-14);
    a += b;
    for (auto z : random_points(10, rng)) EXPECT_EQ(a(z), s(z));
}

TEST(Polynomial, IterateOfTripling) {
    auto p = Polynomial::monomial({0.0, 3.0});
    EXPECT_EQ(p.iterate(0.01, 0), cplx(0.01));
    EXPECT_NEAR(std::abs(p.iterate(0.01, 5) - 2.43), 0.0, 1e-14);
    EXPECT_EQ(p.iterate(0.0, 10), cplx(0.0));
}

TEST(Polynomial, JsonRoundTripIsBitExact) {
    std::mt19937 rng(5);
    NewtonForm t;
    t.nodes = random_points(12, rng);
    t.coeffs = random_points(13, rng);
    t.scale = 0.37;
    auto p = Polynomial::monomial({0.0, 3.0}) + Polynomial::from_newton(t);
    auto back = Polynomial::from_json(nlohmann::json::parse(p.to_json().dump()));
    for (auto z : random_points(50, rng, 1.5)) EXPECT_EQ(back(z), p(z));
    EXPECT_EQ(back.degree(), p.degree());
}
