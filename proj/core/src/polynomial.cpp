#include "wander/polynomial.hpp"

#include <algorithm>

#include "wander/hexfloat.hpp"

namespace wander {

cplx NewtonForm::operator()(cplx z) const {
    if (coeffs.empty()) return 0.0;
    cplx p = coeffs.back();
    for (int k = degree() - 1; k >= 0; --k) p = p * ((z - nodes[k]) / scale) + coeffs[k];
    return p;
}

std::pair<cplx, cplx> NewtonForm::with_derivative(cplx z) const {
    if (coeffs.empty()) return {0.0, 0.0};
    cplx p = coeffs.back(), dp = 0.0;
    for (int k = degree() - 1; k >= 0; --k) {
        cplx t = (z - nodes[k]) / scale;
        dp = dp * t + p / scale;
        p = p * t + coeffs[k];
    }
    return {p, dp};
}

Polynomial Polynomial::monomial(std::vector<cplx> coeffs) {
    while (coeffs.size() > 1 && coeffs.back() == cplx(0)) coeffs.pop_back();
    NewtonForm t;
    t.coeffs = std::move(coeffs);
    t.nodes.assign(t.coeffs.empty() ? 0 : t.coeffs.size() - 1, cplx(0));
    Polynomial p;
    p.terms_.push_back(std::move(t));
    return p;
}

Polynomial Polynomial::from_newton(NewtonForm term) {
    if (term.nodes.size() + 1 != term.coeffs.size() && !term.coeffs.empty())
        throw std::invalid_argument("Newton form needs one more coefficient than nodes");
    Polynomial p;
    p.terms_.push_back(std::move(term));
    return p;
}

cplx Polynomial::operator()(cplx z) const {
    cplx s = 0.0;
    for (const auto& t : terms_) s += t(z);
    return s;
}

std::pair<cplx, cplx> Polynomial::with_derivative(cplx z) const {
    cplx s = 0.0, d = 0.0;
    for (const auto& t : terms_) {
        auto [a, b] = t.with_derivative(z);
        s += a;
        d += b;
    }
    return {s, d};
}

int Polynomial::degree() const {
    int d = -1;
    for (const auto& t : terms_) {
        int k = t.degree();
        while (k >= 0 && t.coeffs[k] == cplx(0)) --k;
        d = std::max(d, k);
    }
    return std::max(d, 0);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial p = *this;
    p += o;
    return p;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
}

cplx Polynomial::iterate(cplx z, int k) const {
    for (int i = 0; i < k; ++i) z = (*this)(z);
    return z;
}

nlohmann::json Polynomial::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : terms_)
        terms.push_back({{"scale", hex_double(t.scale)}, {"nodes", hex_array(t.nodes)}, {"coeffs", hex_array(t.coeffs)}});
    return {{"terms", terms}};
}

Polynomial Polynomial::from_json(const nlohmann::json& j) {
    Polynomial p;
    for (const auto& e : j.at("terms")) {
        NewtonForm t;
        t.scale = parse_hex_double(e.at("scale").get<std::string>());
        t.nodes = parse_hex_array(e.at("nodes"));
        t.coeffs = parse_hex_array(e.at("coeffs"));
        p.terms_.push_back(std::move(t));
    }
    return p;
}

}  // namespace wander
