#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace wander {

using cplx = std::complex<double>;

// p(z) = sum_k d_k prod_{i<k} (z - x_i) / scale
struct NewtonForm {
    std::vector<cplx> nodes;   // x_0 .. x_{n-1}
    std::vector<cplx> coeffs;  // d_0 .. d_n
    double scale = 1.0;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    cplx operator()(cplx z) const;
    std::pair<cplx, cplx> with_derivative(cplx z) const;
};

// A polynomial kept as a sum of Newton forms. Stage maps accumulate one term per stage.
class Polynomial {
public:
    Polynomial() = default;
    // Monomial coefficients, lowest degree first; evaluated by Horner.
    static Polynomial monomial(std::vector<cplx> coeffs);
    static Polynomial from_newton(NewtonForm term);

    cplx operator()(cplx z) const;
    std::pair<cplx, cplx> with_derivative(cplx z) const;
    cplx derivative(cplx z) const { return with_derivative(z).second; }

    int degree() const;
    const std::vector<NewtonForm>& terms() const { return terms_; }

    Polynomial operator+(const Polynomial& other) const;
    Polynomial& operator+=(const Polynomial& other);

    // Iterate: f^k(z).
    cplx iterate(cplx z, int k) const;

    nlohmann::json to_json() const;
    static Polynomial from_json(const nlohmann::json& j);

private:
    std::vector<NewtonForm> terms_;
};

}  // namespace wander
