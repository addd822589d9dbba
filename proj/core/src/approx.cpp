#include "wander/approx.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace wander {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct Grouped {
    cplx point;
    cplx value;
    std::optional<cplx> derivative;
};

std::vector<Grouped> group_constraints(const std::vector<Constraint>& cs) {
    std::vector<Grouped> out;
    for (const auto& c : cs) {
        auto it = std::find_if(out.begin(), out.end(), [&](const Grouped& g) { return std::abs(g.point - c.point) < 1e-14; });
        if (it == out.end()) {
            out.push_back({c.point, c.value, c.derivative});
            continue;
        }
        if (std::abs(it->value - c.value) > 1e-14) throw ConstraintConflict("conflicting values at one constraint point");
        if (c.derivative) {
            if (it->derivative && std::abs(*it->derivative - *c.derivative) > 1e-14)
                throw ConstraintConflict("conflicting derivatives at one constraint point");
            it->derivative = c.derivative;
        }
    }
    return out;
}

std::vector<int> leja_order(const std::vector<cplx>& pts, int count, double& log_capacity) {
    std::vector<int> chosen;
    std::vector<double> logp(pts.size(), 0.0);
    std::vector<char> used(pts.size(), 0);
    int first = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (std::abs(pts[i]) > std::abs(pts[first])) first = static_cast<int>(i);
    chosen.push_back(first);
    used[first] = 1;
    double last = 0;
    while (static_cast<int>(chosen.size()) < count) {
        cplx x = pts[chosen.back()];
        int best = -1;
        double bv = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (used[i]) continue;
            double d = std::abs(pts[i] - x);
            logp[i] += d > 0 ? std::log(d) : -1e300;
            if (logp[i] > bv) {
                bv = logp[i];
                best = static_cast<int>(i);
            }
        }
        if (best < 0) break;
        last = bv / static_cast<double>(chosen.size());
        chosen.push_back(best);
        used[best] = 1;
    }
    log_capacity = last;
    return chosen;
}

// Newton coefficients of the data d at nodes x.
std::vector<cplx> divided_differences(const std::vector<cplx>& x, std::vector<cplx> d) {
    std::size_t n = x.size();
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t i = n - 1; i >= k; --i) d[i] = (d[i] - d[i - 1]) / (x[i] - x[i - k]);
    return d;
}

}  // namespace

bool ErrorCertificate::passes() const {
    for (std::size_t i = 0; i < certified.size(); ++i)
        if (!(certified[i] <= tolerance[i])) return false;
    return doubling_agrees;
}

double ErrorCertificate::worst_certified(bool include_guards) const {
    double w = 0;
    for (std::size_t i = 0; i < certified.size(); ++i)
        if (include_guards || !guard[i]) w = std::max(w, certified[i]);
    return w;
}

Polynomial hermite_interpolant(const std::vector<Constraint>& cs) {
    auto g = group_constraints(cs);
    if (g.empty()) return Polynomial::monomial({0.0});
    std::vector<cplx> z, f;
    std::vector<std::optional<cplx>> der;
    for (const auto& c : g) {
        z.push_back(c.point);
        f.push_back(c.value);
        der.push_back(std::nullopt);
        if (c.derivative) {
            z.push_back(c.point);
            f.push_back(c.value);
            der.push_back(c.derivative);
        }
    }
    std::size_t n = z.size();
    std::vector<cplx> d = f;
    // First order handles the repeated nodes; higher orders never see coincident endpoints.
    for (std::size_t i = n - 1; i >= 1; --i) {
        if (std::abs(z[i] - z[i - 1]) < 1e-14)
            d[i] = *der[i];
        else
            d[i] = (d[i] - d[i - 1]) / (z[i] - z[i - 1]);
    }
    for (std::size_t k = 2; k < n; ++k)
        for (std::size_t i = n - 1; i >= k; --i) d[i] = (d[i] - d[i - 1]) / (z[i] - z[i - k]);
    NewtonForm t;
    t.nodes.assign(z.begin(), z.end() - 1);
    t.coeffs = d;
    return Polynomial::from_newton(std::move(t));
}

Polynomial vanishing_factor(const std::vector<Constraint>& cs) {
    auto g = group_constraints(cs);
    NewtonForm t;
    for (const auto& c : g) {
        t.nodes.push_back(c.point);
        if (c.derivative) t.nodes.push_back(c.point);
    }
    t.coeffs.assign(t.nodes.size() + 1, 0.0);
    t.coeffs.back() = 1.0;
    return Polynomial::from_newton(std::move(t));
}

double certify_error(const Polynomial& p, const Piece& piece, int grid_density, double safety) {
    double m = 0;
    for (const auto& c : piece.region.boundary_curves(grid_density))
        for (auto z : c) m = std::max(m, std::abs(p(z) - piece.target(z)));
    return safety * m;
}

ErrorCertificate certify_task(const Polynomial& p, const ApproximationTask& task, int grid_density, double safety) {
    ErrorCertificate c;
    c.grid_density = grid_density;
    c.safety = safety;
    bool pass_lo = true, pass_hi = true;
    for (const auto& piece : task.pieces) {
        double tol = piece.tolerance > 0 ? piece.tolerance : task.epsilon;
        double lo = certify_error(p, piece, grid_density, safety);
        double hi = certify_error(p, piece, 2 * grid_density, safety);
        c.names.push_back(piece.name);
        c.certified.push_back(std::max(lo, hi));
        c.measured.push_back(std::max(lo, hi) / safety);
        c.tolerance.push_back(tol);
        c.guard.push_back(piece.guard);
        pass_lo = pass_lo && lo <= tol;
        pass_hi = pass_hi && hi <= tol;
    }
    c.doubling_agrees = pass_lo == pass_hi;
    return c;
}

ApproxResult approximate(const ApproximationTask& task, const ApproxOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    if (task.pieces.empty()) throw std::invalid_argument("approximation task has no pieces");
    Polynomial H = hermite_interpolant(task.constraints);
    Polynomial omega = vanishing_factor(task.constraints);
    const NewtonForm& om = omega.terms().front();
    int omega_deg = static_cast<int>(om.nodes.size());

    std::vector<cplx> Z, Zv;
    std::vector<int> owner_v;
    std::vector<double> w;
    std::vector<cplx> F, Fv;
    for (std::size_t i = 0; i < task.pieces.size(); ++i) {
        const Piece& pc = task.pieces[i];
        for (const auto& c : pc.region.boundary_curves(opt.samples_per_piece))
            for (auto z : c) {
                Z.push_back(z);
                F.push_back(pc.target(z) - H(z));
                w.push_back(pc.weight);
            }
        for (const auto& c : pc.region.boundary_curves(opt.samples_per_piece * opt.validation_factor))
            for (auto z : c) {
                Zv.push_back(z);
                Fv.push_back(pc.target(z) - H(z));
                owner_v.push_back(static_cast<int>(i));
            }
    }
    const int M = static_cast<int>(Z.size()), Mv = static_cast<int>(Zv.size());
    const int nmax = std::min(opt.max_degree, M - 2);

    std::vector<double> tol(task.pieces.size());
    for (std::size_t i = 0; i < tol.size(); ++i)
        tol[i] = task.pieces[i].tolerance > 0 ? task.pieces[i].tolerance : task.epsilon;

    Eigen::Map<const Eigen::VectorXcd> zt(Z.data(), M), zv(Zv.data(), Mv);
    Vec sw(M), b(M), fv(Mv);
    for (int i = 0; i < M; ++i) {
        sw[i] = std::sqrt(w[i]);
        b[i] = sw[i] * F[i];
    }
    for (int i = 0; i < Mv; ++i) fv[i] = Fv[i];

    Mat U(M, nmax + 1), V(Mv, nmax + 1), Hs = Mat::Zero(nmax + 1, nmax);
    Vec om_t(M), om_v(Mv);
    for (int i = 0; i < M; ++i) om_t[i] = sw[i] * om(Z[i]);
    for (int i = 0; i < Mv; ++i) om_v[i] = om(Zv[i]);
    double beta = om_t.norm();
    U.col(0) = om_t / beta;
    V.col(0) = om_v / beta;

    std::vector<cplx> coef;
    coef.push_back(U.col(0).dot(b));
    Vec approx_v = coef[0] * V.col(0);

    auto worst_ratio = [&]() {
        std::vector<double> err(task.pieces.size(), 0.0);
        for (int i = 0; i < Mv; ++i) {
            double e = std::abs(approx_v[i] - fv[i]);
            err[owner_v[i]] = std::max(err[owner_v[i]], e);
        }
        double r = 0;
        for (std::size_t i = 0; i < err.size(); ++i) r = std::max(r, err[i] * opt.safety / tol[i]);
        return r;
    };

    auto finalize = [&](int n) {
        // Values of r = c/omega at Leja points of the training set, then Newton coefficients.
        double logcap = 0;
        auto idx = leja_order(Z, n + 1, logcap);
        double rho = std::exp(logcap);
        if (!(rho > 0) || !std::isfinite(rho)) rho = 1.0;
        Eigen::Map<const Vec> cf(coef.data(), n + 1);
        std::vector<cplx> x(idx.size()), vals(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            x[k] = Z[idx[k]];
            cplx s = U.row(idx[k]).head(n + 1).transpose().cwiseProduct(cf).sum();
            vals[k] = s / sw[idx[k]] / om(x[k]);
        }
        std::vector<cplx> xs(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) xs[k] = x[k] / rho;
        auto d = divided_differences(xs, vals);
        NewtonForm t;
        t.scale = rho;
        t.nodes = om.nodes;
        t.nodes.insert(t.nodes.end(), x.begin(), x.end() - 1);
        t.coeffs.assign(omega_deg, 0.0);
        double pre = std::pow(rho, omega_deg);
        for (auto v : d) t.coeffs.push_back(v * pre);
        ApproxResult res;
        res.poly = H + Polynomial::from_newton(std::move(t));
        res.degree = n + omega_deg;
        res.certificate = certify_task(res.poly, task, opt.samples_per_piece * opt.validation_factor, opt.safety);
        double r = 0;
        for (const auto& c : task.constraints) {
            auto [v, dv] = res.poly.with_derivative(c.point);
            r = std::max(r, std::abs(v - c.value));
            if (c.derivative) r = std::max(r, std::abs(dv - *c.derivative));
        }
        res.constraint_residual = r;
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    };

    double best_ratio = worst_ratio();
    int best_n = 0;
    if (best_ratio <= opt.headroom) {
        auto res = finalize(0);
        if (res.certificate.passes()) return res;
    }
    int reached = 0;
    for (int k = 0; k < nmax; ++k) {
        Vec u = zt.cwiseProduct(U.col(k));
        for (int pass = 0; pass < 2; ++pass) {
            Vec h = U.leftCols(k + 1).adjoint() * u;
            u.noalias() -= U.leftCols(k + 1) * h;
            Hs.col(k).head(k + 1) += h;
        }
        double nrm = u.norm();
        if (!(nrm > 0)) break;
        Hs(k + 1, k) = nrm;
        U.col(k + 1) = u / nrm;
        Vec v = zv.cwiseProduct(V.col(k));
        v.noalias() -= V.leftCols(k + 1) * Hs.col(k).head(k + 1);
        V.col(k + 1) = v / Hs(k + 1, k);
        coef.push_back(U.col(k + 1).dot(b));
        approx_v += coef.back() * V.col(k + 1);

        int n = k + 1;
        reached = n;
        double r = worst_ratio();
        if (r < best_ratio) {
            best_ratio = r;
            best_n = n;
        }
        if (opt.progress && n % 50 == 0) opt.progress(n + omega_deg, r);
        if (r <= opt.headroom) {
            auto res = finalize(n);
            if (res.certificate.passes()) return res;
        }
        if (r > opt.breakdown_factor * best_ratio) break;
    }
    auto res = finalize(best_n);
    if (res.certificate.passes()) return res;
    std::string stop = reached < nmax ? " (basis broke down at degree " : " (budget ";
    throw DegreeBudgetExceeded("no polynomial certifies the requested tolerance; best degree " +
                                   std::to_string(best_n + omega_deg) + stop +
                                   std::to_string(reached + omega_deg) + ")",
                               std::move(res));
}

UnivalenceCertificate certify_univalence(const Polynomial& poly, const Region& r, int probe_count, double bound,
                                         int grid) {
    return certify_univalence(Holomorphic([&poly](cplx z) { return poly.with_derivative(z); }), r, probe_count, bound,
                              grid);
}

UnivalenceCertificate certify_univalence(const Holomorphic& map, const Region& r, int probe_count, double bound,
                                         int grid) {
    UnivalenceCertificate cert{r};
    auto value = [&](cplx z) { return map(z).first; };
    auto interior = r.interior_grid(grid);
    double mu = std::numeric_limits<double>::infinity();
    cplx witness{};
    auto curves = r.boundary_curves(1024);
    for (auto z : interior) {
        double d = std::abs(map(z).second);
        if (d < mu) {
            mu = d;
            witness = z;
        }
    }
    for (const auto& c : curves)
        for (auto z : c) {
            double d = std::abs(map(z).second);
            if (d < mu) {
                mu = d;
                witness = z;
            }
        }
    cert.mu = mu;
    cert.witness = witness;

    double inr = r.inradius();
    std::vector<cplx> probes;
    for (auto z : interior)
        if (r.signed_distance(z) > 0.1 * inr) probes.push_back(z);
    if (static_cast<int>(probes.size()) > probe_count) {
        std::vector<cplx> pick;
        double stride = static_cast<double>(probes.size()) / probe_count;
        for (int i = 0; i < probe_count; ++i) pick.push_back(probes[static_cast<std::size_t>(i * stride)]);
        probes.swap(pick);
    }
    cert.probes = static_cast<int>(probes.size());

    bool ok = curves.size() == 1 && !probes.empty();
    for (int count = 1024; ok && count <= 65536; count *= 4) {
        std::vector<cplx> image;
        auto ring = r.boundary_curves(count);
        for (auto z : ring.front()) image.push_back(value(z));
        bool all_decided = true;
        for (auto z : probes) {
            try {
                if (winding_number(image, value(z)) != 1) {
                    ok = false;
                    cert.witness = z;
                    break;
                }
            } catch (const TooCloseToCurve&) {
                all_decided = false;
            }
        }
        if (!ok || all_decided) break;
        if (count * 4 > 65536) ok = false;
    }
    cert.winding_ok = ok;
    cert.granted = ok && mu > bound && mu > 0;
    return cert;
}

UnivalenceCertificate require_univalence(const Polynomial& p, const Region& r, int probe_count, double bound, int grid) {
    auto c = certify_univalence(p, r, probe_count, bound, grid);
    if (!c.granted) throw CertificationFailed("univalence not certified", c.witness);
    return c;
}

double epsilon_search(const std::vector<Claim>& claims, double eps_cap, double floor) {
    for (double eps = eps_cap; eps >= floor; eps *= 0.5) {
        bool ok = true;
        for (const auto& c : claims)
            if (!(c.margin(eps) >= 2 * eps)) {
                ok = false;
                break;
            }
        if (ok) return eps;
    }
    throw NoFeasibleEpsilon("no epsilon above the floor satisfies every claim");
}

}  // namespace wander
