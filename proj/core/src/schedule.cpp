#include "wander/schedule.hpp"

#include <cmath>
#include <memory>
#include <numeric>

namespace wander {

Schedule::Schedule(Seq n, Seq m, std::string label) : n_(std::move(n)), m_(std::move(m)), label_(std::move(label)) {
    if (!n_ || !m_) throw InvalidSchedule("schedule needs both sequences");
}

Schedule Schedule::explicit_lists(std::vector<long long> n, std::vector<long long> m) {
    if (n.size() != m.size() || n.empty()) throw InvalidSchedule("n and m lists must be nonempty and equal length");
    auto nn = std::make_shared<const std::vector<long long>>(std::move(n));
    auto mm = std::make_shared<const std::vector<long long>>(std::move(m));
    auto at = [](std::shared_ptr<const std::vector<long long>> v) {
        return [v](long long j) {
            if (j < 1 || j > static_cast<long long>(v->size())) throw std::out_of_range("schedule index beyond list");
            return (*v)[j - 1];
        };
    };
    Schedule s(at(nn), at(mm), "explicit");
    s.length_ = static_cast<long long>(nn->size());
    s.validate(*s.length_);
    return s;
}

long long Schedule::n(long long j) const { return j <= 0 ? 0 : n_(j); }
long long Schedule::m(long long j) const { return j <= 0 ? 0 : m_(j); }

void Schedule::validate(long long J) const {
    for (long long j = 1; j <= J; ++j) {
        if (n(j) < 0) throw InvalidSchedule("n_j must be non-negative");
        if (m(j) < 1) throw InvalidSchedule("m_j must be a natural number");
        if (j > 1 && m(j) <= m(j - 1)) throw InvalidSchedule("m_j must be strictly increasing");
    }
}

long long cumulative_N(const Schedule& s, long long j) {
    long long N = 0;
    for (long long i = 1; i <= j; ++i) N += s.n(i) + s.m(i);
    return N;
}

long long block_index(const Schedule& s, long long k) {
    long long N = 0, p = 0;
    while (true) {
        long long next = N + s.n(p + 1) + s.m(p + 1);
        if (next > k) return p;
        N = next;
        ++p;
    }
}

bool in_D(const Schedule& s, long long n) {
    if (n < 1) throw std::invalid_argument("in_D needs n >= 1");
    long long N = 0, p = 0;
    while (true) {
        long long np = s.n(p + 1);
        if (n <= N + np) return true;
        long long next = N + np + s.m(p + 1);
        if (n <= next) return false;
        N = next;
        ++p;
    }
}

Rational density(const Schedule& s, long long k) {
    if (k < 1) throw std::invalid_argument("density needs k >= 1");
    long long N = 0, S = 0, p = 0;
    while (true) {
        long long np = s.n(p + 1), next = N + np + s.m(p + 1);
        if (next > k) return Rational(S + std::min(np, k - N), k);
        S += np;
        N = next;
        ++p;
    }
}

std::pair<Rational, Rational> density_bounds(const Schedule& s, long long k) {
    long long N = 0, S = 0, p = 0;
    while (true) {
        long long np = s.n(p + 1), next = N + np + s.m(p + 1);
        if (next > k) {
            Rational lower(S, next);
            Rational upper = N + np > 0 ? Rational(S + np, N + np) : Rational(0);
            return {lower, upper};
        }
        S += np;
        N = next;
        ++p;
    }
}

Rational to_rational(double x, long long max_den) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
    bool neg = x < 0;
    x = std::abs(x);
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(r);
        long long ai = static_cast<long long>(a);
        long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        double frac = r - a;
        if (frac < 1e-12 || std::abs(static_cast<double>(h1) / k1 - x) < 1e-15) break;
        r = 1.0 / frac;
    }
    Rational q(h1, k1);
    return neg ? -q : q;
}

Schedule lambda_schedule(double lambda, long long m_offset) {
    if (!(lambda >= 0 && lambda <= 1)) throw InvalidSchedule("lambda must lie in [0, 1]");
    auto m = [m_offset](long long j) { return j + m_offset; };
    std::string label = "lambda=" + std::to_string(lambda);
    if (lambda == 1) return Schedule([](long long j) { return j * j; }, m, label);
    Rational q = to_rational(lambda);
    Rational ratio = q / (Rational(1) - q);
    long long a = ratio.numerator(), b = ratio.denominator();
    auto n = [a, b](long long j) {
        long long num = a * j;
        return num / b + (num % b != 0 ? 1 : 0);
    };
    return Schedule(n, m, label);
}

Schedule shifted_schedule(const Schedule& s, long long C) {
    if (C < 0) throw InvalidSchedule("shift must be non-negative");
    auto n = [s, C](long long j) { return std::max(0LL, s.n(j) - C); };
    auto m = [s, C](long long j) { return s.m(j) + std::min(s.n(j), C); };
    return Schedule(n, m, s.label() + ",shift=" + std::to_string(C));
}

MultiCenterSchedule::MultiCenterSchedule(std::vector<double> l) : lambdas(std::move(l)) {
    if (lambdas.empty()) throw InvalidSchedule("need at least one center");
    Rational total = 0;
    for (double x : lambdas) {
        if (!(x >= 0)) throw InvalidSchedule("center weights must be non-negative");
        exact_.push_back(to_rational(x));
        total += exact_.back();
    }
    if (total > 1) throw InvalidSchedule("center weights must sum to at most 1");
}

long long MultiCenterSchedule::n(int l, long long j) const {
    if (l < 1 || l > p()) throw CenterOutOfRange("center index out of range");
    const Rational& q = exact_[l - 1];
    long long num = q.numerator() * j * j, den = q.denominator();
    return num / den + (num % den != 0 ? 1 : 0);
}

namespace {

// Walks the cyclic schedule, calling visit(label, length) per block until it returns false.
template <class F>
void walk(const MultiCenterSchedule& ms, F&& visit) {
    for (long long j = 1;; ++j)
        for (int l = 1; l <= ms.p(); ++l) {
            if (!visit(l, ms.n(l, j))) return;
            if (!visit(0, ms.m(l, j))) return;
        }
}

}  // namespace

int multi_center_label(const MultiCenterSchedule& ms, long long n) {
    if (n < 1) throw std::invalid_argument("label needs n >= 1");
    long long pos = 0;
    int label = 0;
    walk(ms, [&](int l, long long len) {
        if (n <= pos + len) {
            label = l;
            return false;
        }
        pos += len;
        return true;
    });
    return label;
}

Rational multi_center_density(const MultiCenterSchedule& ms, int l, long long k) {
    if (l < 1 || l > ms.p()) throw CenterOutOfRange("center index out of range");
    if (k < 1) throw std::invalid_argument("density needs k >= 1");
    long long pos = 0, count = 0;
    walk(ms, [&](int lab, long long len) {
        long long take = std::min(len, k - pos);
        if (lab == l) count += take;
        pos += take;
        return pos < k;
    });
    return Rational(count, k);
}

Rational band_density(const MultiCenterSchedule& ms, long long k) {
    long long pos = 0, count = 0;
    walk(ms, [&](int lab, long long len) {
        long long take = std::min(len, k - pos);
        if (lab == 0) count += take;
        pos += take;
        return pos < k;
    });
    return Rational(count, k);
}

}  // namespace wander
