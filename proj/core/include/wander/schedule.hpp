#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace wander {

using Rational = boost::rational<long long>;

struct InvalidSchedule : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CenterOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Visit sequences (n_j) and band lengths (m_j), j >= 1, with n_0 = m_0 = 0.
class Schedule {
public:
    using Seq = std::function<long long(long long)>;

    Schedule(Seq n, Seq m, std::string label = "custom");
    static Schedule explicit_lists(std::vector<long long> n, std::vector<long long> m);

    long long n(long long j) const;
    long long m(long long j) const;
    // Number of stored terms for list-backed schedules.
    std::optional<long long> length() const { return length_; }
    const std::string& label() const { return label_; }

    // The construction needs m_1 > 1.
    bool degenerate_first_band() const { return m(1) == 1; }
    // Throws InvalidSchedule unless m is strictly increasing and n >= 0 through index J.
    void validate(long long J) const;

private:
    Seq n_, m_;
    std::string label_;
    std::optional<long long> length_;
};

long long cumulative_N(const Schedule& s, long long j);
// Largest p with N_p <= k.
long long block_index(const Schedule& s, long long k);
bool in_D(const Schedule& s, long long n);
Rational density(const Schedule& s, long long k);
std::pair<Rational, Rational> density_bounds(const Schedule& s, long long k);

// m_j = j + m_offset; n_j = j^2 for lambda = 1, else ceil(lambda/(1-lambda) j).
Schedule lambda_schedule(double lambda, long long m_offset = 0);
Schedule shifted_schedule(const Schedule& s, long long C);

// Exact rational nearest to x with denominator at most max_den.
Rational to_rational(double x, long long max_den = 1000000);

struct MultiCenterSchedule {
    std::vector<double> lambdas;

    explicit MultiCenterSchedule(std::vector<double> lambdas);
    int p() const { return static_cast<int>(lambdas.size()); }
    long long n(int l, long long j) const;
    long long m(int l, long long j) const { (void)l; return j; }

private:
    std::vector<Rational> exact_;
};

// 0 for band iterates, l in 1..p while visiting D_l.
int multi_center_label(const MultiCenterSchedule& ms, long long n);
Rational multi_center_density(const MultiCenterSchedule& ms, int l, long long k);
Rational band_density(const MultiCenterSchedule& ms, long long k);

}  // namespace wander
