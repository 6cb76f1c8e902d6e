#include "natid/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace natid::stats {

namespace {

struct Moments {
    double mean, var;  // sample variance, n-1 denominator
};

Moments moments(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, ss / (n - 1.0)};
}

// Midranks of the pooled sample; returns ranks aligned with the sorted order.
std::vector<double> midranks(const std::vector<double>& sorted) {
    std::vector<double> ranks(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[k] = r;
        i = j + 1;
    }
    return ranks;
}

// U statistic of sample a given the pooled sorted values and their midranks.
double u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    const std::vector<double> ranks = midranks(sorted);
    double rank_sum_a = 0.0;
    for (double v : a) {
        const std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
        rank_sum_a += ranks[idx];
    }
    const double na = static_cast<double>(a.size());
    return rank_sum_a - na * (na + 1.0) / 2.0;
}

double tie_corrected_sigma(const std::vector<double>& sorted, double na, double nb) {
    const double n = na + nb;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double var =
        na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

// Exact two-sided p: share of group assignments whose U deviates from the
// null mean at least as much as the observed U.
double exact_two_sided_p(const std::vector<double>& a,
                         const std::vector<double>& b, double u_obs) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    const std::vector<double> ranks = midranks(pooled);
    const std::size_t n = pooled.size(), na = a.size();
    const double mu = static_cast<double>(na) * static_cast<double>(n - na) / 2.0;
    const double dev_obs = std::fabs(u_obs - mu) - 1e-9;

    std::uint64_t total = 0, extreme = 0;
    std::vector<std::size_t> pick(na);
    // Enumerate all position subsets of size na (n is small on this branch).
    for (std::size_t i = 0; i < na; ++i) pick[i] = i;
    const double offset = static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
    while (true) {
        double rank_sum = 0.0;
        for (std::size_t idx : pick) rank_sum += ranks[idx];
        const double u = rank_sum - offset;
        ++total;
        if (std::fabs(u - mu) >= dev_obs) ++extreme;
        // next combination
        std::size_t i = na;
        while (i > 0) {
            --i;
            if (pick[i] != i + n - na) {
                ++pick[i];
                for (std::size_t j = i + 1; j < na; ++j) pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0) return static_cast<double>(extreme) / static_cast<double>(total);
        }
    }
}

}  // namespace

TestResult welch_t_test(const std::vector<double>& a,
                        const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw InputError("welch_t_test: need at least 2 observations per sample");
    const Moments ma = moments(a), mb = moments(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double se2 = ma.var / na + mb.var / nb;

    TestResult r;
    if (se2 == 0.0) {
        if (ma.mean == mb.mean) return r;  // t = 0, p = 1, no direction
        // Zero variance but distinct means: the difference is unbounded in
        // units of the (zero) standard error.
        r.statistic = ma.mean > mb.mean
                          ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        r.direction = ma.mean > mb.mean ? Direction::GroupA : Direction::GroupB;
        return r;
    }
    const double t = (ma.mean - mb.mean) / std::sqrt(se2);
    const double va_n = ma.var / na, vb_n = mb.var / nb;
    const double df = se2 * se2 /
                      (va_n * va_n / (na - 1.0) + vb_n * vb_n / (nb - 1.0));
    r.statistic = t;
    r.df = df;
    r.p_value = 2.0 * (1.0 - student_t_cdf(std::fabs(t), df));
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    r.direction = t > 0.0   ? Direction::GroupA
                  : t < 0.0 ? Direction::GroupB
                            : Direction::None;
    return r;
}

double mann_whitney_normal_p(const std::vector<double>& a,
                             const std::vector<double>& b) {
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double u = u_statistic(a, b);
    const double mu = na * nb / 2.0;
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    const double sigma = tie_corrected_sigma(pooled, na, nb);
    if (sigma == 0.0) return 1.0;  // all pooled values identical
    const double z = std::max(std::fabs(u - mu) - 0.5, 0.0) / sigma;
    return std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
}

TestResult mann_whitney_u(const std::vector<double>& a,
                          const std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw InputError("mann_whitney_u: empty sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double u = u_statistic(a, b);
    const double mu = na * nb / 2.0;

    TestResult r;
    r.statistic = u;
    if (na * nb <= 64.0)
        r.p_value = exact_two_sided_p(a, b, u);
    else
        r.p_value = mann_whitney_normal_p(a, b);
    r.direction = u > mu   ? Direction::GroupA
                  : u < mu ? Direction::GroupB
                           : Direction::None;
    return r;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (x > (a + 1.0) / (a + b + 2.0))
        return 1.0 - reg_inc_beta(b, a, 1.0 - x);

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                            std::lgamma(b) + a * std::log(x) +
                            b * std::log(1.0 - x);
    const double front = std::exp(ln_front) / a;

    // Lentz's continued fraction.
    const double tiny = 1e-300;
    double f = 1.0, c = 1.0, d = 0.0;
    for (int m = 0; m <= 300; ++m) {
        double numerator;
        if (m == 0) {
            numerator = 1.0;
        } else if (m % 2 == 0) {
            const double k = m / 2.0;
            numerator = k * (b - k) * x / ((a + 2.0 * k - 1.0) * (a + 2.0 * k));
        } else {
            const double k = (m - 1.0) / 2.0;
            numerator = -((a + k) * (a + b + k) * x) /
                        ((a + 2.0 * k) * (a + 2.0 * k + 1.0));
        }
        d = 1.0 + numerator * d;
        if (std::fabs(d) < tiny) d = tiny;
        d = 1.0 / d;
        c = 1.0 + numerator / c;
        if (std::fabs(c) < tiny) c = tiny;
        const double cd = c * d;
        f *= cd;
        if (std::fabs(1.0 - cd) < 1e-15) break;
    }
    return std::clamp(front * (f - 1.0), 0.0, 1.0);
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw InputError("student_t_cdf: df must be positive");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double i = reg_inc_beta(df / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - i / 2.0 : i / 2.0;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace detail {

std::int64_t nearest_rank_threshold(std::vector<std::int64_t> counts, double q) {
    std::sort(counts.begin(), counts.end());
    const double n = static_cast<double>(counts.size());
    // Small epsilon counters FP noise in q*n (e.g. 0.2*5 -> 1.0000000000000002).
    std::size_t rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, counts.size());
    return counts[rank - 1];
}

}  // namespace detail

}  // namespace natid::stats
