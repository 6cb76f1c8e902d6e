#ifndef NATID_STATS_HPP
#define NATID_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "natid/util.hpp"

namespace natid::stats {

enum class Direction { GroupA, GroupB, None };

// Outcome of a two-sample comparison. For Welch's t the statistic is t and
// direction follows its sign; for Mann-Whitney the statistic is U of the
// first sample and direction reflects U relative to its null mean n_a*n_b/2
// (U itself is never zero-centred).
struct TestResult {
    double statistic = 0.0;
    std::optional<double> df;
    double p_value = 1.0;
    Direction direction = Direction::None;
};

// Welch's two-sample t-test (unequal variances), two-sided p via the
// Student-t CDF, degrees of freedom by Welch-Satterthwaite. Requires at
// least two observations per sample.
TestResult welch_t_test(const std::vector<double>& a,
                        const std::vector<double>& b);

// Mann-Whitney U with midranks for ties. Exact enumeration over all group
// assignments when n_a*n_b <= 64, otherwise a normal approximation with tie
// and continuity corrections. Two-sided.
TestResult mann_whitney_u(const std::vector<double>& a,
                          const std::vector<double>& b);

// The normal-approximation branch on its own, exposed so its quality can be
// checked against exact enumeration.
double mann_whitney_normal_p(const std::vector<double>& a,
                             const std::vector<double>& b);

// Student-t CDF via the regularized incomplete beta function.
double student_t_cdf(double t, double df);

// Standard normal CDF.
double normal_cdf(double z);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double reg_inc_beta(double a, double b, double x);

namespace detail {
// Nearest-rank quantile of the count multiset: the ceil(q*n)-th smallest
// count (1-indexed).
std::int64_t nearest_rank_threshold(std::vector<std::int64_t> counts, double q);
}  // namespace detail

// Items whose count reaches the q-quantile of the count multiset. Returns a
// sorted vector; never empty for non-empty input.
template <class K>
std::vector<K> percentile_cutoff(const std::unordered_map<K, std::int64_t>& counts,
                                 double q) {
    if (counts.empty()) throw InputError("percentile_cutoff: empty counts");
    if (!(q > 0.0 && q < 1.0))
        throw InputError("percentile_cutoff: q must be in (0,1)");
    std::vector<std::int64_t> values;
    values.reserve(counts.size());
    for (const auto& [item, c] : counts) {
        if (c <= 0) throw InputError("percentile_cutoff: non-positive count");
        values.push_back(c);
    }
    const std::int64_t threshold = detail::nearest_rank_threshold(std::move(values), q);
    std::vector<K> out;
    for (const auto& [item, c] : counts)
        if (c >= threshold) out.push_back(item);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace natid::stats

#endif
