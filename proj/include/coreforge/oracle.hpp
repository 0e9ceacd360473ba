#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coreforge/combinatorics.hpp"
#include "coreforge/election.hpp"
#include "coreforge/rational.hpp"

namespace coreforge {

/// Entitlement threshold for deviating coalitions. Hare divides by k and
/// stability requires strictly negative excess; Droop divides by k+1 and
/// tolerates zero excess.
enum class Quota { hare, droop };

inline int quota_denominator(Quota quota, int k) { return quota == Quota::hare ? k : k + 1; }

inline std::string quota_name(Quota quota) { return quota == Quota::hare ? "hare" : "droop"; }

inline Quota quota_from_name(const std::string& name) {
    if (name == "hare") return Quota::hare;
    if (name == "droop") return Quota::droop;
    throw std::invalid_argument("unknown quota: " + name);
}

/// Excess support of deviation Wp against committee W: the mass of ballots
/// strictly preferring Wp, minus |Wp| divided by the quota denominator.
inline Rational deviation_excess(const VoteDistribution& x, const CandidateSet& W,
                                 const CandidateSet& Wp, int k, Quota quota) {
    if (W.size() != k) throw std::invalid_argument("committee must have size k");
    if (Wp.size() < 1 || Wp.size() > k) throw std::invalid_argument("deviation size must be in [1, k]");
    Rational support = 0;
    for (const auto& [mask, w] : x.weights()) {
        if (improves(CandidateSet(mask, x.m()), W, Wp)) support += w;
    }
    return support - make_rational(Wp.size(), quota_denominator(quota, k));
}

/// Whether a deviation's excess defeats stability under the given quota.
inline bool excess_defeats(Quota quota, const Rational& excess) {
    return quota == Quota::hare ? excess >= 0 : excess > 0;
}

inline bool is_stable(const VoteDistribution& x, const CandidateSet& W, int k, Quota quota) {
    if (W.size() != k) throw std::invalid_argument("committee must have size k");
    CommitteeSpace space(x.m(), k);
    for (const auto& Wp : enumerate_deviations(space)) {
        if (excess_defeats(quota, deviation_excess(x, W, Wp, k, quota))) return false;
    }
    return true;
}

struct WorstDeviation {
    CandidateSet deviation;
    Rational excess;
};

/// Result of the exact min (over committees) max (over deviations) excess.
/// `value` is negative iff the Hare core of x is non-empty.
struct LeastCoreReport {
    Rational value;
    std::vector<std::uint64_t> witnesses;          // all committee ids attaining the min
    std::vector<WorstDeviation> worst_deviation;   // per committee id, the argmax deviation
};

inline LeastCoreReport least_core(const VoteDistribution& x, int k, Quota quota = Quota::hare) {
    x.require_valid();
    CommitteeSpace space(x.m(), k);
    auto committees = enumerate_committees(space);
    auto deviations = enumerate_deviations(space);

    LeastCoreReport report;
    report.worst_deviation.reserve(committees.size());
    bool have_value = false;
    for (std::uint64_t wid = 0; wid < committees.size(); ++wid) {
        const auto& W = committees[wid];
        std::optional<WorstDeviation> worst;
        for (const auto& Wp : deviations) {
            Rational excess = deviation_excess(x, W, Wp, k, quota);
            if (!worst || excess > worst->excess) worst = WorstDeviation{Wp, excess};
        }
        report.worst_deviation.push_back(*worst);
        if (!have_value || worst->excess < report.value) {
            report.value = worst->excess;
            report.witnesses.clear();
            have_value = true;
        }
        if (worst->excess == report.value) report.witnesses.push_back(wid);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Stable-lottery condition: under a distribution q over k-committees, no
// deviation target gathers enough expected support.

struct LotteryBallotReport {
    std::uint64_t ballot_mask;
    Rational probability;  // Pr[ballot strictly prefers the deviation target]
    Rational bound;        // E[|target|] / quota denominator
    bool holds;
};

struct LotteryReport {
    bool all_hold = true;
    std::vector<LotteryBallotReport> ballots;
};

namespace detail {

inline void require_distribution(const std::map<std::uint64_t, Rational>& q) {
    Rational sum = 0;
    for (const auto& [id, w] : q) {
        if (w < 0) throw std::invalid_argument("q has a negative entry");
        sum += w;
    }
    if (sum != 1) throw std::invalid_argument("q does not sum to 1");
}

}  // namespace detail

/// Deviation-function form: the target of committee W is D(W).
/// D is given per committee id, total over all k-committees.
inline LotteryReport check_stable_lottery(const std::map<std::uint64_t, Rational>& q,
                                          const std::vector<CandidateSet>& deviation_of,
                                          int m, int k, Quota quota) {
    detail::require_distribution(q);
    CommitteeSpace space(m, k);
    auto committees = enumerate_committees(space);
    if (deviation_of.size() != committees.size())
        throw std::invalid_argument("deviation function is not total");

    Rational expected_size = 0;
    for (const auto& [wid, w] : q) {
        if (wid >= committees.size()) throw std::invalid_argument("committee id out of range");
        expected_size += Rational(deviation_of[wid].size()) * w;
    }
    Rational bound = expected_size / quota_denominator(quota, k);

    LotteryReport report;
    std::uint64_t ballots = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < ballots; ++mask) {
        CandidateSet ballot(mask, m);
        Rational prob = 0;
        for (const auto& [wid, w] : q) {
            if (improves(ballot, committees[wid], deviation_of[wid])) prob += w;
        }
        bool holds = quota == Quota::hare ? prob < bound : prob <= bound;
        report.all_hold = report.all_hold && holds;
        report.ballots.push_back({mask, prob, bound, holds});
    }
    return report;
}

/// Independent-distribution form: the deviation is drawn from r independently
/// of the committee.
inline LotteryReport check_stable_lottery(const std::map<std::uint64_t, Rational>& q,
                                          const std::map<std::uint64_t, Rational>& r,
                                          int m, int k, Quota quota) {
    detail::require_distribution(q);
    detail::require_distribution(r);
    CommitteeSpace space(m, k);
    auto committees = enumerate_committees(space);
    auto deviations = enumerate_deviations(space);

    Rational expected_size = 0;
    for (const auto& [did, w] : r) {
        if (did >= deviations.size()) throw std::invalid_argument("deviation id out of range");
        expected_size += Rational(deviations[did].size()) * w;
    }
    Rational bound = expected_size / quota_denominator(quota, k);

    LotteryReport report;
    std::uint64_t ballots = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < ballots; ++mask) {
        CandidateSet ballot(mask, m);
        Rational prob = 0;
        for (const auto& [wid, qw] : q) {
            for (const auto& [did, rw] : r) {
                if (improves(ballot, committees[wid], deviations[did])) prob += qw * rw;
            }
        }
        bool holds = quota == Quota::hare ? prob < bound : prob <= bound;
        report.all_hold = report.all_hold && holds;
        report.ballots.push_back({mask, prob, bound, holds});
    }
    return report;
}

}  // namespace coreforge
