#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coreforge/backend.hpp"
#include "coreforge/combinatorics.hpp"
#include "coreforge/duality.hpp"
#include "coreforge/election.hpp"
#include "coreforge/optmodel.hpp"
#include "coreforge/oracle.hpp"
#include "coreforge/rational.hpp"

namespace coreforge {

inline std::string ballot_var_name(const CandidateSet& ballot) {
    std::string name = "x";
    for (int i : ballot.indices()) name += "_" + std::to_string(i);
    if (ballot.empty()) name += "_";
    return name;
}

/// The committee-search MILP: maximize the worst-case deviation excess over
/// vote distributions, with one selector binary per kept (W, W') pair.
/// Pairs with W' contained in W never bind and are dropped.
struct MilpProgram {
    int m = 0;
    int k = 0;
    Quota quota = Quota::hare;
    double big_m = 3.0;
    OptModel model;
    int mu_var = 0;                                              // x vars are ids 0..2^m-1 (by ballot mask)
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;  // kept (committee id, deviation id)
    int y_base = 0;                                              // y var id = y_base + pair index

    int x_var(std::uint64_t ballot_mask) const { return static_cast<int>(ballot_mask); }
};

inline MilpProgram build_milp(int m, int k, Quota quota, double big_m = 3.0) {
    CommitteeSpace space(m, k);
    auto committees = enumerate_committees(space);
    auto deviations = enumerate_deviations(space);
    int denom = quota_denominator(quota, k);

    MilpProgram prog;
    prog.m = m;
    prog.k = k;
    prog.quota = quota;
    prog.big_m = big_m;

    std::uint64_t ballots = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < ballots; ++mask)
        prog.model.add_continuous(ballot_var_name(CandidateSet(mask, m)), 0.0);
    prog.mu_var = prog.model.add_continuous("mu", -kInfinity, kInfinity);

    prog.y_base = prog.model.num_vars();
    for (std::uint64_t wid = 0; wid < committees.size(); ++wid) {
        for (std::uint64_t did = 0; did < deviations.size(); ++did) {
            if (deviations[did].subset_of(committees[wid])) continue;
            prog.pairs.push_back({wid, did});
            prog.model.add_binary("y_" + std::to_string(wid) + "_" + std::to_string(did));
        }
    }

    std::vector<LinearTerm> simplex;
    for (std::uint64_t mask = 0; mask < ballots; ++mask)
        simplex.push_back({prog.x_var(mask), 1.0});
    prog.model.add_constraint("simplex", simplex, ConstraintSense::eq, 1.0);

    // one selected deviation per committee
    std::vector<std::vector<LinearTerm>> cover(committees.size());
    for (std::size_t p = 0; p < prog.pairs.size(); ++p)
        cover[prog.pairs[p].first].push_back({prog.y_base + static_cast<int>(p), 1.0});
    for (std::uint64_t wid = 0; wid < committees.size(); ++wid)
        prog.model.add_constraint("cover_W" + std::to_string(wid), cover[wid], ConstraintSense::ge, 1.0);

    // mu <= support(W,W') - |W'|/denom + M(1 - y[W,W'])
    for (std::size_t p = 0; p < prog.pairs.size(); ++p) {
        auto [wid, did] = prog.pairs[p];
        std::vector<LinearTerm> terms{{prog.mu_var, 1.0}};
        for (std::uint64_t mask = 0; mask < ballots; ++mask) {
            if (improves(CandidateSet(mask, m), committees[wid], deviations[did]))
                terms.push_back({prog.x_var(mask), -1.0});
        }
        terms.push_back({prog.y_base + static_cast<int>(p), big_m});
        double rhs = big_m - static_cast<double>(deviations[did].size()) / denom;
        prog.model.add_constraint("gap_W" + std::to_string(wid) + "_D" + std::to_string(did), terms,
                                  ConstraintSense::le, rhs);
    }

    prog.model.set_objective(ObjectiveSense::maximize, {{prog.mu_var, 1.0}});
    return prog;
}

struct MilpSolution {
    SolveStatus status = SolveStatus::error;
    double mu = 0.0;
    double gap = 0.0;                                               // |best bound - incumbent|
    std::map<std::uint64_t, double> x;                              // ballot mask -> weight
    std::vector<std::pair<std::uint64_t, std::uint64_t>> selected;  // pairs with y = 1
    std::string message;
};

inline MilpSolution solve_search(const MilpProgram& prog, SolverBackend& backend,
                                 const BackendConfig& cfg) {
    SolveResult result = backend.solve(prog.model, cfg);
    MilpSolution sol;
    sol.status = result.status;
    sol.message = result.message;
    if (result.status != SolveStatus::optimal && result.status != SolveStatus::time_limit)
        return sol;
    if (result.values.size() != static_cast<std::size_t>(prog.model.num_vars())) {
        sol.status = SolveStatus::error;
        sol.message = "backend returned a truncated assignment";
        return sol;
    }
    sol.mu = result.values[static_cast<std::size_t>(prog.mu_var)];
    sol.gap = std::abs(result.best_bound - result.objective);
    std::uint64_t ballots = std::uint64_t{1} << prog.m;
    for (std::uint64_t mask = 0; mask < ballots; ++mask) {
        double v = result.values[static_cast<std::size_t>(prog.x_var(mask))];
        if (v != 0.0) sol.x[mask] = v;
    }
    for (std::size_t p = 0; p < prog.pairs.size(); ++p) {
        if (result.values[static_cast<std::size_t>(prog.y_base) + p] > 0.5)
            sol.selected.push_back(prog.pairs[p]);
    }
    return sol;
}

/// Reads the selected deviation per committee out of a solved MILP. If a
/// committee selected several, keeps the one with the largest excess at the
/// solution x; ties go to the smallest deviation id.
inline DeviationFunction extract_deviation_function(const MilpProgram& prog, const MilpSolution& sol) {
    CommitteeSpace space(prog.m, prog.k);
    auto committees = enumerate_committees(space);
    auto deviations = enumerate_deviations(space);
    int denom = quota_denominator(prog.quota, prog.k);

    auto excess_at = [&](std::uint64_t wid, std::uint64_t did) {
        double support = 0.0;
        for (const auto& [mask, w] : sol.x) {
            if (improves(CandidateSet(mask, prog.m), committees[wid], deviations[did])) support += w;
        }
        return support - static_cast<double>(deviations[did].size()) / denom;
    };

    std::vector<std::optional<std::uint64_t>> choice(committees.size());
    for (const auto& [wid, did] : sol.selected) {
        if (!choice[wid]) {
            choice[wid] = did;
            continue;
        }
        double cur = excess_at(wid, *choice[wid]);
        double alt = excess_at(wid, did);
        if (alt > cur || (alt == cur && did < *choice[wid])) choice[wid] = did;
    }
    std::vector<CandidateSet> targets;
    targets.reserve(committees.size());
    for (std::uint64_t wid = 0; wid < committees.size(); ++wid) {
        if (!choice[wid])
            throw std::runtime_error("no deviation selected for committee " +
                                     committees[wid].to_string());
        targets.push_back(deviations[*choice[wid]]);
    }
    return DeviationFunction(prog.m, prog.k, std::move(targets));
}

/// Rounds a float assignment onto exact rationals (continued fractions with a
/// denominator cap, negatives clamped) and renormalizes to sum exactly 1.
inline VoteDistribution rationalize_distribution(int m, const std::map<std::uint64_t, double>& x,
                                                 std::uint64_t max_den = 1000000,
                                                 double drop_below = 1e-9) {
    VoteDistribution out(m);
    Rational sum = 0;
    std::map<std::uint64_t, Rational> entries;
    for (const auto& [mask, v] : x) {
        if (v < drop_below) continue;
        Rational r = rationalize(v, max_den);
        if (r <= 0) continue;
        entries[mask] = r;
        sum += r;
    }
    if (sum <= 0) throw std::invalid_argument("assignment has no positive mass");
    for (const auto& [mask, r] : entries) out.set(CandidateSet(mask, m), r / sum);
    return out;
}

struct VerificationReport {
    bool ok = false;
    Rational exact_value;
    VoteDistribution rationalized;
    LeastCoreReport least_core;
    std::string message;
};

/// Exact recheck of a solver solution: rationalize x, run the enumeration
/// oracle, and confirm the reported mu within twice the solve tolerance.
inline VerificationReport verify_solution(const MilpProgram& prog, const MilpSolution& sol,
                                          double tolerance) {
    VerificationReport report;
    try {
        report.rationalized = rationalize_distribution(prog.m, sol.x);
    } catch (const std::exception& e) {
        report.message = std::string("rationalization failed: ") + e.what();
        return report;
    }
    report.least_core = least_core(report.rationalized, prog.k, prog.quota);
    report.exact_value = report.least_core.value;
    double diff = std::abs(to_double(report.exact_value) - sol.mu);
    if (diff <= 2 * tolerance) {
        report.ok = true;
    } else {
        report.message = "exact value " + rational_to_string(report.exact_value) +
                         " differs from reported mu by " + std::to_string(diff);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Constructive bound: uniform mass on the singletons of a (k+1)-candidate
// block, each committee deviating to the smallest block candidate it misses.

struct LowerBoundAssignment {
    VoteDistribution x;
    DeviationFunction D;
    Rational mu;
};

inline LowerBoundAssignment lower_bound_assignment(int m, int k, Quota quota) {
    CommitteeSpace space(m, k);
    auto committees = enumerate_committees(space);

    VoteDistribution x(m);
    std::uint64_t block = (std::uint64_t{1} << (k + 1)) - 1;  // first k+1 candidates
    for (int c = 0; c <= k; ++c)
        x.set(CandidateSet(std::uint64_t{1} << c, m), make_rational(1, k + 1));

    std::vector<CandidateSet> targets;
    targets.reserve(committees.size());
    for (const auto& W : committees) {
        std::uint64_t outside = block & ~W.mask;  // nonempty: |block| = k+1 > |W|
        int c = std::countr_zero(outside);
        targets.push_back(CandidateSet(std::uint64_t{1} << c, m));
    }

    LowerBoundAssignment out{std::move(x), DeviationFunction(m, k, std::move(targets)),
                             quota == Quota::hare ? make_rational(-1, k * (k + 1)) : Rational(0)};
    return out;
}

struct AssignmentCheck {
    bool feasible = false;
    bool mu_maximal = false;
    std::string message;
};

/// Exact-rational feasibility check of an (x, D, mu) assignment against the
/// committee-search constraints, plus whether mu is the largest feasible
/// value for that x and D.
inline AssignmentCheck verify_assignment_exact(const VoteDistribution& x, const DeviationFunction& D,
                                               const Rational& mu, Quota quota,
                                               const Rational& big_m = Rational(3)) {
    AssignmentCheck check;
    if (!x.valid()) {
        check.message = "x is not a vote distribution";
        return check;
    }
    CommitteeSpace space(x.m(), D.k);
    auto committees = enumerate_committees(space);
    auto deviations = enumerate_deviations(space);

    std::optional<Rational> min_selected;
    for (std::uint64_t wid = 0; wid < committees.size(); ++wid) {
        if (D.at(wid).subset_of(committees[wid])) {
            check.message = "selected deviation for committee " + committees[wid].to_string() +
                            " is contained in it (pair not in the model)";
            return check;
        }
        for (std::uint64_t did = 0; did < deviations.size(); ++did) {
            if (deviations[did].subset_of(committees[wid])) continue;
            Rational excess = deviation_excess(x, committees[wid], deviations[did], D.k, quota);
            bool selected = deviations[did] == D.at(wid);
            Rational bound = selected ? excess : excess + big_m;
            if (mu > bound) {
                check.message = "mu exceeds the bound of pair (" + committees[wid].to_string() +
                                ", " + deviations[did].to_string() + ")";
                return check;
            }
            if (selected && (!min_selected || excess < *min_selected)) min_selected = excess;
        }
    }
    check.feasible = true;
    check.mu_maximal = min_selected && mu == *min_selected;
    return check;
}

}  // namespace coreforge
