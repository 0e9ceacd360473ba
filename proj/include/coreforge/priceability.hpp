#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "coreforge/backend.hpp"
#include "coreforge/combinatorics.hpp"
#include "coreforge/election.hpp"
#include "coreforge/milp.hpp"
#include "coreforge/optmodel.hpp"
#include "coreforge/oracle.hpp"
#include "coreforge/rational.hpp"

namespace coreforge {

enum class PriceKind { weak, lindahl };

inline std::string price_kind_name(PriceKind kind) {
    return kind == PriceKind::weak ? "weak" : "lindahl";
}

inline PriceKind price_kind_from_name(const std::string& name) {
    if (name == "weak") return PriceKind::weak;
    if (name == "lindahl") return PriceKind::lindahl;
    throw std::invalid_argument("unknown priceability kind: " + name);
}

/// The candidate sets a ballot must be unable to afford. Weak: add one
/// approved non-member to the approved committee members. Lindahl: every
/// minimal strictly-preferred subset of the ballot (supersets are dominated
/// since prices are nonnegative).
inline std::vector<CandidateSet> tsets(const CandidateSet& ballot, const CandidateSet& W,
                                       PriceKind kind) {
    std::vector<CandidateSet> out;
    int inside = intersection_size(ballot, W);
    if (kind == PriceKind::weak) {
        std::uint64_t kept = ballot.mask & W.mask;
        for (std::uint64_t rest = ballot.mask & ~W.mask; rest != 0; rest &= rest - 1) {
            std::uint64_t d = rest & (~rest + 1);
            out.push_back(CandidateSet(kept | d, ballot.m));
        }
        return out;
    }
    int want = inside + 1;
    if (want > ballot.size()) return out;
    auto approved = ballot.indices();
    std::vector<int> pick(static_cast<std::size_t>(want));
    for (int i = 0; i < want; ++i) pick[static_cast<std::size_t>(i)] = i;
    int n = ballot.size();
    while (true) {
        std::uint64_t mask = 0;
        for (int i : pick) mask |= std::uint64_t{1} << approved[static_cast<std::size_t>(i)];
        out.push_back(CandidateSet(mask, ballot.m));
        int pos = want - 1;
        while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == n - want + pos) --pos;
        if (pos < 0) break;
        ++pick[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < want; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

/// Prices per (support ballot, approved candidate). Ballots outside the
/// support take `off_support_price` on every approved candidate; any price
/// above 1 keeps them affordable-proof without touching condition 1.
struct PriceSystem {
    PriceKind kind = PriceKind::weak;
    std::map<std::pair<std::uint64_t, int>, Rational> prices;
    Rational off_support_price = make_rational(11, 10);

    Rational price(std::uint64_t ballot_mask, int candidate) const {
        auto it = prices.find({ballot_mask, candidate});
        return it == prices.end() ? Rational(0) : it->second;
    }
};

/// Dual multipliers proving no valid price system exists: per-candidate
/// weights t and a distribution g over (ballot, T-set) affordability rows.
struct InfeasibilityCertificate {
    PriceKind kind = PriceKind::weak;
    std::map<int, Rational> t;
    std::map<std::pair<std::uint64_t, std::uint64_t>, Rational> g;  // (ballot mask, T mask)
};

inline bool verify_price_system(const VoteDistribution& x, const CandidateSet& W, int k,
                                PriceKind kind, const PriceSystem& ps, std::string* why = nullptr) {
    Rational cap = make_rational(1, k);
    for (int c = 0; c < x.m(); ++c) {
        Rational revenue = 0;
        for (const auto& [mask, w] : x.weights()) revenue += w * ps.price(mask, c);
        if (revenue > cap) {
            if (why) *why = "candidate " + std::to_string(c) + " is overpriced";
            return false;
        }
    }
    if (ps.off_support_price <= 1) {
        if (why) *why = "off-support price must exceed 1";
        return false;
    }
    for (const auto& [mask, w] : x.weights()) {
        CandidateSet ballot(mask, x.m());
        for (const auto& T : tsets(ballot, W, kind)) {
            Rational total = 0;
            for (int c : T.indices()) total += ps.price(mask, c);
            if (!(total > 1)) {
                if (why)
                    *why = "ballot " + ballot.to_string() + " can afford " + T.to_string() +
                           " at total price " + rational_to_string(total);
                return false;
            }
        }
    }
    return true;
}

/// Exact check that (t, g) is feasible for the pricing dual with value at
/// most 1, which rules out any valid price system by weak duality.
inline bool verify_infeasibility_certificate(const VoteDistribution& x, const CandidateSet& W, int k,
                                             PriceKind kind, const InfeasibilityCertificate& cert,
                                             std::string* why = nullptr) {
    for (const auto& [c, v] : cert.t) {
        if (v < 0) {
            if (why) *why = "negative t multiplier";
            return false;
        }
    }
    Rational gsum = 0;
    std::map<std::pair<std::uint64_t, int>, Rational> load;  // (ballot, candidate) -> sum of g over T containing c
    for (const auto& [key, v] : cert.g) {
        auto [ballot_mask, t_mask] = key;
        if (v < 0) {
            if (why) *why = "negative g multiplier";
            return false;
        }
        CandidateSet ballot(ballot_mask, x.m());
        bool known = false;
        for (const auto& T : tsets(ballot, W, kind)) known = known || T.mask == t_mask;
        if (!known) {
            if (why) *why = "g multiplier on a set the ballot can already afford";
            return false;
        }
        gsum += v;
        for (std::uint64_t rest = t_mask; rest != 0; rest &= rest - 1)
            load[{ballot_mask, std::countr_zero(rest)}] += v;
    }
    if (gsum != 1) {
        if (why) *why = "g multipliers sum to " + rational_to_string(gsum) + ", not 1";
        return false;
    }
    for (const auto& [key, sum] : load) {
        auto [ballot_mask, c] = key;
        Rational t_c = 0;
        if (auto it = cert.t.find(c); it != cert.t.end()) t_c = it->second;
        if (t_c * x.get_mask(ballot_mask) < sum) {
            if (why)
                *why = "dual constraint violated at ballot mask " + std::to_string(ballot_mask) +
                       ", candidate " + std::to_string(c);
            return false;
        }
    }
    Rational value = 0;
    for (const auto& [c, v] : cert.t) value += v;
    value /= k;
    if (value > 1) {
        if (why) *why = "dual value " + rational_to_string(value) + " exceeds 1";
        return false;
    }
    return true;
}

enum class PriceDecision { priceable, not_priceable, undecided };

struct PriceCheckResult {
    PriceDecision decision = PriceDecision::undecided;
    std::optional<PriceSystem> system;
    std::optional<InfeasibilityCertificate> certificate;
    double lp_value = 0.0;
    std::string message;
};

namespace detail {

struct PricingLp {
    OptModel model;
    std::map<std::pair<std::uint64_t, int>, int> price_var;              // (ballot, candidate) -> id
    std::vector<int> revenue_row;                                        // per candidate
    std::vector<std::pair<std::uint64_t, std::uint64_t>> afford_rows;    // (ballot, T) per row
    int afford_row_base = 0;
    int eps_var = 0;
};

/// Maximize the worst affordability margin eps subject to the per-candidate
/// revenue caps; the committee is priceable iff the optimum exceeds 1.
inline PricingLp build_pricing_lp(const VoteDistribution& x, const CandidateSet& W, int k,
                                  PriceKind kind) {
    PricingLp lp;
    for (const auto& [mask, w] : x.weights()) {
        CandidateSet ballot(mask, x.m());
        for (int c : ballot.indices())
            lp.price_var[{mask, c}] = lp.model.add_continuous(
                "p_" + std::to_string(mask) + "_" + std::to_string(c), 0.0);
    }
    // eps bounded above so a trivially priceable committee still yields a vertex
    lp.eps_var = lp.model.add_continuous("eps", -kInfinity, 2.0);

    for (int c = 0; c < x.m(); ++c) {
        std::vector<LinearTerm> terms;
        for (const auto& [mask, w] : x.weights()) {
            auto it = lp.price_var.find({mask, c});
            if (it != lp.price_var.end()) terms.push_back({it->second, to_double(w)});
        }
        if (terms.empty()) terms.push_back({lp.eps_var, 0.0});
        lp.revenue_row.push_back(lp.model.num_constraints());
        lp.model.add_constraint("revenue_" + std::to_string(c), terms, ConstraintSense::le,
                                1.0 / k);
    }
    lp.afford_row_base = lp.model.num_constraints();
    for (const auto& [mask, w] : x.weights()) {
        CandidateSet ballot(mask, x.m());
        for (const auto& T : tsets(ballot, W, kind)) {
            std::vector<LinearTerm> terms;
            for (int c : T.indices()) terms.push_back({lp.price_var.at({mask, c}), 1.0});
            terms.push_back({lp.eps_var, -1.0});
            lp.afford_rows.push_back({mask, T.mask});
            lp.model.add_constraint(
                "afford_" + std::to_string(mask) + "_" + std::to_string(T.mask), terms,
                ConstraintSense::ge, 0.0);
        }
    }
    lp.model.set_objective(ObjectiveSense::maximize, {{lp.eps_var, 1.0}});
    return lp;
}

/// Turns rounded LP prices into an exactly verified price system, scaling
/// down uniformly if rounding pushed a revenue cap over the line.
inline std::optional<PriceSystem> confirm_price_system(const VoteDistribution& x,
                                                       const CandidateSet& W, int k, PriceKind kind,
                                                       const PricingLp& lp,
                                                       const std::vector<double>& values) {
    PriceSystem ps;
    ps.kind = kind;
    for (const auto& [key, var] : lp.price_var) {
        double v = values[static_cast<std::size_t>(var)];
        if (v > 1e-12) ps.prices[key] = rationalize(v);
    }
    Rational cap = make_rational(1, k);
    Rational worst_revenue = 0;
    for (int c = 0; c < x.m(); ++c) {
        Rational revenue = 0;
        for (const auto& [mask, w] : x.weights()) revenue += w * ps.price(mask, c);
        if (revenue > worst_revenue) worst_revenue = revenue;
    }
    if (worst_revenue > cap) {
        Rational scale = cap / worst_revenue;
        for (auto& [key, price] : ps.prices) price *= scale;
    }
    if (verify_price_system(x, W, k, kind, ps)) return ps;
    return std::nullopt;
}

/// Rebuilds an exact dual certificate from LP row duals: round g, normalize
/// it to a distribution, then derive the smallest valid t exactly.
inline std::optional<InfeasibilityCertificate> confirm_certificate(
    const VoteDistribution& x, const CandidateSet& W, int k, PriceKind kind, const PricingLp& lp,
    const std::vector<double>& duals) {
    InfeasibilityCertificate cert;
    cert.kind = kind;
    Rational gsum = 0;
    for (std::size_t i = 0; i < lp.afford_rows.size(); ++i) {
        double v = duals[static_cast<std::size_t>(lp.afford_row_base) + i];
        if (v <= 1e-9) continue;
        Rational g = rationalize(v);
        cert.g[lp.afford_rows[i]] = g;
        gsum += g;
    }
    if (gsum <= 0) return std::nullopt;
    for (auto& [key, g] : cert.g) g /= gsum;

    for (const auto& [key, g] : cert.g) {
        if (x.get_mask(key.first) == 0) return std::nullopt;
    }
    std::map<std::pair<std::uint64_t, int>, Rational> load;
    for (const auto& [key, g] : cert.g) {
        auto [ballot_mask, t_mask] = key;
        for (std::uint64_t rest = t_mask; rest != 0; rest &= rest - 1)
            load[{ballot_mask, std::countr_zero(rest)}] += g;
    }
    for (const auto& [key, sum] : load) {
        auto [ballot_mask, c] = key;
        Rational needed = sum / x.get_mask(ballot_mask);
        auto it = cert.t.find(c);
        if (it == cert.t.end() || it->second < needed) cert.t[c] = needed;
    }
    if (verify_infeasibility_certificate(x, W, k, kind, cert)) return cert;
    return std::nullopt;
}

}  // namespace detail

/// Decides weak/Lindahl priceability of W for x. Returns either an exactly
/// verified price system, an exactly verified infeasibility certificate, or
/// Undecided when the LP value sits too close to 1 to confirm either way.
inline PriceCheckResult check_priceable(const VoteDistribution& x, const CandidateSet& W, int k,
                                        PriceKind kind, SolverBackend& backend,
                                        const BackendConfig& cfg) {
    if (W.size() != k) throw std::invalid_argument("committee must have size k");
    x.require_valid();

    PriceCheckResult result;
    detail::PricingLp lp = detail::build_pricing_lp(x, W, k, kind);
    if (lp.afford_rows.empty()) {
        // no ballot strictly prefers anything it could be asked to afford
        PriceSystem ps;
        ps.kind = kind;
        result.decision = PriceDecision::priceable;
        result.system = ps;
        result.lp_value = 2.0;
        return result;
    }

    SolveResult solved = backend.solve(lp.model, cfg);
    if (solved.status != SolveStatus::optimal) {
        result.message = "pricing LP did not solve to optimality: " + solved.message;
        return result;
    }
    result.lp_value = solved.objective;

    if (solved.objective > 1.0 + cfg.tolerance) {
        if (auto ps = detail::confirm_price_system(x, W, k, kind, lp, solved.values)) {
            result.decision = PriceDecision::priceable;
            result.system = std::move(ps);
            return result;
        }
    }
    if (auto cert = detail::confirm_certificate(x, W, k, kind, lp, solved.duals)) {
        result.decision = PriceDecision::not_priceable;
        result.certificate = std::move(cert);
        return result;
    }
    // last resort: the LP said priceable but the margin was thin
    if (auto ps = detail::confirm_price_system(x, W, k, kind, lp, solved.values)) {
        result.decision = PriceDecision::priceable;
        result.system = std::move(ps);
        return result;
    }
    result.message = "LP value " + std::to_string(solved.objective) +
                     " too close to 1 to confirm either verdict exactly";
    return result;
}

// ---------------------------------------------------------------------------
// Payment-function priceability (uniform candidate price r, residual caps).

struct PetersPayment {
    Rational price;  // r divided by the number of voters
    std::map<std::pair<std::uint64_t, int>, Rational> payments;  // (ballot, elected candidate)

    Rational payment(std::uint64_t ballot_mask, int candidate) const {
        auto it = payments.find({ballot_mask, candidate});
        return it == payments.end() ? Rational(0) : it->second;
    }
};

struct PetersCheckResult {
    PriceDecision decision = PriceDecision::undecided;
    std::optional<PetersPayment> payment;
    double lp_value = 0.0;
    std::string message;
};

inline bool verify_peters_payment(const VoteDistribution& x, const CandidateSet& W, int k,
                                  const PetersPayment& pay, std::string* why = nullptr) {
    (void)k;
    if (!(pay.price > 0)) {
        if (why) *why = "price must be strictly positive";
        return false;
    }
    for (const auto& [key, f] : pay.payments) {
        auto [mask, c] = key;
        CandidateSet ballot(mask, x.m());
        if (f < 0 || f > 1 || !ballot.contains(c) || !W.contains(c)) {
            if (why) *why = "payments must lie in [0,1] on approved elected candidates";
            return false;
        }
    }
    for (const auto& [mask, w] : x.weights()) {
        Rational spent = 0;
        for (int c : CandidateSet(mask, x.m()).indices())
            if (W.contains(c)) spent += pay.payment(mask, c);
        if (spent > 1) {
            if (why) *why = "a voter class spends more than its budget";
            return false;
        }
    }
    for (int c : W.indices()) {
        Rational collected = 0;
        for (const auto& [mask, w] : x.weights()) collected += w * pay.payment(mask, c);
        if (collected != pay.price) {
            if (why)
                *why = "elected candidate " + std::to_string(c) + " collects " +
                       rational_to_string(collected) + " instead of the price";
            return false;
        }
    }
    for (int c = 0; c < x.m(); ++c) {
        if (W.contains(c)) continue;
        Rational residual = 0;
        for (const auto& [mask, w] : x.weights()) {
            if (!CandidateSet(mask, x.m()).contains(c)) continue;
            Rational spent = 0;
            for (int e : CandidateSet(mask, x.m()).indices())
                if (W.contains(e)) spent += pay.payment(mask, e);
            residual += w * (Rational(1) - spent);
        }
        if (residual > pay.price) {
            if (why)
                *why = "supporters of unelected candidate " + std::to_string(c) +
                       " retain residual budget " + rational_to_string(residual);
            return false;
        }
    }
    return true;
}

/// LP feasibility of the payment-function axiom, maximizing the price to
/// resolve its strict positivity.
inline PetersCheckResult check_peters_priceable(const VoteDistribution& x, const CandidateSet& W,
                                                int k, SolverBackend& backend,
                                                const BackendConfig& cfg) {
    if (W.size() != k) throw std::invalid_argument("committee must have size k");
    x.require_valid();

    OptModel model;
    std::map<std::pair<std::uint64_t, int>, int> f_var;
    for (const auto& [mask, w] : x.weights()) {
        for (int c : CandidateSet(mask, x.m()).indices()) {
            if (W.contains(c))
                f_var[{mask, c}] =
                    model.add_continuous("f_" + std::to_string(mask) + "_" + std::to_string(c),
                                         0.0, 1.0);
        }
    }
    int r_var = model.add_continuous("r", 0.0, 1.0);

    for (const auto& [mask, w] : x.weights()) {
        std::vector<LinearTerm> terms;
        for (int c : CandidateSet(mask, x.m()).indices()) {
            auto it = f_var.find({mask, c});
            if (it != f_var.end()) terms.push_back({it->second, 1.0});
        }
        if (!terms.empty())
            model.add_constraint("budget_" + std::to_string(mask), terms, ConstraintSense::le, 1.0);
    }
    for (int c : W.indices()) {
        std::vector<LinearTerm> terms;
        for (const auto& [mask, w] : x.weights()) {
            auto it = f_var.find({mask, c});
            if (it != f_var.end()) terms.push_back({it->second, to_double(w)});
        }
        terms.push_back({r_var, -1.0});
        model.add_constraint("price_" + std::to_string(c), terms, ConstraintSense::eq, 0.0);
    }
    for (int c = 0; c < x.m(); ++c) {
        if (W.contains(c)) continue;
        std::vector<LinearTerm> terms{{r_var, 1.0}};
        Rational supporters = 0;
        for (const auto& [mask, w] : x.weights()) {
            CandidateSet ballot(mask, x.m());
            if (!ballot.contains(c)) continue;
            supporters += w;
            for (int e : ballot.indices()) {
                auto it = f_var.find({mask, e});
                if (it != f_var.end()) terms.push_back({it->second, to_double(w)});
            }
        }
        model.add_constraint("residual_" + std::to_string(c), terms, ConstraintSense::ge,
                             to_double(supporters));
    }
    model.set_objective(ObjectiveSense::maximize, {{r_var, 1.0}});

    PetersCheckResult result;
    SolveResult solved = backend.solve(model, cfg);
    if (solved.status == SolveStatus::infeasible) {
        result.decision = PriceDecision::not_priceable;
        result.message = "payment conditions are infeasible even with price 0";
        return result;
    }
    if (solved.status != SolveStatus::optimal) {
        result.message = "payment LP did not solve to optimality: " + solved.message;
        return result;
    }
    result.lp_value = solved.objective;
    if (solved.objective <= cfg.tolerance) {
        result.decision = PriceDecision::not_priceable;
        result.message = "maximum feasible price is 0";
        return result;
    }

    PetersPayment pay;
    pay.price = rationalize(solved.objective);
    for (const auto& [key, var] : f_var) {
        double v = solved.values[static_cast<std::size_t>(var)];
        if (v > 1e-12) pay.payments[key] = rationalize(v);
    }
    // rounding may desynchronize the per-candidate collections; rescale each
    // elected candidate's payments onto the smallest collection
    std::optional<Rational> target;
    std::map<int, Rational> collected;
    for (int c : W.indices()) {
        Rational sum = 0;
        for (const auto& [mask, w] : x.weights()) sum += w * pay.payment(mask, c);
        collected[c] = sum;
        if (!target || sum < *target) target = sum;
    }
    if (target && *target > 0) {
        for (auto& [key, f] : pay.payments) {
            const Rational& sum = collected[key.second];
            if (sum > 0) f *= *target / sum;
        }
        pay.price = *target;
    }
    std::string why;
    if (verify_peters_payment(x, W, k, pay, &why)) {
        result.decision = PriceDecision::priceable;
        result.payment = std::move(pay);
        return result;
    }
    result.message = "could not confirm a rounded payment exactly: " + why;
    return result;
}

// ---------------------------------------------------------------------------
// Counterexample search program: couples the committee-search constraints for
// a fixed committee with the pricing dual, which makes the coupling rows
// bilinear in (t, x).

struct LinQipProgram {
    OptModel model;
    int m = 0;
    int k = 0;
    Quota quota = Quota::hare;
    PriceKind kind = PriceKind::weak;
    CandidateSet committee;                                     // fixed to the first k candidates
    int mu_var = 0;                                             // x vars are ids 0..2^m-1
    std::vector<int> t_var;                                     // per candidate
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> g_var;  // (ballot, T) -> id
};

inline LinQipProgram build_linqip(int m, int k, Quota quota, PriceKind kind) {
    CommitteeSpace space(m, k);
    LinQipProgram prog;
    prog.m = m;
    prog.k = k;
    prog.quota = quota;
    prog.kind = kind;
    prog.committee = CandidateSet((std::uint64_t{1} << k) - 1, m);

    std::uint64_t ballots = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < ballots; ++mask)
        prog.model.add_continuous(ballot_var_name(CandidateSet(mask, m)), 0.0);
    prog.mu_var = prog.model.add_continuous("mu", -kInfinity, kInfinity);
    for (int c = 0; c < m; ++c)
        prog.t_var.push_back(prog.model.add_continuous("t_" + std::to_string(c), 0.0));
    for (std::uint64_t mask = 0; mask < ballots; ++mask) {
        CandidateSet ballot(mask, m);
        for (const auto& T : tsets(ballot, prog.committee, kind))
            prog.g_var[{mask, T.mask}] = prog.model.add_continuous(
                "g_" + std::to_string(mask) + "_" + std::to_string(T.mask), 0.0);
    }

    std::vector<LinearTerm> simplex;
    for (std::uint64_t mask = 0; mask < ballots; ++mask)
        simplex.push_back({static_cast<int>(mask), 1.0});
    prog.model.add_constraint("simplex", simplex, ConstraintSense::eq, 1.0);

    std::vector<LinearTerm> t_budget;
    for (int c = 0; c < m; ++c) t_budget.push_back({prog.t_var[static_cast<std::size_t>(c)], 1.0 / k});
    prog.model.add_constraint("dual_value", t_budget, ConstraintSense::le, 1.0);

    std::vector<LinearTerm> gsum;
    for (const auto& [key, var] : prog.g_var) gsum.push_back({var, 1.0});
    prog.model.add_constraint("gsum", gsum, ConstraintSense::eq, 1.0);

    for (std::uint64_t mask = 0; mask < ballots; ++mask) {
        CandidateSet ballot(mask, m);
        for (int c : ballot.indices()) {
            std::vector<LinearTerm> terms;
            for (const auto& [key, var] : prog.g_var) {
                if (key.first == mask && (key.second >> c) & 1) terms.push_back({var, -1.0});
            }
            if (terms.empty()) continue;
            std::vector<BilinearTerm> bilin{
                {prog.t_var[static_cast<std::size_t>(c)], static_cast<int>(mask), 1.0}};
            prog.model.add_constraint("couple_" + std::to_string(mask) + "_" + std::to_string(c),
                                      terms, ConstraintSense::ge, 0.0, bilin);
        }
    }

    int denom = quota_denominator(quota, k);
    for (const auto& Wp : enumerate_deviations(space)) {
        if (Wp.subset_of(prog.committee)) continue;
        std::vector<LinearTerm> terms{{prog.mu_var, 1.0}};
        for (std::uint64_t mask = 0; mask < ballots; ++mask) {
            if (improves(CandidateSet(mask, m), prog.committee, Wp))
                terms.push_back({static_cast<int>(mask), -1.0});
        }
        prog.model.add_constraint("dev_" + std::to_string(Wp.mask), terms, ConstraintSense::ge,
                                  -static_cast<double>(Wp.size()) / denom);
    }

    prog.model.set_objective(ObjectiveSense::minimize, {{prog.mu_var, 1.0}});
    return prog;
}

/// Distributions this library ships for the counterexample verification
/// fallback when no bilinear-capable backend is configured.
inline std::vector<VoteDistribution> counterexample_candidates(int m, int k, PriceKind kind) {
    std::vector<VoteDistribution> out;
    auto ballot = [m](std::initializer_list<int> ids) {
        return CandidateSet::from_indices(std::vector<int>(ids), m);
    };
    if (kind == PriceKind::weak && m == 5 && k == 3) {
        VoteDistribution x(m);
        x.set(ballot({1, 3}), make_rational(1, 4));
        x.set(ballot({1, 4}), make_rational(1, 4));
        x.set(ballot({3, 4}), make_rational(1, 4));
        x.set(ballot({0, 1, 4}), make_rational(1, 4));
        out.push_back(std::move(x));
    }
    if (kind == PriceKind::lindahl && m == 4 && k == 2) {
        VoteDistribution x(m);
        x.set(ballot({2, 3}), make_rational(1, 3));
        x.set(ballot({0, 2, 3}), make_rational(1, 3));
        x.set(ballot({0, 1, 2, 3}), make_rational(1, 3));
        out.push_back(std::move(x));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Human-readable contradiction proofs from infeasibility certificates.

namespace detail {

inline std::string price_symbol(std::uint64_t ballot_mask, int c, int m) {
    return "p[" + CandidateSet(ballot_mask, m).to_string() + ",c" + std::to_string(c) + "]";
}

}  // namespace detail

/// Renders the certificate as the textbook contradiction proof: revenue
/// caps scaled by t, affordability rows scaled by -g, summing to 0 < 0.
inline std::string render_proof(const InfeasibilityCertificate& cert, const VoteDistribution& x,
                                const CandidateSet& W, PriceKind kind) {
    std::string why;
    if (!verify_infeasibility_certificate(x, W, W.size(), kind, cert, &why))
        throw std::invalid_argument("refusing to render an unverified certificate: " + why);

    int m = x.m();
    int k = W.size();
    std::ostringstream out;
    out << "Suppose committee " << W.to_string() << " were " << price_kind_name(kind)
        << " priceable, with prices p[ballot,candidate] >= 0.\n";
    out << "Per-candidate revenue caps (condition 1), each scaled by its multiplier t:\n";
    for (const auto& [c, t] : cert.t) {
        if (t == 0) continue;
        out << "  [t=" << rational_to_string(t) << "]  ";
        bool first = true;
        for (const auto& [mask, w] : x.weights()) {
            if (!CandidateSet(mask, m).contains(c)) continue;
            if (!first) out << " + ";
            out << "(" << rational_to_string(w) << ")*" << detail::price_symbol(mask, c, m);
            first = false;
        }
        if (first) out << "0";
        out << " <= 1/" << k << "\n";
    }
    out << "Affordability requirements (condition 2), each scaled by -g:\n";
    for (const auto& [key, g] : cert.g) {
        auto [mask, t_mask] = key;
        if (g == 0) continue;
        out << "  [g=" << rational_to_string(g) << "]  ";
        bool first = true;
        for (std::uint64_t rest = t_mask; rest != 0; rest &= rest - 1) {
            if (!first) out << " + ";
            out << detail::price_symbol(mask, std::countr_zero(rest), m);
            first = false;
        }
        out << " > 1\n";
    }
    Rational tsum = 0;
    for (const auto& [c, t] : cert.t) tsum += t;
    out << "Adding the scaled condition-1 rows and subtracting the scaled condition-2 rows\n";
    out << "leaves a nonnegative combination of prices on the left, while the right-hand\n";
    out << "side collapses to " << rational_to_string(tsum / k) << " - 1 <= 0 against a strictly positive left side.\n";
    out << "This yields the contradiction 0 < 0, so no such price system exists.\n";
    return out.str();
}

inline nlohmann::json infeasibility_certificate_to_json(const InfeasibilityCertificate& cert) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& [c, v] : cert.t) t.push_back({c, num_string(v), den_string(v)});
    nlohmann::json g = nlohmann::json::array();
    for (const auto& [key, v] : cert.g)
        g.push_back({key.first, key.second, num_string(v), den_string(v)});
    return nlohmann::json{{"kind", price_kind_name(cert.kind)}, {"t", t}, {"g", g}};
}

inline InfeasibilityCertificate infeasibility_certificate_from_json(const nlohmann::json& j) {
    InfeasibilityCertificate cert;
    cert.kind = price_kind_from_name(j.at("kind").get<std::string>());
    for (const auto& entry : j.at("t"))
        cert.t[entry.at(0).get<int>()] = rational_from_strings(entry.at(1).get<std::string>(),
                                                               entry.at(2).get<std::string>());
    for (const auto& entry : j.at("g"))
        cert.g[{entry.at(0).get<std::uint64_t>(), entry.at(1).get<std::uint64_t>()}] =
            rational_from_strings(entry.at(2).get<std::string>(), entry.at(3).get<std::string>());
    return cert;
}

inline nlohmann::json price_system_to_json(const PriceSystem& ps) {
    nlohmann::json prices = nlohmann::json::array();
    for (const auto& [key, v] : ps.prices)
        prices.push_back({key.first, key.second, num_string(v), den_string(v)});
    return nlohmann::json{{"kind", price_kind_name(ps.kind)},
                          {"prices", prices},
                          {"off_support_price", rational_to_json(ps.off_support_price)}};
}

}  // namespace coreforge
