// Acceptance gate: one line per criterion, PASS / FAIL / SKIP (with reason).
// Exit code 0 iff nothing failed.

#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "coreforge/backend.hpp"
#include "coreforge/duality.hpp"
#include "coreforge/milp.hpp"
#include "coreforge/oracle.hpp"
#include "coreforge/priceability.hpp"

using namespace coreforge;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!pass) ++failures;
}

void report_skip(int criterion, const std::string& reason) {
    std::printf("SKIP criterion %d: %s\n", criterion, reason.c_str());
}

VoteDistribution random_distribution(std::mt19937& rng, int m, int max_den) {
    std::uniform_int_distribution<int> den_pick(1, max_den);
    std::uniform_int_distribution<std::uint64_t> ballot_pick(0, (std::uint64_t{1} << m) - 1);
    int parts = den_pick(rng);
    std::map<std::uint64_t, int> counts;
    for (int i = 0; i < parts; ++i) ++counts[ballot_pick(rng)];
    VoteDistribution x(m);
    for (const auto& [mask, c] : counts) x.set(CandidateSet(mask, m), make_rational(c, parts));
    return x;
}

DeviationFunction random_deviation_function(std::mt19937& rng, int m, int k, int max_size) {
    CommitteeSpace space(m, k);
    auto deviations = enumerate_deviations(space);
    std::vector<CandidateSet> targets;
    for (std::uint64_t wid = 0; wid < space.committee_count(); ++wid) {
        while (true) {
            const auto& candidate = deviations[rng() % deviations.size()];
            if (candidate.size() <= max_size) {
                targets.push_back(candidate);
                break;
            }
        }
    }
    return DeviationFunction(m, k, std::move(targets));
}

VoteDistribution main_example() {
    VoteDistribution x(5);
    x.set(CandidateSet::from_indices({1, 3}, 5), make_rational(1, 3));
    x.set(CandidateSet::from_indices({1, 4}, 5), make_rational(1, 3));
    x.set(CandidateSet::from_indices({0, 1, 2}, 5), make_rational(1, 6));
    x.set(CandidateSet::from_indices({3, 4}, 5), make_rational(1, 6));
    return x;
}

// criterion 1 & 2: the full search grid under both quotas
void search_grid(SolverBackend& backend, const BackendConfig& cfg) {
    bool hare_ok = true, droop_ok = true;
    std::string hare_detail, droop_detail;
    for (int m = 2; m <= 5; ++m) {
        for (int k = 1; k < m; ++k) {
            auto hare = solve_search(build_milp(m, k, Quota::hare), backend, cfg);
            double target = -1.0 / (k * (k + 1));
            if (hare.status != SolveStatus::optimal || std::abs(hare.mu - target) > 1e-4) {
                hare_ok = false;
                hare_detail += " (m=" + std::to_string(m) + ",k=" + std::to_string(k) + ")";
            }
            auto droop = solve_search(build_milp(m, k, Quota::droop), backend, cfg);
            if (droop.status != SolveStatus::optimal || std::abs(droop.mu) > 1e-4) {
                droop_ok = false;
                droop_detail += " (m=" + std::to_string(m) + ",k=" + std::to_string(k) + ")";
            }
        }
    }
    report(1, hare_ok, "search over 1 <= k < m <= 5 returns -1/(k(k+1)) within 1e-4" + hare_detail);
    report(2, droop_ok, "droop search over the same grid returns 0 within 1e-4" + droop_detail);
}

void lower_bound_grid() {
    bool ok = true;
    for (int m = 2; m <= 10 && ok; ++m) {
        for (int k = 1; k < m && ok; ++k) {
            auto hare = lower_bound_assignment(m, k, Quota::hare);
            ok = ok && hare.mu == make_rational(-1, k * (k + 1)) &&
                 verify_assignment_exact(hare.x, hare.D, hare.mu, Quota::hare).feasible;
            auto droop = lower_bound_assignment(m, k, Quota::droop);
            ok = ok && droop.mu == 0 &&
                 verify_assignment_exact(droop.x, droop.D, droop.mu, Quota::droop).feasible;
        }
    }
    report(3, ok, "constructive assignment exactly feasible with the closed-form value, m <= 10");
}

void dual_certificates() {
    std::mt19937 rng(1234);
    bool ok = true;
    for (auto [m, k] : {std::pair{4, 2}, {5, 2}, {5, 3}, {6, 3}}) {
        for (int trial = 0; trial < 50 && ok; ++trial) {
            auto D = random_deviation_function(rng, m, k, 1);
            int t = 1;
            if (trial % 2 == 1 && k >= 2) {
                CommitteeSpace space(m, k);
                auto deviations = enumerate_deviations(space);
                std::uint64_t wid = rng() % space.committee_count();
                while (true) {
                    const auto& candidate = deviations[rng() % deviations.size()];
                    if (candidate.size() >= 2) {
                        D.targets[wid] = candidate;
                        t = candidate.size();
                        break;
                    }
                }
            }
            auto cert = certificate_singleton(m, k, D, Quota::hare);
            auto check = verify_certificate(cert, D, m, k, Quota::hare);
            ok = check.feasible && check.objective <= make_rational(-1, k * (k + 2 - t));
        }
    }
    for (int m : {3, 4, 5, 6}) {
        int k = m - 1;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            auto D = random_deviation_function(rng, m, k, k);
            auto cert = certificate_kplusone(m, D, Quota::hare);
            auto hare = verify_certificate(cert, D, m, k, Quota::hare);
            auto droop = verify_certificate(cert, D, m, k, Quota::droop);
            ok = hare.feasible && hare.objective <= make_rational(-1, k * (k + 1)) &&
                 droop.feasible && droop.objective <= 0;
        }
    }
    report(4, ok, "singleton and k=m-1 certificates verify with the claimed objective bounds");
}

void strong_duality(SolverBackend& backend, const BackendConfig& cfg) {
    std::mt19937 rng(777);
    bool ok = true;
    for (auto [m, k] : {std::pair{4, 2}, {5, 3}}) {
        for (int trial = 0; trial < 20 && ok; ++trial) {
            auto D = random_deviation_function(rng, m, k, k);
            auto dual = backend.solve(build_dlp(m, k, D, Quota::hare).model, cfg);

            CommitteeSpace space(m, k);
            auto committees = enumerate_committees(space);
            OptModel primal;
            std::uint64_t ballots = std::uint64_t{1} << m;
            for (std::uint64_t mask = 0; mask < ballots; ++mask)
                primal.add_continuous("x" + std::to_string(mask), 0.0);
            int mu = primal.add_continuous("mu", -kInfinity, kInfinity);
            std::vector<LinearTerm> simplex;
            for (std::uint64_t mask = 0; mask < ballots; ++mask)
                simplex.push_back({static_cast<int>(mask), 1.0});
            primal.add_constraint("simplex", simplex, ConstraintSense::eq, 1.0);
            for (std::uint64_t wid = 0; wid < committees.size(); ++wid) {
                std::vector<LinearTerm> terms{{mu, 1.0}};
                for (std::uint64_t mask = 0; mask < ballots; ++mask)
                    if (improves(CandidateSet(mask, m), committees[wid], D.at(wid)))
                        terms.push_back({static_cast<int>(mask), -1.0});
                primal.add_constraint("gap" + std::to_string(wid), terms, ConstraintSense::le,
                                      -static_cast<double>(D.at(wid).size()) / k);
            }
            primal.set_objective(ObjectiveSense::maximize, {{mu, 1.0}});
            auto pv = backend.solve(primal, cfg);

            ok = dual.status == SolveStatus::optimal && pv.status == SolveStatus::optimal &&
                 std::abs(dual.objective - pv.objective) <= 1e-6;
        }
    }
    report(5, ok, "dual LP optimum equals the fixed-deviation primal optimum within 1e-6");
}

void counterexample_instances(SolverBackend& backend, const BackendConfig& cfg) {
    bool ok = true;
    std::string detail;

    {  // (a) m=5, k=3, weak
        auto xs = counterexample_candidates(5, 3, PriceKind::weak);
        auto W = CandidateSet::from_indices({0, 1, 2}, 5);
        ok = ok && xs.size() == 1 && is_stable(xs[0], W, 3, Quota::droop);
        auto res = check_priceable(xs[0], W, 3, PriceKind::weak, backend, cfg);
        ok = ok && res.decision == PriceDecision::not_priceable && res.certificate &&
             verify_infeasibility_certificate(xs[0], W, 3, PriceKind::weak, *res.certificate);
        if (ok) {
            std::string proof = render_proof(*res.certificate, xs[0], W, PriceKind::weak);
            ok = proof.find("0 < 0") != std::string::npos;
        }
        if (!ok) detail += " [5,3 weak]";
    }
    {  // (b) m=4, k=2: weakly priceable with the published prices, not lindahl
        auto xs = counterexample_candidates(4, 2, PriceKind::lindahl);
        auto W = CandidateSet::from_indices({0, 1}, 4);
        bool b = xs.size() == 1 && is_stable(xs[0], W, 2, Quota::droop);

        PriceSystem ps;
        ps.kind = PriceKind::weak;
        Rational p = make_rational(3, 2);
        ps.prices[{CandidateSet::from_indices({2, 3}, 4).mask, 2}] = p;
        ps.prices[{CandidateSet::from_indices({2, 3}, 4).mask, 3}] = p;
        ps.prices[{CandidateSet::from_indices({0, 2, 3}, 4).mask, 0}] = p;
        ps.prices[{CandidateSet::from_indices({0, 1, 2, 3}, 4).mask, 1}] = p;
        b = b && verify_price_system(xs[0], W, 2, PriceKind::weak, ps);
        b = b && check_priceable(xs[0], W, 2, PriceKind::weak, backend, cfg).decision ==
                     PriceDecision::priceable;

        auto lind = check_priceable(xs[0], W, 2, PriceKind::lindahl, backend, cfg);
        b = b && lind.decision == PriceDecision::not_priceable && lind.certificate &&
            verify_infeasibility_certificate(xs[0], W, 2, PriceKind::lindahl, *lind.certificate);
        if (!b) detail += " [4,2 lindahl]";
        ok = ok && b;
    }
    report(6, ok,
           "published counterexamples: droop-stable, verified certificates, proof contains the "
           "contradiction" + detail);
}

void main_example_criterion(SolverBackend& backend, const BackendConfig& cfg) {
    auto x = main_example();
    auto W = CandidateSet::from_indices({0, 1, 2}, 5);
    bool ok = is_stable(x, W, 3, Quota::hare);
    auto res = check_priceable(x, W, 3, PriceKind::weak, backend, cfg);
    ok = ok && res.decision == PriceDecision::not_priceable && res.certificate;
    if (ok) {
        std::multiset<Rational> gs;
        for (const auto& [key, v] : res.certificate->g) gs.insert(v);
        ok = gs == std::multiset<Rational>{make_rational(1, 3), make_rational(1, 3),
                                           make_rational(1, 6), make_rational(1, 6)};
    }
    report(7, ok, "main-text distribution: core-stable, not weakly priceable, multipliers "
                  "{1/3,1/3,1/6,1/6}");
}

void payment_axiom(SolverBackend& backend, const BackendConfig& cfg) {
    VoteDistribution inst(3);
    inst.set(CandidateSet::from_indices({0}, 3), make_rational(1, 5));
    inst.set(CandidateSet::from_indices({1, 2}, 3), make_rational(4, 5));
    auto W = CandidateSet::from_indices({0, 1}, 3);
    bool ok = check_priceable(inst, W, 2, PriceKind::lindahl, backend, cfg).decision ==
              PriceDecision::priceable;
    ok = ok && check_peters_priceable(inst, W, 2, backend, cfg).decision ==
                   PriceDecision::not_priceable;

    std::mt19937 rng(4242);
    int trials = 0;
    for (int attempts = 0; trials < 200 && attempts < 400 && ok; ++attempts) {
        int m = 2 + static_cast<int>(rng() % 3);
        int k = 1 + static_cast<int>(rng() % (m - 1));
        auto x = random_distribution(rng, m, 6);
        auto committees = enumerate_committees(CommitteeSpace(m, k));
        const auto& W2 = committees[rng() % committees.size()];

        auto lind = check_priceable(x, W2, k, PriceKind::lindahl, backend, cfg);
        auto weak = check_priceable(x, W2, k, PriceKind::weak, backend, cfg);
        auto pay = check_peters_priceable(x, W2, k, backend, cfg);
        if (lind.decision == PriceDecision::undecided ||
            weak.decision == PriceDecision::undecided ||
            pay.decision == PriceDecision::undecided)
            continue;
        ++trials;
        if (lind.decision == PriceDecision::priceable)
            ok = weak.decision == PriceDecision::priceable && is_stable(x, W2, k, Quota::hare);
        if (ok && pay.decision == PriceDecision::priceable)
            ok = weak.decision == PriceDecision::priceable;
    }
    report(8, ok, "payment-axiom instance separates lindahl from payment priceability; "
                  "implication chain holds on 200 random instances");
}

void minimality(SolverBackend& backend, const BackendConfig& cfg) {
    if (!backend.supports_bilinear()) {
        // fallback: re-verify the bundled distributions instead of searching
        bool ok = true;
        {
            auto xs = counterexample_candidates(5, 3, PriceKind::weak);
            auto W = CandidateSet::from_indices({0, 1, 2}, 5);
            ok = ok && !xs.empty() && is_stable(xs[0], W, 3, Quota::droop) &&
                 check_priceable(xs[0], W, 3, PriceKind::weak, backend, cfg).decision ==
                     PriceDecision::not_priceable;
        }
        {
            auto xs = counterexample_candidates(4, 2, PriceKind::lindahl);
            auto W = CandidateSet::from_indices({0, 1}, 4);
            ok = ok && !xs.empty() && is_stable(xs[0], W, 2, Quota::droop) &&
                 check_priceable(xs[0], W, 2, PriceKind::lindahl, backend, cfg).decision ==
                     PriceDecision::not_priceable;
        }
        report_skip(9, std::string("backend '") + backend.name() +
                           "' has no bilinear support; minimality search not run. "
                           "Verification-only fallback over the bundled distributions: " +
                           (ok ? "passed" : "FAILED"));
        if (!ok) ++failures;
        return;
    }
    bool ok = true;
    for (auto [m, k, kind] : {std::tuple{4, 2, PriceKind::weak}, {4, 3, PriceKind::weak},
                              {3, 2, PriceKind::lindahl}}) {
        auto prog = build_linqip(m, k, Quota::hare, kind);
        auto res = backend.solve(prog.model, cfg);
        ok = ok && res.status == SolveStatus::optimal && res.objective >= -cfg.tolerance;
    }
    report(9, ok, "linqip optima nonnegative below the minimal counterexample sizes");
}

void oracle_cross_check() {
    std::mt19937 rng(31337);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        int m = 2 + static_cast<int>(rng() % 4);  // m in {2..5}
        int k = 1 + static_cast<int>(rng() % (m - 1));
        auto x = random_distribution(rng, m, 8);

        // independent naive double loop over raw masks
        Rational best;
        bool have_best = false;
        for (std::uint64_t w = 0; w < (std::uint64_t{1} << m); ++w) {
            if (std::popcount(w) != k) continue;
            Rational worst;
            bool have_worst = false;
            for (std::uint64_t d = 1; d < (std::uint64_t{1} << m); ++d) {
                int dsize = std::popcount(d);
                if (dsize > k) continue;
                Rational support = 0;
                for (const auto& [ballot, weight] : x.weights())
                    if (std::popcount(ballot & d) > std::popcount(ballot & w)) support += weight;
                Rational excess = support - Rational(dsize) / k;
                if (!have_worst || excess > worst) {
                    worst = excess;
                    have_worst = true;
                }
            }
            if (!have_best || worst < best) {
                best = worst;
                have_best = true;
            }
        }
        ok = least_core(x, k, Quota::hare).value == best;
    }
    report(10, ok, "least_core agrees exactly with an independent enumeration on 100 instances");
}

}  // namespace

int main() {
    auto backend = make_backend();
    BackendConfig cfg;

    search_grid(*backend, cfg);
    lower_bound_grid();
    dual_certificates();
    strong_duality(*backend, cfg);
    counterexample_instances(*backend, cfg);
    main_example_criterion(*backend, cfg);
    payment_axiom(*backend, cfg);
    minimality(*backend, cfg);
    oracle_cross_check();

    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed (or skipped with reason)\n");
    return 0;
}
