#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "coreforge/duality.hpp"
#include "coreforge/milp.hpp"

using namespace coreforge;

namespace {

DeviationFunction random_deviation_function(std::mt19937& rng, int m, int k,
                                            int max_size = -1) {
    if (max_size < 0) max_size = k;
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

/// The fixed-deviation primal: max mu over the ballot simplex with one gap
/// row per committee. Used to confirm strong duality against build_dlp.
double primal_value(const DeviationFunction& D, Quota quota, SolverBackend& backend,
                    const BackendConfig& cfg) {
    CommitteeSpace space(D.m, D.k);
    auto committees = enumerate_committees(space);
    int denom = quota_denominator(quota, D.k);

    OptModel model;
    std::uint64_t ballots = std::uint64_t{1} << D.m;
    for (std::uint64_t mask = 0; mask < ballots; ++mask)
        model.add_continuous("x" + std::to_string(mask), 0.0);
    int mu = model.add_continuous("mu", -kInfinity, kInfinity);

    std::vector<LinearTerm> simplex;
    for (std::uint64_t mask = 0; mask < ballots; ++mask)
        simplex.push_back({static_cast<int>(mask), 1.0});
    model.add_constraint("simplex", simplex, ConstraintSense::eq, 1.0);

    for (std::uint64_t wid = 0; wid < committees.size(); ++wid) {
        std::vector<LinearTerm> terms{{mu, 1.0}};
        for (std::uint64_t mask = 0; mask < ballots; ++mask) {
            if (improves(CandidateSet(mask, D.m), committees[wid], D.at(wid)))
                terms.push_back({static_cast<int>(mask), -1.0});
        }
        model.add_constraint("gap" + std::to_string(wid), terms, ConstraintSense::le,
                             -static_cast<double>(D.at(wid).size()) / denom);
    }
    model.set_objective(ObjectiveSense::maximize, {{mu, 1.0}});
    auto result = backend.solve(model, cfg);
    REQUIRE(result.status == SolveStatus::optimal);
    return result.objective;
}

}  // namespace

TEST_CASE("deviation function validation and json") {
    CHECK_THROWS_AS(DeviationFunction(3, 1, {}), std::invalid_argument);
    auto lb = lower_bound_assignment(4, 2, Quota::hare);
    auto j = deviation_function_to_json(lb.D);
    auto back = deviation_function_from_json(j);
    CHECK(back.m == lb.D.m);
    CHECK(back.targets == lb.D.targets);
}

TEST_CASE("dlp dimensions for m=3, k=1") {
    auto lb = lower_bound_assignment(3, 1, Quota::hare);
    auto prog = build_dlp(3, 1, lb.D, Quota::hare);
    CHECK(prog.model.num_vars() == 4);              // 3 committees + u
    CHECK(prog.model.num_constraints() == 1 + 8);   // qsum + one row per ballot
}

TEST_CASE("dlp optimum matches the lower-bound value") {
    auto backend = make_backend();
    BackendConfig cfg;
    auto lb = lower_bound_assignment(4, 2, Quota::hare);
    auto prog = build_dlp(4, 2, lb.D, Quota::hare);
    auto result = backend->solve(prog.model, cfg);
    REQUIRE(result.status == SolveStatus::optimal);
    CHECK(result.objective == Catch::Approx(-1.0 / 6).margin(1e-6));
}

TEST_CASE("strong duality on random deviation functions") {
    auto backend = make_backend();
    BackendConfig cfg;
    std::mt19937 rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        auto D = random_deviation_function(rng, 4, 2);
        for (Quota quota : {Quota::hare, Quota::droop}) {
            auto dual = backend->solve(build_dlp(4, 2, D, quota).model, cfg);
            REQUIRE(dual.status == SolveStatus::optimal);
            CHECK(dual.objective ==
                  Catch::Approx(primal_value(D, quota, *backend, cfg)).margin(1e-6));
        }
    }
}

TEST_CASE("certificate verification accepts the honest and names the tampered") {
    auto lb = lower_bound_assignment(4, 2, Quota::hare);
    auto cert = certificate_singleton(4, 2, lb.D, Quota::hare);
    auto check = verify_certificate(cert, lb.D, 4, 2, Quota::hare);
    REQUIRE(check.feasible);
    CHECK(check.objective == make_rational(-1, 6));

    // JSON round trip preserves the certificate exactly
    auto back = certificate_from_json(certificate_to_json(cert));
    CHECK(back.q == cert.q);
    CHECK(back.u == cert.u);

    // tampering with u breaks a ballot constraint, which gets named
    DualCertificate bad = cert;
    bad.u -= make_rational(1, 100);
    auto rejected = verify_certificate(bad, lb.D, 4, 2, Quota::hare);
    CHECK_FALSE(rejected.feasible);
    CHECK(rejected.violating_ballot.has_value());
    CHECK_FALSE(rejected.message.empty());

    DualCertificate unbalanced = cert;
    unbalanced.q.begin()->second += make_rational(1, 100);
    CHECK_FALSE(verify_certificate(unbalanced, lb.D, 4, 2, Quota::hare).feasible);
}

TEST_CASE("singleton certificates meet the closed-form bound") {
    std::mt19937 rng(99);
    for (auto [m, k] : {std::pair{4, 2}, {5, 2}, {5, 3}}) {
        for (int trial = 0; trial < 12; ++trial) {
            // all-singleton targets, possibly one committee with a fat target
            auto D = random_deviation_function(rng, m, k, 1);
            int t = 1;
            if (trial % 2 == 1 && k >= 2) {
                CommitteeSpace space(m, k);
                auto deviations = enumerate_deviations(space);
                std::uint64_t fat_wid = rng() % space.committee_count();
                while (true) {
                    const auto& candidate = deviations[rng() % deviations.size()];
                    if (candidate.size() >= 2) {
                        D.targets[fat_wid] = candidate;
                        t = candidate.size();
                        break;
                    }
                }
            }
            auto cert = certificate_singleton(m, k, D, Quota::hare);
            auto check = verify_certificate(cert, D, m, k, Quota::hare);
            REQUIRE(check.feasible);
            CHECK(check.objective <= make_rational(-1, k * (k + 2 - t)));
        }
    }
}

TEST_CASE("singleton constructor rejects two fat targets") {
    auto lb = lower_bound_assignment(4, 2, Quota::hare);
    auto D = lb.D;
    D.targets[0] = CandidateSet::from_indices({2, 3}, 4);
    D.targets[1] = CandidateSet::from_indices({1, 3}, 4);
    CHECK_THROWS_AS(certificate_singleton(4, 2, D, Quota::hare), std::invalid_argument);
}

TEST_CASE("k = m-1 certificates meet both quota bounds") {
    std::mt19937 rng(123);
    for (int m : {3, 4, 5, 6}) {
        int k = m - 1;
        for (int trial = 0; trial < 12; ++trial) {
            auto D = random_deviation_function(rng, m, k);
            auto cert = certificate_kplusone(m, D, Quota::hare);
            auto hare = verify_certificate(cert, D, m, k, Quota::hare);
            REQUIRE(hare.feasible);
            CHECK(hare.objective <= make_rational(-1, k * (k + 1)));
            auto droop = verify_certificate(cert, D, m, k, Quota::droop);
            REQUIRE(droop.feasible);
            CHECK(droop.objective <= 0);
        }
    }
}

TEST_CASE("certificates bridge to stable lotteries") {
    // a droop certificate with objective <= 0 yields a stable lottery: the
    // load of each ballot is at most u <= E[|D(W)|]/(k+1)
    std::mt19937 rng(321);
    for (int trial = 0; trial < 6; ++trial) {
        int m = 4, k = 3;
        auto D = random_deviation_function(rng, m, k);
        auto cert = certificate_kplusone(m, D, Quota::droop);
        REQUIRE(verify_certificate(cert, D, m, k, Quota::droop).feasible);
        auto lottery = check_stable_lottery(cert.q, D.targets, m, k, Quota::droop);
        CHECK(lottery.all_hold);
    }
}

TEST_CASE("point-mass certificate when a committee absorbs its target") {
    // D({0,1}) = {0} is inside the committee: the chain construction would
    // repeat committees, so a point mass must be used instead
    CommitteeSpace space(4, 2);
    auto lb = lower_bound_assignment(4, 2, Quota::hare);
    auto D = lb.D;
    std::uint64_t wid = committee_index(space, CandidateSet::from_indices({0, 1}, 4));
    D.targets[wid] = CandidateSet::from_indices({0}, 4);
    auto cert = certificate_singleton(4, 2, D, Quota::hare);
    CHECK(cert.q.size() == 1);
    CHECK(cert.u == 0);
    auto check = verify_certificate(cert, D, 4, 2, Quota::hare);
    REQUIRE(check.feasible);
    CHECK(check.objective <= make_rational(-1, 2 * 3));
}
