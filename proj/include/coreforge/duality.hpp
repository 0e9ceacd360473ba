#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "coreforge/combinatorics.hpp"
#include "coreforge/election.hpp"
#include "coreforge/optmodel.hpp"
#include "coreforge/oracle.hpp"
#include "coreforge/rational.hpp"

namespace coreforge {

/// Total assignment of one deviation to every k-committee, indexed by the
/// canonical committee id.
struct DeviationFunction {
    int m = 0;
    int k = 0;
    std::vector<CandidateSet> targets;  // targets[committee id]

    DeviationFunction() = default;
    DeviationFunction(int m_, int k_, std::vector<CandidateSet> targets_)
        : m(m_), k(k_), targets(std::move(targets_)) {
        CommitteeSpace space(m, k);
        if (targets.size() != space.committee_count())
            throw std::invalid_argument("deviation function must be total over all k-committees");
        for (const auto& t : targets) {
            if (t.m != m || t.size() < 1 || t.size() > k)
                throw std::invalid_argument("deviation target size must be in [1, k]");
        }
    }

    const CandidateSet& at(std::uint64_t committee_id) const { return targets.at(committee_id); }
};

inline nlohmann::json deviation_function_to_json(const DeviationFunction& d) {
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& t : d.targets) targets.push_back(candidate_set_to_json(t));
    return nlohmann::json{{"m", d.m}, {"k", d.k}, {"deviations", targets}};
}

inline DeviationFunction deviation_function_from_json(const nlohmann::json& j) {
    int m = j.at("m").get<int>();
    int k = j.at("k").get<int>();
    std::vector<CandidateSet> targets;
    for (const auto& t : j.at("deviations")) targets.push_back(candidate_set_from_json(t, m));
    return DeviationFunction(m, k, std::move(targets));
}

/// Distribution q over k-committees plus a per-ballot load bound u. A
/// feasible certificate upper-bounds the committee-search optimum for its
/// deviation function.
struct DualCertificate {
    std::map<std::uint64_t, Rational> q;  // committee id -> weight, zeros omitted
    Rational u;
};

inline nlohmann::json certificate_to_json(const DualCertificate& cert) {
    nlohmann::json q = nlohmann::json::array();
    for (const auto& [wid, w] : cert.q)
        q.push_back({wid, num_string(w), den_string(w)});
    return nlohmann::json{{"q", q}, {"u", {num_string(cert.u), den_string(cert.u)}}};
}

inline DualCertificate certificate_from_json(const nlohmann::json& j) {
    DualCertificate cert;
    for (const auto& entry : j.at("q")) {
        std::uint64_t wid = entry.at(0).get<std::uint64_t>();
        cert.q[wid] = rational_from_strings(entry.at(1).get<std::string>(),
                                            entry.at(2).get<std::string>());
    }
    cert.u = rational_from_strings(j.at("u").at(0).get<std::string>(),
                                   j.at("u").at(1).get<std::string>());
    return cert;
}

/// The dual LP of the fixed-deviation committee search: variables q over
/// k-committees and u, one load constraint per ballot.
struct DlpProgram {
    OptModel model;
    int u_var = 0;  // q vars occupy ids 0..committee_count-1, u follows
    int m = 0;
    int k = 0;
    Quota quota = Quota::hare;
};

inline DlpProgram build_dlp(int m, int k, const DeviationFunction& D, Quota quota) {
    if (D.m != m || D.k != k) throw std::invalid_argument("deviation function dimension mismatch");
    CommitteeSpace space(m, k);
    auto committees = enumerate_committees(space);
    int denom = quota_denominator(quota, k);

    DlpProgram prog;
    prog.m = m;
    prog.k = k;
    prog.quota = quota;
    for (std::uint64_t wid = 0; wid < committees.size(); ++wid)
        prog.model.add_continuous("q_" + std::to_string(wid), 0.0);
    prog.u_var = prog.model.add_continuous("u", -kInfinity, kInfinity);

    std::vector<LinearTerm> simplex;
    for (std::uint64_t wid = 0; wid < committees.size(); ++wid)
        simplex.push_back({static_cast<int>(wid), 1.0});
    prog.model.add_constraint("qsum", simplex, ConstraintSense::eq, 1.0);

    std::uint64_t ballots = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < ballots; ++mask) {
        CandidateSet ballot(mask, m);
        std::vector<LinearTerm> terms;
        for (std::uint64_t wid = 0; wid < committees.size(); ++wid) {
            if (improves(ballot, committees[wid], D.at(wid))) terms.push_back({static_cast<int>(wid), 1.0});
        }
        terms.push_back({prog.u_var, -1.0});
        prog.model.add_constraint("ballot_" + std::to_string(mask), terms, ConstraintSense::le, 0.0);
    }

    std::vector<LinearTerm> objective{{prog.u_var, 1.0}};
    for (std::uint64_t wid = 0; wid < committees.size(); ++wid)
        objective.push_back({static_cast<int>(wid),
                             -static_cast<double>(D.at(wid).size()) / denom});
    prog.model.set_objective(ObjectiveSense::minimize, objective);
    return prog;
}

/// Exact objective of a certificate: u - sum_W |D(W)|/denom * q[W].
inline Rational certificate_objective(const DualCertificate& cert, const DeviationFunction& D,
                                      Quota quota) {
    int denom = quota_denominator(quota, D.k);
    Rational obj = cert.u;
    for (const auto& [wid, w] : cert.q)
        obj -= make_rational(D.at(wid).size(), denom) * w;
    return obj;
}

struct CertificateCheck {
    bool feasible = false;
    Rational objective;
    std::optional<std::uint64_t> violating_ballot;
    std::string message;
};

/// Exact feasibility check of every ballot constraint. On success, the
/// returned objective upper-bounds the committee-search value for D.
inline CertificateCheck verify_certificate(const DualCertificate& cert, const DeviationFunction& D,
                                           int m, int k, Quota quota) {
    if (D.m != m || D.k != k) throw std::invalid_argument("deviation function dimension mismatch");
    CommitteeSpace space(m, k);
    auto committees = enumerate_committees(space);

    CertificateCheck check;
    Rational qsum = 0;
    for (const auto& [wid, w] : cert.q) {
        if (wid >= committees.size()) {
            check.message = "q references committee id out of range";
            return check;
        }
        if (w < 0) {
            check.message = "q has a negative entry";
            return check;
        }
        qsum += w;
    }
    if (qsum != 1) {
        check.message = "q sums to " + rational_to_string(qsum) + ", not 1";
        return check;
    }

    std::uint64_t ballots = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < ballots; ++mask) {
        CandidateSet ballot(mask, m);
        Rational load = 0;
        for (const auto& [wid, w] : cert.q) {
            if (improves(ballot, committees[wid], D.at(wid))) load += w;
        }
        if (load > cert.u) {
            check.violating_ballot = mask;
            check.message = "ballot " + ballot.to_string() + " carries load " +
                            rational_to_string(load) + " > u = " + rational_to_string(cert.u);
            return check;
        }
    }
    check.feasible = true;
    check.objective = certificate_objective(cert, D, quota);
    return check;
}

namespace detail {

/// Deterministic completion: extend `base` to a size-k committee using the
/// smallest-index candidates not yet included.
inline CandidateSet complete_committee(const CandidateSet& base, int m, int k) {
    std::uint64_t out = base.mask;
    for (int c = 0; c < m && std::popcount(out) < k; ++c) out |= std::uint64_t{1} << c;
    return CandidateSet(out, m);
}

/// Point-mass certificate on a committee whose own deviation target it
/// already contains: no ballot can strictly prefer the target, so u = 0.
inline DualCertificate point_mass_certificate(std::uint64_t wid) {
    DualCertificate cert;
    cert.q[wid] = 1;
    cert.u = 0;
    return cert;
}

}  // namespace detail

/// Certificate for deviation functions that are singleton-valued everywhere
/// except at most one committee with target size t: a nested chain of
/// k+2-t committees, each absorbing the targets of its predecessors,
/// weighted uniformly.
inline DualCertificate certificate_singleton(int m, int k, const DeviationFunction& D, Quota quota) {
    (void)quota;  // construction is quota-independent; only the claimed bound differs
    if (D.m != m || D.k != k) throw std::invalid_argument("deviation function dimension mismatch");
    CommitteeSpace space(m, k);
    auto committees = enumerate_committees(space);

    std::optional<std::uint64_t> fat;  // the at-most-one non-singleton committee
    for (std::uint64_t wid = 0; wid < committees.size(); ++wid) {
        if (D.at(wid).size() > 1) {
            if (fat) throw std::invalid_argument("more than one non-singleton deviation target");
            fat = wid;
        }
        if (D.at(wid).subset_of(committees[wid])) return detail::point_mass_certificate(wid);
    }
    // From here on D(W) is never contained in W, so each chain step strictly
    // grows the union of targets and all chain committees are distinct.
    int t = fat ? D.at(*fat).size() : 1;
    std::uint64_t first = fat ? *fat : 0;

    std::vector<std::uint64_t> chain{first};
    std::uint64_t union_mask = 0;
    for (int i = 2; i <= k + 2 - t; ++i) {
        union_mask |= D.at(chain.back()).mask;
        CandidateSet next = detail::complete_committee(CandidateSet(union_mask, m), m, k);
        chain.push_back(committee_index(space, next));
    }

    DualCertificate cert;
    Rational weight = make_rational(1, k + 2 - t);
    for (std::uint64_t wid : chain) cert.q[wid] = weight;
    cert.u = weight;
    return cert;
}

/// Certificate for the k = m-1 setting, any deviation function. Either some
/// committee contains its own target (point mass), or a greedy chain of
/// committees, each missing a candidate not yet covered by earlier targets.
inline DualCertificate certificate_kplusone(int m, const DeviationFunction& D, Quota quota) {
    (void)quota;
    int k = m - 1;
    if (D.m != m || D.k != k) throw std::invalid_argument("requires k = m - 1");
    CommitteeSpace space(m, k);
    auto committees = enumerate_committees(space);

    for (std::uint64_t wid = 0; wid < committees.size(); ++wid) {
        if (D.at(wid).subset_of(committees[wid])) return detail::point_mass_certificate(wid);
    }

    std::uint64_t all = (m == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << m) - 1);
    auto committee_missing = [&](int c) {
        return CandidateSet(all & ~(std::uint64_t{1} << c), m);
    };

    std::vector<std::uint64_t> chain;
    std::uint64_t covered = 0;
    int next_missing = 0;  // W_1 misses candidate 0
    while (true) {
        CandidateSet W = committee_missing(next_missing);
        std::uint64_t wid = committee_index(space, W);
        chain.push_back(wid);
        covered |= D.at(wid).mask;
        if (covered == all) break;
        next_missing = std::countr_zero(~covered);
    }

    DualCertificate cert;
    Rational weight = make_rational(1, static_cast<long>(chain.size()));
    for (std::uint64_t wid : chain) cert.q[wid] = weight;
    cert.u = weight;
    return cert;
}

}  // namespace coreforge
