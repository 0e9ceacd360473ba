#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "coreforge/combinatorics.hpp"
#include "coreforge/rational.hpp"

namespace coreforge {

/// One approval ballot per voter.
struct ApprovalProfile {
    int m = 0;
    std::vector<CandidateSet> ballots;

    int voters() const { return static_cast<int>(ballots.size()); }
};

/// Frequency vector over approval ballots: nonnegative exact rationals that
/// sum to 1. Zero-weight ballots are not stored.
class VoteDistribution {
public:
    VoteDistribution() = default;
    explicit VoteDistribution(int m) : m_(m) {
        if (m < 1 || m > 64) throw std::invalid_argument("candidate count must be in [1, 64]");
    }

    int m() const { return m_; }

    void set(const CandidateSet& ballot, const Rational& weight) {
        if (ballot.m != m_) throw std::invalid_argument("ballot over wrong candidate count");
        if (weight < 0) throw std::invalid_argument("negative ballot weight");
        if (weight == 0)
            weights_.erase(ballot.mask);
        else
            weights_[ballot.mask] = weight;
    }

    Rational get(const CandidateSet& ballot) const { return get_mask(ballot.mask); }

    Rational get_mask(std::uint64_t mask) const {
        auto it = weights_.find(mask);
        return it == weights_.end() ? Rational(0) : it->second;
    }

    /// Support ballots in ascending mask order.
    const std::map<std::uint64_t, Rational>& weights() const { return weights_; }

    Rational total() const {
        Rational sum = 0;
        for (const auto& [mask, w] : weights_) sum += w;
        return sum;
    }

    bool valid() const {
        for (const auto& [mask, w] : weights_) {
            if (w < 0) return false;
            if (m_ < 64 && (mask >> m_) != 0) return false;
        }
        return total() == 1;
    }

    void require_valid() const {
        if (!valid()) throw std::invalid_argument("weights must be nonnegative and sum to 1");
    }

    friend bool operator==(const VoteDistribution& a, const VoteDistribution& b) {
        return a.m_ == b.m_ && a.weights_ == b.weights_;
    }

private:
    int m_ = 0;
    std::map<std::uint64_t, Rational> weights_;
};

inline VoteDistribution profile_to_distribution(const ApprovalProfile& profile) {
    if (profile.ballots.empty()) throw std::invalid_argument("profile has no voters");
    VoteDistribution x(profile.m);
    std::map<std::uint64_t, long> counts;
    for (const auto& ballot : profile.ballots) {
        if (ballot.m != profile.m) throw std::invalid_argument("ballot over wrong candidate count");
        ++counts[ballot.mask];
    }
    long n = profile.voters();
    for (const auto& [mask, count] : counts)
        x.set(CandidateSet(mask, profile.m), make_rational(count, n));
    return x;
}

/// Smallest profile realizing the distribution: the number of voters is the
/// LCM of the weight denominators.
inline ApprovalProfile distribution_to_profile(const VoteDistribution& x) {
    x.require_valid();
    mpz_class n = 1;
    for (const auto& [mask, w] : x.weights()) {
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), n.get_mpz_t(), w.get_den().get_mpz_t());
        n = l;
    }
    if (!n.fits_sint_p()) throw std::overflow_error("witness profile would be too large");
    ApprovalProfile profile;
    profile.m = x.m();
    for (const auto& [mask, w] : x.weights()) {
        mpz_class copies = w.get_num() * (n / w.get_den());
        long c = copies.get_si();
        for (long i = 0; i < c; ++i) profile.ballots.push_back(CandidateSet(mask, x.m()));
    }
    return profile;
}

// ---------------------------------------------------------------------------
// JSON instance format:
//   { "m": int, "weights": [ { "ballot": [indices], "num": "...", "den": "..." } ] }
// Big integers travel as strings so the encoding is bit-exact.

inline nlohmann::json candidate_set_to_json(const CandidateSet& set) {
    return nlohmann::json(set.indices());
}

inline CandidateSet candidate_set_from_json(const nlohmann::json& j, int m) {
    return CandidateSet::from_indices(j.get<std::vector<int>>(), m);
}

inline nlohmann::json rational_to_json(const Rational& r) {
    return nlohmann::json{{"num", num_string(r)}, {"den", den_string(r)}};
}

inline Rational rational_from_json(const nlohmann::json& j) {
    return rational_from_strings(j.at("num").get<std::string>(), j.at("den").get<std::string>());
}

inline nlohmann::json distribution_to_json(const VoteDistribution& x) {
    nlohmann::json weights = nlohmann::json::array();
    for (const auto& [mask, w] : x.weights()) {
        weights.push_back({{"ballot", candidate_set_to_json(CandidateSet(mask, x.m()))},
                           {"num", num_string(w)},
                           {"den", den_string(w)}});
    }
    return nlohmann::json{{"m", x.m()}, {"weights", weights}};
}

inline VoteDistribution distribution_from_json(const nlohmann::json& j) {
    VoteDistribution x(j.at("m").get<int>());
    for (const auto& entry : j.at("weights")) {
        CandidateSet ballot = candidate_set_from_json(entry.at("ballot"), x.m());
        x.set(ballot, rational_from_strings(entry.at("num").get<std::string>(),
                                            entry.at("den").get<std::string>()));
    }
    x.require_valid();
    return x;
}

}  // namespace coreforge
