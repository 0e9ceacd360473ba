#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace coreforge {

/// A subset of the candidates {0, ..., m-1}, stored as a bit mask.
/// Candidate i is in the set iff bit i of `mask` is set.
struct CandidateSet {
    std::uint64_t mask = 0;
    int m = 0;

    CandidateSet() = default;
    CandidateSet(std::uint64_t mask_, int m_) : mask(mask_), m(m_) {
        if (m_ < 0 || m_ > 64)
            throw std::invalid_argument("candidate count must be in [0, 64]");
        if (m_ < 64 && (mask_ >> m_) != 0)
            throw std::invalid_argument("mask uses bits beyond the candidate count");
    }

    static CandidateSet from_indices(const std::vector<int>& indices, int m) {
        std::uint64_t mask = 0;
        for (int i : indices) {
            if (i < 0 || i >= m)
                throw std::invalid_argument("candidate index out of range");
            mask |= std::uint64_t{1} << i;
        }
        return CandidateSet(mask, m);
    }

    int size() const { return std::popcount(mask); }
    bool empty() const { return mask == 0; }
    bool contains(int i) const { return (mask >> i) & 1; }
    bool subset_of(const CandidateSet& other) const { return (mask & ~other.mask) == 0; }

    std::vector<int> indices() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1)
            out.push_back(std::countr_zero(rest));
        return out;
    }

    /// Renders as e.g. "{0,2,4}".
    std::string to_string() const {
        std::string out = "{";
        bool first = true;
        for (int i : indices()) {
            if (!first) out += ",";
            out += std::to_string(i);
            first = false;
        }
        return out + "}";
    }

    friend bool operator==(const CandidateSet& a, const CandidateSet& b) {
        return a.mask == b.mask && a.m == b.m;
    }
    friend bool operator!=(const CandidateSet& a, const CandidateSet& b) { return !(a == b); }
};

inline int intersection_size(const CandidateSet& a, const CandidateSet& b) {
    return std::popcount(a.mask & b.mask);
}

/// True iff the ballot strictly prefers committee `to` over committee `from`,
/// i.e. it approves of strictly more members of `to`.
inline bool improves(const CandidateSet& ballot, const CandidateSet& from, const CandidateSet& to) {
    return intersection_size(ballot, to) > intersection_size(ballot, from);
}

inline std::uint64_t binomial(int n, int r) {
    if (r < 0 || r > n) return 0;
    if (r > n - r) r = n - r;
    std::uint64_t result = 1;
    for (int i = 1; i <= r; ++i) {
        result = result * static_cast<std::uint64_t>(n - r + i) / static_cast<std::uint64_t>(i);
    }
    return result;
}

/// The election dimensions: m candidates, committees of size k.
class CommitteeSpace {
public:
    CommitteeSpace(int m, int k) : m_(m), k_(k) {
        if (!(0 < k && k < m) || m > 64)
            throw std::invalid_argument("require 0 < k < m <= 64");
    }

    int m() const { return m_; }
    int k() const { return k_; }

    std::uint64_t committee_count() const { return binomial(m_, k_); }

    std::uint64_t deviation_count() const {
        std::uint64_t total = 0;
        for (int l = 1; l <= k_; ++l) total += binomial(m_, l);
        return total;
    }

private:
    int m_;
    int k_;
};

namespace detail {

/// All size-r subsets of {0..m-1} in lexicographic order of sorted index lists.
inline std::vector<CandidateSet> subsets_of_size(int m, int r) {
    std::vector<CandidateSet> out;
    out.reserve(static_cast<std::size_t>(binomial(m, r)));
    std::vector<int> idx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        out.push_back(CandidateSet::from_indices(idx, m));
        int pos = r - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - r + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < r; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

}  // namespace detail

/// All k-committees in lexicographic order of sorted index lists. The
/// position in this sequence is the canonical committee id.
inline std::vector<CandidateSet> enumerate_committees(const CommitteeSpace& space) {
    return detail::subsets_of_size(space.m(), space.k());
}

/// All deviations (subsets of size 1..k), sizes ascending, lexicographic
/// within each size. The position is the canonical deviation id.
inline std::vector<CandidateSet> enumerate_deviations(const CommitteeSpace& space) {
    std::vector<CandidateSet> out;
    out.reserve(static_cast<std::size_t>(space.deviation_count()));
    for (int l = 1; l <= space.k(); ++l) {
        auto layer = detail::subsets_of_size(space.m(), l);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

/// Rank of a size-k subset among all size-k subsets in lexicographic order
/// of sorted index lists.
inline std::uint64_t subset_rank(const CandidateSet& set, int k) {
    if (set.size() != k) throw std::invalid_argument("subset size mismatch");
    std::uint64_t rank = 0;
    int prev = -1;
    int remaining = k;
    for (int a : set.indices()) {
        for (int j = prev + 1; j < a; ++j)
            rank += binomial(set.m - 1 - j, remaining - 1);
        prev = a;
        --remaining;
    }
    return rank;
}

inline std::uint64_t committee_index(const CommitteeSpace& space, const CandidateSet& W) {
    if (W.m != space.m() || W.size() != space.k())
        throw std::invalid_argument("not a committee of this space");
    return subset_rank(W, space.k());
}

inline std::uint64_t deviation_index(const CommitteeSpace& space, const CandidateSet& Wp) {
    int l = Wp.size();
    if (Wp.m != space.m() || l < 1 || l > space.k())
        throw std::invalid_argument("not a deviation of this space");
    std::uint64_t offset = 0;
    for (int s = 1; s < l; ++s) offset += binomial(space.m(), s);
    return offset + subset_rank(Wp, l);
}

}  // namespace coreforge
