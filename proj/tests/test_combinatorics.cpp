#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "coreforge/combinatorics.hpp"

using namespace coreforge;

TEST_CASE("candidate set basics") {
    auto s = CandidateSet::from_indices({0, 2, 4}, 5);
    CHECK(s.mask == 0b10101);
    CHECK(s.size() == 3);
    CHECK(s.contains(2));
    CHECK_FALSE(s.contains(1));
    CHECK(s.indices() == std::vector<int>{0, 2, 4});
    CHECK(s.to_string() == "{0,2,4}");
    CHECK(CandidateSet(0, 5).to_string() == "{}");

    CHECK(CandidateSet::from_indices({0, 2}, 5).subset_of(s));
    CHECK_FALSE(s.subset_of(CandidateSet::from_indices({0, 2}, 5)));

    CHECK_THROWS_AS(CandidateSet::from_indices({5}, 5), std::invalid_argument);
    CHECK_THROWS_AS(CandidateSet(0b100000, 5), std::invalid_argument);
}

TEST_CASE("improves compares approved-member counts") {
    auto ballot = CandidateSet::from_indices({1, 3}, 5);
    auto W = CandidateSet::from_indices({0, 2, 4}, 5);
    CHECK(improves(ballot, W, CandidateSet::from_indices({1}, 5)));
    CHECK(improves(ballot, W, CandidateSet::from_indices({1, 3}, 5)));
    CHECK_FALSE(improves(ballot, W, CandidateSet::from_indices({4}, 5)));
    // ballots never prefer a committee they approve equally
    CHECK_FALSE(improves(ballot, W, W));
    CHECK_FALSE(improves(CandidateSet(0, 5), W, CandidateSet::from_indices({1}, 5)));
}

TEST_CASE("binomial") {
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(5, 5) == 1);
    CHECK(binomial(5, 6) == 0);
    CHECK(binomial(5, -1) == 0);
    CHECK(binomial(50, 25) == 126410606437752ULL);
}

TEST_CASE("committee space counts") {
    CommitteeSpace space(5, 3);
    CHECK(space.committee_count() == 10);
    CHECK(space.deviation_count() == 5 + 10 + 10);
    CHECK_THROWS_AS(CommitteeSpace(3, 3), std::invalid_argument);
    CHECK_THROWS_AS(CommitteeSpace(3, 0), std::invalid_argument);
}

TEST_CASE("enumeration is lexicographic and complete") {
    CommitteeSpace space(5, 2);
    auto committees = enumerate_committees(space);
    REQUIRE(committees.size() == 10);
    CHECK(committees.front() == CandidateSet::from_indices({0, 1}, 5));
    CHECK(committees[1] == CandidateSet::from_indices({0, 2}, 5));
    CHECK(committees.back() == CandidateSet::from_indices({3, 4}, 5));
    std::set<std::uint64_t> seen;
    for (const auto& W : committees) {
        CHECK(W.size() == 2);
        seen.insert(W.mask);
    }
    CHECK(seen.size() == committees.size());

    auto deviations = enumerate_deviations(space);
    REQUIRE(deviations.size() == space.deviation_count());
    // sizes ascending: 5 singletons first, then the pairs
    for (std::size_t i = 0; i < 5; ++i) CHECK(deviations[i].size() == 1);
    for (std::size_t i = 5; i < deviations.size(); ++i) CHECK(deviations[i].size() == 2);
}

TEST_CASE("index functions invert enumeration") {
    for (int m = 2; m <= 6; ++m) {
        for (int k = 1; k < m; ++k) {
            CommitteeSpace space(m, k);
            auto committees = enumerate_committees(space);
            for (std::uint64_t i = 0; i < committees.size(); ++i)
                CHECK(committee_index(space, committees[i]) == i);
            auto deviations = enumerate_deviations(space);
            for (std::uint64_t i = 0; i < deviations.size(); ++i)
                CHECK(deviation_index(space, deviations[i]) == i);
        }
    }
}

TEST_CASE("index functions reject foreign sets") {
    CommitteeSpace space(5, 2);
    CHECK_THROWS_AS(committee_index(space, CandidateSet::from_indices({0, 1, 2}, 5)),
                    std::invalid_argument);
    CHECK_THROWS_AS(deviation_index(space, CandidateSet::from_indices({0, 1, 2}, 5)),
                    std::invalid_argument);
    CHECK_THROWS_AS(deviation_index(space, CandidateSet(0, 5)), std::invalid_argument);
}
