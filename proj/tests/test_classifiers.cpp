#include "oracles.hpp"
#include "sigmak/classifiers.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sigmak;

TEST(KLayered, Examples) {
    const auto six = is_k_layered(6, 2);
    ASSERT_EQ(six.flags.k_layered, true);
    EXPECT_EQ(six.flags.zumkeller, true);
    ASSERT_TRUE(six.certificate.has_value());
    EXPECT_TRUE(verify_certificate(*six.certificate));
    auto parts = six.certificate->parts;
    for (auto& p : parts) std::sort(p.begin(), p.end());
    std::sort(parts.begin(), parts.end());
    EXPECT_EQ(parts, (std::vector<std::vector<u64>>{{1, 2, 3}, {6}}));

    const auto r120 = is_k_layered(120, 3);
    EXPECT_EQ(r120.flags.k_layered, true);
    EXPECT_TRUE(oracle::k_layered_brute(120, 3));
    EXPECT_TRUE(verify_certificate(*r120.certificate));
    for (const auto& p : r120.certificate->parts) EXPECT_EQ(std::accumulate(p.begin(), p.end(), u64{0}), 120u);

    const auto five = is_k_layered(5, 2);
    EXPECT_EQ(five.flags.k_layered, false);
    EXPECT_FALSE(five.certificate.has_value());
    EXPECT_EQ(five.search_status, SearchStatus::decided);
    EXPECT_THROW(is_k_layered(6, 1), PreconditionError);
}

TEST(KLayered, AgreesWithBruteForce) {
    for (unsigned k = 2; k <= 4; ++k)
        for (u64 n = 1; n <= 2000; ++n) {
            const auto res = k_layered_search(n, k);
            ASSERT_EQ(res.status, SearchStatus::decided);
            ASSERT_EQ(res.layered, oracle::k_layered_brute(n, k)) << n << " k=" << k;
            if (res.layered) {
                ASSERT_TRUE(verify_certificate(*res.certificate)) << n;
            }
        }
}

TEST(KLayered, OneLayeredIsUniversal) {
    for (u64 n : {1ull, 2ull, 97ull, 1000ull}) {
        const auto r = k_layered_search(n, 1);
        EXPECT_TRUE(r.layered);
        EXPECT_TRUE(verify_certificate(*r.certificate));
    }
}

TEST(KLayered, ZumkellerNecessaryConditions) {
    Budget shared{4'000'000'000ull};
    for (u64 n = 1; n <= 100'000; ++n) {
        const auto r = k_layered_search(n, 2, shared);
        ASSERT_EQ(r.status, SearchStatus::decided) << n;
        if (!r.layered) continue;
        const u64 s = oracle::sigma(n);
        EXPECT_EQ(s % 2, 0u) << n;
        EXPECT_GE(s, 2 * n) << n;
    }
}

TEST(KLayered, PerfectNumbersAreTwoLayered) {
    for (u64 n = 1; n <= 10'000; ++n) {
        if (!is_k_perfect(n, 2)) continue;
        const auto v = is_k_layered(n, 2);
        EXPECT_EQ(v.flags.k_layered, true) << n;
        EXPECT_TRUE(v.flags.perfect);
    }
}

TEST(KLayered, TimeoutIsAStatus) {
    const auto r = k_layered_search(720720, 2, Budget{10});
    EXPECT_EQ(r.status, SearchStatus::timeout);
    EXPECT_FALSE(r.verdict().has_value());
    const auto v = is_k_layered(720720, 2, Budget{10});
    EXPECT_EQ(v.search_status, SearchStatus::timeout);
    EXPECT_FALSE(v.flags.k_layered.has_value());
}

TEST(Certificate, RejectsBrokenPartitions) {
    EXPECT_TRUE(verify_certificate({6, 2, {{6}, {1, 2, 3}}}));
    EXPECT_FALSE(verify_certificate({6, 2, {{6}, {1, 2}}}));
    EXPECT_FALSE(verify_certificate({6, 2, {{6}, {1, 2, 3, 3}}}));
    EXPECT_FALSE(verify_certificate({6, 2, {{6, 1}, {2, 3}}}));
    EXPECT_FALSE(verify_certificate({6, 3, {{6}, {1, 2, 3}}}));
    EXPECT_FALSE(verify_certificate({8, 2, {{8}, {1, 2, 4, 1}}}));
}

TEST(Certificate, JsonRoundTrip) {
    const auto v = is_k_layered(120, 3);
    const auto j = certificate_json(*v.certificate);
    EXPECT_EQ(j.begin().key(), "n");
    EXPECT_EQ(j["n"], 120);
    EXPECT_EQ(j["k"], 3);
    const auto back = certificate_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.parts, v.certificate->parts);
    EXPECT_TRUE(verify_certificate(back));
}

TEST(Practical, Examples) {
    EXPECT_TRUE(is_practical(1));
    EXPECT_TRUE(is_practical(12));
    EXPECT_FALSE(is_practical(10));
    EXPECT_TRUE(is_practical(2));
    EXPECT_FALSE(is_practical(3));
    EXPECT_THROW(is_practical(0), PreconditionError);
}

TEST(Practical, StructureCriterionMatchesDefinition) {
    for (u64 n = 1; n <= 10'000; ++n) ASSERT_EQ(is_practical(n), oracle::practical_by_definition(n)) << n;
}

TEST(KPerfect, Examples) {
    EXPECT_TRUE(is_k_perfect(6, 2));
    EXPECT_TRUE(is_k_perfect(120, 3));
    EXPECT_TRUE(is_k_perfect(5 + 1, 2));
    EXPECT_FALSE(is_k_perfect(12, 2));
    EXPECT_TRUE(is_k_perfect(30240, 4));
}

TEST(Semiperfect, Examples) {
    EXPECT_EQ(is_semiperfect(12), true);
    EXPECT_EQ(is_semiperfect(70), false);  // smallest weird number
    EXPECT_EQ(is_semiperfect(10), false);
    EXPECT_EQ(is_semiperfect(20), true);
}

TEST(ProductConstruction, BoundaryWithOne) {
    EXPECT_EQ(product_construction_check(6, 1, 2), true);
}

TEST(ProductConstruction, RandomSmallInputs) {
    // practical numbers above 1 are even, so odd Zumkeller numbers (945, 1575, ...) are needed
    std::vector<u64> practical3, zumkeller;
    for (u64 n = 2; n <= 400; ++n)
        if (is_practical(n) && oracle::sigma(n) % 3 == 0) practical3.push_back(n);
    for (u64 x = 2; x <= 5000; ++x)
        if (k_layered_search(x, 2).layered) zumkeller.push_back(x);
    std::vector<std::pair<u64, u64>> pairs;
    for (u64 n : practical3)
        for (u64 x : zumkeller)
            if (std::gcd(n, x) == 1) pairs.emplace_back(n, x);
    ASSERT_GE(pairs.size(), 60u);
    std::mt19937_64 rng(31);
    for (int i = 0; i < 60; ++i) {
        const auto [n, x] = pairs[rng() % pairs.size()];
        EXPECT_EQ(product_construction_check(n, x, 3), true) << n << " * " << x;
    }
}

TEST(ProductConstruction, Preconditions) {
    EXPECT_THROW(product_construction_check(6, 6, 2), PreconditionError);     // not coprime
    EXPECT_THROW(product_construction_check(10, 3, 2), PreconditionError);    // 10 not practical
    EXPECT_THROW(product_construction_check(4, 3, 2), PreconditionError);     // sigma(4)=7 odd
    EXPECT_THROW(product_construction_check(6, 5, 3), PreconditionError);     // 5 not 2-layered
    EXPECT_THROW(product_construction_check(6, 1, 1), PreconditionError);
}

TEST(Annotate, Examples) {
    const std::vector<SolutionRecord> two = search(2, 12035);
    const auto ann = annotate_solutions(two);
    ASSERT_EQ(ann.size(), 8u);
    EXPECT_EQ(ann[0].n1.n, 6u);
    EXPECT_EQ(ann[0].n1.flags.zumkeller, true);
    EXPECT_TRUE(ann[0].n1.flags.perfect);
    EXPECT_EQ(ann[1].n1.n, 126u);
    EXPECT_EQ(ann[1].n1.sigma, 312);
    EXPECT_TRUE(ann[1].n1.flags.abundant);
    for (const auto& a : ann) {
        EXPECT_TRUE(a.k_divides_sigma);
        // sigma(n+1) = k sigma(n) > k n for n > 1 forces abundance
        if (a.record.n > 1) {
            EXPECT_TRUE(a.n1.flags.abundant || a.n1.flags.perfect) << a.record.n;
        }
    }
    for (const auto& a : annotate_solutions(search(3, 11219))) {
        EXPECT_EQ(a.n1.sigma % 3, 0);
        EXPECT_TRUE(a.k_divides_sigma);
    }
}

TEST(Annotate, CongruenceOnLargerRange) {
    for (u64 k = 2; k <= 5; ++k)
        for (const auto& r : search(k, 200'000)) EXPECT_EQ(r.sigma_n1 % k, 0u) << r.n;
}

TEST(Annotate, PrimeSolutionGivesKPerfect) {
    for (u64 k = 2; k <= 4; ++k)
        for (const auto& r : search(k, 100'000))
            if (oracle::is_prime(r.n)) {
                EXPECT_TRUE(is_k_perfect(r.n + 1, k)) << r.n;
            }
}
