#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "rcl/fusion.hpp"
#include "rcl/stats.hpp"

using namespace rcl;

namespace {

SelectionSet sel(std::vector<int> idx) {
    SelectionSet s;
    s.indices = std::move(idx);
    return s;
}

}  // namespace

TEST_CASE("knowledge_fusion hand examples") {
    const std::vector<SelectionSet> peers = {sel({1, 2, 3}), sel({2, 3, 4})};
    Rng rng(1);

    SECTION("r = 0 keeps only the agreement") {
        const FusionOutcome out = knowledge_fusion(peers, 0.0, rng, 8);
        CHECK(out.agree.indices == std::vector<int>{2, 3});
        CHECK(out.uncertain.indices == std::vector<int>{1, 4});
        CHECK(out.n_in == 0);
        CHECK(out.fused.indices == std::vector<int>{2, 3});
    }

    SECTION("r = 1 admits the full union") {
        const FusionOutcome out = knowledge_fusion(peers, 1.0, rng, 8);
        CHECK(out.fused.indices == std::vector<int>{1, 2, 3, 4});
        CHECK(out.n_in == 2);
    }

    SECTION("r = 0.5 admits exactly one uncertain sample") {
        const FusionOutcome out = knowledge_fusion(peers, 0.5, rng, 8);
        CHECK(out.n_in == 1);
        CHECK(out.fused.size() == 3);
        CHECK(out.fused.contains(2));
        CHECK(out.fused.contains(3));
        const bool third_ok = out.fused.contains(1) != out.fused.contains(4);
        CHECK(third_ok);
    }
}

TEST_CASE("knowledge_fusion admits each uncertain sample with the right frequency") {
    const std::vector<SelectionSet> peers = {sel({1, 2, 3}), sel({2, 3, 4})};
    int saw1 = 0, saw4 = 0;
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) {
        Rng rng(derive_seed(900, d));
        const FusionOutcome out = knowledge_fusion(peers, 0.5, rng, 8);
        saw1 += out.fused.contains(1);
        saw4 += out.fused.contains(4);
    }
    CHECK(saw1 + saw4 == draws);
    CHECK(std::abs(saw1 / static_cast<double>(draws) - 0.5) < 0.02);
}

TEST_CASE("knowledge_fusion early return when peers agree exactly") {
    const std::vector<SelectionSet> peers = {sel({0, 2, 5}), sel({0, 2, 5})};
    Rng rng(3);
    const std::uint64_t before = Rng(3).next_u64();
    const FusionOutcome out = knowledge_fusion(peers, 0.7, rng, 8);
    CHECK(out.fused.indices == std::vector<int>{0, 2, 5});
    CHECK(out.uncertain.empty());
    CHECK(out.n_in == 0);
    // the stream was not consumed
    CHECK(rng.next_u64() == before);
}

TEST_CASE("knowledge_fusion single peer reduces to that peer's set") {
    Rng rng(4);
    const FusionOutcome out = knowledge_fusion({sel({3, 4, 7})}, 0.3, rng, 8);
    CHECK(out.fused.indices == std::vector<int>{3, 4, 7});
    CHECK(out.uncertain.empty());
}

TEST_CASE("knowledge_fusion validation") {
    Rng rng(5);
    CHECK_THROWS_AS(knowledge_fusion({}, 0.5, rng, 8), std::invalid_argument);
    CHECK_THROWS_AS(knowledge_fusion({sel({1, 9})}, 0.5, rng, 8), std::invalid_argument);
    CHECK_THROWS_AS(knowledge_fusion({sel({-1, 2})}, 0.5, rng, 8), std::invalid_argument);
    CHECK_THROWS_AS(knowledge_fusion({sel({2, 2})}, 0.5, rng, 8), std::invalid_argument);
    CHECK_THROWS_AS(knowledge_fusion({sel({1, 2})}, 1.5, rng, 8), std::invalid_argument);
}

TEST_CASE("fusion sandwich and size law on random peer sets") {
    Rng gen(2025);
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t batch = 2 + gen.below(14);
        const std::size_t n_peers = 1 + gen.below(3);
        std::vector<SelectionSet> peers(n_peers);
        for (auto& p : peers) {
            for (std::size_t i = 0; i < batch; ++i) {
                if (gen.unit() < 0.5) p.indices.push_back(static_cast<int>(i));
            }
            if (p.indices.empty()) p.indices.push_back(static_cast<int>(gen.below(batch)));
        }
        const double rate = gen.unit();
        Rng rng(gen.next_u64());
        const FusionOutcome out = knowledge_fusion(peers, rate, rng, batch);

        for (int i : out.agree.indices) CHECK(out.fused.contains(i));
        std::vector<int> uni = peers[0].indices;
        for (std::size_t k = 1; k < peers.size(); ++k) {
            std::vector<int> merged;
            std::set_union(uni.begin(), uni.end(), peers[k].indices.begin(),
                           peers[k].indices.end(), std::back_inserter(merged));
            uni = std::move(merged);
        }
        for (int i : out.fused.indices) {
            CHECK(std::binary_search(uni.begin(), uni.end(), i));
        }
        if (out.agree.indices != uni) {
            CHECK(out.fused.size() ==
                  out.agree.size() + scaled_count(rate, out.uncertain.size()));
        }
        for (int i : out.admitted.indices) CHECK(out.uncertain.contains(i));
    }
}

TEST_CASE("fused size is non-decreasing in r for a fixed stream") {
    const std::vector<SelectionSet> peers = {sel({0, 1, 2, 3, 4}), sel({3, 4, 5, 6, 7})};
    std::size_t prev = 0;
    for (double r : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
        Rng rng(42);
        const FusionOutcome out = knowledge_fusion(peers, r, rng, 10);
        CHECK(out.fused.size() >= prev);
        prev = out.fused.size();
    }
}

TEST_CASE("admitted sets are uniform over subsets (chi-square)") {
    // |uncertain| = 6, n_in = 3 -> C(6,3) = 20 possible admitted sets
    const std::vector<SelectionSet> peers = {sel({0, 1, 2, 3}), sel({0, 4, 5, 6})};
    std::map<std::vector<int>, std::size_t> counts;
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) {
        Rng rng(derive_seed(31337, d));
        const FusionOutcome out = knowledge_fusion(peers, 0.5, rng, 8);
        REQUIRE(out.n_in == 3);  // floor(0.5 * 6)
        counts[out.admitted.indices]++;
    }
    // C(6,3) = 20 possible admitted sets
    REQUIRE(counts.size() == 20);
    std::vector<std::size_t> flat;
    for (const auto& [k, v] : counts) flat.push_back(v);
    const double stat = chi_squared_uniform_stat(flat);
    CHECK(chi_squared_p_value(stat, static_cast<int>(flat.size()) - 1) > 0.01);
}

TEST_CASE("fuse_all per-network behavior") {
    SECTION("K = 2 is a pure exchange") {
        const std::vector<SelectionSet> sels = {sel({0, 1}), sel({2, 3})};
        const auto fused = fuse_all(sels, 0.7, {11, 12}, 6);
        CHECK(fused[0].indices == std::vector<int>{2, 3});
        CHECK(fused[1].indices == std::vector<int>{0, 1});
    }

    SECTION("identical selections pass through at any rate") {
        const std::vector<SelectionSet> sels = {sel({1, 4}), sel({1, 4}), sel({1, 4})};
        for (double r : {0.0, 0.33, 1.0}) {
            for (const auto& f : fuse_all(sels, r, {1, 2, 3}, 6)) {
                CHECK(f.indices == std::vector<int>{1, 4});
            }
        }
    }

    SECTION("K = 3 with r = 0 yields pairwise intersections of the peers") {
        const std::vector<SelectionSet> sels = {sel({0, 1, 2}), sel({1, 2, 3}), sel({2, 3, 4})};
        const auto fused = fuse_all(sels, 0.0, {5, 6, 7}, 6);
        CHECK(fused[0].indices == std::vector<int>{2, 3});  // sels[1] & sels[2]
        CHECK(fused[1].indices == std::vector<int>{2});     // sels[0] & sels[2]
        CHECK(fused[2].indices == std::vector<int>{1, 2});  // sels[0] & sels[1]
    }

    SECTION("validation") {
        CHECK_THROWS_AS(fuse_all({sel({0})}, 0.5, {1}, 4), std::invalid_argument);
        CHECK_THROWS_AS(fuse_all({sel({0}), sel({1})}, 0.5, {1}, 4), std::invalid_argument);
    }
}

TEST_CASE("fusion outcome is invariant to peer order") {
    const std::vector<SelectionSet> a = {sel({0, 1, 2}), sel({2, 3}), sel({1, 2, 4})};
    std::vector<SelectionSet> b = {a[2], a[0], a[1]};
    Rng r1(99), r2(99);
    const FusionOutcome x = knowledge_fusion(a, 0.4, r1, 6);
    const FusionOutcome y = knowledge_fusion(b, 0.4, r2, 6);
    CHECK(x.agree.indices == y.agree.indices);
    CHECK(x.uncertain.indices == y.uncertain.indices);
    CHECK(x.admitted.indices == y.admitted.indices);
    CHECK(x.fused.indices == y.fused.indices);
}
