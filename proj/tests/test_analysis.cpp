#include <catch2/catch_amalgamated.hpp>

#include "rcl/analysis.hpp"
#include "rcl/rng.hpp"

using namespace rcl;

namespace {

SelectionSet sel(std::vector<int> idx) {
    SelectionSet s;
    s.indices = std::move(idx);
    return s;
}

Matrix random_grads(std::size_t n, std::size_t width, Rng& rng) {
    Matrix m(n, width);
    for (double& v : m.data) v = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("pure_ratio counts clean among selected") {
    const std::vector<std::uint8_t> clean = {1, 1, 0, 1, 0};
    const auto r = pure_ratio({sel({0, 1, 2})}, clean);
    REQUIRE(r.has_value());
    CHECK(*r == Catch::Approx(2.0 / 3.0));

    // pooled across several selections
    const auto pooled = pure_ratio({sel({0, 1}), sel({2, 4})}, clean);
    CHECK(*pooled == Catch::Approx(0.5));

    // all-clean mask gives 1 regardless of the selection
    const std::vector<std::uint8_t> all_clean(6, 1);
    CHECK(*pure_ratio({sel({1, 3, 5})}, all_clean) == 1.0);
}

TEST_CASE("pure_ratio of zero selections is absent, not zero") {
    CHECK_FALSE(pure_ratio({}, {1, 0, 1}).has_value());
    CHECK_FALSE(pure_ratio({sel({})}, {1, 0, 1}).has_value());
}

TEST_CASE("pure_ratio is invariant to selection ordering and validates indices") {
    const std::vector<std::uint8_t> clean = {1, 0, 1, 0, 1, 1};
    const auto a = pure_ratio({sel({0, 2, 5}), sel({1, 3})}, clean);
    const auto b = pure_ratio({sel({1, 3}), sel({0, 2, 5})}, clean);
    CHECK(*a == *b);
    CHECK_THROWS_AS(pure_ratio({sel({7})}, clean), std::invalid_argument);
}

TEST_CASE("decompose quadrant membership") {
    // batch of 4: clean = {1,1,0,0}; A selects {0,2}, B selects {0,3}
    //   0: selected by both, clean      -> agreed_clean
    //   1: selected by neither          -> not counted
    //   2: A only, noisy                -> disagreed_noisy
    //   3: B only, noisy                -> disagreed_noisy
    Matrix g(4, 2);
    g(0, 0) = 1, g(0, 1) = 2;
    g(1, 0) = 100, g(1, 1) = 100;
    g(2, 0) = 3, g(2, 1) = -1;
    g(3, 0) = 0.5, g(3, 1) = 0.5;
    const GradientDecomposition d = decompose({1, 1, 0, 0}, sel({0, 2}), sel({0, 3}), g);
    CHECK(d.counted == 3);
    CHECK(d.agreed_clean == std::vector<double>{1, 2});
    CHECK(d.disagreed_clean == std::vector<double>{0, 0});
    CHECK(d.agreed_noisy == std::vector<double>{0, 0});
    CHECK(d.disagreed_noisy == std::vector<double>{3.5, -0.5});
    CHECK(d.total == std::vector<double>{4.5, 1.5});
}

TEST_CASE("decompose identical selections have empty disagreed quadrants") {
    Rng rng(8);
    Matrix g = random_grads(6, 4, rng);
    const GradientDecomposition d =
        decompose({1, 0, 1, 0, 1, 0}, sel({0, 1, 4}), sel({0, 1, 4}), g);
    CHECK(d.norm_disagreed_clean == 0.0);
    CHECK(d.norm_disagreed_noisy == 0.0);
    CHECK(d.counted == 3);
}

TEST_CASE("decompose all-clean batch has empty noisy quadrants") {
    Rng rng(9);
    Matrix g = random_grads(5, 3, rng);
    const GradientDecomposition d =
        decompose({1, 1, 1, 1, 1}, sel({0, 2}), sel({1, 2}), g);
    CHECK(d.norm_agreed_noisy == 0.0);
    CHECK(d.norm_disagreed_noisy == 0.0);
    CHECK(noisy_grad_norm(d) == 0.0);
    CHECK(noisy_grad_norm_split(d) == 0.0);
}

TEST_CASE("decompose matches a brute-force per-sample regrouping oracle") {
    Rng rng(123);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 6;
        const std::size_t width = 5;
        Matrix g = random_grads(n, width, rng);
        std::vector<std::uint8_t> clean(n);
        SelectionSet a, b;
        for (std::size_t i = 0; i < n; ++i) {
            clean[i] = rng.below(2) ? 1 : 0;
            if (rng.below(2)) a.indices.push_back(static_cast<int>(i));
            if (rng.below(2)) b.indices.push_back(static_cast<int>(i));
        }
        const GradientDecomposition d = decompose(clean, a, b, g);

        // oracle: walk sample by sample
        std::vector<double> q[4];
        for (auto& v : q) v.assign(width, 0.0);
        std::size_t counted = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool in_a = a.contains(static_cast<int>(i));
            const bool in_b = b.contains(static_cast<int>(i));
            if (!in_a && !in_b) continue;
            ++counted;
            const int quadrant = (clean[i] ? 0 : 2) + (in_a == in_b ? 0 : 1);
            for (std::size_t c = 0; c < width; ++c) q[quadrant][c] += g(i, c);
        }
        CHECK(d.counted == counted);
        CHECK(d.agreed_clean == q[0]);
        CHECK(d.disagreed_clean == q[1]);
        CHECK(d.agreed_noisy == q[2]);
        CHECK(d.disagreed_noisy == q[3]);
    }
}

TEST_CASE("decompose conservation: quadrants sum to the counted total") {
    Rng rng(321);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + rng.below(12);
        Matrix g = random_grads(n, 6, rng);
        std::vector<std::uint8_t> clean(n);
        SelectionSet a, b;
        for (std::size_t i = 0; i < n; ++i) {
            clean[i] = rng.below(2) ? 1 : 0;
            if (rng.below(2)) a.indices.push_back(static_cast<int>(i));
            if (rng.below(2)) b.indices.push_back(static_cast<int>(i));
        }
        const GradientDecomposition d = decompose(clean, a, b, g);
        for (std::size_t c = 0; c < 6; ++c) {
            const double sum = d.agreed_clean[c] + d.disagreed_clean[c] + d.agreed_noisy[c] +
                               d.disagreed_noisy[c];
            CHECK(std::abs(sum - d.total[c]) <=
                  1e-9 * std::max(1.0, std::abs(d.total[c])));
        }
    }
}

TEST_CASE("noisy_grad_norm single noisy sample equals its row norm") {
    Matrix g(2, 3);
    g(0, 0) = 3, g(0, 1) = 4, g(0, 2) = 0;
    g(1, 0) = 7, g(1, 1) = 7, g(1, 2) = 7;
    const GradientDecomposition d = decompose({0, 1}, sel({0}), sel({0, 1}), g);
    CHECK(noisy_grad_norm(d) == Catch::Approx(5.0));
    // norm-of-sum vs sum-of-norms coincide with a single noisy sample
    CHECK(noisy_grad_norm_split(d) == Catch::Approx(5.0));
}

TEST_CASE("noisy_grad_norm no noisy samples gives zero") {
    Matrix g(2, 2, 1.0);
    const GradientDecomposition d = decompose({1, 1}, sel({0, 1}), sel({0, 1}), g);
    CHECK(noisy_grad_norm(d) == 0.0);
}

TEST_CASE("accumulate_series is a prefix sum") {
    const std::vector<double> per_epoch = {1.0, 0.5, 2.25, 0.0, 3.0};
    const std::vector<double> acc = accumulate_series(per_epoch);
    REQUIRE(acc.size() == per_epoch.size());
    // independent summation oracle
    for (std::size_t i = 0; i < acc.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += per_epoch[j];
        CHECK(acc[i] == Catch::Approx(s).margin(1e-15));
    }
    CHECK(accumulate_series({}).empty());
}
