#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>
#include <vidseg/warp.hpp>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace vidseg;

namespace {

double max_abs_diff(const FeatureMap& a, const FeatureMap& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

}  // namespace

TEST_SUITE("warp") {

TEST_CASE("zero field is a fixed point") {
    std::mt19937 rng(201);
    FeatureMap f = testsup::random_map(4, 6, 8, rng, -3.0, 3.0);
    WarpField zero(6, 8, std::vector<Vec2>(48));
    FeatureMap out = bilinear_warp(f, zero);
    CHECK(out.data() == f.data());
}

TEST_CASE("half-cell shift interpolates the midpoint and clamps at the edge") {
    // One row [0, 2]; every cell samples half a cell to the right.
    FeatureMap f(1, 1, 2, 16, {0.0, 2.0});
    WarpField w(1, 2, std::vector<Vec2>(2, Vec2{0.5, 0.0}));
    FeatureMap out = bilinear_warp(f, w);
    CHECK(out.at(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    // x=1 samples at 1.5, clamped to the last cell.
    CHECK(out.at(0, 0, 1) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("integer fields equal the direct gather oracle bitwise") {
    std::mt19937 rng(202);
    for (int trial = 0; trial < 8; ++trial) {
        FeatureMap f = testsup::random_map(4, 8, 8, rng);
        WarpField w = testsup::random_field(8, 8, rng, true, 3.0);
        FeatureMap got = bilinear_warp(f, w);
        FeatureMap want = oracle::gather_warp(f, w);
        CHECK(got.data() == want.data());
    }
}

TEST_CASE("fractional fields match the scalar interpolation oracle") {
    std::mt19937 rng(203);
    for (int trial = 0; trial < 8; ++trial) {
        FeatureMap f = testsup::random_map(4, 8, 8, rng, -2.0, 2.0);
        WarpField w = testsup::random_field(8, 8, rng, false, 2.5);
        CHECK(max_abs_diff(bilinear_warp(f, w), oracle::bilinear_warp(f, w)) < 1e-12);
    }
}

TEST_CASE("outputs stay within the input range") {
    std::mt19937 rng(204);
    FeatureMap f = testsup::random_map(3, 10, 10, rng, -5.0, 7.0);
    const auto [lo, hi] = std::minmax_element(f.data().begin(), f.data().end());
    WarpField w = testsup::random_field(10, 10, rng, false, 20.0);
    FeatureMap out = bilinear_warp(f, w);
    for (double v : out.data()) {
        CHECK(v >= *lo);
        CHECK(v <= *hi);
    }
}

TEST_CASE("warping is linear in the feature map") {
    std::mt19937 rng(205);
    FeatureMap f = testsup::random_map(3, 6, 6, rng, -1.0, 1.0);
    FeatureMap g = testsup::random_map(3, 6, 6, rng, -1.0, 1.0);
    WarpField w = testsup::random_field(6, 6, rng, false, 2.0);
    const double a = 0.7, b = -1.3;

    std::vector<double> combo(f.data().size());
    for (std::size_t i = 0; i < combo.size(); ++i) {
        combo[i] = a * f.data()[i] + b * g.data()[i];
    }
    FeatureMap warped_combo = bilinear_warp(FeatureMap(3, 6, 6, 16, std::move(combo)), w);
    FeatureMap wf = bilinear_warp(f, w);
    FeatureMap wg = bilinear_warp(g, w);
    for (std::size_t i = 0; i < wf.data().size(); ++i) {
        CHECK(std::abs(warped_combo.data()[i] - (a * wf.data()[i] + b * wg.data()[i])) < 1e-12);
    }
}

TEST_CASE("dimension mismatch is rejected") {
    FeatureMap f = FeatureMap::zeros(2, 4, 4);
    WarpField w(4, 5, std::vector<Vec2>(20));
    CHECK_THROWS_AS(bilinear_warp(f, w), std::invalid_argument);
}

TEST_CASE("chains have length steps+1 and compose step by step") {
    std::mt19937 rng(206);
    FeatureMap f = testsup::random_map(2, 5, 5, rng);
    std::vector<WarpField> fields{testsup::random_field(5, 5, rng, false, 1.5),
                                  testsup::random_field(5, 5, rng, false, 1.5)};

    auto chain = propagate_chain(f, 2, fields);
    REQUIRE(chain.size() == 3);
    CHECK(chain[0].data() == f.data());
    CHECK(chain[1].data() == bilinear_warp(f, fields[0]).data());
    CHECK(chain[2].data() == bilinear_warp(bilinear_warp(f, fields[0]), fields[1]).data());

    auto trivial = propagate_chain(f, 0, {});
    REQUIRE(trivial.size() == 1);
    CHECK(trivial[0].data() == f.data());

    CHECK_THROWS_AS(propagate_chain(f, 3, fields), std::invalid_argument);
    CHECK_THROWS_AS(propagate_chain(f, -1, fields), std::invalid_argument);
}

TEST_CASE("identity chain repeats the input") {
    std::mt19937 rng(207);
    FeatureMap f = testsup::random_map(2, 4, 6, rng);
    std::vector<WarpField> zeros(2, WarpField(4, 6, std::vector<Vec2>(24)));
    auto chain = propagate_chain(f, 2, zeros);
    REQUIRE(chain.size() == 3);
    for (const FeatureMap& step : chain) {
        CHECK(step.data() == f.data());
    }
}

}  // TEST_SUITE
