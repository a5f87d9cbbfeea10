#include <doctest.h>

#include <array>
#include <vector>

#include "flh/fd.hpp"
#include "flh/value_condition.hpp"

using namespace flh;

namespace {
const GreenshieldsFD gs(1.0, 4.0);

// Ten width-40 blocks on [0, 400].
LinkValueCondition ten_blocks() {
    std::vector<double> xb;
    for (int i = 0; i <= 10; ++i) xb.push_back(40.0 * i);
    const std::array<double, 10> k = {1.9, 3.0, 0.1, 3.7, 2.6, 4.0, 3.3, 0.4, 1.0, 0.3};
    return LinkValueCondition::from_density_profile(xb, {k.data(), k.size()}, 0.0, gs);
}
}  // namespace

TEST_CASE("offsets chain so the profile is continuous") {
    const auto cond = ten_blocks();
    REQUIRE(cond.initial_blocks().size() == 10);
    // Second block: continuity at x = 40 gives c(40) = -1.9*40 = -76,
    // so b_1 = -76 + 3.0*40 = 44.
    CHECK(cond.initial_blocks()[1].b == doctest::Approx(44.0).epsilon(1e-12));
    CHECK(cond.initial_value(40.0) == doctest::Approx(-76.0).epsilon(1e-12));
    for (int j = 1; j < 10; ++j) {
        const auto& a = cond.initial_blocks()[j - 1];
        const auto& b = cond.initial_blocks()[j];
        CHECK(a.value_at(a.x_hi) == doctest::Approx(b.value_at(b.x_lo)).epsilon(1e-12));
    }
    CHECK(cond.mean_initial_density(0.0, 400.0) ==
          doctest::Approx((1.9 + 3.0 + 0.1 + 3.7 + 2.6 + 4.0 + 3.3 + 0.4 + 1.0 + 0.3) / 10.0));
}

TEST_CASE("boundary blocks anchor at the corners and chain") {
    auto cond = ten_blocks();
    cond.append_boundary_flow(Side::up, 0.5, 10.0, gs);
    cond.append_boundary_flow(Side::up, 0.25, 10.0, gs);
    const auto& up = cond.boundary_blocks(Side::up);
    REQUIRE(up.size() == 2);
    CHECK(up[0].value_at(0.0) == doctest::Approx(cond.initial_value(0.0)));
    CHECK(up[0].value_at(10.0) == doctest::Approx(5.0));
    CHECK(up[1].value_at(10.0) == doctest::Approx(5.0));
    CHECK(up[1].value_at(20.0) == doctest::Approx(7.5));
    CHECK(cond.boundary_value(Side::up, 15.0) == doctest::Approx(6.25));
    CHECK(cond.boundary_end_time(Side::up) == doctest::Approx(20.0));

    cond.append_boundary_flow(Side::down, 1.0, 10.0, gs);
    const auto& dn = cond.boundary_blocks(Side::down);
    CHECK(dn[0].value_at(0.0) == doctest::Approx(cond.initial_value(400.0)));
}

TEST_CASE("out-of-range densities and flows are rejected") {
    std::vector<double> xb = {0.0, 100.0};
    std::vector<double> bad = {4.5};   // beyond jam density
    CHECK_THROWS_AS(LinkValueCondition::from_density_profile(xb, bad, 0.0, gs),
                    std::domain_error);
    std::vector<double> neg = {-0.1};
    CHECK_THROWS_AS(LinkValueCondition::from_density_profile(xb, neg, 0.0, gs),
                    std::domain_error);

    std::vector<double> ok = {1.0};
    auto cond = LinkValueCondition::from_density_profile(xb, ok, 0.0, gs);
    CHECK_THROWS_AS(cond.append_boundary_flow(Side::up, 1.5, 1.0, gs), std::domain_error);
    CHECK_THROWS_AS(cond.append_boundary_flow(Side::up, -0.1, 1.0, gs), std::domain_error);
    CHECK_NOTHROW(cond.append_boundary_flow(Side::up, gs.q_max(), 1.0, gs));
}

TEST_CASE("validate reports violations without throwing") {
    auto cond = ten_blocks();
    cond.append_boundary_flow(Side::up, 0.5, 10.0, gs);
    CHECK(cond.validate(gs).empty());
}

TEST_CASE("initial and boundary value lookups interpolate") {
    const auto cond = ten_blocks();
    CHECK(cond.initial_value(0.0) == doctest::Approx(0.0));
    CHECK(cond.initial_value(20.0) == doctest::Approx(-38.0));
    // Total vehicles on the link: sum k_j * 40.
    const double total = (1.9 + 3.0 + 0.1 + 3.7 + 2.6 + 4.0 + 3.3 + 0.4 + 1.0 + 0.3) * 40.0;
    CHECK(cond.initial_value(400.0) == doctest::Approx(-total));
}
