#include <doctest.h>

#include <memory>
#include <random>
#include <vector>

#include "flh/fd.hpp"
#include "flh/lax_hopf.hpp"
#include "flh/value_condition.hpp"
#include "oracle.hpp"

using namespace flh;

namespace {

LinkValueCondition random_condition(const ConcaveFD& fd, std::mt19937_64& rng, double L,
                                    int n_blocks, int n_bdry, double dt) {
    std::uniform_real_distribution<double> kd(0.0, fd.k_jam());
    std::uniform_real_distribution<double> qd(0.0, fd.q_max());
    std::vector<double> xb, ks;
    for (int i = 0; i <= n_blocks; ++i) xb.push_back(L * i / n_blocks);
    for (int i = 0; i < n_blocks; ++i) ks.push_back(kd(rng));
    auto cond = LinkValueCondition::from_density_profile(xb, ks, 0.0, fd);
    for (int i = 0; i < n_bdry; ++i) {
        cond.append_boundary_flow(Side::up, qd(rng), dt, fd);
        cond.append_boundary_flow(Side::down, qd(rng), dt, fd);
    }
    return cond;
}

}  // namespace

TEST_CASE("uniform-density strip: value grows at the flux rate") {
    // Inside the strip of an affine initial block, N(x,t) = c(x) + t Q(k).
    const TriangularFD tri(30.0, -5.0, 0.12);
    const GreenshieldsFD gs(1.0, 4.0);

    {
        InitialBlock blk{0.0, 1000.0, 0.05, 0.0};   // congested branch
        const auto c = initial_component(tri, blk, 500.0, 10.0);
        CHECK(c.branch == Branch::strip);
        CHECK(c.value == doctest::Approx(blk.value_at(500.0) + 10.0 * tri.flux(0.05)));
    }
    {
        InitialBlock blk{0.0, 400.0, 1.0, 0.0};
        const auto c = initial_component(gs, blk, 200.0, 50.0);
        CHECK(c.branch == Branch::strip);
        CHECK(c.value == doctest::Approx(blk.value_at(200.0) + 50.0 * gs.flux(1.0)));
    }
}

TEST_CASE("upstream strip on a triangular diagram is a free-speed translation") {
    const TriangularFD tri(30.0, -5.0, 0.12);
    BoundaryBlock blk{0.0, 20.0, 0.3, 0.0};   // N(x0, s) = 0.3 s
    // Free characteristics need (x - x0)/v = 10 s of travel.
    const auto c = upstream_component(tri, blk, 0.0, 300.0, 20.0);
    CHECK(c.finite());
    CHECK(c.value == doctest::Approx(0.3 * (20.0 - 300.0 / 30.0)).epsilon(1e-12));
    CHECK(c.value == doctest::Approx(3.0));

    // Not yet reachable: needs t >= 10.
    CHECK_FALSE(upstream_component(tri, blk, 0.0, 300.0, 9.0).finite());
}

TEST_CASE("downstream strip is a congested-speed translation plus stored vehicles") {
    const TriangularFD tri(30.0, -5.0, 0.12);
    BoundaryBlock blk{0.0, 40.0, 0.2, -10.0};
    const double xn = 1000.0, x = 900.0;
    // Congested wave covers 100 m in 20 s; adds k_jam * 100 vehicles.
    const auto c = downstream_component(tri, blk, xn, x, 30.0);
    CHECK(c.finite());
    CHECK(c.value == doctest::Approx(blk.value_at(30.0 - 20.0) + 0.12 * 100.0).epsilon(1e-12));
}

TEST_CASE("components match the brute-force scan") {
    auto tri = std::make_shared<TriangularFD>(30.0, -5.0, 0.12);
    auto gs = std::make_shared<GreenshieldsFD>(1.0, 4.0);
    auto pwl = std::make_shared<PiecewiseLinearFD>(
        std::vector<std::pair<double, double>>{{0.0, 0.0}, {0.02, 0.5}, {0.05, 0.6}, {0.15, 0.0}});
    std::mt19937_64 rng(7);

    for (const std::shared_ptr<const ConcaveFD>& fd :
         {std::static_pointer_cast<const ConcaveFD>(tri),
          std::static_pointer_cast<const ConcaveFD>(gs),
          std::static_pointer_cast<const ConcaveFD>(pwl)}) {
        const double L = fd->v_max() > 5 ? 1000.0 : 400.0;
        const double dt = L / fd->v_max() / 20.0;
        auto cond = random_condition(*fd, rng, L, 8, 6, dt);
        std::uniform_real_distribution<double> xd(0.0, L), td(0.0, 12 * dt);
        for (int i = 0; i < 200; ++i) {
            const double x = xd(rng), t = td(rng);
            for (const auto& blk : cond.initial_blocks()) {
                const auto c = initial_component(*fd, blk, x, t);
                const double ref = oracle::initial_component(*fd, blk, x, t);
                if (c.finite() || ref < kInf) {
                    CHECK(c.value <= ref + 1e-9);
                    CHECK(c.value >= ref - oracle::tolerance(*fd, blk.x_hi - blk.x_lo));
                }
            }
            for (const auto& blk : cond.boundary_blocks(Side::up)) {
                const auto c = upstream_component(*fd, blk, cond.x0(), x, t);
                const double ref = oracle::upstream_component(*fd, blk, cond.x0(), x, t);
                if (c.finite() || ref < kInf) {
                    CHECK(c.value <= ref + 1e-9);
                    CHECK(c.value >=
                          ref - oracle::tolerance(*fd, (blk.t_hi - blk.t_lo) * fd->v_max()));
                }
            }
            for (const auto& blk : cond.boundary_blocks(Side::down)) {
                const auto c = downstream_component(*fd, blk, cond.xn(), x, t);
                const double ref = oracle::downstream_component(*fd, blk, cond.xn(), x, t);
                if (c.finite() || ref < kInf) {
                    CHECK(c.value <= ref + 1e-9);
                    CHECK(c.value >=
                          ref - oracle::tolerance(*fd, (blk.t_hi - blk.t_lo) * fd->v_max()));
                }
            }
        }
    }
}

TEST_CASE("point solve equals the brute-force inf over all components") {
    auto gs = std::make_shared<GreenshieldsFD>(1.0, 4.0);
    std::mt19937_64 rng(11);
    auto cond = random_condition(*gs, rng, 400.0, 10, 10, 10.0);
    std::uniform_real_distribution<double> xd(0.0, 400.0), td(0.0, 120.0);
    for (int i = 0; i < 200; ++i) {
        const double x = xd(rng), t = td(rng);
        const double got = solve_point_lh(cond, *gs, x, t);
        const double ref = oracle::solve_point(cond, *gs, x, t);
        CHECK(got <= ref + 1e-9);
        CHECK(got >= ref - oracle::tolerance(*gs, 400.0));
    }
}

TEST_CASE("solution is continuous and nonincreasing in x, nondecreasing in t") {
    auto tri = std::make_shared<TriangularFD>(30.0, -5.0, 0.12);
    std::mt19937_64 rng(3);
    auto cond = random_condition(*tri, rng, 1000.0, 5, 20, 5.0);
    for (int i = 0; i + 1 <= 40; ++i) {
        const double x = 1000.0 * i / 40.0;
        CHECK(solve_point_lh(cond, *tri, x, 50.0) >=
              solve_point_lh(cond, *tri, x + 25.0, 50.0) - 1e-9);
        CHECK(solve_point_lh(cond, *tri, x, 52.0) >=
              solve_point_lh(cond, *tri, x, 50.0) - 1e-9);
    }
}

TEST_CASE("minimizing initial blocks are a contiguous low-index window at late times") {
    // Greenshields corridor with the ten-block profile; the last block's
    // influence at the downstream edge dies out.
    const GreenshieldsFD gs(1.0, 4.0);
    std::vector<double> xb;
    for (int i = 0; i <= 10; ++i) xb.push_back(40.0 * i);
    std::vector<double> ks = {1.9, 3.0, 0.1, 3.7, 2.6, 4.0, 3.3, 0.4, 1.0, 0.3};
    auto cond = LinkValueCondition::from_density_profile(xb, ks, 0.0, gs);

    // Smallest prefix of blocks whose minimum already equals the global one;
    // blocks beyond it are redundant at the downstream edge.
    auto needed_prefix = [&](double t) {
        std::vector<double> vals;
        for (const auto& blk : cond.initial_blocks())
            vals.push_back(initial_component(gs, blk, 400.0, t).value);
        const double best = *std::min_element(vals.begin(), vals.end());
        double run = kInf;
        for (int j = 0; j < 10; ++j) {
            run = std::min(run, vals[j]);
            if (run <= best + 1e-9) return j + 1;
        }
        return 10;
    };
    // The needed prefix never grows with time.
    int prev = 10;
    for (double t = 1.0; t <= 400.0; t += 1.0) {
        const int m = needed_prefix(t);
        CHECK(m <= prev);
        prev = m;
    }
    CHECK(needed_prefix(45.0) == 10);   // the last block still matters...
    CHECK(needed_prefix(55.0) <= 9);    // ...but is redundant shortly after t = 50
    CHECK(needed_prefix(145.0) >= 8);
    CHECK(needed_prefix(155.0) <= 7);   // the last three redundant past t = 150
}
