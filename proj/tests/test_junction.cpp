#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "flh/junction.hpp"

using namespace flh;

namespace {

NodeSpec merge21() {
    NodeSpec s;
    s.n_in = 2;
    s.n_out = 1;
    s.priority = {1.0, 1.0};
    s.beta = {{1.0}, {1.0}};
    return s;
}

NodeSpec diverge12(double b0, double b1) {
    NodeSpec s;
    s.n_in = 1;
    s.n_out = 2;
    s.priority = {1.0};
    s.beta = {{b0, b1}};
    return s;
}

}  // namespace

TEST_CASE("equal-priority merge splits a binding supply evenly") {
    const auto f = resolve_node(merge21(), {0.5, 0.5}, {0.556});
    CHECK(f.in[0] == doctest::Approx(0.278));
    CHECK(f.in[1] == doctest::Approx(0.278));
    CHECK(f.in_binding[0] == Binding::supply);
    CHECK(f.in_binding[1] == Binding::supply);
}

TEST_CASE("merge drains a low-demand input and gives the rest to the other") {
    const auto f = resolve_node(merge21(), {0.1, 0.5}, {0.556});
    CHECK(f.in[0] == doctest::Approx(0.1));
    CHECK(f.in[1] == doctest::Approx(0.456));
    CHECK(f.in_binding[0] == Binding::demand);
    CHECK(f.in_binding[1] == Binding::supply);
}

TEST_CASE("fifo diverge is throttled by its most restrictive output") {
    // beta = (0.7, 0.3); output 1 allows only 0.05, capping the input at
    // 0.05/0.3 = 1/6; flows 7/60 and 1/20.
    const auto f = resolve_node(diverge12(0.7, 0.3), {0.5}, {1.0, 0.05});
    CHECK(f.in[0] == doctest::Approx(1.0 / 6.0));
    CHECK(f.move[0][0] == doctest::Approx(7.0 / 60.0));
    CHECK(f.move[0][1] == doctest::Approx(1.0 / 20.0));
    CHECK(f.in_binding[0] == Binding::supply);
}

TEST_CASE("priorities shape the split only while both inputs compete") {
    NodeSpec s = merge21();
    s.priority = {3.0, 1.0};
    const auto f = resolve_node(s, {0.5, 0.5}, {0.4});
    CHECK(f.in[0] == doctest::Approx(0.3));
    CHECK(f.in[1] == doctest::Approx(0.1));
}

TEST_CASE("signal timing is periodic with a half-open green window") {
    SignalTiming sig{60.0, 10.0, 40.0};
    CHECK_FALSE(sig.green_at(0.0));
    CHECK(sig.green_at(10.0));
    CHECK(sig.green_at(39.999));
    CHECK_FALSE(sig.green_at(40.0));
    CHECK(sig.green_at(70.0));
    CHECK(sig.green_at(-50.0));    // wraps: -50 mod 60 = 10
    SignalTiming always{0.0, 0.0, 0.0};
    CHECK(always.green_at(123.0));
}

TEST_CASE("invalid specifications are rejected") {
    NodeSpec s = merge21();
    s.priority = {1.0, -1.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = merge21();
    s.beta = {{0.5}, {1.0}};   // row does not sum to one
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = merge21();
    s.beta = {{1.0}};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("random nodes: capacity, conservation, fifo proportions") {
    std::mt19937_64 rng(123);
    std::uniform_int_distribution<int> nd(1, 4);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        NodeSpec s;
        s.n_in = nd(rng);
        s.n_out = nd(rng);
        s.priority.resize(s.n_in);
        for (auto& p : s.priority) p = 0.1 + u01(rng);
        s.beta.assign(s.n_in, std::vector<double>(s.n_out));
        for (auto& row : s.beta) {
            double sum = 0;
            for (auto& b : row) { b = u01(rng) + 1e-3; sum += b; }
            for (auto& b : row) b /= sum;
        }
        std::vector<double> d(s.n_in), sup(s.n_out);
        for (auto& x : d) x = u01(rng);
        for (auto& x : sup) x = u01(rng);

        const auto f = resolve_node(s, d, sup);
        for (std::size_t i = 0; i < s.n_in; ++i) {
            CHECK(f.in[i] >= -1e-12);
            CHECK(f.in[i] <= d[i] + 1e-9);
            for (std::size_t o = 0; o < s.n_out; ++o)
                CHECK(f.move[i][o] == doctest::Approx(s.beta[i][o] * f.in[i]));
        }
        for (std::size_t o = 0; o < s.n_out; ++o) {
            double used = 0;
            for (std::size_t i = 0; i < s.n_in; ++i) used += f.move[i][o];
            CHECK(used <= sup[o] + 1e-9);
        }
    }
}

TEST_CASE("throughput is maximal among fifo allocations (brute force, small nodes)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        NodeSpec s;
        s.n_in = 2;
        s.n_out = 2;
        s.priority = {0.5 + u01(rng), 0.5 + u01(rng)};
        s.beta.assign(2, std::vector<double>(2));
        for (auto& row : s.beta) {
            row[0] = u01(rng);
            row[1] = 1.0 - row[0];
        }
        std::vector<double> d = {u01(rng), u01(rng)}, sup = {u01(rng), u01(rng)};
        const auto f = resolve_node(s, d, sup);

        // Brute force over a lattice of feasible per-input throughputs: no
        // feasible point may dominate the resolved one in both coordinates.
        const int N = 200;
        for (int i = 0; i <= N; ++i) {
            for (int j = 0; j <= N; ++j) {
                const double g0 = d[0] * i / N, g1 = d[1] * j / N;
                bool feasible = true;
                for (int o = 0; o < 2; ++o)
                    feasible = feasible &&
                               s.beta[0][o] * g0 + s.beta[1][o] * g1 <= sup[o] + 1e-12;
                if (!feasible) continue;
                const bool dominates = g0 > f.in[0] + 1e-6 && g1 > f.in[1] + 1e-6;
                CHECK_FALSE(dominates);
            }
        }
    }
}

TEST_CASE("demand-bound allocations are invariant to extra supply") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        NodeSpec s = merge21();
        s.priority = {0.5 + u01(rng), 0.5 + u01(rng)};
        std::vector<double> d = {u01(rng), u01(rng)};
        std::vector<double> sup = {d[0] + d[1] + 0.1};   // demand-bound
        const auto f1 = resolve_node(s, d, sup);
        sup[0] *= 1.5;
        const auto f2 = resolve_node(s, d, sup);
        CHECK(f1.in[0] == doctest::Approx(f2.in[0]).epsilon(1e-12));
        CHECK(f1.in[1] == doctest::Approx(f2.in[1]).epsilon(1e-12));
        CHECK(f1.in[0] == doctest::Approx(d[0]));
        CHECK(f1.in[1] == doctest::Approx(d[1]));
    }
}
