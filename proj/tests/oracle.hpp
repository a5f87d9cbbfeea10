#pragma once

// Brute-force reference implementations used only by tests.  Each component's
// convex objective is minimized by a dense 1-D scan over the feasible set, so
// these share no code (and no algebra) with the closed forms under test.

#include <algorithm>
#include <cmath>

#include "flh/fd.hpp"
#include "flh/lax_hopf.hpp"
#include "flh/value_condition.hpp"

namespace oracle {

inline constexpr int kSamples = 4000;

// min over feet x' in [x - t v_max, x - t w_min] ∩ [x_lo, x_hi] of
// c(x') + t R((x - x') / t).
inline double initial_component(const flh::ConcaveFD& fd, const flh::InitialBlock& blk,
                                double x, double t) {
    if (t <= 0) {
        return x >= blk.x_lo && x <= blk.x_hi ? blk.value_at(x) : flh::kInf;
    }
    const double lo = std::max(blk.x_lo, x - t * fd.v_max());
    const double hi = std::min(blk.x_hi, x - t * fd.w_min());
    if (lo > hi) return flh::kInf;
    double best = flh::kInf;
    for (int i = 0; i <= kSamples; ++i) {
        const double xp = lo + (hi - lo) * i / kSamples;
        best = std::min(best, blk.value_at(xp) + t * fd.conjugate((x - xp) / t));
    }
    return best;
}

// min over emission times s in [t_lo, t_hi] with (x - x0)/(t - s) <= v_max of
// c(s) + (t - s) R((x - x0)/(t - s)).
inline double upstream_component(const flh::ConcaveFD& fd, const flh::BoundaryBlock& blk,
                                 double x0, double x, double t) {
    const double dx = x - x0;
    const double s_hi = std::min(blk.t_hi, dx > 0 ? t - dx / fd.v_max() : t);
    if (s_hi < blk.t_lo) return flh::kInf;
    double best = flh::kInf;
    for (int i = 0; i <= kSamples; ++i) {
        const double s = blk.t_lo + (s_hi - blk.t_lo) * i / kSamples;
        const double T = t - s;
        if (T <= 0) {
            if (dx <= 0) best = std::min(best, blk.value_at(s));
            continue;
        }
        best = std::min(best, blk.value_at(s) + T * fd.conjugate(dx / T));
    }
    return best;
}

// Mirror image: emission from the downstream boundary travels at speeds in
// [w_min, 0), so it needs (x - xn)/(t - s) >= w_min.
inline double downstream_component(const flh::ConcaveFD& fd, const flh::BoundaryBlock& blk,
                                   double xn, double x, double t) {
    const double dx = x - xn;   // <= 0
    const double s_hi = std::min(blk.t_hi, dx < 0 ? t - dx / fd.w_min() : t);
    if (s_hi < blk.t_lo) return flh::kInf;
    double best = flh::kInf;
    for (int i = 0; i <= kSamples; ++i) {
        const double s = blk.t_lo + (s_hi - blk.t_lo) * i / kSamples;
        const double T = t - s;
        if (T <= 0) {
            if (dx >= 0) best = std::min(best, blk.value_at(s));
            continue;
        }
        best = std::min(best, blk.value_at(s) + T * fd.conjugate(dx / T));
    }
    return best;
}

inline double solve_point(const flh::LinkValueCondition& cond, const flh::ConcaveFD& fd,
                          double x, double t) {
    double best = flh::kInf;
    for (const auto& blk : cond.initial_blocks())
        best = std::min(best, oracle::initial_component(fd, blk, x, t));
    for (const auto& blk : cond.boundary_blocks(flh::Side::up))
        best = std::min(best, oracle::upstream_component(fd, blk, cond.x0(), x, t));
    for (const auto& blk : cond.boundary_blocks(flh::Side::down))
        best = std::min(best, oracle::downstream_component(fd, blk, cond.xn(), x, t));
    return best;
}

// Scan-resolution error bound: the objective is Lipschitz in the scan
// variable with constant k_jam * (1 + |w_min| + v_max) at worst.
inline double tolerance(const flh::ConcaveFD& fd, double span) {
    return fd.k_jam() * (1.0 + fd.v_max() - fd.w_min()) * span / kSamples + 1e-9;
}

}  // namespace oracle
