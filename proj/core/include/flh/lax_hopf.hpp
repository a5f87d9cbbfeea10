#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "flh/fd.hpp"
#include "flh/value_condition.hpp"

namespace flh {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Branch { strip, fan_lo, fan_hi, undefined };

/// Value of one partial solution N_c at a point; +infinity outside the block's
/// domain of influence.
struct ComponentValue {
    double value = kInf;
    Branch branch = Branch::undefined;
    bool finite() const { return value < kInf; }
};

/// Closed-form solution of the Lax-Hopf problem restricted to a single affine
/// initial block: the minimum of c(x') + t R((x - x')/t) over the feasible x'
/// interval, attained at the clamped characteristic foot x* = x - t v_i.
ComponentValue initial_component(const ConcaveFD& fd, const InitialBlock& blk,
                                 double x, double t);

/// Solution for one upstream boundary block, evaluated at x >= x0.
ComponentValue upstream_component(const ConcaveFD& fd, const BoundaryBlock& blk,
                                  double x0, double x, double t);

/// Solution for one downstream boundary block, evaluated at x <= xn.
ComponentValue downstream_component(const ConcaveFD& fd, const BoundaryBlock& blk,
                                    double xn, double x, double t);

/// Inf-morphism: minimum over all components of the condition. Returns +inf
/// only when no component covers (x, t). `evals`, when given, accumulates the
/// number of finite component evaluations.
double solve_point_lh(const LinkValueCondition& cond, const ConcaveFD& fd,
                      double x, double t, std::size_t* evals = nullptr);

/// Indices of the initial blocks whose component attains the point minimum
/// within `tol` (all of them on ties).
std::vector<int> minimal_initial_blocks(const LinkValueCondition& cond,
                                        const ConcaveFD& fd, double x, double t,
                                        double tol = 1e-9);

/// Per-point minimizing initial indices over a (t, x) lattice, row-major in t.
std::vector<std::vector<int>> domains_of_influence(const LinkValueCondition& cond,
                                                   const ConcaveFD& fd,
                                                   std::span<const double> xs,
                                                   std::span<const double> ts);

}  // namespace flh
