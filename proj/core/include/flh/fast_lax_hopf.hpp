#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "flh/lax_hopf.hpp"

namespace flh {

/// Per-side pruning state. Surviving candidate sets only ever shrink: the
/// dominance rules are permanent, so a pruned block never has to be
/// reconsidered.
struct BoundaryCursor {
    /// Downstream: largest surviving initial index. Upstream: smallest.
    int ini_edge = 0;
    /// All initial components permanently dominated by an opposite-boundary
    /// component.
    bool ini_retired = false;
    /// Earliest surviving opposite-boundary block index.
    int lo_active_bdry = 0;
    double last_value = 0.0;
    double last_time = 0.0;
    std::uint64_t op_count = 0;
    /// Initial indices minimizing the last computed boundary value (ties kept).
    std::vector<int> min_initial;
};

enum class FlhMode { general, cfl_triangular };

/// Single-link fast Lax-Hopf state: the link's value condition plus the two
/// boundary cursors. cfl_triangular mode requires a triangular diagram,
/// uniform initial block width dx and dt <= dx / v_free.
class FlhLinkState {
public:
    FlhLinkState(LinkValueCondition cond, std::shared_ptr<const ConcaveFD> fd,
                 double dt, std::optional<FlhMode> force_mode = std::nullopt);

    FlhMode mode() const { return mode_; }
    double dt() const { return dt_; }
    double time() const { return time_; }
    const LinkValueCondition& condition() const { return cond_; }
    const ConcaveFD& fd() const { return *fd_; }
    const BoundaryCursor& cursor(Side side) const { return side == Side::up ? up_ : down_; }
    std::uint64_t op_count() const { return up_.op_count + down_.op_count; }

    /// Boundary value at time() + dt over the surviving candidate set only
    /// (general mode; dominance pruning applied as a side effect).
    double boundary_value_step(Side side);

    /// Constant-work step: at most 3 candidate evaluations
    /// while the boundary is inside the initial-condition influence window,
    /// 2 afterwards. Requires cfl_triangular mode.
    double cfl_boundary_step(Side side);

    /// Link demand over [t, t+dt]: slope of the downstream value computed with
    /// no prospective downstream block.
    double demand();
    /// Link supply over [t, t+dt], symmetric at the upstream boundary.
    double supply();

    /// Appends the resolved boundary flows as new blocks and advances time.
    void commit_step(double inflow, double outflow);

private:
    double free_value(Side side);
    double step_value(Side side);   // mode dispatch + memoization

    LinkValueCondition cond_;
    std::shared_ptr<const ConcaveFD> fd_;
    double dt_;
    FlhMode mode_;
    double dx_ = 0.0;               // uniform block width in cfl mode
    // Cached triangular parameters for the inlined cfl fast path.
    double cv_ = 0, cw_ = 0, ckc_ = 0, cqm_ = 0;
    double warm_dn_ = 0, warm_up_ = 0;   // L / v, L / |w|
    double time_ = 0.0;
    BoundaryCursor up_, down_;
    std::optional<double> pending_up_, pending_down_;
};

/// Interior-point pruning state for repeated queries at a fixed x
/// (triangular diagrams). Survivors only shrink as t increases.
struct FlhPointState {
    double x;
    double last_t = -1.0;
    std::vector<char> alive;   // per initial block
    std::uint64_t op_count = 0;
};

/// Interior solve with interior-point pruning; equals solve_point_lh. For
/// non-triangular diagrams this falls back to the full minimization.
double solve_point_flh(const LinkValueCondition& cond, const ConcaveFD& fd,
                       double x, double t, FlhPointState& state);

}  // namespace flh
