#pragma once

#include <span>
#include <string>
#include <vector>

#include "flh/fd.hpp"

namespace flh {

enum class Side { up, down };

/// One affine initial block: c(x) = -k * x + b on [x_lo, x_hi].
struct InitialBlock {
    double x_lo, x_hi;
    double k;   // density, veh/m
    double b;   // count offset, veh
    double value_at(double x) const { return -k * x + b; }
};

/// One affine boundary block: c(t) = flow * t + offset on [t_lo, t_hi].
struct BoundaryBlock {
    double t_lo, t_hi;
    double flow;     // veh/s
    double offset;   // veh
    double value_at(double t) const { return flow * t + offset; }
};

struct Violation {
    std::string what;
    int index;
    double residual;
};

/// Piecewise-linear value condition on one link: initial blocks covering
/// [x0, xn] plus upstream/downstream boundary block sequences. Offsets are
/// always derived from continuity, never user-supplied.
class LinkValueCondition {
public:
    LinkValueCondition() = default;

    /// Initial blocks only, offsets chained from continuity with
    /// c(x_breaks[0]) = n_at_x0.
    static LinkValueCondition from_density_profile(std::span<const double> x_breaks,
                                                   std::span<const double> densities,
                                                   double n_at_x0, const ConcaveFD& fd);

    /// Appends a boundary block of slope `flow` and duration `dt` abutting the
    /// last block on that side (anchored at the initial-condition corner for
    /// the first block).
    void append_boundary_flow(Side side, double flow, double dt, const ConcaveFD& fd);

    /// Growth/continuity/capacity checks; violations are returned, not thrown.
    std::vector<Violation> validate(const ConcaveFD& fd) const;

    double x0() const { return x0_; }
    double xn() const { return xn_; }
    double length() const { return xn_ - x0_; }
    std::size_t n_initial() const { return initial_.size(); }

    const std::vector<InitialBlock>& initial_blocks() const { return initial_; }
    const std::vector<BoundaryBlock>& boundary_blocks(Side side) const {
        return side == Side::up ? upstream_ : downstream_;
    }

    /// c_ini evaluated at x in [x0, xn].
    double initial_value(double x) const;
    /// Boundary trace at time t; t past the last block is an error.
    double boundary_value(Side side, double t) const;
    /// End time of the appended blocks on one side (0 when none).
    double boundary_end_time(Side side) const;

    /// Mean density of the initial profile over [a, b].
    double mean_initial_density(double a, double b) const;

private:
    double x0_ = 0, xn_ = 0;
    std::vector<InitialBlock> initial_;
    std::vector<BoundaryBlock> upstream_, downstream_;
};

}  // namespace flh
