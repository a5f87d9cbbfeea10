#pragma once

#include <memory>
#include <vector>

#include "flh/fd.hpp"
#include "flh/value_condition.hpp"

namespace flh {

// Godunov finite-volume discretization of a single link.  Cells have width
// v_max * dt except the last one, which absorbs the remainder of the link
// length so the grid always tiles [x0, xn] exactly.
class CtmLink {
public:
    CtmLink(const LinkValueCondition& cond, std::shared_ptr<const ConcaveFD> fd, double dt);

    double demand() const;   // sending capacity of the last cell
    double supply() const;   // receiving capacity of the first cell
    void advance(double inflow, double outflow);

    double time() const { return time_; }
    const std::vector<double>& densities() const { return k_; }
    const std::vector<double>& widths() const { return width_; }
    double total_vehicles() const;

    // Conservation audit: vehicles now minus (initial vehicles + net inflow).
    double conservation_error() const;

private:
    std::shared_ptr<const ConcaveFD> fd_;
    double dt_;
    double time_ = 0;
    std::vector<double> k_;
    std::vector<double> width_;
    double initial_vehicles_ = 0;
    double net_inflow_ = 0;
};

}  // namespace flh
