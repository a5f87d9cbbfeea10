#pragma once

#include <memory>
#include <vector>

#include "flh/fd.hpp"
#include "flh/value_condition.hpp"

namespace flh {

// Newell-style link transmission model for triangular diagrams.  Keeps the
// two boundary cumulative-count curves and evaluates demand/supply by shifted
// lookups at t - L/v and t - L/|w|.  Samples before t = 0 are synthesized by
// translating the initial profile along characteristics, so the warm-up phase
// needs no special casing.
class LtmLink {
public:
    LtmLink(const LinkValueCondition& cond, std::shared_ptr<const ConcaveFD> fd, double dt);

    double demand() const;
    double supply() const;
    void advance(double inflow, double outflow);

    double time() const { return time_; }
    double upstream_count(double t) const;     // N(x0, t), t may be negative
    double downstream_count(double t) const;   // N(xn, t)

private:
    std::shared_ptr<const TriangularFD> fd_;
    double dt_;
    double time_ = 0;
    double L_;
    double n_up0_, n_dn0_;           // counts at t = 0
    std::vector<double> up_, dn_;    // samples at t = dt, 2dt, ...
    LinkValueCondition cond_;        // initial profile, for pre-t=0 lookups

    double interp(const std::vector<double>& samples, double base, double t) const;
};

// Interior cumulative count reconstructed from the two boundary curves only
// (no rarefaction correction):  min over the free translation from upstream
// and the congested translation from downstream.  Exact for shock-only
// solutions; an upper bound otherwise.
double ltm_interior_probe(const LtmLink& link, const TriangularFD& fd,
                          double x0, double xn, double x, double t);

}  // namespace flh
