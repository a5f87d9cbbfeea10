#include "flh/ctm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flh {

CtmLink::CtmLink(const LinkValueCondition& cond, std::shared_ptr<const ConcaveFD> fd, double dt)
    : fd_(std::move(fd)), dt_(dt) {
    if (dt_ <= 0) throw std::invalid_argument("dt must be positive");
    const double L = cond.length();
    const double dx = fd_->v_max() * dt_;
    std::size_t cells = static_cast<std::size_t>(std::floor(L / dx + 1e-12));
    if (cells == 0) cells = 1;
    width_.assign(cells, dx);
    width_.back() = L - dx * static_cast<double>(cells - 1);

    // Cell densities by exact averaging of the piecewise-constant profile.
    k_.assign(cells, 0.0);
    double x_lo = cond.x0();
    for (std::size_t i = 0; i < cells; ++i) {
        const double x_hi = x_lo + width_[i];
        const double veh = cond.initial_value(x_lo) - cond.initial_value(x_hi);
        k_[i] = veh / width_[i];
        x_lo = x_hi;
    }
    initial_vehicles_ = total_vehicles();
}

double CtmLink::demand() const { return fd_->demand_supply(k_.back()).first; }
double CtmLink::supply() const { return fd_->demand_supply(k_.front()).second; }

void CtmLink::advance(double inflow, double outflow) {
    const std::size_t n = k_.size();
    std::vector<double> flux(n + 1);
    flux.front() = inflow;
    flux.back() = outflow;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto [d, s_unused] = fd_->demand_supply(k_[i]);
        const auto [d_unused, s] = fd_->demand_supply(k_[i + 1]);
        flux[i + 1] = std::min(d, s);
    }
    for (std::size_t i = 0; i < n; ++i)
        k_[i] += dt_ * (flux[i] - flux[i + 1]) / width_[i];
    net_inflow_ += dt_ * (inflow - outflow);
    time_ += dt_;
}

double CtmLink::total_vehicles() const {
    double v = 0;
    for (std::size_t i = 0; i < k_.size(); ++i) v += k_[i] * width_[i];
    return v;
}

double CtmLink::conservation_error() const {
    return total_vehicles() - (initial_vehicles_ + net_inflow_);
}

}  // namespace flh
