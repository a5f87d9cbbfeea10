#include "flh/ltm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flh {

LtmLink::LtmLink(const LinkValueCondition& cond, std::shared_ptr<const ConcaveFD> fd, double dt)
    : dt_(dt), L_(cond.length()), cond_(cond) {
    fd_ = std::dynamic_pointer_cast<const TriangularFD>(fd);
    if (!fd_) throw std::invalid_argument("link transmission model requires a triangular diagram");
    if (dt_ <= 0) throw std::invalid_argument("dt must be positive");
    n_up0_ = cond_.initial_value(cond_.x0());
    n_dn0_ = cond_.initial_value(cond_.xn());
}

double LtmLink::interp(const std::vector<double>& samples, double base, double t) const {
    if (t <= 0) return base;
    const double pos = t / dt_;
    const std::size_t lo = std::min(static_cast<std::size_t>(std::floor(pos)),
                                    samples.size());
    const double v_lo = lo == 0 ? base : samples[lo - 1];
    if (lo >= samples.size()) return samples.empty() ? base : samples.back();
    return v_lo + (pos - static_cast<double>(lo)) * (samples[lo] - v_lo);
}

double LtmLink::upstream_count(double t) const {
    if (t < 0) return cond_.initial_value(cond_.x0() - fd_->v_free() * t);
    return interp(up_, n_up0_, t);
}

double LtmLink::downstream_count(double t) const {
    if (t < 0) {
        const double w = -fd_->w_cong();
        return cond_.initial_value(cond_.xn() + w * t) + fd_->k_jam() * w * t;
    }
    return interp(dn_, n_dn0_, t);
}

double LtmLink::demand() const {
    const double n_dn = downstream_count(time_);
    const double sent = upstream_count(time_ + dt_ - L_ / fd_->v_free()) - n_dn;
    return std::clamp(sent / dt_, 0.0, fd_->q_max());
}

double LtmLink::supply() const {
    const double n_up = upstream_count(time_);
    const double room =
        downstream_count(time_ + dt_ - L_ / -fd_->w_cong()) + fd_->k_jam() * L_ - n_up;
    return std::clamp(room / dt_, 0.0, fd_->q_max());
}

void LtmLink::advance(double inflow, double outflow) {
    up_.push_back((up_.empty() ? n_up0_ : up_.back()) + inflow * dt_);
    dn_.push_back((dn_.empty() ? n_dn0_ : dn_.back()) + outflow * dt_);
    time_ += dt_;
}

double ltm_interior_probe(const LtmLink& link, const TriangularFD& fd,
                          double x0, double xn, double x, double t) {
    const double free_bound = link.upstream_count(t - (x - x0) / fd.v_free());
    const double cong_bound =
        link.downstream_count(t - (xn - x) / -fd.w_cong()) + fd.k_jam() * (xn - x);
    return std::min(free_bound, cong_bound);
}

}  // namespace flh
