#include "flh/value_condition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flh {

namespace {
constexpr double kContinuityTol = 1e-9;   // veh
constexpr double kRangeSlack = 1e-12;
}

LinkValueCondition LinkValueCondition::from_density_profile(
    std::span<const double> x_breaks, std::span<const double> densities,
    double n_at_x0, const ConcaveFD& fd) {
    if (x_breaks.size() < 2 || densities.size() + 1 != x_breaks.size())
        throw std::invalid_argument("density profile needs n+1 breaks for n densities");
    if (!std::isfinite(n_at_x0)) throw std::invalid_argument("N at x0 must be finite");

    LinkValueCondition cond;
    cond.x0_ = x_breaks.front();
    cond.xn_ = x_breaks.back();

    double value = n_at_x0;   // c at the left edge of the current block
    for (std::size_t i = 0; i < densities.size(); ++i) {
        if (x_breaks[i + 1] <= x_breaks[i])
            throw std::invalid_argument("x_breaks must be strictly increasing");
        const double k = densities[i];
        const double slack = kRangeSlack * (1.0 + fd.k_jam());
        if (k < -slack || k > fd.k_jam() + slack)
            throw std::domain_error("density " + std::to_string(k) +
                                    " violates 0 <= k <= k_jam at block " + std::to_string(i));
        InitialBlock blk;
        blk.x_lo = x_breaks[i];
        blk.x_hi = x_breaks[i + 1];
        blk.k = k;
        blk.b = value + k * blk.x_lo;   // so that blk.value_at(x_lo) == value
        cond.initial_.push_back(blk);
        value = blk.value_at(blk.x_hi);
    }
    return cond;
}

void LinkValueCondition::append_boundary_flow(Side side, double flow, double dt,
                                              const ConcaveFD& fd) {
    if (dt <= 0) throw std::invalid_argument("block duration must be positive");
    const double qm = fd.q_max();
    const double slack = kRangeSlack * (1.0 + qm);
    if (flow < -slack || flow > qm + slack)
        throw std::domain_error("boundary flow " + std::to_string(flow) +
                                " exceeds capacity " + std::to_string(qm));
    flow = std::clamp(flow, 0.0, qm);

    auto& blocks = side == Side::up ? upstream_ : downstream_;
    double t_lo = 0.0, anchor;
    if (blocks.empty()) {
        anchor = initial_value(side == Side::up ? x0_ : xn_);
    } else {
        t_lo = blocks.back().t_hi;
        anchor = blocks.back().value_at(t_lo);
    }
    BoundaryBlock blk;
    blk.t_lo = t_lo;
    blk.t_hi = t_lo + dt;
    blk.flow = flow;
    blk.offset = anchor - flow * t_lo;
    blocks.push_back(blk);
}

std::vector<Violation> LinkValueCondition::validate(const ConcaveFD& fd) const {
    std::vector<Violation> out;
    const double kj = fd.k_jam();
    const double qm = fd.q_max();
    for (std::size_t i = 0; i < initial_.size(); ++i) {
        const auto& blk = initial_[i];
        if (blk.k < -kRangeSlack * (1 + kj) || blk.k > kj * (1 + kRangeSlack) + kRangeSlack)
            out.push_back({"initial density outside [0, k_jam]", int(i), blk.k - kj});
        if (i + 1 < initial_.size()) {
            const double r = blk.value_at(blk.x_hi) - initial_[i + 1].value_at(blk.x_hi);
            if (std::abs(r) > kContinuityTol)
                out.push_back({"initial continuity", int(i), r});
        }
    }
    for (Side side : {Side::up, Side::down}) {
        const auto& blocks = side == Side::up ? upstream_ : downstream_;
        const char* name = side == Side::up ? "upstream" : "downstream";
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            const auto& blk = blocks[j];
            if (blk.flow < -kRangeSlack * (1 + qm) || blk.flow > qm * (1 + kRangeSlack) + kRangeSlack)
                out.push_back({std::string(name) + " flow outside [0, q_max]", int(j),
                               blk.flow - qm});
            if (j + 1 < blocks.size()) {
                const double r = blk.value_at(blk.t_hi) - blocks[j + 1].value_at(blk.t_hi);
                if (std::abs(r) > kContinuityTol)
                    out.push_back({std::string(name) + " continuity", int(j), r});
            }
        }
        if (!blocks.empty()) {
            const double corner = initial_value(side == Side::up ? x0_ : xn_);
            const double r = blocks.front().value_at(blocks.front().t_lo) - corner;
            if (std::abs(r) > kContinuityTol)
                out.push_back({std::string(name) + " corner consistency", 0, r});
        }
    }
    return out;
}

double LinkValueCondition::initial_value(double x) const {
    if (initial_.empty()) throw std::logic_error("no initial blocks");
    const double slack = kContinuityTol * (1.0 + std::abs(xn_));
    if (x < x0_ - slack || x > xn_ + slack)
        throw std::domain_error("x outside link extent");
    for (const auto& blk : initial_)
        if (x <= blk.x_hi) return blk.value_at(std::max(x, blk.x_lo));
    return initial_.back().value_at(xn_);
}

double LinkValueCondition::boundary_value(Side side, double t) const {
    const auto& blocks = side == Side::up ? upstream_ : downstream_;
    if (t <= 0.0 || blocks.empty())
        return initial_value(side == Side::up ? x0_ : xn_);
    if (t > blocks.back().t_hi + kContinuityTol)
        throw std::domain_error("boundary trace not recorded up to requested time");
    for (const auto& blk : blocks)
        if (t <= blk.t_hi) return blk.value_at(std::max(t, blk.t_lo));
    return blocks.back().value_at(blocks.back().t_hi);
}

double LinkValueCondition::boundary_end_time(Side side) const {
    const auto& blocks = side == Side::up ? upstream_ : downstream_;
    return blocks.empty() ? 0.0 : blocks.back().t_hi;
}

double LinkValueCondition::mean_initial_density(double a, double b) const {
    if (b <= a) throw std::invalid_argument("empty interval");
    return (initial_value(a) - initial_value(b)) / (b - a);
}

}  // namespace flh
