#include "flh/lax_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flh {

namespace {

constexpr double kEps = 1e-12;

double scale_eps(double a, double b) { return kEps * (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace

ComponentValue initial_component(const ConcaveFD& fd, const InitialBlock& blk,
                                 double x, double t) {
    if (t < 0) throw std::domain_error("negative time");
    const double eps = scale_eps(x, t);
    if (t <= eps) {
        if (x < blk.x_lo - eps || x > blk.x_hi + eps) return {};
        return {blk.value_at(std::clamp(x, blk.x_lo, blk.x_hi)), Branch::strip};
    }
    // Feasible characteristic feet on the t = 0 line.
    const double lo = std::max(blk.x_lo, x - t * fd.v_max());
    const double hi = std::min(blk.x_hi, x - t * fd.w_min());
    if (lo > hi + eps) return {};

    const double foot = x - t * fd.characteristic_speed(blk.k);
    Branch branch = Branch::strip;
    double xs = foot;
    if (foot < lo) { xs = lo; branch = (lo == blk.x_lo) ? Branch::fan_lo : Branch::strip; }
    if (foot > hi) { xs = hi; branch = (hi == blk.x_hi) ? Branch::fan_hi : Branch::strip; }
    const double u = std::clamp((x - xs) / t, fd.w_min(), fd.v_max());
    return {blk.value_at(xs) + t * fd.conjugate(u), branch};
}

ComponentValue upstream_component(const ConcaveFD& fd, const BoundaryBlock& blk,
                                  double x0, double x, double t) {
    const double eps = scale_eps(x, t);
    if (x < x0 - eps) throw std::domain_error("x upstream of the link entry");
    x = std::max(x, x0);
    const double s_lo = blk.t_lo;
    const double s_hi = std::min(blk.t_hi, t - (x - x0) / fd.v_max());
    if (s_lo > s_hi + eps) return {};

    const double rho = fd.free_density(blk.flow);
    const double vj = fd.characteristic_speed(rho);
    Branch branch = Branch::strip;
    double s;
    if (vj <= kEps) {
        s = s_lo;
        branch = Branch::fan_lo;
    } else {
        s = t - (x - x0) / vj;
        if (s < s_lo) { s = s_lo; branch = Branch::fan_lo; }
        if (s > s_hi) { s = s_hi; branch = (s_hi == blk.t_hi) ? Branch::fan_hi : Branch::strip; }
    }
    const double T = t - s;
    if (T <= eps) {
        if (x > x0 + eps) return {};
        return {blk.value_at(s), Branch::strip};
    }
    const double u = std::clamp((x - x0) / T, fd.w_min(), fd.v_max());
    return {blk.value_at(s) + T * fd.conjugate(u), branch};
}

ComponentValue downstream_component(const ConcaveFD& fd, const BoundaryBlock& blk,
                                    double xn, double x, double t) {
    const double eps = scale_eps(x, t);
    if (x > xn + eps) throw std::domain_error("x downstream of the link exit");
    x = std::min(x, xn);
    const double s_lo = blk.t_lo;
    const double s_hi = std::min(blk.t_hi, t - (x - xn) / fd.w_min());
    if (s_lo > s_hi + eps) return {};

    const double rho = fd.congested_density(blk.flow);
    const double vj = fd.characteristic_speed(rho);
    Branch branch = Branch::strip;
    double s;
    if (vj >= -kEps) {
        s = s_lo;
        branch = Branch::fan_lo;
    } else {
        s = t - (x - xn) / vj;
        if (s < s_lo) { s = s_lo; branch = Branch::fan_lo; }
        if (s > s_hi) { s = s_hi; branch = (s_hi == blk.t_hi) ? Branch::fan_hi : Branch::strip; }
    }
    const double T = t - s;
    if (T <= eps) {
        if (x < xn - eps) return {};
        return {blk.value_at(s), Branch::strip};
    }
    const double u = std::clamp((x - xn) / T, fd.w_min(), fd.v_max());
    return {blk.value_at(s) + T * fd.conjugate(u), branch};
}

double solve_point_lh(const LinkValueCondition& cond, const ConcaveFD& fd,
                      double x, double t, std::size_t* evals) {
    if (t < 0) throw std::domain_error("negative time");
    const double eps = scale_eps(cond.x0(), cond.xn());
    if (x < cond.x0() - eps || x > cond.xn() + eps)
        throw std::domain_error("x outside link extent");

    double best = kInf;
    std::size_t n = 0;
    for (const auto& blk : cond.initial_blocks()) {
        const auto c = initial_component(fd, blk, x, t);
        if (c.finite()) { ++n; best = std::min(best, c.value); }
    }
    for (const auto& blk : cond.boundary_blocks(Side::up)) {
        const auto c = upstream_component(fd, blk, cond.x0(), x, t);
        if (c.finite()) { ++n; best = std::min(best, c.value); }
    }
    for (const auto& blk : cond.boundary_blocks(Side::down)) {
        const auto c = downstream_component(fd, blk, cond.xn(), x, t);
        if (c.finite()) { ++n; best = std::min(best, c.value); }
    }
    if (evals) *evals += n;
    return best;
}

std::vector<int> minimal_initial_blocks(const LinkValueCondition& cond,
                                        const ConcaveFD& fd, double x, double t,
                                        double tol) {
    const double best = solve_point_lh(cond, fd, x, t);
    std::vector<int> out;
    const auto& blocks = cond.initial_blocks();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto c = initial_component(fd, blocks[i], x, t);
        if (c.finite() && c.value <= best + tol) out.push_back(static_cast<int>(i));
    }
    return out;
}

std::vector<std::vector<int>> domains_of_influence(const LinkValueCondition& cond,
                                                   const ConcaveFD& fd,
                                                   std::span<const double> xs,
                                                   std::span<const double> ts) {
    std::vector<std::vector<int>> out;
    out.reserve(xs.size() * ts.size());
    for (double t : ts)
        for (double x : xs) out.push_back(minimal_initial_blocks(cond, fd, x, t));
    return out;
}

}  // namespace flh
