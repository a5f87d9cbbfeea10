#include "flh/fast_lax_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flh {

namespace {

double dom_tol(double v) { return 1e-12 * (1.0 + std::abs(v)); }

// Activation times are applied with a one-step deferral on floating ties:
// pruning later is always safe.
bool activated(double t, double threshold) { return t >= threshold + 1e-12 * (1.0 + std::abs(t)); }

constexpr double kTieTol = 1e-9;

}  // namespace

FlhLinkState::FlhLinkState(LinkValueCondition cond, std::shared_ptr<const ConcaveFD> fd,
                           double dt, std::optional<FlhMode> force_mode)
    : cond_(std::move(cond)), fd_(std::move(fd)), dt_(dt) {
    if (dt_ <= 0) throw std::invalid_argument("dt must be positive");
    const auto& ini = cond_.initial_blocks();
    if (ini.empty()) throw std::invalid_argument("link has no initial condition");

    cqm_ = fd_->q_max();
    const auto* tri = dynamic_cast<const TriangularFD*>(fd_.get());
    bool cfl_ok = tri != nullptr;
    if (cfl_ok) {
        cv_ = tri->v_free();
        cw_ = tri->w_cong();
        ckc_ = tri->k_crit();
        warm_dn_ = cond_.length() / cv_;
        warm_up_ = cond_.length() / -cw_;
        dx_ = ini.front().x_hi - ini.front().x_lo;
        for (const auto& blk : ini)
            if (std::abs((blk.x_hi - blk.x_lo) - dx_) > 1e-9 * (1.0 + dx_)) cfl_ok = false;
        if (dt_ > dx_ / fd_->v_max() * (1.0 + 1e-12)) cfl_ok = false;
    }
    mode_ = cfl_ok ? FlhMode::cfl_triangular : FlhMode::general;
    if (force_mode) {
        if (*force_mode == FlhMode::cfl_triangular && !cfl_ok)
            throw std::logic_error("cfl_triangular mode requires a triangular diagram, "
                                   "uniform blocks and dt <= dx/v");
        mode_ = *force_mode;
    }

    const int n = static_cast<int>(ini.size());
    down_.ini_edge = n - 1;
    up_.ini_edge = 0;
    up_.last_value = cond_.initial_value(cond_.x0());
    down_.last_value = cond_.initial_value(cond_.xn());
}

double FlhLinkState::boundary_value_step(Side side) {
    BoundaryCursor& cur = side == Side::down ? down_ : up_;
    if (std::abs(cur.last_time - time_) > 1e-9 * (1.0 + time_))
        throw std::logic_error("cursor out of step with link time");
    const double t_next = time_ + dt_;
    const double x = side == Side::down ? cond_.xn() : cond_.x0();
    const double L = cond_.length();
    const auto& ini = cond_.initial_blocks();
    const int n = static_cast<int>(ini.size());
    const Side opp = side == Side::down ? Side::up : Side::down;
    const auto& opp_blocks = cond_.boundary_blocks(opp);
    const auto& own_blocks = cond_.boundary_blocks(side);
    // Information from the opposite boundary travels at v_max (downstream
    // demand) or |w_min| (upstream supply).
    const double wave = side == Side::down ? fd_->v_max() : -fd_->w_min();

    std::uint64_t evals = 0;
    double best = kInf;

    // Surviving initial components.
    std::vector<double> ini_vals(n, kInf);
    double best_ini = kInf;
    if (!cur.ini_retired) {
        const int lo = side == Side::down ? 0 : cur.ini_edge;
        const int hi = side == Side::down ? cur.ini_edge : n - 1;
        for (int j = lo; j <= hi; ++j) {
            const auto c = initial_component(*fd_, ini[j], x, t_next);
            ini_vals[j] = c.value;
            if (c.finite()) { ++evals; best_ini = std::min(best_ini, c.value); }
        }
        best = best_ini;
    }

    // Surviving opposite-boundary components.
    std::vector<double> opp_vals(opp_blocks.size(), kInf);
    for (std::size_t j = cur.lo_active_bdry; j < opp_blocks.size(); ++j) {
        const auto c = opp == Side::up
                           ? upstream_component(*fd_, opp_blocks[j], cond_.x0(), x, t_next)
                           : downstream_component(*fd_, opp_blocks[j], cond_.xn(), x, t_next);
        opp_vals[j] = c.value;
        if (c.finite()) { ++evals; best = std::min(best, c.value); }
    }

    // Continuation of the newest same-side block (its fan grows at q_max, and
    // it dominates all older same-side blocks).
    if (!own_blocks.empty()) {
        ++evals;
        best = std::min(best, cur.last_value + fd_->q_max() * dt_);
    }

    // (a) Shrink the initial window from the boundary-adjacent end.
    if (!cur.ini_retired) {
        while (true) {
            const int edge = cur.ini_edge;
            const int inner_lo = side == Side::down ? 0 : edge + 1;
            const int inner_hi = side == Side::down ? edge - 1 : n - 1;
            if (inner_lo > inner_hi) break;
            int dominator = -1;
            double dom_val = kInf;
            for (int j = inner_lo; j <= inner_hi; ++j)
                if (ini_vals[j] < dom_val) { dom_val = ini_vals[j]; dominator = j; }
            if (dominator < 0 || !(dom_val <= ini_vals[edge] - dom_tol(dom_val))) break;
            const double act = side == Side::down
                                   ? (cond_.xn() - ini[dominator].x_hi) / fd_->v_max()
                                   : (ini[dominator].x_lo - cond_.x0()) / -fd_->w_min();
            if (!activated(t_next, act)) break;
            cur.ini_edge += side == Side::down ? -1 : 1;
        }
    }

    // (b) Retire all initial components once the newest
    // opposite-boundary component dominates the best surviving one.
    if (!cur.ini_retired && !opp_blocks.empty()) {
        const std::size_t jn = opp_blocks.size() - 1;
        if (opp_vals[jn] < kInf && opp_vals[jn] <= best_ini - dom_tol(opp_vals[jn]) &&
            activated(t_next, opp_blocks[jn].t_lo + L / wave))
            cur.ini_retired = true;
    }

    // (c) Advance past earlier opposite-boundary blocks dominated
    // by a later one.
    while (cur.lo_active_bdry + 1 < static_cast<int>(opp_blocks.size())) {
        const int lo = cur.lo_active_bdry;
        if (!(opp_vals[lo] < kInf)) break;
        int dominator = -1;
        double dom_val = kInf;
        for (std::size_t j = lo + 1; j < opp_blocks.size(); ++j)
            if (opp_vals[j] < dom_val) { dom_val = opp_vals[j]; dominator = static_cast<int>(j); }
        if (dominator < 0 || !(dom_val <= opp_vals[lo] - dom_tol(dom_val))) break;
        if (!activated(t_next, opp_blocks[dominator].t_lo + L / wave)) break;
        ++cur.lo_active_bdry;
    }

    cur.min_initial.clear();
    for (int j = 0; j < n; ++j)
        if (ini_vals[j] <= best + kTieTol) cur.min_initial.push_back(j);
    cur.op_count += evals;
    return best;
}

double FlhLinkState::cfl_boundary_step(Side side) {
    if (mode_ != FlhMode::cfl_triangular)
        throw std::logic_error("cfl_boundary_step requires cfl_triangular mode");
    BoundaryCursor& cur = side == Side::down ? down_ : up_;
    const double t_next = time_ + dt_;
    const Side opp = side == Side::down ? Side::up : Side::down;
    const auto& opp_blocks = cond_.boundary_blocks(opp);
    const auto& own_blocks = cond_.boundary_blocks(side);
    const double horizon = side == Side::down ? warm_dn_ : warm_up_;

    std::uint64_t evals = 0;
    double best = kInf;

    if (t_next <= horizon * (1.0 + 1e-12)) {
        // Initial-influence phase: the characteristic-traced block and its
        // already-arrived neighbor, plus the same-side continuation.
        const double x = side == Side::down ? cond_.xn() : cond_.x0();
        const double wave = side == Side::down ? cv_ : -cw_;
        const auto& ini = cond_.initial_blocks();
        const int n = static_cast<int>(ini.size());
        const int l = static_cast<int>(std::floor(wave * t_next / dx_ + 1e-9));
        const int traced = side == Side::down ? (n - 1) - l : l;
        const int neighbor = side == Side::down ? traced + 1 : traced - 1;
        for (int j : {traced, neighbor}) {
            if (j < 0 || j >= n) continue;
            // Inlined triangular initial component: clamp the characteristic
            // foot to the feasible interval, then value + fan cost.
            const auto& blk = ini[j];
            const double lo = std::max(blk.x_lo, x - t_next * cv_);
            const double hi = std::min(blk.x_hi, x - t_next * cw_);
            if (lo > hi) continue;
            const double foot =
                std::clamp(x - t_next * (blk.k < ckc_ ? cv_ : cw_), lo, hi);
            const double u = (x - foot) / t_next;
            const double val = blk.b - blk.k * foot + t_next * ckc_ * (cv_ - u);
            ++evals;
            best = std::min(best, val);
        }
        if (!own_blocks.empty()) {
            ++evals;
            best = std::min(best, cur.last_value + cqm_ * dt_);
        }
    } else {
        if (own_blocks.empty()) return boundary_value_step(side);
        ++evals;
        best = cur.last_value + cqm_ * dt_;
        const double L = cond_.length();
        const double tau = t_next - horizon;
        const int idx = std::clamp(static_cast<int>(std::floor(tau / dt_ + 1e-9)), 0,
                                   static_cast<int>(opp_blocks.size()) - 1);
        // Inlined boundary component: the convex objective decreases in the
        // emission time, so the minimum sits at the latest feasible one.
        const auto& blk = opp_blocks[idx];
        // tau can land a few ulps outside the block; clamping keeps the
        // emission time feasible without skipping the candidate.
        const double s_hi = std::clamp(tau, blk.t_lo, blk.t_hi);
        const double c_s = blk.value_at(s_hi);
        const double val = opp == Side::up
                               ? c_s + ckc_ * cv_ * (t_next - s_hi) - ckc_ * L
                               : c_s + ckc_ * cv_ * (t_next - s_hi) + ckc_ * L;
        ++evals;
        best = std::min(best, val);
    }

    cur.op_count += evals;
    return best;
}

double FlhLinkState::step_value(Side side) {
    return mode_ == FlhMode::cfl_triangular ? cfl_boundary_step(side)
                                            : boundary_value_step(side);
}

double FlhLinkState::free_value(Side side) {
    auto& pending = side == Side::down ? pending_down_ : pending_up_;
    if (!pending) pending = step_value(side);
    return *pending;
}

double FlhLinkState::demand() {
    const double v = free_value(Side::down);
    return std::clamp((v - down_.last_value) / dt_, 0.0, cqm_);
}

double FlhLinkState::supply() {
    const double v = free_value(Side::up);
    return std::clamp((v - up_.last_value) / dt_, 0.0, cqm_);
}

void FlhLinkState::commit_step(double inflow, double outflow) {
    cond_.append_boundary_flow(Side::up, inflow, dt_, *fd_);
    cond_.append_boundary_flow(Side::down, outflow, dt_, *fd_);
    up_.last_value += inflow * dt_;
    down_.last_value += outflow * dt_;
    time_ += dt_;
    up_.last_time = down_.last_time = time_;
    pending_up_.reset();
    pending_down_.reset();
}

double solve_point_flh(const LinkValueCondition& cond, const ConcaveFD& fd,
                       double x, double t, FlhPointState& state) {
    const auto* tri = dynamic_cast<const TriangularFD*>(&fd);
    if (!tri) return solve_point_lh(cond, fd, x, t);   // documented fallback
    if (t < state.last_t) throw std::logic_error("point queries must not go back in time");
    state.last_t = t;

    const auto& ini = cond.initial_blocks();
    const int n = static_cast<int>(ini.size());
    if (state.alive.empty()) state.alive.assign(n, 1);

    std::vector<double> vals(n, kInf);
    double best = kInf;
    int argmin = -1;
    for (int j = 0; j < n; ++j) {
        if (!state.alive[j]) continue;
        const auto c = initial_component(fd, ini[j], x, t);
        vals[j] = c.value;
        if (c.finite()) {
            ++state.op_count;
            if (c.value < best) { best = c.value; argmin = j; }
        }
    }

    // One predictable translated block per boundary, plus the newest block
    // (whose component dominates all intermediate fans).
    auto add_boundary = [&](Side side) {
        const auto& blocks = cond.boundary_blocks(side);
        if (blocks.empty()) return;
        const double lag = side == Side::up ? (x - cond.x0()) / tri->v_free()
                                            : (cond.xn() - x) / -tri->w_cong();
        const double dt_b = blocks.front().t_hi - blocks.front().t_lo;
        const int idx = std::clamp(static_cast<int>(std::floor((t - lag) / dt_b + 1e-9)), 0,
                                   static_cast<int>(blocks.size()) - 1);
        const int last = static_cast<int>(blocks.size()) - 1;
        for (int j : {idx, last}) {
            const auto c = side == Side::up
                               ? upstream_component(fd, blocks[j], cond.x0(), x, t)
                               : downstream_component(fd, blocks[j], cond.xn(), x, t);
            if (c.finite()) { ++state.op_count; best = std::min(best, c.value); }
            if (j == last) break;
        }
    };
    add_boundary(Side::up);
    add_boundary(Side::down);

    // Corollaries 1-2: a dominated initial block never matters again at this x.
    if (argmin >= 0) {
        for (int i = 0; i < n; ++i) {
            if (!state.alive[i] || i == argmin || !(vals[i] < kInf)) continue;
            if (!(vals[argmin] <= vals[i] - dom_tol(vals[argmin]))) continue;
            const double act = argmin > i ? (ini[i].x_hi - x) / -tri->w_cong()
                                          : (x - ini[i].x_lo) / tri->v_free();
            if (activated(t, act)) state.alive[i] = 0;
        }
    }
    return best;
}

}  // namespace flh
