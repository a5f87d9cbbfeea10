#include "flh/fd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flh {

namespace {

constexpr double kRelTol = 1e-12;

bool close_rel(double a, double b, double tol = kRelTol) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

[[noreturn]] void domain_fail(const char* what, double value) {
    throw std::domain_error(std::string(what) + " out of range: " + std::to_string(value));
}

}  // namespace

void ConcaveFD::require_density(double k) const {
    const double slack = kRelTol * (1.0 + k_jam());
    if (k < -slack || k > k_jam() + slack) domain_fail("density", k);
}

void ConcaveFD::require_speed(double u) const {
    const double slack = kRelTol * (1.0 + std::max(std::abs(w_min()), v_max()));
    if (u < w_min() - slack || u > v_max() + slack) domain_fail("speed", u);
}

void ConcaveFD::require_flow(double q) const {
    const double slack = kRelTol * (1.0 + q_max());
    if (q < -slack || q > q_max() + slack) domain_fail("flow", q);
}

std::pair<double, double> ConcaveFD::demand_supply(double k) const {
    require_density(k);
    if (k <= k_crit()) return {flux(k), q_max()};
    return {q_max(), flux(k)};
}

// ---------------------------------------------------------------------------
// TriangularFD

TriangularFD::TriangularFD(const Params& p) {
    auto v = p.v_free;
    auto w = p.w_cong;
    auto kc = p.k_crit;
    auto kj = p.k_jam;
    auto q = p.q_max;

    // Propagate q = v*kc and q = -w*(kc - kj) until no further progress.
    bool progress = true;
    while (progress) {
        progress = false;
        auto set = [&](std::optional<double>& slot, double value) {
            if (!slot) { slot = value; progress = true; }
        };
        if (v && kc) set(q, *v * *kc);
        if (q && v) set(kc, *q / *v);
        if (q && kc) set(v, *q / *kc);
        if (w && kc && kj) set(q, *w * (*kc - *kj));
        if (q && w && kc) set(kj, *kc - *q / *w);
        if (q && w && kj) set(kc, *kj + *q / *w);
        if (q && kc && kj) set(w, *q / (*kc - *kj));
        // Both branch identities combined: kc (v - w) = -w kj.
        if (v && w && kj) set(kc, -*w * *kj / (*v - *w));
    }
    if (!(v && w && kc && kj && q))
        throw std::invalid_argument("triangular diagram under-determined");

    v_free_ = *v;
    w_cong_ = *w;
    k_crit_ = *kc;
    k_jam_ = *kj;
    q_max_ = *q;

    if (v_free_ <= 0) domain_fail("v_free", v_free_);
    if (w_cong_ >= 0) domain_fail("w_cong", w_cong_);
    if (k_crit_ <= 0 || k_jam_ <= k_crit_) domain_fail("k_crit", k_crit_);
    if (q_max_ <= 0) domain_fail("q_max", q_max_);
    if (!close_rel(q_max_, v_free_ * k_crit_) ||
        !close_rel(q_max_, w_cong_ * (k_crit_ - k_jam_)))
        throw std::invalid_argument(
            "inconsistent triangular parameters: v*k_c=" + std::to_string(v_free_ * k_crit_) +
            " vs w*(k_c-k_jam)=" + std::to_string(w_cong_ * (k_crit_ - k_jam_)));
}

TriangularFD::TriangularFD(double v_free, double w_cong, double k_jam)
    : TriangularFD(Params{v_free, w_cong, std::nullopt, k_jam, std::nullopt}) {}

double TriangularFD::flux(double k) const {
    require_density(k);
    k = std::clamp(k, 0.0, k_jam_);
    if (k <= k_crit_) return v_free_ * k;
    return w_cong_ * (k - k_jam_);
}

double TriangularFD::conjugate(double u) const {
    require_speed(u);
    return k_crit_ * (v_free_ - u);
}

double TriangularFD::characteristic_speed(double k) const {
    require_density(k);
    return k < k_crit_ ? v_free_ : w_cong_;
}

double TriangularFD::free_density(double q) const {
    require_flow(q);
    return std::clamp(q, 0.0, q_max_) / v_free_;
}

double TriangularFD::congested_density(double q) const {
    require_flow(q);
    return k_jam_ + std::clamp(q, 0.0, q_max_) / w_cong_;
}

// ---------------------------------------------------------------------------
// GreenshieldsFD

GreenshieldsFD::GreenshieldsFD(double v_free, double k_jam)
    : v_free_(v_free), k_jam_(k_jam) {
    if (v_free_ <= 0) domain_fail("v_free", v_free_);
    if (k_jam_ <= 0) domain_fail("k_jam", k_jam_);
}

double GreenshieldsFD::flux(double k) const {
    require_density(k);
    k = std::clamp(k, 0.0, k_jam_);
    return (v_free_ / k_jam_) * k * (k_jam_ - k);
}

double GreenshieldsFD::conjugate(double u) const {
    require_speed(u);
    const double d = v_free_ - std::clamp(u, -v_free_, v_free_);
    return k_jam_ * d * d / (4.0 * v_free_);
}

double GreenshieldsFD::characteristic_speed(double k) const {
    require_density(k);
    return v_free_ * (1.0 - 2.0 * std::clamp(k, 0.0, k_jam_) / k_jam_);
}

double GreenshieldsFD::free_density(double q) const {
    require_flow(q);
    const double ratio = std::clamp(q / q_max(), 0.0, 1.0);
    return 0.5 * k_jam_ * (1.0 - std::sqrt(1.0 - ratio));
}

double GreenshieldsFD::congested_density(double q) const {
    require_flow(q);
    const double ratio = std::clamp(q / q_max(), 0.0, 1.0);
    return 0.5 * k_jam_ * (1.0 + std::sqrt(1.0 - ratio));
}

// ---------------------------------------------------------------------------
// PiecewiseLinearFD

PiecewiseLinearFD::PiecewiseLinearFD(std::vector<std::pair<double, double>> breakpoints)
    : bp_(std::move(breakpoints)) {
    if (bp_.size() < 2) throw std::invalid_argument("piecewise diagram needs >= 2 breakpoints");
    if (bp_.front().first != 0.0 || std::abs(bp_.front().second) > kRelTol)
        throw std::invalid_argument("piecewise diagram must start at (0, 0)");
    if (std::abs(bp_.back().second) > kRelTol * (1.0 + bp_.back().first))
        throw std::invalid_argument("piecewise diagram must end at (k_jam, 0)");

    q_max_ = 0.0;
    k_crit_ = 0.0;
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i) {
        const double dk = bp_[i + 1].first - bp_[i].first;
        if (dk <= 0) throw std::invalid_argument("breakpoint densities must increase");
        slopes_.push_back((bp_[i + 1].second - bp_[i].second) / dk);
        if (i > 0 && slopes_[i] > slopes_[i - 1] + kRelTol * (1.0 + std::abs(slopes_[i])))
            throw std::invalid_argument("piecewise diagram is not concave");
    }
    for (const auto& [k, q] : bp_) {
        if (q < -kRelTol) throw std::invalid_argument("piecewise diagram has negative flow");
        if (q > q_max_) { q_max_ = q; k_crit_ = k; }
    }
}

double PiecewiseLinearFD::flux(double k) const {
    require_density(k);
    k = std::clamp(k, 0.0, k_jam());
    auto it = std::upper_bound(bp_.begin(), bp_.end(), k,
                               [](double v, const auto& p) { return v < p.first; });
    std::size_t seg = std::min<std::size_t>(it - bp_.begin(), bp_.size() - 1) - 1;
    return bp_[seg].second + slopes_[seg] * (k - bp_[seg].first);
}

double PiecewiseLinearFD::conjugate(double u) const {
    require_speed(u);
    double best = 0.0;
    for (const auto& [k, q] : bp_) best = std::max(best, q - u * k);
    return best;
}

double PiecewiseLinearFD::characteristic_speed(double k) const {
    require_density(k);
    k = std::clamp(k, 0.0, k_jam());
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i)
        if (k < bp_[i + 1].first) return slopes_[i];
    return slopes_.back();
}

double PiecewiseLinearFD::free_density(double q) const {
    require_flow(q);
    q = std::clamp(q, 0.0, q_max_);
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i) {
        const double qa = bp_[i].second, qb = bp_[i + 1].second;
        if (qa <= q + 1e-9 && q <= qb + 1e-9 && slopes_[i] > 0)
            return bp_[i].first + (q - qa) / slopes_[i];
        if (std::abs(qa - q) <= 1e-9) return bp_[i].first;
    }
    return k_crit_;
}

double PiecewiseLinearFD::congested_density(double q) const {
    require_flow(q);
    q = std::clamp(q, 0.0, q_max_);
    for (std::size_t i = bp_.size() - 1; i > 0; --i) {
        const double qa = bp_[i - 1].second, qb = bp_[i].second;
        if (qb <= q + 1e-9 && q <= qa + 1e-9 && slopes_[i - 1] < 0)
            return bp_[i].first + (q - qb) / slopes_[i - 1];
        if (std::abs(qb - q) <= 1e-9) return bp_[i].first;
    }
    return k_crit_;
}

// ---------------------------------------------------------------------------

std::shared_ptr<const ConcaveFD> scale_lanes(const std::shared_ptr<const ConcaveFD>& fd,
                                             int lanes) {
    if (lanes < 1) throw std::invalid_argument("lanes must be >= 1");
    if (lanes == 1) return fd;
    const double s = static_cast<double>(lanes);
    if (auto* t = dynamic_cast<const TriangularFD*>(fd.get()))
        return std::make_shared<TriangularFD>(t->v_free(), t->w_cong(), s * t->k_jam());
    if (auto* g = dynamic_cast<const GreenshieldsFD*>(fd.get()))
        return std::make_shared<GreenshieldsFD>(g->v_free(), s * g->k_jam());
    auto* p = dynamic_cast<const PiecewiseLinearFD*>(fd.get());
    if (!p) throw std::invalid_argument("unknown diagram type");
    auto bp = p->breakpoints();
    for (auto& [k, q] : bp) { k *= s; q *= s; }
    return std::make_shared<PiecewiseLinearFD>(std::move(bp));
}

}  // namespace flh
