#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace flh {

/// Concave flow-density law Q(k) on [0, k_jam] with Q(0) = Q(k_jam) = 0,
/// together with its convex (Legendre-Fenchel) transform
/// R(u) = sup_k (Q(k) - u*k), defined on the speed range [w_min, v_max].
class ConcaveFD {
public:
    virtual ~ConcaveFD() = default;

    virtual double k_jam() const = 0;
    virtual double k_crit() const = 0;
    virtual double q_max() const = 0;
    /// Upper end of the speed range, the right derivative of Q at k = 0.
    virtual double v_max() const = 0;
    /// Lower (signed, negative) end of the speed range, the slope of Q at k_jam.
    virtual double w_min() const = 0;

    virtual double flux(double k) const = 0;
    virtual double conjugate(double u) const = 0;
    /// Right sup-derivative of Q at k. At a kink the congested-side slope is returned.
    virtual double characteristic_speed(double k) const = 0;

    /// Smallest density with Q(k) = q (free branch preimage).
    virtual double free_density(double q) const = 0;
    /// Largest density with Q(k) = q (congested branch preimage).
    virtual double congested_density(double q) const = 0;

    /// Lebacque demand D(k) and supply S(k).
    std::pair<double, double> demand_supply(double k) const;

protected:
    void require_density(double k) const;
    void require_speed(double u) const;
    void require_flow(double q) const;
};

/// Triangular diagram: free branch of slope v_free up to k_crit, congested
/// branch of slope w_cong (signed, negative) down to zero at k_jam.
class TriangularFD final : public ConcaveFD {
public:
    /// Build from any consistent subset of the five parameters that pins all of
    /// them down. Over-determined inputs must agree to 1e-12 relative.
    struct Params {
        std::optional<double> v_free;
        std::optional<double> w_cong;   // signed, < 0
        std::optional<double> k_crit;
        std::optional<double> k_jam;
        std::optional<double> q_max;
    };
    explicit TriangularFD(const Params& p);
    TriangularFD(double v_free, double w_cong, double k_jam);

    double v_free() const { return v_free_; }
    double w_cong() const { return w_cong_; }

    double k_jam() const override { return k_jam_; }
    double k_crit() const override { return k_crit_; }
    double q_max() const override { return q_max_; }
    double v_max() const override { return v_free_; }
    double w_min() const override { return w_cong_; }

    double flux(double k) const override;
    double conjugate(double u) const override;
    double characteristic_speed(double k) const override;
    double free_density(double q) const override;
    double congested_density(double q) const override;

private:
    double v_free_, w_cong_, k_crit_, k_jam_, q_max_;
};

/// Greenshields parabola Q(k) = (v_free/k_jam) k (k_jam - k).
class GreenshieldsFD final : public ConcaveFD {
public:
    GreenshieldsFD(double v_free, double k_jam);

    double v_free() const { return v_free_; }

    double k_jam() const override { return k_jam_; }
    double k_crit() const override { return k_jam_ / 2.0; }
    double q_max() const override { return v_free_ * k_jam_ / 4.0; }
    double v_max() const override { return v_free_; }
    double w_min() const override { return -v_free_; }

    double flux(double k) const override;
    /// Closed form R(u) = k_jam (v_free - u)^2 / (4 v_free).
    double conjugate(double u) const override;
    double characteristic_speed(double k) const override;
    double free_density(double q) const override;
    double congested_density(double q) const override;

private:
    double v_free_, k_jam_;
};

/// Generic concave diagram given by (density, flow) breakpoints. The conjugate
/// is piecewise linear and computed exactly by scanning breakpoints.
class PiecewiseLinearFD final : public ConcaveFD {
public:
    explicit PiecewiseLinearFD(std::vector<std::pair<double, double>> breakpoints);

    const std::vector<std::pair<double, double>>& breakpoints() const { return bp_; }

    double k_jam() const override { return bp_.back().first; }
    double k_crit() const override { return k_crit_; }
    double q_max() const override { return q_max_; }
    double v_max() const override { return slopes_.front(); }
    double w_min() const override { return slopes_.back(); }

    double flux(double k) const override;
    double conjugate(double u) const override;
    double characteristic_speed(double k) const override;
    double free_density(double q) const override;
    double congested_density(double q) const override;

private:
    std::vector<std::pair<double, double>> bp_;
    std::vector<double> slopes_;   // per segment, strictly decreasing
    double k_crit_, q_max_;
};

/// Lane-scaled copy of a per-lane diagram (densities and flows times `lanes`).
std::shared_ptr<const ConcaveFD> scale_lanes(const std::shared_ptr<const ConcaveFD>& fd,
                                             int lanes);

}  // namespace flh
