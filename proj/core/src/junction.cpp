#include "flh/junction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace flh {

void NodeSpec::validate() const {
    if (n_in == 0 || n_out == 0) throw std::invalid_argument("node needs inputs and outputs");
    if (priority.size() != n_in) throw std::invalid_argument("priority size mismatch");
    if (beta.size() != n_in) throw std::invalid_argument("split matrix row count mismatch");
    for (std::size_t i = 0; i < n_in; ++i) {
        if (!(priority[i] > 0)) throw std::invalid_argument("priorities must be positive");
        if (beta[i].size() != n_out)
            throw std::invalid_argument("split matrix column count mismatch");
        double row = 0;
        for (double b : beta[i]) {
            if (b < 0) throw std::invalid_argument("split ratios must be nonnegative");
            row += b;
        }
        if (std::abs(row - 1.0) > 1e-9)
            throw std::invalid_argument("split ratios of input " + std::to_string(i) +
                                        " sum to " + std::to_string(row));
    }
}

bool SignalTiming::green_at(double t) const {
    if (cycle <= 0) return true;
    double phase = std::fmod(t, cycle);
    if (phase < 0) phase += cycle;
    return phase >= green_start && phase < green_end;
}

NodeFlows resolve_node(const NodeSpec& spec, const std::vector<double>& demand,
                       const std::vector<double>& supply) {
    spec.validate();
    if (demand.size() != spec.n_in || supply.size() != spec.n_out)
        throw std::invalid_argument("demand/supply size mismatch");

    const double inf = std::numeric_limits<double>::infinity();
    NodeFlows out;
    out.in.assign(spec.n_in, 0.0);
    out.in_binding.assign(spec.n_in, Binding::unconstrained);
    std::vector<double> used(spec.n_out, 0.0);
    std::vector<char> active(spec.n_in, 1);

    for (std::size_t i = 0; i < spec.n_in; ++i)
        if (demand[i] <= 0) { active[i] = 0; out.in_binding[i] = Binding::demand; }

    while (true) {
        // Step length until the next binding constraint, in priority-scaled time.
        double step = inf;
        for (std::size_t i = 0; i < spec.n_in; ++i)
            if (active[i]) step = std::min(step, (demand[i] - out.in[i]) / spec.priority[i]);
        if (step == inf) break;   // no active inputs left

        for (std::size_t o = 0; o < spec.n_out; ++o) {
            double rate = 0;
            for (std::size_t i = 0; i < spec.n_in; ++i)
                if (active[i]) rate += spec.beta[i][o] * spec.priority[i];
            if (rate > 0) step = std::min(step, (supply[o] - used[o]) / rate);
        }
        step = std::max(step, 0.0);

        for (std::size_t i = 0; i < spec.n_in; ++i) {
            if (!active[i]) continue;
            const double dg = spec.priority[i] * step;
            out.in[i] += dg;
            for (std::size_t o = 0; o < spec.n_out; ++o) used[o] += spec.beta[i][o] * dg;
        }

        // Freeze whatever bound.  Supply first: an input stopped by a full
        // output stays supply-bound even if its demand binds at the same point.
        bool froze = false;
        for (std::size_t o = 0; o < spec.n_out; ++o) {
            if (used[o] < supply[o] - 1e-12 * (1.0 + supply[o])) continue;
            for (std::size_t i = 0; i < spec.n_in; ++i) {
                if (active[i] && spec.beta[i][o] > 0) {
                    active[i] = 0;
                    out.in_binding[i] = Binding::supply;
                    froze = true;
                }
            }
        }
        for (std::size_t i = 0; i < spec.n_in; ++i) {
            if (active[i] && out.in[i] >= demand[i] - 1e-12 * (1.0 + demand[i])) {
                active[i] = 0;
                out.in_binding[i] = Binding::demand;
                froze = true;
            }
        }
        if (!froze) break;   // numerical stall guard; should not happen
    }

    out.move.assign(spec.n_in, std::vector<double>(spec.n_out, 0.0));
    for (std::size_t i = 0; i < spec.n_in; ++i)
        for (std::size_t o = 0; o < spec.n_out; ++o)
            out.move[i][o] = spec.beta[i][o] * out.in[i];
    return out;
}

}  // namespace flh
