#pragma once

#include <cstddef>
#include <vector>

namespace flh {

// One intersection with FIFO diverging: every vehicle leaving input i splits
// across outputs by fixed ratios beta[i][o], so all movements of an input
// advance together.
struct NodeSpec {
    std::size_t n_in = 0;
    std::size_t n_out = 0;
    std::vector<double> priority;             // per input, positive, any scale
    std::vector<std::vector<double>> beta;    // [n_in][n_out], rows sum to 1

    void validate() const;   // throws std::invalid_argument
};

// Periodic signal timing.  Green holds on [start, end) within each cycle;
// a zero cycle length means always green.
struct SignalTiming {
    double cycle = 0;
    double green_start = 0;
    double green_end = 0;

    bool green_at(double t) const;
};

enum class Binding { demand, supply, unconstrained };

struct NodeFlows {
    std::vector<double> in;                    // realized per-input throughput
    std::vector<std::vector<double>> move;     // per-movement flow
    std::vector<Binding> in_binding;           // what stopped each input
};

// Allocates junction flows by growing every unfrozen input's throughput in
// proportion to its priority until a demand or downstream-supply constraint
// binds, freezing the affected inputs, and repeating.  The result conserves
// vehicles, respects FIFO split ratios, and is flow-maximal among FIFO
// allocations with these priorities.
NodeFlows resolve_node(const NodeSpec& spec, const std::vector<double>& demand,
                       const std::vector<double>& supply);

}  // namespace flh
