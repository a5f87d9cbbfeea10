#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flh/fd.hpp"
#include "flh/junction.hpp"
#include "flh/value_condition.hpp"

namespace flh {

enum class Model { flh, lh, ctm, ltm };

Model model_from_string(const std::string& name);
std::string to_string(Model m);

struct LinkSpec {
    std::string id;
    double length = 0;
    int lanes = 1;
    std::shared_ptr<const ConcaveFD> fd_per_lane;

    std::shared_ptr<const ConcaveFD> effective_fd() const;
};

struct NodeConnection {
    std::string id;
    std::vector<std::size_t> in_links;
    std::vector<std::size_t> out_links;
    NodeSpec spec;           // sized to in_links/out_links
    SignalTiming signal;     // gates all inputs of this node
};

// A source injects min(profile rate, link supply) at a link's upstream end;
// a sink drains min(link demand, capacity) at a downstream end.
struct SourceSpec {
    std::size_t link = 0;
    double constant_rate = 0;
    std::vector<double> profile;   // per-step rates; overrides constant when nonempty

    double rate_at(std::size_t step) const {
        if (profile.empty()) return constant_rate;
        return profile[std::min(step, profile.size() - 1)];
    }
};

struct SinkSpec {
    std::size_t link = 0;
    double capacity = 1e18;
};

struct Network {
    std::vector<LinkSpec> links;
    std::vector<NodeConnection> nodes;
    std::vector<SourceSpec> sources;
    std::vector<SinkSpec> sinks;

    void validate() const;   // throws std::invalid_argument with a path-like message
    std::size_t link_index(const std::string& id) const;
};

struct Scenario {
    // Per link: per-lane densities on equal-width blocks covering the link.
    std::vector<std::vector<double>> initial_density;
    double dt = 1.0;
    std::size_t steps = 0;
    Model model = Model::flh;
    std::uint64_t seed = 0;
    // Replace the network's source rate / sink capacity on matching links.
    std::vector<SourceSpec> source_overrides;
    std::vector<SinkSpec> sink_overrides;
};

struct LinkTrace {
    std::vector<double> inflow;    // realized flow per step
    std::vector<double> outflow;
    std::vector<double> n_up;      // cumulative counts after each step
    std::vector<double> n_dn;
    // Component evaluations per step, worst of the two boundary updates
    // (lax-hopf models; zero otherwise).
    std::vector<std::uint64_t> ops;
    std::uint64_t op_count = 0;       // running total
};

struct SimulationResult {
    std::vector<LinkTrace> links;
    double dt = 0;
    std::size_t steps = 0;
    Model model = Model::flh;
    double link_phase_seconds = 0;
    double node_phase_seconds = 0;
    double conservation_residual = 0;   // worst per-link |stored - net boundary flow|
};

// Boundary-stepping interface shared by all four link models.
class LinkSolver {
public:
    virtual ~LinkSolver() = default;
    virtual double demand() = 0;
    virtual double supply() = 0;
    virtual void advance(double inflow, double outflow) = 0;
    virtual std::uint64_t op_count() const { return 0; }
    // Worst per-boundary evaluation count (lax-hopf models only).
    virtual std::uint64_t op_count(Side side) const { (void)side; return 0; }
    // Cumulative count at an interior point; throws for models that cannot
    // reconstruct interior state exactly.
    virtual double probe(double x, double t) const = 0;
};

std::unique_ptr<LinkSolver> make_link_solver(Model model, const LinkSpec& link,
                                             const std::vector<double>& per_lane_density,
                                             double dt);

class Simulator {
public:
    Simulator(const Network& net, const Scenario& sc);

    SimulationResult run();
    // Valid after run(); t must lie within the simulated horizon.
    double probe(std::size_t link, double x, double t) const;

private:
    Network net_;   // copy, with scenario overrides applied
    Scenario sc_;
    std::vector<std::unique_ptr<LinkSolver>> solvers_;
    SimulationResult result_;
    bool ran_ = false;
};

SimulationResult simulate(const Network& net, const Scenario& sc);

// Root-mean-square difference of realized boundary flows, all links and steps.
double rmse_flows(const SimulationResult& a, const SimulationResult& b);

// Deterministic random scenario: per-lane block densities uniform on
// [0, k_jam], uniform random source rates on [0, q_max].
Scenario random_scenario(Network& net, std::uint64_t seed, std::size_t blocks_per_link,
                         double dt, std::size_t steps, Model model);

// Directed grid of rows x cols signalized intersections.  Traffic enters at
// the west and north edges, flows east/south with even turning splits, and
// exits at the east and south edges.
Network grid_network(std::size_t rows, std::size_t cols);

// Freeway stretch: two source links merge, the mainline then diverges into a
// mainline continuation and an off-ramp (three-quarters / one-quarter split).
Network five_link_network();

}  // namespace flh
