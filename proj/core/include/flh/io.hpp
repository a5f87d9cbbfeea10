#pragma once

#include <iosfwd>
#include <string>

#include "flh/network.hpp"

namespace flh {

// JSON readers are strict: unknown keys, missing required keys, and
// out-of-range values all throw std::invalid_argument with a path-qualified
// message ("network.links[3].fd.w: ...").
Network read_network_json(const std::string& text);
Scenario read_scenario_json(const std::string& text, const Network& net);

std::string write_network_json(const Network& net);
std::string write_scenario_json(const Scenario& sc);

Network load_network_file(const std::string& path);
Scenario load_scenario_file(const std::string& path, const Network& net);

// CSV writers use fixed 9-decimal notation and deterministic row order
// (link index major, step minor).
void write_flows_csv(std::ostream& os, const Network& net, const SimulationResult& res);
void write_ops_csv(std::ostream& os, const Network& net, const SimulationResult& res);
void write_timing_csv(std::ostream& os, const SimulationResult& res);

struct ProbeRow {
    std::string link;
    double x = 0;
    double t = 0;
    double value = 0;
};
void write_probes_csv(std::ostream& os, const std::vector<ProbeRow>& rows);

}  // namespace flh
