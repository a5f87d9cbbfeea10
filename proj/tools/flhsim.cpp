#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "flh/io.hpp"
#include "flh/network.hpp"

namespace {

struct ProbeSpec {
    std::string link;
    double x, t;
};

ProbeSpec parse_probe(const std::string& s) {
    std::stringstream ss(s);
    ProbeSpec p;
    std::string xs, ts;
    if (!std::getline(ss, p.link, ':') || !std::getline(ss, xs, ':') || !std::getline(ss, ts))
        throw CLI::ValidationError("--probe expects link:x:t");
    p.x = std::stod(xs);
    p.t = std::stod(ts);
    return p;
}

void write_file(const std::filesystem::path& path, const std::string& name,
                const std::function<void(std::ostream&)>& fn) {
    std::ofstream os(path / name);
    if (!os) throw std::runtime_error("cannot write " + (path / name).string());
    fn(os);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LWR network simulator (fast Lax-Hopf, Lax-Hopf, CTM, LTM)"};
    app.require_subcommand(1);

    std::string network_path, scenario_path, out_dir = ".", model_name, probe_out;
    std::vector<std::string> probes;
    double dt_override = 0;
    std::size_t steps_override = 0;
    std::uint64_t seed = 0;
    bool count_ops = false;

    auto* sim = app.add_subcommand("simulate", "Run one scenario and write CSV outputs");
    sim->add_option("--network", network_path, "Network JSON file")->required();
    sim->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    sim->add_option("--model", model_name, "Override scenario model (flh|lh|ctm|ltm)");
    sim->add_option("--dt", dt_override, "Override time step");
    sim->add_option("--horizon", steps_override, "Override number of steps");
    sim->add_option("--out", out_dir, "Output directory");
    sim->add_option("--probe", probes, "Interior probe link:x:t (repeatable)");
    sim->add_option("--seed", seed, "Override scenario seed");
    sim->add_flag("--count-ops", count_ops, "Also write ops.csv");

    std::vector<std::string> cmp_models = {"flh", "lh", "ctm", "ltm"};
    std::size_t cmp_seeds = 1;
    std::vector<double> cmp_dts = {1.0};
    std::size_t cmp_steps = 200;
    auto* cmp = app.add_subcommand("compare",
                                   "RMSE of each model's boundary flows against flh");
    cmp->add_option("--network", network_path, "Network JSON file")->required();
    cmp->add_option("--models", cmp_models, "Models to compare")->delimiter(',');
    cmp->add_option("--seeds", cmp_seeds, "Number of random scenario seeds");
    cmp->add_option("--dt", cmp_dts, "Time steps to sweep")->delimiter(',');
    cmp->add_option("--horizon", cmp_steps, "Steps per run");

    std::vector<std::size_t> bench_horizons = {100, 200, 400};
    std::vector<std::string> bench_models = {"flh", "lh", "ctm", "ltm"};
    int repeat = 5;
    auto* ben = app.add_subcommand("bench", "Median wall-clock time per model and horizon");
    ben->add_option("--network", network_path, "Network JSON file")->required();
    ben->add_option("--horizons", bench_horizons, "Step counts to sweep")->delimiter(',');
    ben->add_option("--models", bench_models, "Models to time")->delimiter(',');
    ben->add_option("--repeat", repeat, "Runs per cell (median reported)");
    ben->add_option("--seed", seed, "Scenario seed");

    CLI11_PARSE(app, argc, argv);

    try {
        flh::Network net = flh::load_network_file(network_path);

        if (sim->parsed()) {
            flh::Scenario sc = flh::load_scenario_file(scenario_path, net);
            if (!model_name.empty()) sc.model = flh::model_from_string(model_name);
            if (dt_override > 0) sc.dt = dt_override;
            if (steps_override > 0) sc.steps = steps_override;
            if (sim->count("--seed")) sc.seed = seed;

            if (!probes.empty() && sc.model == flh::Model::ltm) {
                std::cerr << "error: interior probes under ltm are refused (boundary curves "
                             "cannot reconstruct interior counts reliably)\n";
                return 2;
            }

            flh::Simulator simulator(net, sc);
            const flh::SimulationResult res = simulator.run();

            std::filesystem::create_directories(out_dir);
            write_file(out_dir, "boundary_flows.csv",
                       [&](std::ostream& os) { flh::write_flows_csv(os, net, res); });
            write_file(out_dir, "timing.csv",
                       [&](std::ostream& os) { flh::write_timing_csv(os, res); });
            if (count_ops)
                write_file(out_dir, "ops.csv",
                           [&](std::ostream& os) { flh::write_ops_csv(os, net, res); });
            if (!probes.empty()) {
                std::vector<flh::ProbeRow> rows;
                for (const auto& ps : probes) {
                    const ProbeSpec p = parse_probe(ps);
                    rows.push_back({p.link, p.x, p.t,
                                    simulator.probe(net.link_index(p.link), p.x, p.t)});
                }
                write_file(out_dir, "probes.csv",
                           [&](std::ostream& os) { flh::write_probes_csv(os, rows); });
            }
            std::cout << "simulated " << res.steps << " steps of "
                      << net.links.size() << " links (" << flh::to_string(res.model)
                      << "), link phase " << res.link_phase_seconds << " s, node phase "
                      << res.node_phase_seconds << " s\n";
            return 0;
        }

        if (cmp->parsed()) {
            std::cout << "model,dt,seeds,mean_rmse_vs_flh,stddev\n";
            for (double dti : cmp_dts) {
                std::vector<std::vector<double>> rmse(cmp_models.size());
                for (std::uint64_t sd = 0; sd < cmp_seeds; ++sd) {
                    flh::Scenario ref_sc =
                        flh::random_scenario(net, sd, 8, dti, cmp_steps, flh::Model::flh);
                    const auto ref = flh::simulate(net, ref_sc);
                    for (std::size_t m = 0; m < cmp_models.size(); ++m) {
                        flh::Scenario sc = ref_sc;
                        sc.model = flh::model_from_string(cmp_models[m]);
                        rmse[m].push_back(flh::rmse_flows(ref, flh::simulate(net, sc)));
                    }
                }
                for (std::size_t m = 0; m < cmp_models.size(); ++m) {
                    double mean = 0, var = 0;
                    for (double r : rmse[m]) mean += r;
                    mean /= static_cast<double>(rmse[m].size());
                    for (double r : rmse[m]) var += (r - mean) * (r - mean);
                    var /= static_cast<double>(rmse[m].size());
                    std::cout << cmp_models[m] << ',' << dti << ',' << cmp_seeds << ','
                              << mean << ',' << std::sqrt(var) << '\n';
                }
            }
            return 0;
        }

        // bench
        std::cout << "model,steps,median_seconds\n";
        for (const auto& mn : bench_models) {
            for (std::size_t steps : bench_horizons) {
                std::vector<double> secs;
                for (int r = 0; r < repeat; ++r) {
                    flh::Scenario sc = flh::random_scenario(net, seed, 8, 1.0, steps,
                                                            flh::model_from_string(mn));
                    const auto t0 = std::chrono::steady_clock::now();
                    flh::simulate(net, sc);
                    secs.push_back(std::chrono::duration<double>(
                                       std::chrono::steady_clock::now() - t0)
                                       .count());
                }
                std::sort(secs.begin(), secs.end());
                std::cout << mn << ',' << steps << ',' << secs[secs.size() / 2] << '\n';
            }
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
