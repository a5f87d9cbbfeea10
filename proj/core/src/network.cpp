#include "flh/network.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "flh/ctm.hpp"
#include "flh/fast_lax_hopf.hpp"
#include "flh/lax_hopf.hpp"
#include "flh/ltm.hpp"

namespace flh {

Model model_from_string(const std::string& name) {
    if (name == "flh") return Model::flh;
    if (name == "lh") return Model::lh;
    if (name == "ctm") return Model::ctm;
    if (name == "ltm") return Model::ltm;
    throw std::invalid_argument("unknown model '" + name + "'");
}

std::string to_string(Model m) {
    switch (m) {
        case Model::flh: return "flh";
        case Model::lh: return "lh";
        case Model::ctm: return "ctm";
        case Model::ltm: return "ltm";
    }
    return "?";
}

std::shared_ptr<const ConcaveFD> LinkSpec::effective_fd() const {
    return lanes == 1 ? fd_per_lane : scale_lanes(fd_per_lane, lanes);
}

void Network::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (links.empty()) fail("network.links: empty");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const auto& l = links[i];
        const std::string p = "network.links[" + std::to_string(i) + "]";
        if (l.id.empty()) fail(p + ".id: empty");
        if (!(l.length > 0)) fail(p + ".length: must be positive");
        if (l.lanes < 1) fail(p + ".lanes: must be >= 1");
        if (!l.fd_per_lane) fail(p + ".fd: missing");
        for (std::size_t j = 0; j < i; ++j)
            if (links[j].id == l.id) fail(p + ".id: duplicate '" + l.id + "'");
    }
    std::vector<int> up_owner(links.size(), -1), dn_owner(links.size(), -1);
    auto claim = [&](std::vector<int>& owner, std::size_t link, const std::string& p) {
        if (link >= links.size()) fail(p + ": link index out of range");
        if (owner[link] != -1) fail(p + ": link end already connected");
        owner[link] = 1;
    };
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const auto& nd = nodes[n];
        const std::string p = "network.nodes[" + std::to_string(n) + "]";
        if (nd.in_links.size() != nd.spec.n_in || nd.out_links.size() != nd.spec.n_out)
            fail(p + ": spec dimensions do not match link lists");
        nd.spec.validate();
        for (std::size_t i : nd.in_links) claim(dn_owner, i, p + ".in_links");
        for (std::size_t o : nd.out_links) claim(up_owner, o, p + ".out_links");
    }
    for (std::size_t s = 0; s < sources.size(); ++s)
        claim(up_owner, sources[s].link, "network.sources[" + std::to_string(s) + "]");
    for (std::size_t s = 0; s < sinks.size(); ++s)
        claim(dn_owner, sinks[s].link, "network.sinks[" + std::to_string(s) + "]");
}

std::size_t Network::link_index(const std::string& id) const {
    for (std::size_t i = 0; i < links.size(); ++i)
        if (links[i].id == id) return i;
    throw std::invalid_argument("unknown link id '" + id + "'");
}

namespace {

LinkValueCondition build_condition(const LinkSpec& link,
                                   const std::vector<double>& per_lane_density,
                                   const ConcaveFD& fd) {
    if (per_lane_density.empty())
        throw std::invalid_argument("link '" + link.id + "': empty density profile");
    const std::size_t n = per_lane_density.size();
    std::vector<double> breaks(n + 1), dens(n);
    for (std::size_t i = 0; i <= n; ++i)
        breaks[i] = link.length * static_cast<double>(i) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) dens[i] = per_lane_density[i] * link.lanes;
    return LinkValueCondition::from_density_profile(breaks, dens, 0.0, fd);
}

class FlhSolver final : public LinkSolver {
public:
    FlhSolver(const LinkSpec& link, const std::vector<double>& dens, double dt)
        : fd_(link.effective_fd()), state_(build_condition(link, dens, *fd_), fd_, dt) {}

    double demand() override { return state_.demand(); }
    double supply() override { return state_.supply(); }
    void advance(double in, double out) override { state_.commit_step(in, out); }
    std::uint64_t op_count() const override { return state_.op_count(); }
    std::uint64_t op_count(Side side) const override { return state_.cursor(side).op_count; }
    double probe(double x, double t) const override {
        FlhPointState ps{x};
        return solve_point_flh(state_.condition(), *fd_, x, t, ps);
    }

private:
    std::shared_ptr<const ConcaveFD> fd_;
    FlhLinkState state_;
};

// Unpruned reference: every boundary value is a full minimization over all
// value-condition components.
class LhSolver final : public LinkSolver {
public:
    LhSolver(const LinkSpec& link, const std::vector<double>& dens, double dt)
        : fd_(link.effective_fd()), cond_(build_condition(link, dens, *fd_)), dt_(dt) {
        n_up_ = cond_.initial_value(cond_.x0());
        n_dn_ = cond_.initial_value(cond_.xn());
    }

    double demand() override {
        std::size_t e = 0;
        const double v = solve_point_lh(cond_, *fd_, cond_.xn(), time_ + dt_, &e);
        ops_dn_ += e;
        return std::clamp((v - n_dn_) / dt_, 0.0, fd_->q_max());
    }
    double supply() override {
        std::size_t e = 0;
        const double v = solve_point_lh(cond_, *fd_, cond_.x0(), time_ + dt_, &e);
        ops_up_ += e;
        return std::clamp((v - n_up_) / dt_, 0.0, fd_->q_max());
    }
    void advance(double in, double out) override {
        cond_.append_boundary_flow(Side::up, in, dt_, *fd_);
        cond_.append_boundary_flow(Side::down, out, dt_, *fd_);
        n_up_ += in * dt_;
        n_dn_ += out * dt_;
        time_ += dt_;
    }
    std::uint64_t op_count() const override { return ops_up_ + ops_dn_; }
    std::uint64_t op_count(Side side) const override {
        return side == Side::up ? ops_up_ : ops_dn_;
    }
    double probe(double x, double t) const override {
        return solve_point_lh(cond_, *fd_, x, t);
    }

private:
    std::shared_ptr<const ConcaveFD> fd_;
    LinkValueCondition cond_;
    double dt_, time_ = 0, n_up_, n_dn_;
    std::uint64_t ops_up_ = 0, ops_dn_ = 0;
};

class CtmSolver final : public LinkSolver {
public:
    CtmSolver(const LinkSpec& link, const std::vector<double>& dens, double dt)
        : fd_(link.effective_fd()), ctm_(build_condition(link, dens, *fd_), fd_, dt) {}

    double demand() override { return ctm_.demand(); }
    double supply() override { return ctm_.supply(); }
    void advance(double in, double out) override { ctm_.advance(in, out); }
    double probe(double, double) const override {
        throw std::logic_error("ctm cannot reconstruct interior cumulative counts exactly");
    }

private:
    std::shared_ptr<const ConcaveFD> fd_;
    CtmLink ctm_;
};

class LtmSolver final : public LinkSolver {
public:
    LtmSolver(const LinkSpec& link, const std::vector<double>& dens, double dt)
        : fd_(link.effective_fd()), ltm_(build_condition(link, dens, *fd_), fd_, dt) {}

    double demand() override { return ltm_.demand(); }
    double supply() override { return ltm_.supply(); }
    void advance(double in, double out) override { ltm_.advance(in, out); }
    double probe(double, double) const override {
        throw std::logic_error(
            "ltm interior counts ignore rarefactions and are not reliable; refused");
    }

private:
    std::shared_ptr<const ConcaveFD> fd_;
    LtmLink ltm_;
};

}  // namespace

std::unique_ptr<LinkSolver> make_link_solver(Model model, const LinkSpec& link,
                                             const std::vector<double>& per_lane_density,
                                             double dt) {
    switch (model) {
        case Model::flh: return std::make_unique<FlhSolver>(link, per_lane_density, dt);
        case Model::lh: return std::make_unique<LhSolver>(link, per_lane_density, dt);
        case Model::ctm: return std::make_unique<CtmSolver>(link, per_lane_density, dt);
        case Model::ltm: return std::make_unique<LtmSolver>(link, per_lane_density, dt);
    }
    throw std::logic_error("unreachable");
}

Simulator::Simulator(const Network& net, const Scenario& sc) : net_(net), sc_(sc) {
    net_.validate();
    for (const auto& ov : sc_.source_overrides) {
        bool found = false;
        for (auto& src : net_.sources)
            if (src.link == ov.link) { src = ov; found = true; }
        if (!found)
            throw std::invalid_argument("scenario.demands: link '" +
                                        net_.links.at(ov.link).id + "' has no source");
    }
    for (const auto& ov : sc_.sink_overrides) {
        bool found = false;
        for (auto& snk : net_.sinks)
            if (snk.link == ov.link) { snk = ov; found = true; }
        if (!found)
            throw std::invalid_argument("scenario.supplies: link '" +
                                        net_.links.at(ov.link).id + "' has no sink");
    }
    if (sc_.initial_density.size() != net_.links.size())
        throw std::invalid_argument("scenario.initial: expected one profile per link");
    if (sc_.steps == 0) throw std::invalid_argument("scenario.steps: must be positive");
    for (std::size_t i = 0; i < net_.links.size(); ++i)
        solvers_.push_back(
            make_link_solver(sc_.model, net_.links[i], sc_.initial_density[i], sc_.dt));
}

SimulationResult Simulator::run() {
    using clock = std::chrono::steady_clock;
    const std::size_t nl = net_.links.size();
    result_ = SimulationResult{};
    result_.links.resize(nl);
    result_.dt = sc_.dt;
    result_.steps = sc_.steps;
    result_.model = sc_.model;
    std::vector<double> n_up(nl, 0.0), n_dn(nl, 0.0);
    std::vector<std::uint64_t> prev_up(nl, 0), prev_dn(nl, 0);

    std::vector<double> demand(nl), supply(nl), inflow(nl), outflow(nl);
    for (std::size_t step = 0; step < sc_.steps; ++step) {
        const double t = sc_.dt * static_cast<double>(step);

        const auto t0 = clock::now();
        for (std::size_t i = 0; i < nl; ++i) {
            demand[i] = solvers_[i]->demand();
            supply[i] = solvers_[i]->supply();
        }
        const auto t1 = clock::now();

        std::fill(inflow.begin(), inflow.end(), 0.0);
        std::fill(outflow.begin(), outflow.end(), 0.0);
        for (const auto& nd : net_.nodes) {
            std::vector<double> d(nd.spec.n_in), s(nd.spec.n_out);
            const bool green = nd.signal.green_at(t);
            for (std::size_t i = 0; i < nd.spec.n_in; ++i)
                d[i] = green ? demand[nd.in_links[i]] : 0.0;
            for (std::size_t o = 0; o < nd.spec.n_out; ++o) s[o] = supply[nd.out_links[o]];
            const NodeFlows f = resolve_node(nd.spec, d, s);
            double through_in = 0, through_out = 0;
            for (std::size_t i = 0; i < nd.spec.n_in; ++i) {
                outflow[nd.in_links[i]] = f.in[i];
                through_in += f.in[i];
            }
            for (std::size_t o = 0; o < nd.spec.n_out; ++o) {
                double q = 0;
                for (std::size_t i = 0; i < nd.spec.n_in; ++i) q += f.move[i][o];
                inflow[nd.out_links[o]] = q;
                through_out += q;
            }
            result_.conservation_residual = std::max(
                result_.conservation_residual, std::abs(through_in - through_out) * sc_.dt);
        }
        for (const auto& src : net_.sources)
            inflow[src.link] = std::min(src.rate_at(step), supply[src.link]);
        for (const auto& snk : net_.sinks)
            outflow[snk.link] = std::min(demand[snk.link], snk.capacity);
        const auto t2 = clock::now();

        for (std::size_t i = 0; i < nl; ++i) {
            solvers_[i]->advance(inflow[i], outflow[i]);
            n_up[i] += inflow[i] * sc_.dt;
            n_dn[i] += outflow[i] * sc_.dt;
            auto& tr = result_.links[i];
            tr.inflow.push_back(inflow[i]);
            tr.outflow.push_back(outflow[i]);
            tr.n_up.push_back(n_up[i]);
            tr.n_dn.push_back(n_dn[i]);
            const std::uint64_t ou = solvers_[i]->op_count(Side::up);
            const std::uint64_t od = solvers_[i]->op_count(Side::down);
            tr.ops.push_back(std::max(ou - prev_up[i], od - prev_dn[i]));
            prev_up[i] = ou;
            prev_dn[i] = od;
        }
        const auto t3 = clock::now();

        result_.link_phase_seconds +=
            std::chrono::duration<double>(t1 - t0).count() +
            std::chrono::duration<double>(t3 - t2).count();
        result_.node_phase_seconds += std::chrono::duration<double>(t2 - t1).count();
    }

    for (std::size_t i = 0; i < nl; ++i) result_.links[i].op_count = solvers_[i]->op_count();
    ran_ = true;
    return result_;
}

double Simulator::probe(std::size_t link, double x, double t) const {
    if (!ran_) throw std::logic_error("probe before run()");
    if (link >= solvers_.size()) throw std::invalid_argument("probe: link index out of range");
    if (t > sc_.dt * static_cast<double>(sc_.steps) + 1e-9)
        throw std::invalid_argument("probe: time beyond simulated horizon");
    return solvers_[link]->probe(x, t);
}

SimulationResult simulate(const Network& net, const Scenario& sc) {
    Simulator sim(net, sc);
    return sim.run();
}

double rmse_flows(const SimulationResult& a, const SimulationResult& b) {
    if (a.links.size() != b.links.size() || a.steps != b.steps)
        throw std::invalid_argument("results are not comparable");
    double acc = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.links.size(); ++i) {
        for (std::size_t s = 0; s < a.steps; ++s) {
            const double di = a.links[i].inflow[s] - b.links[i].inflow[s];
            const double dq = a.links[i].outflow[s] - b.links[i].outflow[s];
            acc += di * di + dq * dq;
            n += 2;
        }
    }
    return std::sqrt(acc / static_cast<double>(n));
}

Scenario random_scenario(Network& net, std::uint64_t seed, std::size_t blocks_per_link,
                         double dt, std::size_t steps, Model model) {
    std::mt19937_64 rng(seed);
    Scenario sc;
    sc.dt = dt;
    sc.steps = steps;
    sc.model = model;
    sc.seed = seed;
    for (const auto& link : net.links) {
        std::uniform_real_distribution<double> kd(0.0, link.fd_per_lane->k_jam());
        std::vector<double> dens(blocks_per_link);
        for (auto& k : dens) k = kd(rng);
        sc.initial_density.push_back(std::move(dens));
    }
    for (auto& src : net.sources) {
        std::uniform_real_distribution<double> qd(0.0, net.links[src.link].fd_per_lane->q_max() *
                                                           net.links[src.link].lanes);
        src.constant_rate = qd(rng);
        src.profile.clear();
    }
    return sc;
}

Network grid_network(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("grid needs rows and cols >= 1");
    Network net;
    auto fd = std::make_shared<TriangularFD>(15.0, -5.0, 0.12);
    auto add_link = [&](const std::string& id) {
        net.links.push_back(LinkSpec{id, 600.0, 1, fd});
        return net.links.size() - 1;
    };

    // Link layout: one west-entry link per row, east/south internal links,
    // exit links at the east and south edges.
    std::vector<std::vector<std::size_t>> east(rows), south(rows);
    std::vector<std::size_t> entry(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        entry[r] = add_link("in_r" + std::to_string(r));
        east[r].resize(cols);
        south[r].resize(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            east[r][c] = add_link("e_" + std::to_string(r) + "_" + std::to_string(c));
            south[r][c] = add_link("s_" + std::to_string(r) + "_" + std::to_string(c));
        }
    }

    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            NodeConnection nd;
            nd.id = "n_" + std::to_string(r) + "_" + std::to_string(c);
            nd.in_links.push_back(c == 0 ? entry[r] : east[r][c - 1]);
            if (r > 0) nd.in_links.push_back(south[r - 1][c]);
            nd.out_links = {east[r][c], south[r][c]};
            nd.spec.n_in = nd.in_links.size();
            nd.spec.n_out = 2;
            nd.spec.priority.assign(nd.spec.n_in, 1.0);
            nd.spec.beta.assign(nd.spec.n_in, {0.5, 0.5});
            // Stagger phases so neighbors are not synchronized.
            nd.signal = SignalTiming{60.0, 0.0, 40.0};
            nd.signal.green_start = static_cast<double>((r + c) % 3) * 10.0;
            nd.signal.green_end = nd.signal.green_start + 40.0;
            net.nodes.push_back(std::move(nd));
        }
    }

    for (std::size_t r = 0; r < rows; ++r) {
        net.sources.push_back(SourceSpec{entry[r], 0.3, {}});
        net.sinks.push_back(SinkSpec{east[r][cols - 1]});
    }
    for (std::size_t c = 0; c < cols; ++c)
        net.sinks.push_back(SinkSpec{south[rows - 1][c]});
    return net;
}

Network five_link_network() {
    Network net;
    auto fd = std::make_shared<TriangularFD>(TriangularFD::Params{
        .v_free = 30.0, .k_jam = 0.1297, .q_max = 0.556});
    for (const char* id : {"1", "2", "3", "4", "5"})
        net.links.push_back(LinkSpec{id, 1000.0, 1, fd});

    NodeConnection merge;
    merge.id = "merge";
    merge.in_links = {0, 3};
    merge.out_links = {1};
    merge.spec.n_in = 2;
    merge.spec.n_out = 1;
    merge.spec.priority = {fd->q_max(), fd->q_max()};
    merge.spec.beta = {{1.0}, {1.0}};
    net.nodes.push_back(std::move(merge));

    NodeConnection diverge;
    diverge.id = "diverge";
    diverge.in_links = {1};
    diverge.out_links = {2, 4};
    diverge.spec.n_in = 1;
    diverge.spec.n_out = 2;
    diverge.spec.priority = {fd->q_max()};
    diverge.spec.beta = {{0.75, 0.25}};
    net.nodes.push_back(std::move(diverge));

    net.sources.push_back(SourceSpec{0, 0.3, {}});
    net.sources.push_back(SourceSpec{3, 0.1, {}});
    net.sinks.push_back(SinkSpec{2});
    net.sinks.push_back(SinkSpec{4});
    return net;
}

}  // namespace flh
