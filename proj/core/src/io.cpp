#include "flh/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace flh {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw std::invalid_argument(path + ": " + msg);
}

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional = {}) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const char* k : required)
        if (!obj.contains(k)) fail(path, std::string("missing key '") + k + "'");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : required) known = known || it.key() == k;
        for (const char* k : optional) known = known || it.key() == k;
        if (!known) fail(path + "." + it.key(), "unknown key");
    }
}

double get_num(const json& obj, const std::string& path, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::shared_ptr<const ConcaveFD> read_fd(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type")) fail(path, "expected an object with 'type'");
    const std::string type = j.at("type").get<std::string>();
    // Wrap constructor-level complaints (inconsistent parameters, concavity)
    // with the JSON path; path-qualified parse errors pass through untouched.
    auto wrap = [&](auto make) -> std::shared_ptr<const ConcaveFD> {
        try {
            return make();
        } catch (const std::exception& e) {
            fail(path, e.what());
        }
    };
    if (type == "triangular") {
        require_keys(j, path, {"type"}, {"v", "w", "k_jam", "k_crit", "q_max"});
        TriangularFD::Params p;
        if (j.contains("v")) p.v_free = get_num(j, path, "v");
        if (j.contains("w")) {
            // Accept congested speed either signed or as a magnitude.
            double w = get_num(j, path, "w");
            p.w_cong = w > 0 ? -w : w;
        }
        if (j.contains("k_jam")) p.k_jam = get_num(j, path, "k_jam");
        if (j.contains("k_crit")) p.k_crit = get_num(j, path, "k_crit");
        if (j.contains("q_max")) p.q_max = get_num(j, path, "q_max");
        return wrap([&] { return std::make_shared<TriangularFD>(p); });
    }
    if (type == "greenshields") {
        require_keys(j, path, {"type", "v", "k_jam"});
        const double v = get_num(j, path, "v"), kj = get_num(j, path, "k_jam");
        return wrap([&] { return std::make_shared<GreenshieldsFD>(v, kj); });
    }
    if (type == "piecewise_linear") {
        require_keys(j, path, {"type", "k", "q"});
        if (!j.at("k").is_array() || !j.at("q").is_array())
            fail(path, "'k' and 'q' must be arrays");
        const auto ks = j.at("k").get<std::vector<double>>();
        const auto qs = j.at("q").get<std::vector<double>>();
        if (ks.size() != qs.size()) fail(path, "'k' and 'q' must have equal length");
        std::vector<std::pair<double, double>> bp;
        for (std::size_t i = 0; i < ks.size(); ++i) bp.emplace_back(ks[i], qs[i]);
        return wrap([&] { return std::make_shared<PiecewiseLinearFD>(std::move(bp)); });
    }
    fail(path + ".type", "unknown diagram type '" + type + "'");
}

json write_fd(const ConcaveFD& fd) {
    if (const auto* t = dynamic_cast<const TriangularFD*>(&fd))
        return {{"type", "triangular"},
                {"v", t->v_free()},
                {"w", t->w_cong()},
                {"k_jam", t->k_jam()}};
    if (const auto* g = dynamic_cast<const GreenshieldsFD*>(&fd))
        return {{"type", "greenshields"}, {"v", g->v_free()}, {"k_jam", g->k_jam()}};
    if (const auto* p = dynamic_cast<const PiecewiseLinearFD*>(&fd)) {
        std::vector<double> ks, qs;
        for (const auto& [k, q] : p->breakpoints()) { ks.push_back(k); qs.push_back(q); }
        return {{"type", "piecewise_linear"}, {"k", ks}, {"q", qs}};
    }
    throw std::logic_error("unserializable diagram type");
}

json parse(const std::string& text, const std::string& root) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(root, "malformed JSON");
    return j;
}

}  // namespace

Network read_network_json(const std::string& text) {
    const json j = parse(text, "network");
    require_keys(j, "network", {"links"}, {"nodes", "sources", "sinks"});
    Network net;

    const auto& links = j.at("links");
    if (!links.is_array()) fail("network.links", "expected an array");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string p = "network.links[" + std::to_string(i) + "]";
        const auto& lj = links[i];
        require_keys(lj, p, {"id", "length", "fd"}, {"lanes"});
        LinkSpec l;
        l.id = lj.at("id").get<std::string>();
        l.length = get_num(lj, p, "length");
        l.lanes = lj.contains("lanes") ? lj.at("lanes").get<int>() : 1;
        l.fd_per_lane = read_fd(lj.at("fd"), p + ".fd");
        net.links.push_back(std::move(l));
    }

    auto link_at = [&](const json& v, const std::string& p) -> std::size_t {
        if (!v.is_string()) fail(p, "expected a link id string");
        try {
            return net.link_index(v.get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(p, e.what());
        }
    };

    for (std::size_t n = 0; j.contains("nodes") && n < j.at("nodes").size(); ++n) {
        const std::string p = "network.nodes[" + std::to_string(n) + "]";
        const auto& nj = j.at("nodes")[n];
        require_keys(nj, p, {"id", "in", "out"}, {"priority", "beta", "signal"});
        NodeConnection nd;
        nd.id = nj.at("id").get<std::string>();
        for (std::size_t i = 0; i < nj.at("in").size(); ++i)
            nd.in_links.push_back(link_at(nj.at("in")[i], p + ".in[" + std::to_string(i) + "]"));
        for (std::size_t o = 0; o < nj.at("out").size(); ++o)
            nd.out_links.push_back(
                link_at(nj.at("out")[o], p + ".out[" + std::to_string(o) + "]"));
        nd.spec.n_in = nd.in_links.size();
        nd.spec.n_out = nd.out_links.size();
        if (nj.contains("priority"))
            nd.spec.priority = nj.at("priority").get<std::vector<double>>();
        else
            nd.spec.priority.assign(nd.spec.n_in, 1.0);
        if (nj.contains("beta"))
            nd.spec.beta = nj.at("beta").get<std::vector<std::vector<double>>>();
        else
            nd.spec.beta.assign(nd.spec.n_in, std::vector<double>(
                                                  nd.spec.n_out, 1.0 / nd.spec.n_out));
        if (nj.contains("signal")) {
            const auto& sj = nj.at("signal");
            require_keys(sj, p + ".signal", {"cycle", "green_start", "green_end"});
            nd.signal.cycle = get_num(sj, p + ".signal", "cycle");
            nd.signal.green_start = get_num(sj, p + ".signal", "green_start");
            nd.signal.green_end = get_num(sj, p + ".signal", "green_end");
        }
        try {
            nd.spec.validate();
        } catch (const std::invalid_argument& e) {
            fail(p, e.what());
        }
        net.nodes.push_back(std::move(nd));
    }

    for (std::size_t s = 0; j.contains("sources") && s < j.at("sources").size(); ++s) {
        const std::string p = "network.sources[" + std::to_string(s) + "]";
        const auto& sj = j.at("sources")[s];
        require_keys(sj, p, {"link"}, {"rate", "profile"});
        SourceSpec src;
        src.link = link_at(sj.at("link"), p + ".link");
        if (sj.contains("rate")) src.constant_rate = get_num(sj, p, "rate");
        if (sj.contains("profile")) src.profile = sj.at("profile").get<std::vector<double>>();
        net.sources.push_back(std::move(src));
    }

    for (std::size_t s = 0; j.contains("sinks") && s < j.at("sinks").size(); ++s) {
        const std::string p = "network.sinks[" + std::to_string(s) + "]";
        const auto& sj = j.at("sinks")[s];
        require_keys(sj, p, {"link"}, {"capacity"});
        SinkSpec snk;
        snk.link = link_at(sj.at("link"), p + ".link");
        if (sj.contains("capacity")) snk.capacity = get_num(sj, p, "capacity");
        net.sinks.push_back(snk);
    }

    try {
        net.validate();
    } catch (const std::invalid_argument&) {
        throw;
    }
    return net;
}

Scenario read_scenario_json(const std::string& text, const Network& net) {
    const json j = parse(text, "scenario");
    require_keys(j, "scenario", {"initial", "dt", "steps"},
                 {"model", "seed", "demands", "supplies"});
    Scenario sc;
    sc.dt = get_num(j, "scenario", "dt");
    if (!(sc.dt > 0)) fail("scenario.dt", "must be positive");
    sc.steps = j.at("steps").get<std::size_t>();
    if (j.contains("model")) {
        try {
            sc.model = model_from_string(j.at("model").get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail("scenario.model", e.what());
        }
    }
    if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();

    sc.initial_density.assign(net.links.size(), {});
    const auto& init = j.at("initial");
    if (!init.is_array()) fail("scenario.initial", "expected an array");
    for (std::size_t i = 0; i < init.size(); ++i) {
        const std::string p = "scenario.initial[" + std::to_string(i) + "]";
        require_keys(init[i], p, {"link", "density"});
        std::size_t li;
        try {
            li = net.link_index(init[i].at("link").get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(p + ".link", e.what());
        }
        sc.initial_density[li] = init[i].at("density").get<std::vector<double>>();
        if (sc.initial_density[li].empty()) fail(p + ".density", "empty profile");
    }
    for (std::size_t i = 0; i < net.links.size(); ++i)
        if (sc.initial_density[i].empty())
            fail("scenario.initial", "no profile for link '" + net.links[i].id + "'");

    for (std::size_t s = 0; j.contains("demands") && s < j.at("demands").size(); ++s) {
        const std::string p = "scenario.demands[" + std::to_string(s) + "]";
        const auto& dj = j.at("demands")[s];
        require_keys(dj, p, {"link"}, {"rate", "profile"});
        SourceSpec src;
        try {
            src.link = net.link_index(dj.at("link").get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(p + ".link", e.what());
        }
        if (dj.contains("rate")) src.constant_rate = get_num(dj, p, "rate");
        if (dj.contains("profile")) src.profile = dj.at("profile").get<std::vector<double>>();
        sc.source_overrides.push_back(std::move(src));
    }
    for (std::size_t s = 0; j.contains("supplies") && s < j.at("supplies").size(); ++s) {
        const std::string p = "scenario.supplies[" + std::to_string(s) + "]";
        const auto& sj = j.at("supplies")[s];
        require_keys(sj, p, {"link", "capacity"});
        SinkSpec snk;
        try {
            snk.link = net.link_index(sj.at("link").get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(p + ".link", e.what());
        }
        snk.capacity = get_num(sj, p, "capacity");
        sc.sink_overrides.push_back(snk);
    }
    return sc;
}

std::string write_network_json(const Network& net) {
    json j;
    j["links"] = json::array();
    for (const auto& l : net.links)
        j["links"].push_back({{"id", l.id},
                              {"length", l.length},
                              {"lanes", l.lanes},
                              {"fd", write_fd(*l.fd_per_lane)}});
    j["nodes"] = json::array();
    for (const auto& nd : net.nodes) {
        json in = json::array(), out = json::array();
        for (auto i : nd.in_links) in.push_back(net.links[i].id);
        for (auto o : nd.out_links) out.push_back(net.links[o].id);
        json nj = {{"id", nd.id}, {"in", in}, {"out", out},
                   {"priority", nd.spec.priority}, {"beta", nd.spec.beta}};
        if (nd.signal.cycle > 0)
            nj["signal"] = {{"cycle", nd.signal.cycle},
                            {"green_start", nd.signal.green_start},
                            {"green_end", nd.signal.green_end}};
        j["nodes"].push_back(std::move(nj));
    }
    j["sources"] = json::array();
    for (const auto& s : net.sources) {
        json sj = {{"link", net.links[s.link].id}};
        if (s.profile.empty())
            sj["rate"] = s.constant_rate;
        else
            sj["profile"] = s.profile;
        j["sources"].push_back(std::move(sj));
    }
    j["sinks"] = json::array();
    for (const auto& s : net.sinks)
        j["sinks"].push_back({{"link", net.links[s.link].id}, {"capacity", s.capacity}});
    return j.dump(2);
}

std::string write_scenario_json(const Scenario& sc) {
    json j;
    j["dt"] = sc.dt;
    j["steps"] = sc.steps;
    j["model"] = to_string(sc.model);
    j["seed"] = sc.seed;
    j["initial"] = json::array();
    for (std::size_t i = 0; i < sc.initial_density.size(); ++i)
        j["initial"].push_back(
            {{"link", std::to_string(i)}, {"density", sc.initial_density[i]}});
    return j.dump(2);
}

Network load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return read_network_json(ss.str());
}

Scenario load_scenario_file(const std::string& path, const Network& net) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return read_scenario_json(ss.str(), net);
}

namespace {
std::string fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}
}  // namespace

namespace {

// Deterministic row order: time outer, link id inner.
std::vector<std::size_t> by_link_id(const Network& net) {
    std::vector<std::size_t> order(net.links.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return net.links[a].id < net.links[b].id;
    });
    return order;
}

}  // namespace

void write_flows_csv(std::ostream& os, const Network& net, const SimulationResult& res) {
    os << "link,step,time,inflow,outflow,n_up,n_dn\n";
    const auto order = by_link_id(net);
    for (std::size_t s = 0; s < res.steps; ++s)
        for (std::size_t i : order) {
            const auto& tr = res.links[i];
            os << net.links[i].id << ',' << s << ',' << fixed9(res.dt * (s + 1)) << ','
               << fixed9(tr.inflow[s]) << ',' << fixed9(tr.outflow[s]) << ','
               << fixed9(tr.n_up[s]) << ',' << fixed9(tr.n_dn[s]) << '\n';
        }
}

void write_ops_csv(std::ostream& os, const Network& net, const SimulationResult& res) {
    os << "link,step,evals\n";
    const auto order = by_link_id(net);
    for (std::size_t s = 0; s < res.steps; ++s)
        for (std::size_t i : order)
            os << net.links[i].id << ',' << s << ',' << res.links[i].ops[s] << '\n';
}

void write_timing_csv(std::ostream& os, const SimulationResult& res) {
    os << "phase,seconds\n";
    os << "link," << fixed9(res.link_phase_seconds) << '\n';
    os << "node," << fixed9(res.node_phase_seconds) << '\n';
}

void write_probes_csv(std::ostream& os, const std::vector<ProbeRow>& rows) {
    os << "link,x,t,count\n";
    for (const auto& r : rows)
        os << r.link << ',' << fixed9(r.x) << ',' << fixed9(r.t) << ',' << fixed9(r.value)
           << '\n';
}

}  // namespace flh
