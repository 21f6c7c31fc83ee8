#include "rage/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <mutex>
#include <optional>

#include "rage/circuits.hpp"
#include "rage/peps.hpp"
#include "rage/serialize.hpp"
#include "rage/state_vector.hpp"
#include "rage/tree_topology.hpp"

namespace rage {

ConfigFile ConfigFile::parse(std::istream& is, const std::string& name) {
    ConfigFile cfg;
    cfg.name_ = name;
    std::string line;
    std::string section;  // top-level keys live in the "" section
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::string body = line.substr(first);
        while (!body.empty() && (body.back() == '\r' || body.back() == ' ' || body.back() == '\t')) {
            body.pop_back();
        }
        if (body.front() == '[') {
            const auto close = body.find(']');
            if (close == std::string::npos || close != body.size() - 1) {
                throw std::runtime_error(name + ":" + std::to_string(line_no) +
                                         ": malformed section header");
            }
            section = body.substr(1, close - 1);
            continue;
        }
        const auto space = body.find_first_of(" \t");
        if (space == std::string::npos) {
            throw std::runtime_error(name + ":" + std::to_string(line_no) +
                                     ": expected 'key value'");
        }
        const std::string key = body.substr(0, space);
        const auto value_start = body.find_first_not_of(" \t", space);
        cfg.sections_[section][key] = Entry{body.substr(value_start), line_no};
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    return parse(is, path);
}

void ConfigFile::missing(const std::string& section, const std::string& key) const {
    throw std::runtime_error(name_ + ": missing key '" + key + "' in section [" + section + "]");
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto sit = sections_.find(section);
    return sit != sections_.end() && sit->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key) const {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) {
        missing(section, key);
    }
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) {
        missing(section, key);
    }
    return kit->second.value;
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) {
        return fallback;
    }
    const auto& entry = sections_.at(section).at(key);
    try {
        return std::stoi(entry.value);
    } catch (const std::exception&) {
        throw std::runtime_error(name_ + ":" + std::to_string(entry.line) +
                                 ": expected an integer for '" + key + "'");
    }
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    if (!has(section, key)) {
        return fallback;
    }
    const auto& entry = sections_.at(section).at(key);
    try {
        return std::stod(entry.value);
    } catch (const std::exception&) {
        throw std::runtime_error(name_ + ":" + std::to_string(entry.line) +
                                 ": expected a number for '" + key + "'");
    }
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
    if (!has(section, key)) {
        return fallback;
    }
    const auto& entry = sections_.at(section).at(key);
    if (entry.value == "true" || entry.value == "1") {
        return true;
    }
    if (entry.value == "false" || entry.value == "0") {
        return false;
    }
    throw std::runtime_error(name_ + ":" + std::to_string(entry.line) +
                             ": expected true/false for '" + key + "'");
}

std::uint64_t ConfigFile::get_u64(const std::string& section, const std::string& key,
                                  std::uint64_t fallback) const {
    if (!has(section, key)) {
        return fallback;
    }
    const auto& entry = sections_.at(section).at(key);
    try {
        return std::stoull(entry.value);
    } catch (const std::exception&) {
        throw std::runtime_error(name_ + ":" + std::to_string(entry.line) +
                                 ": expected an unsigned integer for '" + key + "'");
    }
}

std::vector<double> ConfigFile::get_doubles(const std::string& section,
                                            const std::string& key) const {
    if (!has(section, key)) {
        missing(section, key);
    }
    const auto& entry = sections_.at(section).at(key);
    std::istringstream ss(entry.value);
    std::vector<double> out;
    double v = 0.0;
    while (ss >> v) {
        out.push_back(v);
    }
    if (out.empty()) {
        throw std::runtime_error(name_ + ":" + std::to_string(entry.line) +
                                 ": expected a list of numbers for '" + key + "'");
    }
    return out;
}

std::string ConfigFile::echo() const {
    std::ostringstream os;
    for (const auto& [section, entries] : sections_) {
        if (!section.empty()) {
            os << "[" << section << "]\n";
        }
        for (const auto& [key, entry] : entries) {
            os << key << " " << entry.value << "\n";
        }
    }
    return os.str();
}

namespace {

std::vector<std::pair<int, int>> parse_edges(const std::string& text) {
    // "0-1,1-2,2-3" style lists.
    std::vector<std::pair<int, int>> edges;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            throw std::runtime_error("malformed edge list entry: " + item);
        }
        edges.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
    }
    return edges;
}

std::vector<std::pair<int, int>> ring_edges(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        edges.emplace_back(i, (i + 1) % n);
    }
    return edges;
}

}  // namespace

ModelBundle build_model(const ConfigFile& cfg) {
    const std::string builder = cfg.get("model", "builder");
    ModelBundle out;
    if (builder == "ising_2d") {
        out.hamiltonian = ising_2d(cfg.get_int("model", "lx", 2), cfg.get_int("model", "ly", 2),
                                   cfg.get_double("model", "j", 1.0),
                                   cfg.get_double("model", "b", 1.0),
                                   cfg.get_bool("model", "periodic", false));
    } else if (builder == "heisenberg_2d") {
        out.hamiltonian = heisenberg_2d(cfg.get_int("model", "lx", 2),
                                        cfg.get_int("model", "ly", 2),
                                        cfg.get_bool("model", "periodic", false));
    } else if (builder == "spin_glass_2d") {
        out.hamiltonian = spin_glass_2d(cfg.get_int("model", "lx", 2),
                                        cfg.get_int("model", "ly", 2),
                                        cfg.get_u64("model", "seed", 1));
    } else if (builder == "long_range_ising") {
        out.hamiltonian =
            long_range_ising(cfg.get_int("model", "n", 8), cfg.get_double("model", "b", 1.0));
    } else if (builder == "graph" || builder == "disturbed_graph") {
        std::vector<std::pair<int, int>> edges;
        int n = cfg.get_int("model", "n", 0);
        if (cfg.has("model", "edges")) {
            edges = parse_edges(cfg.get("model", "edges"));
            for (const auto& [a, b] : edges) {
                n = std::max({n, a + 1, b + 1});
            }
        } else if (cfg.get_or("model", "shape", "") == "ring") {
            edges = ring_edges(n);
        } else {
            throw std::runtime_error("graph models need 'edges' or 'shape ring'");
        }
        out.graph_edges = edges;
        out.has_graph = true;
        if (builder == "graph") {
            out.hamiltonian = graph_hamiltonian(n, edges);
        } else {
            std::vector<double> fields(n, cfg.get_double("model", "h", 0.0));
            if (cfg.has("model", "field_seed")) {
                Rng rng(cfg.get_u64("model", "field_seed", 1));
                const double scale = cfg.get_double("model", "h", 0.1);
                for (auto& f : fields) {
                    f = scale * rng.uniform(-1.0, 1.0);
                }
            }
            const std::string axis = cfg.get_or("model", "axis", "Z");
            out.hamiltonian = disturbed_graph_hamiltonian(n, edges, fields, axis[0]);
        }
    } else if (builder == "kitaev_perturbed") {
        PerturbedToricModel model = kitaev_perturbed(
            cfg.get_int("model", "lx", 2), cfg.get_int("model", "ly", 3),
            cfg.get_double("model", "j", 1.0), cfg.get_double("model", "b", 0.0),
            cfg.get_or("model", "axis", "Z")[0]);
        out.hamiltonian = std::move(model.hamiltonian);
        out.graph_edges = std::move(model.graph_edges);
        out.has_graph = true;
    } else {
        throw std::runtime_error("unknown model builder: " + builder);
    }
    return out;
}

AnsatzSpec parse_ansatz(const ConfigFile& cfg) {
    AnsatzSpec spec;
    spec.backbone = cfg.get_or("ansatz", "backbone", "mps_open");
    spec.bond_dim = cfg.get_int("ansatz", "bond_dim", 2);
    spec.local_dim = cfg.get_int("ansatz", "local_dim", 2);
    spec.graph_enhanced = cfg.get_bool("ansatz", "graph_enhanced", false);
    spec.fixed_phases = cfg.get_or("ansatz", "fixed_phases", "none");
    spec.restarts = cfg.get_int("ansatz", "restarts", 1);
    const std::string schedule = cfg.get_or("ansatz", "schedule", "tensors,rotations,phases");
    spec.optimize_tensors = schedule.find("tensors") != std::string::npos;
    spec.optimize_rotations = schedule.find("rotations") != std::string::npos;
    spec.optimize_phases = schedule.find("phases") != std::string::npos;
    return spec;
}

RageState build_initial_state(const AnsatzSpec& spec, int n_sites,
                              const std::vector<std::pair<int, int>>& graph_edges, Rng& rng) {
    AdjacencyPhases phases(n_sites, spec.local_dim);
    if (spec.fixed_phases == "graph") {
        if (graph_edges.empty()) {
            throw std::runtime_error("fixed graph phases requested but the model has no graph");
        }
        phases = graph_state_phases(n_sites, graph_edges);
    } else if (spec.fixed_phases != "none") {
        throw std::runtime_error("unknown fixed_phases mode: " + spec.fixed_phases);
    }
    LocalRotations rotations(n_sites);

    if (spec.backbone == "mps_open" || spec.backbone == "mps_closed") {
        const Boundary b = (spec.backbone == "mps_open") ? Boundary::open : Boundary::closed;
        MpsState m = (spec.fixed_phases == "graph" && spec.bond_dim == 1)
                         ? MpsState::product_state(
                               b, std::vector<VectorXcd>(
                                      n_sites, (VectorXcd(2) << 1.0 / std::sqrt(2.0),
                                                1.0 / std::sqrt(2.0))
                                                   .finished()))
                         : MpsState::random(b, n_sites, spec.bond_dim, spec.local_dim, rng);
        return RageState(std::move(m), std::move(phases), std::move(rotations));
    }
    if (spec.backbone == "tts_subcubic" || spec.backbone == "tts_chain") {
        const TreeTopology topo = (spec.backbone == "tts_subcubic")
                                      ? subcubic_tree(n_sites, spec.bond_dim, spec.local_dim)
                                      : chain_tree(n_sites, spec.bond_dim, spec.local_dim);
        TtsState t = TtsState::random(topo, spec.local_dim, rng);
        return RageState(std::move(t), std::move(phases), std::move(rotations));
    }
    throw std::runtime_error("unknown backbone kind: " + spec.backbone);
}

CountMode count_mode_from_string(const std::string& s) {
    if (s == "complex") return CountMode::complex_raw;
    if (s == "mixed") return CountMode::mixed;
    if (s == "real") return CountMode::real_total;
    if (s == "flat") return CountMode::flat_discounted;
    throw std::runtime_error("unknown count mode: " + s);
}

namespace {

long long backbone_complex_count(const AnsatzSpec& spec, int n) {
    const long long q = spec.local_dim;
    const long long d = spec.bond_dim;
    if (spec.backbone == "mps_closed") {
        return q * n * d * d;
    }
    if (spec.backbone == "mps_open") {
        return q * (2 * d + static_cast<long long>(n - 2) * d * d);
    }
    // Tree kinds: sum of tensor sizes from the topology.
    const TreeTopology topo = (spec.backbone == "tts_subcubic")
                                  ? subcubic_tree(n, spec.bond_dim, spec.local_dim)
                                  : chain_tree(n, spec.bond_dim, spec.local_dim);
    long long total = 0;
    for (int v : topo.internal_vertices()) {
        long long size = 1;
        for (int e : topo.incident[v]) {
            size *= (topo.edges[e].dim == 0) ? q : static_cast<long long>(topo.edges[e].dim);
        }
        total += size;
    }
    return total;
}

// Flat-tree count: variable bonds capped by the reachable rank; tensors that
// are full isometries (pure basis changes) near the boundary are dropped.
long long flat_discounted_mps_count(int n, int bond, int q) {
    std::vector<long long> bonds(n + 1, 1);
    for (int i = 1; i < n; ++i) {
        double left = std::pow(static_cast<double>(q), i);
        double right = std::pow(static_cast<double>(q), n - i);
        bonds[i] = static_cast<long long>(std::min({left, right, static_cast<double>(bond)}));
    }
    long long total = 0;
    for (int i = 1; i <= n; ++i) {
        const long long bl = bonds[i - 1];
        const long long br = bonds[i];
        const bool redundant = (q * bl <= br) || (q * br <= bl);
        if (!redundant) {
            total += q * bl * br;
        }
    }
    return total;
}

}  // namespace

long long param_count(const AnsatzSpec& spec, int n, CountMode mode) {
    const long long wgs_reals =
        static_cast<long long>(n) * (n - 1) / 2 + 4LL * n;  // phases + rotations
    switch (mode) {
        case CountMode::complex_raw:
            return backbone_complex_count(spec, n);
        case CountMode::mixed:
            return backbone_complex_count(spec, n) + (spec.graph_enhanced ? wgs_reals : 0);
        case CountMode::real_total:
            return 2 * backbone_complex_count(spec, n) + (spec.graph_enhanced ? wgs_reals : 0);
        case CountMode::flat_discounted: {
            const long long base = flat_discounted_mps_count(n, spec.bond_dim, spec.local_dim);
            return base + (spec.graph_enhanced ? wgs_reals / 2 : 0);
        }
    }
    throw std::logic_error("unreachable");
}

namespace {

std::string format_energy(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.11e", v);
    return buf;
}

std::string format_fidelity(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9e", v);
    return buf;
}

void write_atomic(const std::string& path, const std::string& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) {
            throw std::runtime_error("cannot write output file: " + tmp);
        }
        os << body;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw std::runtime_error("cannot move output into place: " + path);
    }
}

struct GroundRun {
    RageState state;
    std::vector<double> round_energies;
    double final_energy;
};

GroundRun optimize_ground_state(const ModelBundle& model, const AnsatzSpec& spec,
                                std::uint64_t seed, double rel_tol, int max_rounds) {
    const int n = model.hamiltonian.n_sites;
    std::optional<GroundRun> best;
    for (int restart = 0; restart < std::max(1, spec.restarts); ++restart) {
        Rng rng(seed + static_cast<std::uint64_t>(restart) * 7919ULL);
        RageState init = build_initial_state(spec, n, model.graph_edges, rng);
        AlternatingSchedule schedule;
        schedule.tensors = spec.optimize_tensors;
        schedule.rotations = spec.optimize_rotations && spec.graph_enhanced;
        schedule.phases =
            spec.optimize_phases && spec.graph_enhanced && spec.fixed_phases == "none";
        schedule.gradient_refinement = schedule.rotations || schedule.phases;
        if (!spec.graph_enhanced) {
            schedule.rotations = false;
            schedule.phases = false;
            schedule.gradient_refinement = false;
        }
        AlternatingResult result =
            rage_alternating_minimize(init, model.hamiltonian, schedule, rel_tol, max_rounds);
        GroundRun run{std::move(result.state), {}, 0.0};
        run.round_energies = std::move(result.energy_trace);
        run.final_energy = run.round_energies.back();
        if (!best.has_value() || run.final_energy < best->final_energy) {
            best = std::move(run);
        }
    }
    return std::move(*best);
}

int threads_from_env() {
    const char* env = std::getenv("RAGE_THREADS");
    if (env == nullptr) {
        return 1;
    }
    const int n = std::atoi(env);
    return std::max(1, n);
}

}  // namespace

RunResult run_experiment(const ConfigFile& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string kind = cfg.get("", "experiment");
    const std::string output = cfg.get("", "output");
    const std::uint64_t seed = cfg.get_u64("", "seed", 0);
    const double rel_tol = cfg.get_double("optimizer", "rel_tol", 1e-9);
    const int max_rounds = cfg.get_int("optimizer", "max_rounds", 50);

    std::ostringstream csv;
    if (kind == "ground_state") {
        const ModelBundle model = build_model(cfg);
        const AnsatzSpec spec = parse_ansatz(cfg);
        const GroundRun run = optimize_ground_state(model, spec, seed, rel_tol, max_rounds);
        const long long params = param_count(
            spec, model.hamiltonian.n_sites,
            spec.graph_enhanced ? CountMode::mixed : CountMode::complex_raw);
        csv << "step,energy,param_count\n";
        for (std::size_t i = 0; i < run.round_energies.size(); ++i) {
            csv << i << "," << format_energy(run.round_energies[i]) << "," << params << "\n";
        }
    } else if (kind == "circuit_fidelity") {
        const int n_sites = cfg.get_int("circuit", "n_sites", 10);
        const int n_blocks = cfg.get_int("circuit", "n_blocks", 20);
        const int n_seeds = cfg.get_int("circuit", "n_seeds", 10);
        const int bond = cfg.get_int("ansatz", "bond_dim", 2);
        std::vector<std::vector<double>> mps_traces(n_seeds), rage_traces(n_seeds);
        const int n_threads = std::min(threads_from_env(), n_seeds);
        std::vector<std::thread> pool;
        std::size_t cursor = 0;
        std::mutex cursor_mutex;
        auto worker = [&]() {
            while (true) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lock(cursor_mutex);
                    if (cursor >= static_cast<std::size_t>(n_seeds)) {
                        return;
                    }
                    i = cursor++;
                }
                const std::uint64_t s = seed + i;
                const Circuit c = random_circuit(n_sites, n_blocks, s);
                Rng rng(s ^ 0x9e3779b97f4a7c15ULL);
                MpsState m = MpsState::random(Boundary::closed, n_sites, bond, 2, rng);
                RageState initial(std::move(m), AdjacencyPhases(n_sites, 2),
                                  LocalRotations(n_sites));
                const FidelityTraces traces = simulate_with_fidelity(c, initial, {});
                mps_traces[i] = traces.mps;
                rage_traces[i] = traces.rage;
            }
        };
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
        csv << "block,mean_fidelity_mps,mean_fidelity_rage\n";
        for (int blk = 0; blk < n_blocks; ++blk) {
            const std::size_t gate_idx = static_cast<std::size_t>(2 * blk + 1);
            double mps_sum = 0.0, rage_sum = 0.0;
            for (int i = 0; i < n_seeds; ++i) {
                mps_sum += mps_traces[i][gate_idx];
                rage_sum += rage_traces[i][gate_idx];
            }
            csv << (blk + 1) << "," << format_fidelity(mps_sum / n_seeds) << ","
                << format_fidelity(rage_sum / n_seeds) << "\n";
        }
    } else if (kind == "oracle_check") {
        std::ostringstream lines;
        const int failures = run_selftest(lines);
        csv << "check,passed\n";
        std::istringstream ss(lines.str());
        std::string line;
        while (std::getline(ss, line)) {
            const bool ok = line.rfind("[pass]", 0) == 0;
            const std::string name = line.substr(line.find(' ') + 1);
            csv << name << "," << (ok ? 1 : 0) << "\n";
        }
        std::fputs(lines.str().c_str(), stdout);
        if (failures > 0) {
            write_atomic(output, csv.str());
            return {1, output};
        }
    } else if (kind == "model_scan") {
        const AnsatzSpec spec = parse_ansatz(cfg);
        const std::string param = cfg.get("scan", "param");
        const std::vector<double> values = cfg.get_doubles("scan", "values");
        csv << param << ",energy,exact_energy,first_excited\n";
        for (double v : values) {
            // Rebuild the model with the scanned parameter overridden.
            std::istringstream patched(cfg.echo());
            ConfigFile cfg2 = ConfigFile::parse(patched, cfg.name());
            std::ostringstream echo2;
            echo2 << cfg2.echo();
            std::string text = echo2.str();
            // The scan parameter lives in [model].
            std::istringstream base(text);
            std::ostringstream replaced;
            std::string line;
            bool in_model = false;
            bool written = false;
            while (std::getline(base, line)) {
                if (!line.empty() && line.front() == '[') {
                    in_model = (line == "[model]");
                }
                if (in_model && line.rfind(param + " ", 0) == 0) {
                    replaced << param << " " << format_energy(v) << "\n";
                    written = true;
                } else {
                    replaced << line << "\n";
                }
            }
            if (!written) {
                throw std::runtime_error("scan parameter '" + param + "' not present in [model]");
            }
            std::istringstream patched2(replaced.str());
            const ConfigFile cfg3 = ConfigFile::parse(patched2, cfg.name());
            const ModelBundle model = build_model(cfg3);
            const GroundRun run = optimize_ground_state(model, spec, seed, rel_tol, max_rounds);
            double exact = 0.0, excited = 0.0;
            if (model.hamiltonian.n_sites <= 12) {
                const GroundStateResult g = exact_ground_state(model.hamiltonian);
                exact = g.energy;
                excited = g.first_excited;
            }
            csv << format_energy(v) << "," << format_energy(run.final_energy) << ","
                << format_energy(exact) << "," << format_energy(excited) << "\n";
        }
    } else {
        throw std::runtime_error("unknown experiment kind: " + kind);
    }

    write_atomic(output, csv.str());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream meta;
    meta << "library rage 1.0\n";
    meta << "wall_seconds " << seconds << "\n";
    meta << "config_begin\n" << cfg.echo() << "config_end\n";
    write_atomic(output + ".meta", meta.str());
    return {0, output};
}

namespace {

bool check(std::ostream& os, const std::string& name, bool ok) {
    os << (ok ? "[pass] " : "[FAIL] ") << name << "\n";
    return ok;
}

}  // namespace

int run_selftest(std::ostream& os) {
    int failures = 0;
    Rng rng(20240811ULL);

    // MPS reduced density vs dense partial trace.
    {
        const MpsState m = MpsState::random(Boundary::closed, 6, 3, 2, rng);
        const StateVector psi = expand(m);
        const MatrixXcd direct = mps_reduced_density(m, {1, 4});
        const MatrixXcd reference = partial_trace(psi, {1, 4});
        failures += !check(os, "mps_reduced_density_oracle",
                           (direct - reference).cwiseAbs().maxCoeff() < 1e-9);
    }
    // TTS expectation vs dense oracle.
    {
        const TreeTopology topo = subcubic_tree(6, 3);
        const TtsState t = TtsState::random(topo, 2, rng);
        const HamiltonianSum h = ising_2d(2, 3, 1.0, 0.7, false);
        std::vector<ProductOperator> terms;
        Complex acc(0, 0);
        for (const auto& term : h.terms) {
            acc += tts_product_value(t, ProductOperator::from_pauli(term));
        }
        const double direct = acc.real() / tts_norm_squared(t);
        const double reference = exact_expectation(expand(t), h);
        failures += !check(os, "tts_expectation_oracle", std::abs(direct - reference) < 1e-9);
    }
    // Graph-enhanced MPS reduced density vs oracle.
    {
        const MpsState m = MpsState::random(Boundary::closed, 6, 2, 2, rng);
        AdjacencyPhases phases(6, 2);
        for (int a = 0; a < 6; ++a) {
            for (int b = a + 1; b < 6; ++b) {
                phases.set_phase(a, b, rng.uniform(0.0, 2.0 * M_PI));
            }
        }
        RageState r(m, phases, LocalRotations(6));
        const MatrixXcd direct = rage_reduced_density(r, {2, 5});
        const MatrixXcd reference = partial_trace(expand(r), {2, 5});
        failures += !check(os, "rage_mps_reduced_density_oracle",
                           (direct - reference).cwiseAbs().maxCoeff() < 1e-9);
    }
    // Graph state stabilizers through the full layer.
    {
        const auto edges = ring_edges(6);
        const AdjacencyPhases phases = graph_state_phases(6, edges);
        const VectorXcd plus = (VectorXcd(2) << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0))
                                   .finished();
        const MpsState m = MpsState::product_state(Boundary::open,
                                                   std::vector<VectorXcd>(6, plus));
        RageState r(m, phases, LocalRotations(6));
        const StateVector psi = expand(r);
        bool ok = true;
        for (const auto& k : stabilizer_operators(6, edges)) {
            HamiltonianSum h(6);
            h.terms.push_back(k);
            ok = ok && std::abs(exact_expectation(psi, h) - 1.0) < 1e-10;
        }
        failures += !check(os, "graph_state_stabilizers", ok);
    }
    // PEPS boundary contraction vs dense contraction.
    {
        const PepsState p = PepsState::random(3, 3, 2, 2, rng);
        const Complex exact = peps_exact_contract(p);
        const auto report = peps_boundary_contract(p, 64);
        failures += !check(os, "peps_boundary_exact",
                           std::abs(exact - report.value) / std::abs(exact) < 1e-10);
    }
    return failures;
}

}  // namespace rage
