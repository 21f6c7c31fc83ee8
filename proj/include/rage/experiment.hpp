#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rage/hamiltonians.hpp"
#include "rage/rage_state.hpp"

namespace rage {

/// Parsed key-value config with [section] headers; keys keep the line they
/// were defined on so value errors can cite it.
class ConfigFile {
public:
    static ConfigFile parse(std::istream& is, const std::string& name);
    static ConfigFile parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;

    const std::string& name() const { return name_; }
    std::string echo() const;  // canonical reprint for the metadata sidecar

private:
    struct Entry {
        std::string value;
        int line;
    };
    std::string name_;
    std::map<std::string, std::map<std::string, Entry>> sections_;

    [[noreturn]] void missing(const std::string& section, const std::string& key) const;
};

struct ModelBundle {
    HamiltonianSum hamiltonian;
    std::vector<std::pair<int, int>> graph_edges;  // set for graph-type models
    bool has_graph = false;
};

ModelBundle build_model(const ConfigFile& cfg);

struct AnsatzSpec {
    std::string backbone = "mps_open";  // mps_open | mps_closed | tts_subcubic | tts_chain
    int bond_dim = 2;
    int local_dim = 2;
    bool graph_enhanced = false;
    std::string fixed_phases = "none";  // none | graph
    bool optimize_tensors = true;
    bool optimize_rotations = true;
    bool optimize_phases = true;
    int restarts = 1;
};

AnsatzSpec parse_ansatz(const ConfigFile& cfg);

RageState build_initial_state(const AnsatzSpec& spec, int n_sites,
                              const std::vector<std::pair<int, int>>& graph_edges, Rng& rng);

enum class CountMode { complex_raw, mixed, real_total, flat_discounted };

/// Parameter-count formulas per ansatz kind; `mixed` counts backbone complex
/// entries plus the graph layer's real parameters, `flat_discounted` drops
/// boundary isometries that only change local bases.
long long param_count(const AnsatzSpec& spec, int n_sites, CountMode mode);

CountMode count_mode_from_string(const std::string& s);

struct RunResult {
    int exit_code = 0;
    std::string csv_path;
};

/// Executes the configured experiment and writes the CSV plus a metadata
/// sidecar (<output>.meta).
RunResult run_experiment(const ConfigFile& cfg);

/// Oracle-equivalence self-test battery; prints one pass/fail line per check
/// and returns the number of failures.
int run_selftest(std::ostream& os);

}  // namespace rage
