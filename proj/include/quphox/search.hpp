#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "quphox/objectives.hpp"

namespace quphox {

struct SearchConfig {
    Setup base;            // paths, sources, detection, cutoff, double emission
    Toolbox toolbox = Toolbox::standard();
    Objective objective = GhzPattern{};
    std::uint64_t budget = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    int max_elements = 15;
    int phase_lattice = 8; // fixed; validated
    bool augment_toolbox = false;
    bool simplify_solutions = true;  // simplify before reporting (toggleable)
    bool search_trigger_mode = false;
    std::uint64_t max_solutions = 0; // 0 = unlimited
    std::uint64_t progress_every = 0; // stderr progress line period, 0 = off

    /// Two dim-3 crystals on (a,b) and (c,d), coincidence {a,b,c}, trigger on
    /// d's presence, cutoff 2, standard toolbox.
    static SearchConfig defaults();
};

void validate(const SearchConfig& config);

/// Per-trial abort accounting; the stages sum to the number of generated
/// setups.
struct StageCounters {
    std::uint64_t generated = 0;
    std::uint64_t rejected_mixing = 0;
    std::uint64_t rejected_empty = 0;
    std::uint64_t rejected_cheap = 0;
    std::uint64_t rejected_objective = 0;
    std::uint64_t solutions = 0;

    std::uint64_t sum_of_stages() const {
        return rejected_mixing + rejected_empty + rejected_cheap + rejected_objective + solutions;
    }
};

struct Solution {
    Setup setup;             // simplified unless simplify_solutions = false
    Certificate certificate; // re-derivable from `setup` bit-exactly
    PhotonicState heralded;
    std::uint64_t trial = 0;
    int worker = 0;
    std::string seed_path;
    double wall_seconds = 0.0; // reporting only, never serialized to JSONL
    bool novel = true;         // scan runs: SRV novelty at discovery time
};

struct SearchResult {
    StageCounters counters;
    std::vector<Solution> solutions; // sorted by trial index
    std::vector<Srv> srv_registry;   // scan runs
    Toolbox final_toolbox;
};

/// Uniform draw: element count in 1..max_elements, each element a uniform
/// template with uniform parameters and path assignment. The sampling order
/// is part of the determinism contract.
Setup random_setup(const SearchConfig& config, const Toolbox& toolbox, std::mt19937_64& rng);

/// The search loop: generate -> mixing prune -> simulate -> empty prune ->
/// mode-count prune -> full objective -> simplify & report (optionally
/// appending the solution to the shared toolbox as a composite).
///
/// `on_solution` (may be null) streams solutions as they are found, from
/// worker threads under a lock. `stop` (may be null) requests a drain.
SearchResult run_search(const SearchConfig& config,
                        const std::function<void(const Solution&)>& on_solution = nullptr,
                        const std::atomic<bool>* stop = nullptr);

/// Full enumeration of every element chain up to max_len over the toolbox's
/// concrete instantiations, through the same pipeline and counters.
SearchResult run_exhaustive(const SearchConfig& config, int max_len,
                            const std::function<void(const Solution&)>& on_solution = nullptr);

/// Appends the solution's setup as a composite template; duplicate canonical
/// chains are a no-op (returns false).
bool augment_toolbox(Toolbox& toolbox, const Solution& solution);

/// Deterministic helpers shared by the engine and tests.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t worker_seed(std::uint64_t master, int worker);
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n);

/// Evaluates the full objective on a simulated setup (the "expensive" stage).
/// For scan objectives the registry records the SRV; `novel` reports
/// insert-if-absent. Gate objectives ignore `heralded`.
std::optional<Certificate> evaluate_objective(const Setup& setup, const PhotonicState& heralded,
                                              const Objective& objective, SrvRegistry& registry,
                                              bool* novel);

/// Mode-count threshold the cheap prune uses for this objective.
int cheap_check_dims(const Objective& objective);

} // namespace quphox
