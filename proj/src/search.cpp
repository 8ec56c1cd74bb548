#include "quphox/search.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace quphox {

SearchConfig SearchConfig::defaults() {
    SearchConfig config;
    config.base.num_paths = 4;
    config.base.mode_cutoff = 2;
    config.base.sources = {Spdc{0, 1, 3, std::nullopt}, Spdc{2, 3, 3, std::nullopt}};
    config.base.include_double_emission = true;
    config.base.detection.trigger_path = 3;
    config.base.detection.trigger_oam = std::nullopt; // herald on presence
    config.base.detection.coincidence_paths = {0, 1, 2};
    config.toolbox = Toolbox::standard();
    config.objective = GhzPattern{3, true};
    return config;
}

void validate(const SearchConfig& config) {
    if (config.budget == 0) throw std::invalid_argument("config: budget must be > 0");
    if (config.max_elements < 1) throw std::invalid_argument("config: max_elements must be >= 1");
    if (config.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (config.phase_lattice != 8) throw std::invalid_argument("config: phase lattice is fixed at 8");
    if (config.toolbox.empty()) throw std::invalid_argument("config: empty toolbox");
    validate(config.base, config.max_elements);
    validate(config.objective);
    if (const auto* target = std::get_if<TargetStateObjective>(&config.objective)) {
        if (target->target.order() !=
            static_cast<int>(config.base.detection.coincidence_paths.size())) {
            throw std::invalid_argument("config: target state order does not match detection");
        }
    }
    if (const auto* gate = std::get_if<GatePattern>(&config.objective)) {
        if (gate->control_path >= config.base.num_paths || gate->target_path >= config.base.num_paths) {
            throw std::invalid_argument("config: gate paths outside path set");
        }
    }
}

// --- deterministic sampling ---------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t worker_seed(std::uint64_t master, int worker) {
    return splitmix64(master ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(worker + 1)));
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    // Rejection sampling; std::uniform_int_distribution is not portable.
    if (n == 0) throw std::invalid_argument("bounded: n must be > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r = rng();
    while (r >= limit) r = rng();
    return r % n;
}

namespace {

Element instantiate_template(const ToolboxTemplate& tmpl, const SearchConfig& config,
                             std::mt19937_64& rng) {
    using K = ToolboxTemplate::Kind;
    const int paths = config.base.num_paths;
    const int cutoff = config.base.mode_cutoff;
    switch (tmpl.kind) {
        case K::kBeamSplitter:
        case K::kParitySorter: {
            int a = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(paths)));
            int b = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(paths - 1)));
            if (b >= a) ++b;
            if (a > b) std::swap(a, b);
            if (tmpl.kind == K::kBeamSplitter) return Element{BeamSplitter{a, b}};
            return Element{ParitySorter{a, b}};
        }
        case K::kReflection:
            return Element{Reflection{static_cast<int>(bounded(rng, static_cast<std::uint64_t>(paths)))}};
        case K::kDove: {
            int p = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(paths)));
            int k = static_cast<int>(bounded(rng, 8));
            return Element{DovePrism{p, k}};
        }
        case K::kHologram: {
            int p = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(paths)));
            int raw = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(4 * cutoff)));
            int shift = raw - 2 * cutoff;
            if (shift >= 0) ++shift; // skip the zero no-op
            return Element{Hologram{p, shift}};
        }
        case K::kPhaseShifter: {
            int p = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(paths)));
            int k = static_cast<int>(bounded(rng, 8));
            return Element{PhaseShifter{p, k}};
        }
        case K::kComposite: {
            int arity = tmpl.arity();
            if (arity > paths) throw std::invalid_argument("composite arity exceeds path count");
            // Ordered injective path assignment.
            std::vector<int> pool;
            for (int p = 0; p < paths; ++p) pool.push_back(p);
            std::vector<int> assignment;
            for (int k = 0; k < arity; ++k) {
                size_t pick = static_cast<size_t>(bounded(rng, pool.size()));
                assignment.push_back(pool[pick]);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            }
            Element instance{tmpl.composite};
            return instance.with_paths(assignment);
        }
    }
    throw std::logic_error("unknown template kind");
}

} // namespace

Setup random_setup(const SearchConfig& config, const Toolbox& toolbox, std::mt19937_64& rng) {
    Setup setup = config.base;
    const std::uint64_t count = 1 + bounded(rng, static_cast<std::uint64_t>(config.max_elements));
    setup.elements.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        const size_t t = static_cast<size_t>(bounded(rng, toolbox.size()));
        setup.elements.push_back(instantiate_template(toolbox.templates()[t], config, rng));
    }
    if (config.search_trigger_mode) {
        int m = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(2 * config.base.mode_cutoff + 1)));
        setup.detection.trigger_oam = m - config.base.mode_cutoff;
    }
    return setup;
}

// --- objective plumbing -------------------------------------------------------

int cheap_check_dims(const Objective& objective) {
    return std::visit(
        [](const auto& obj) -> int {
            using T = std::decay_t<decltype(obj)>;
            if constexpr (std::is_same_v<T, GhzPattern>) {
                return obj.dims;
            } else if constexpr (std::is_same_v<T, SrvTargetObjective> ||
                                 std::is_same_v<T, SrvScanObjective>) {
                return 2;
            } else {
                return 1; // target-state: no sound mode-count prune
            }
        },
        objective);
}

std::optional<Certificate> evaluate_objective(const Setup& setup, const PhotonicState& heralded,
                                              const Objective& objective, SrvRegistry& registry,
                                              bool* novel) {
    if (novel) *novel = true;
    return std::visit(
        [&](const auto& obj) -> std::optional<Certificate> {
            using T = std::decay_t<decltype(obj)>;
            if constexpr (std::is_same_v<T, GhzPattern>) {
                auto cert = ghz_match(heralded, obj.dims, obj.allow_mavericks);
                if (!cert) return std::nullopt;
                return Certificate{*cert};
            } else if constexpr (std::is_same_v<T, SrvTargetObjective>) {
                auto hit = srv_objective(heralded, obj);
                if (!hit) return std::nullopt;
                return Certificate{SrvCertificate{hit->srv}};
            } else if constexpr (std::is_same_v<T, SrvScanObjective>) {
                auto hit = srv_objective(heralded, obj, registry);
                if (!hit) return std::nullopt;
                if (novel) *novel = hit->novel;
                return Certificate{SrvCertificate{hit->srv}};
            } else if constexpr (std::is_same_v<T, TargetStateObjective>) {
                if (heralded.empty()) return std::nullopt;
                double f = heralded.fidelity(obj.target);
                if (f + 1e-12 < obj.min_fidelity) return std::nullopt;
                return Certificate{FidelityCertificate{f}};
            } else {
                auto cert = gate_match(setup, obj);
                if (!cert) return std::nullopt;
                return Certificate{*cert};
            }
        },
        objective);
}

namespace {

/// Objective predicate used by greedy simplification. Scan hits pin the SRV
/// found at discovery so the stored certificate stays re-derivable.
std::function<bool(const Setup&)> simplify_predicate(const Objective& objective,
                                                     const Certificate& certificate) {
    if (std::holds_alternative<SrvScanObjective>(objective)) {
        Srv pinned = std::get<SrvCertificate>(certificate).srv;
        return [pinned](const Setup& candidate) {
            PhotonicState heralded = simulate(candidate);
            if (heralded.empty() || !cheap_state_check(heralded, 2)) return false;
            Srv srv = heralded.srv();
            if (srv != pinned) return false;
            for (int rank : srv.ranks) {
                if (rank < 2) return false;
            }
            return true;
        };
    }
    return [objective](const Setup& candidate) {
        SrvRegistry scratch;
        PhotonicState heralded;
        if (!std::holds_alternative<GatePattern>(objective)) {
            heralded = simulate(candidate);
            if (heralded.empty()) return false;
            if (!cheap_state_check(heralded, cheap_check_dims(objective))) return false;
        }
        return evaluate_objective(candidate, heralded, objective, scratch, nullptr).has_value();
    };
}

struct EngineState {
    const SearchConfig* config = nullptr;
    SrvRegistry registry;
    std::mutex emit_mutex;
    std::vector<Solution> solutions;
    std::atomic<std::uint64_t> solution_count{0};
    std::atomic<bool> done{false};

    std::mutex toolbox_mutex;
    std::shared_ptr<const Toolbox> toolbox;

    std::atomic<std::uint64_t> rejected_mixing{0};
    std::atomic<std::uint64_t> rejected_empty{0};
    std::atomic<std::uint64_t> rejected_cheap{0};
    std::atomic<std::uint64_t> rejected_objective{0};
    std::atomic<std::uint64_t> generated{0};
    std::atomic<std::uint64_t> progress{0};
};

/// One trial through the staged pipeline. Returns true when a solution was
/// emitted.
bool run_trial(EngineState& engine, const Setup& candidate, std::uint64_t trial, int worker,
               const std::string& seed_path,
               const std::chrono::steady_clock::time_point& started,
               const std::function<void(const Solution&)>& on_solution) {
    const SearchConfig& config = *engine.config;
    const bool is_gate = std::holds_alternative<GatePattern>(config.objective);
    PhotonicState heralded;

    if (!is_gate) {
        if (!mixes_pairs(candidate)) {
            engine.rejected_mixing.fetch_add(1, std::memory_order_relaxed);
            return false;
        }
        heralded = simulate(candidate);
        if (heralded.empty()) {
            engine.rejected_empty.fetch_add(1, std::memory_order_relaxed);
            return false;
        }
        if (!cheap_state_check(heralded, cheap_check_dims(config.objective))) {
            engine.rejected_cheap.fetch_add(1, std::memory_order_relaxed);
            return false;
        }
    }

    bool novel = true;
    auto certificate =
        evaluate_objective(candidate, heralded, config.objective, engine.registry, &novel);
    if (!certificate) {
        engine.rejected_objective.fetch_add(1, std::memory_order_relaxed);
        return false;
    }
    const bool scan = std::holds_alternative<SrvScanObjective>(config.objective);
    if (scan && !novel) {
        // Already-seen SRV: a hit for the objective, not a new report.
        engine.rejected_objective.fetch_add(1, std::memory_order_relaxed);
        return false;
    }

    Solution solution;
    solution.setup = candidate;
    solution.trial = trial;
    solution.worker = worker;
    solution.seed_path = seed_path;
    solution.novel = novel;

    if (config.simplify_solutions && !candidate.elements.empty()) {
        solution.setup = simplify(candidate, simplify_predicate(config.objective, *certificate));
    }
    // Re-derive the certificate from the reported (possibly reduced) setup so
    // re-simulation reproduces it bit-exactly.
    if (!is_gate) {
        solution.heralded = simulate(solution.setup);
        SrvRegistry scratch;
        certificate = evaluate_objective(solution.setup, solution.heralded,
                                         std::holds_alternative<SrvScanObjective>(config.objective)
                                             ? Objective{SrvTargetObjective{{std::get<SrvCertificate>(*certificate).srv}}}
                                             : config.objective,
                                         scratch, nullptr);
    } else {
        SrvRegistry scratch;
        certificate = evaluate_objective(solution.setup, solution.heralded, config.objective,
                                         scratch, nullptr);
    }
    if (!certificate) throw std::logic_error("simplified setup no longer satisfies the objective");
    solution.certificate = *certificate;
    solution.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    {
        std::lock_guard<std::mutex> lock(engine.emit_mutex);
        engine.solutions.push_back(solution);
        if (on_solution) on_solution(solution);
    }
    engine.solution_count.fetch_add(1, std::memory_order_relaxed);

    if (config.augment_toolbox) {
        std::lock_guard<std::mutex> lock(engine.toolbox_mutex);
        Toolbox updated = *engine.toolbox;
        if (augment_toolbox(updated, solution)) {
            engine.toolbox = std::make_shared<const Toolbox>(std::move(updated));
        }
    }
    return true;
}

SearchResult finalize(EngineState& engine) {
    SearchResult result;
    result.counters.generated = engine.generated.load();
    result.counters.rejected_mixing = engine.rejected_mixing.load();
    result.counters.rejected_empty = engine.rejected_empty.load();
    result.counters.rejected_cheap = engine.rejected_cheap.load();
    result.counters.rejected_objective = engine.rejected_objective.load();
    result.counters.solutions = engine.solution_count.load();
    result.solutions = std::move(engine.solutions);
    std::sort(result.solutions.begin(), result.solutions.end(),
              [](const Solution& a, const Solution& b) { return a.trial < b.trial; });
    result.srv_registry = engine.registry.snapshot();
    result.final_toolbox = *engine.toolbox;
    return result;
}

} // namespace

SearchResult run_search(const SearchConfig& config,
                        const std::function<void(const Solution&)>& on_solution,
                        const std::atomic<bool>* stop) {
    validate(config);
    EngineState engine;
    engine.config = &config;
    engine.toolbox = std::make_shared<const Toolbox>(config.toolbox);
    const auto started = std::chrono::steady_clock::now();

    const int workers = config.workers;
    std::vector<std::thread> pool;
    auto work = [&](int worker) {
        std::mt19937_64 rng(worker_seed(config.seed, worker));
        const std::string seed_path = std::to_string(config.seed) + ":" + std::to_string(worker);
        const std::uint64_t begin = config.budget * static_cast<std::uint64_t>(worker) /
                                    static_cast<std::uint64_t>(workers);
        const std::uint64_t end = config.budget * static_cast<std::uint64_t>(worker + 1) /
                                  static_cast<std::uint64_t>(workers);
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            if (engine.done.load(std::memory_order_relaxed)) break;
            if (stop && stop->load(std::memory_order_relaxed)) break;
            std::shared_ptr<const Toolbox> toolbox;
            {
                std::lock_guard<std::mutex> lock(engine.toolbox_mutex);
                toolbox = engine.toolbox;
            }
            Setup candidate = random_setup(config, *toolbox, rng);
            engine.generated.fetch_add(1, std::memory_order_relaxed);
            run_trial(engine, candidate, trial, worker, seed_path, started, on_solution);
            if (config.max_solutions > 0 && engine.solution_count.load() >= config.max_solutions) {
                engine.done.store(true, std::memory_order_relaxed);
                break;
            }
            if (config.progress_every > 0) {
                std::uint64_t n = engine.progress.fetch_add(1, std::memory_order_relaxed) + 1;
                if (n % config.progress_every == 0) {
                    std::lock_guard<std::mutex> lock(engine.emit_mutex);
                    std::cerr << "trials=" << n << " solutions=" << engine.solution_count.load()
                              << "\n";
                }
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (std::thread& t : pool) t.join();
    }
    return finalize(engine);
}

SearchResult run_exhaustive(const SearchConfig& config, int max_len,
                            const std::function<void(const Solution&)>& on_solution) {
    validate(config);
    if (max_len < 1) throw std::invalid_argument("run_exhaustive: max_len must be >= 1");

    // Every concrete instantiation of every template.
    std::vector<Element> instances;
    const int paths = config.base.num_paths;
    const int cutoff = config.base.mode_cutoff;
    using K = ToolboxTemplate::Kind;
    for (const ToolboxTemplate& tmpl : config.toolbox.templates()) {
        switch (tmpl.kind) {
            case K::kBeamSplitter:
            case K::kParitySorter:
                for (int a = 0; a < paths; ++a) {
                    for (int b = a + 1; b < paths; ++b) {
                        if (tmpl.kind == K::kBeamSplitter) instances.push_back(Element{BeamSplitter{a, b}});
                        else instances.push_back(Element{ParitySorter{a, b}});
                    }
                }
                break;
            case K::kReflection:
                for (int p = 0; p < paths; ++p) instances.push_back(Element{Reflection{p}});
                break;
            case K::kDove:
                for (int p = 0; p < paths; ++p) {
                    for (int k = 0; k < 8; ++k) instances.push_back(Element{DovePrism{p, k}});
                }
                break;
            case K::kHologram:
                for (int p = 0; p < paths; ++p) {
                    for (int s = -2 * cutoff; s <= 2 * cutoff; ++s) {
                        if (s != 0) instances.push_back(Element{Hologram{p, s}});
                    }
                }
                break;
            case K::kPhaseShifter:
                for (int p = 0; p < paths; ++p) {
                    for (int k = 0; k < 8; ++k) instances.push_back(Element{PhaseShifter{p, k}});
                }
                break;
            case K::kComposite: {
                // All ordered injective path assignments.
                std::vector<int> assignment(static_cast<size_t>(tmpl.arity()), -1);
                std::vector<bool> used(static_cast<size_t>(paths), false);
                std::function<void(size_t)> rec = [&](size_t depth) {
                    if (depth == assignment.size()) {
                        Element instance{tmpl.composite};
                        instances.push_back(instance.with_paths(assignment));
                        return;
                    }
                    for (int p = 0; p < paths; ++p) {
                        if (used[static_cast<size_t>(p)]) continue;
                        used[static_cast<size_t>(p)] = true;
                        assignment[depth] = p;
                        rec(depth + 1);
                        used[static_cast<size_t>(p)] = false;
                    }
                };
                rec(0);
                break;
            }
        }
    }

    EngineState engine;
    engine.config = &config;
    engine.toolbox = std::make_shared<const Toolbox>(config.toolbox);
    const auto started = std::chrono::steady_clock::now();

    std::uint64_t trial = 0;
    for (int len = 1; len <= max_len && !engine.done.load(); ++len) {
        std::vector<size_t> odometer(static_cast<size_t>(len), 0);
        bool carry = false;
        while (!carry && !engine.done.load()) {
            Setup candidate = config.base;
            for (size_t digit : odometer) candidate.elements.push_back(instances[digit]);
            engine.generated.fetch_add(1);
            run_trial(engine, candidate, trial++, 0, "exhaustive", started, on_solution);
            if (config.max_solutions > 0 && engine.solution_count.load() >= config.max_solutions) {
                engine.done.store(true);
            }
            // Advance the odometer.
            carry = true;
            for (size_t k = odometer.size(); k-- > 0;) {
                if (++odometer[k] < instances.size()) {
                    carry = false;
                    break;
                }
                odometer[k] = 0;
            }
        }
    }
    return finalize(engine);
}

bool augment_toolbox(Toolbox& toolbox, const Solution& solution) {
    Element composite = to_composite(solution.setup, "sol" + std::to_string(solution.trial));
    const Composite& comp = std::get<Composite>(composite.value);
    if (comp.inner.empty()) return false;
    return toolbox.add(ToolboxTemplate{ToolboxTemplate::Kind::kComposite, comp});
}

} // namespace quphox
