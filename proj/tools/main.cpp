#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "quphox/block_growth.hpp"
#include "quphox/solutions_io.hpp"
#include "quphox/version.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_interrupt(int) { g_stop.store(true); }

constexpr int kExitSuccess = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string default_out_dir() {
    if (const char* env = std::getenv("QUPHOX_OUT")) return env;
    return ".";
}

quphox::Setup load_setup(const std::string& path) { return quphox::parse_setup(read_file(path)); }

quphox::PhotonicState load_state_arg(const std::string& text) {
    auto state = quphox::PhotonicState::parse(text);
    if (!state) throw std::invalid_argument("cannot parse state: " + text);
    return *state;
}

// --- search -----------------------------------------------------------------

int cmd_search(const std::string& config_path, const nlohmann::json& overrides,
               const std::string& out_dir, std::uint64_t progress_every) {
    quphox::SearchConfig config;
    try {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) j = nlohmann::json::parse(read_file(config_path));
        for (const auto& [key, value] : overrides.items()) j[key] = value; // flags win
        config = quphox::config_from_json(j);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    config.progress_every = progress_every;

    std::filesystem::create_directories(out_dir);
    const std::string solutions_path = out_dir + "/solutions.jsonl";
    std::ofstream solutions(solutions_path, std::ios::binary | std::ios::trunc);
    if (!solutions) {
        std::cerr << "cannot write " << solutions_path << "\n";
        return kExitUsage;
    }

    std::signal(SIGINT, handle_interrupt);
    const std::string started = quphox::utc_timestamp();
    const auto t0 = std::chrono::steady_clock::now();
    quphox::SearchResult result = quphox::run_search(
        config,
        [&solutions](const quphox::Solution& solution) {
            quphox::write_solution_line(solutions, solution);
            solutions.flush(); // crash-tolerant append-only log
        },
        &g_stop);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    solutions.close();

    nlohmann::json manifest =
        quphox::manifest_to_json(config, result, started, quphox::utc_timestamp(), elapsed);
    quphox::write_file_atomic(out_dir + "/manifest.json", manifest.dump(2) + "\n");

    std::cerr << "generated=" << result.counters.generated
              << " mixing=" << result.counters.rejected_mixing
              << " empty=" << result.counters.rejected_empty
              << " cheap=" << result.counters.rejected_cheap
              << " objective=" << result.counters.rejected_objective
              << " solutions=" << result.counters.solutions << "\n";
    for (const quphox::Srv& srv : result.srv_registry) std::cerr << "srv " << srv.to_string() << "\n";

    const bool scan = std::holds_alternative<quphox::SrvScanObjective>(config.objective);
    if (scan || result.counters.solutions > 0) return kExitSuccess;
    return kExitNegative;
}

// --- verify / srv / simplify --------------------------------------------------

int report_state_objective(const quphox::PhotonicState& state, const std::string& objective_text) {
    if (objective_text.empty() || objective_text == "srv") {
        std::cout << state.srv().to_string() << "\n";
        return kExitSuccess;
    }
    auto objective = quphox::parse_objective(objective_text);
    if (!objective) {
        std::cerr << "bad objective: " << objective_text << "\n";
        return kExitUsage;
    }
    quphox::SrvRegistry registry;
    auto cert = quphox::evaluate_objective({}, state, *objective, registry, nullptr);
    if (!cert) {
        std::cout << "no match\n";
        return kExitNegative;
    }
    std::cout << quphox::certificate_to_json(*cert).dump(2) << "\n";
    return kExitSuccess;
}

int cmd_verify(const std::string& setup_path, const std::string& state_text,
               const std::string& objective_text) {
    try {
        if (!state_text.empty()) {
            return report_state_objective(load_state_arg(state_text), objective_text);
        }
        quphox::Setup setup = load_setup(setup_path);
        quphox::PhotonicState heralded = quphox::simulate(setup);
        if (objective_text.empty() || objective_text == "srv") {
            if (heralded.empty()) {
                std::cout << "no match\n";
                return kExitNegative;
            }
            std::cout << heralded.srv().to_string() << "\n";
            return kExitSuccess;
        }
        auto objective = quphox::parse_objective(objective_text);
        if (!objective) {
            std::cerr << "bad objective: " << objective_text << "\n";
            return kExitUsage;
        }
        quphox::SrvRegistry registry;
        auto cert = quphox::evaluate_objective(setup, heralded, *objective, registry, nullptr);
        if (!cert) {
            std::cout << "no match\n";
            return kExitNegative;
        }
        std::cout << quphox::certificate_to_json(*cert).dump(2) << "\n";
        return kExitSuccess;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int cmd_simplify(const std::string& setup_path, const std::string& objective_text,
                 const std::string& out_path) {
    try {
        quphox::Setup setup = load_setup(setup_path);
        auto objective = quphox::parse_objective(objective_text);
        if (!objective) {
            std::cerr << "bad objective: " << objective_text << "\n";
            return kExitUsage;
        }
        auto satisfies = [&](const quphox::Setup& candidate) {
            quphox::PhotonicState heralded;
            if (!std::holds_alternative<quphox::GatePattern>(*objective)) {
                heralded = quphox::simulate(candidate);
                if (heralded.empty()) return false;
            }
            quphox::SrvRegistry scratch;
            return quphox::evaluate_objective(candidate, heralded, *objective, scratch, nullptr)
                .has_value();
        };
        quphox::Setup reduced;
        try {
            reduced = quphox::simplify(setup, satisfies);
        } catch (const std::domain_error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitNegative;
        }
        std::string text = quphox::to_text(reduced);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            quphox::write_file_atomic(out_path, text);
        }
        return kExitSuccess;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

// --- grow ---------------------------------------------------------------------

int cmd_grow(const std::string& target_path, double threshold, int max_blocks, std::uint64_t seed,
             int restarts, bool new_only, const std::string& out_dir) {
    quphox::GrowResult result;
    quphox::TargetOp target;
    try {
        target = quphox::TargetOp::load_file(target_path);
        quphox::GrowOptions options;
        options.seed = seed;
        options.restarts = restarts;
        options.reoptimize_all = !new_only;
        result = quphox::grow_until(target, threshold, max_blocks, options);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    nlohmann::json j;
    j["converged"] = result.converged;
    j["fidelity"] = result.fidelity;
    j["threshold"] = threshold;
    j["target_rescale_factor"] = target.rescale_factor;
    nlohmann::json blocks = nlohmann::json::array();
    for (const quphox::Block& block : result.blocks) {
        blocks.push_back(std::vector<double>(block.angles.begin(), block.angles.end()));
    }
    j["blocks"] = blocks;
    j["trace"] = result.trace;

    std::filesystem::create_directories(out_dir);
    quphox::write_file_atomic(out_dir + "/growth.json", j.dump(2) + "\n");
    std::ostringstream csv;
    csv << "iteration,fidelity\n";
    for (size_t k = 0; k < result.trace.size(); ++k) csv << k << "," << result.trace[k] << "\n";
    quphox::write_file_atomic(out_dir + "/trace.csv", csv.str());

    std::cout << (result.converged ? "converged" : "unconverged")
              << " blocks=" << result.blocks.size() << " fidelity=" << result.fidelity << "\n";
    return result.converged ? kExitSuccess : kExitNegative;
}

// --- render ---------------------------------------------------------------------

std::string element_label(const quphox::Element& element) {
    return std::visit(
        [](const auto& e) -> std::string {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, quphox::BeamSplitter>) return "BS";
            else if constexpr (std::is_same_v<T, quphox::Reflection>) return "RF";
            else if constexpr (std::is_same_v<T, quphox::DovePrism>) return "DV" + std::to_string(e.k);
            else if constexpr (std::is_same_v<T, quphox::Hologram>)
                return "H" + std::string(e.shift > 0 ? "+" : "") + std::to_string(e.shift);
            else if constexpr (std::is_same_v<T, quphox::PhaseShifter>)
                return "PS" + std::to_string(e.k);
            else if constexpr (std::is_same_v<T, quphox::ParitySorter>) return "LI";
            else return "C:" + e.name;
        },
        element.value);
}

void append_dashes(std::string& row, size_t count) {
    for (size_t k = 0; k < count; ++k) row += "─";
}

int cmd_render(const std::string& setup_path) {
    try {
        quphox::Setup setup = load_setup(setup_path);
        std::vector<std::string> rows(static_cast<size_t>(setup.num_paths));
        for (int p = 0; p < setup.num_paths; ++p) {
            std::string& row = rows[static_cast<size_t>(p)];
            row = quphox::path_name(p) + " ";
            bool sourced = false;
            for (size_t s = 0; s < setup.sources.size(); ++s) {
                if (setup.sources[s].path_a == p || setup.sources[s].path_b == p) {
                    row += "═SPDC#" + std::to_string(s + 1) + "═";
                    sourced = true;
                }
            }
            if (!sourced) append_dashes(row, 8);
        }
        for (const quphox::Element& element : setup.elements) {
            std::string label = "[" + element_label(element) + "]";
            auto touched = element.paths_touched();
            for (int p = 0; p < setup.num_paths; ++p) {
                std::string& row = rows[static_cast<size_t>(p)];
                if (std::find(touched.begin(), touched.end(), p) != touched.end()) {
                    row += "─" + label + "─";
                } else {
                    append_dashes(row, label.size() + 2);
                }
            }
        }
        for (int p = 0; p < setup.num_paths; ++p) {
            std::string& row = rows[static_cast<size_t>(p)];
            row += "─ ";
            if (p == setup.detection.trigger_path) {
                row += "trigger:" + (setup.detection.trigger_oam
                                         ? std::to_string(*setup.detection.trigger_oam)
                                         : std::string("any"));
            } else if (std::find(setup.detection.coincidence_paths.begin(),
                                 setup.detection.coincidence_paths.end(), p) !=
                       setup.detection.coincidence_paths.end()) {
                row += "coincidence";
            }
        }
        for (const std::string& row : rows) std::cout << row << "\n";
        return kExitSuccess;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quphox - design search for linear-optical quantum experiments"};
    app.set_version_flag("--version", quphox::kVersion);
    app.require_subcommand(1);

    auto* search = app.add_subcommand("search", "run a randomized design search");
    std::string config_path;
    std::string out_dir = default_out_dir();
    std::uint64_t progress_every = 0;
    search->add_option("--config", config_path, "JSON config file");
    search->add_option("--out", out_dir, "output directory (default $QUPHOX_OUT or .)");
    search->add_option("--progress", progress_every, "progress line period (trials)");
    std::uint64_t seed_flag = 0, budget_flag = 0, max_solutions_flag = 0;
    int workers_flag = 0;
    std::string objective_flag, toolbox_flag;
    auto* seed_opt = search->add_option("--seed", seed_flag, "master seed");
    auto* budget_opt = search->add_option("--budget", budget_flag, "trial budget");
    auto* workers_opt = search->add_option("--workers", workers_flag, "worker threads");
    auto* maxsol_opt = search->add_option("--max-solutions", max_solutions_flag, "stop after N");
    auto* objective_opt = search->add_option("--objective", objective_flag, "objective spec");
    auto* toolbox_opt = search->add_option("--toolbox", toolbox_flag, "comma-separated toolbox");

    auto* verify = app.add_subcommand("verify", "re-check a setup file or state text");
    std::string verify_setup, verify_state, verify_objective;
    verify->add_option("setup", verify_setup, "setup file");
    verify->add_option("--state", verify_state, "state text instead of a setup");
    verify->add_option("--objective", verify_objective, "objective spec (default: srv report)");

    auto* srv_cmd = app.add_subcommand("srv", "print the Schmidt-rank vector");
    std::string srv_setup, srv_state;
    srv_cmd->add_option("setup", srv_setup, "setup file");
    srv_cmd->add_option("--state", srv_state, "state text instead of a setup");

    auto* simplify_cmd = app.add_subcommand("simplify", "greedy element removal");
    std::string simplify_setup, simplify_objective, simplify_out;
    simplify_cmd->add_option("setup", simplify_setup, "setup file")->required();
    simplify_cmd->add_option("--objective", simplify_objective, "objective spec")->required();
    simplify_cmd->add_option("--out", simplify_out, "write simplified setup here");

    auto* grow = app.add_subcommand("grow", "block-growth synthesis of a signal operator");
    std::string grow_target;
    double grow_threshold = 0.999;
    int grow_max_blocks = 5;
    std::uint64_t grow_seed = 1;
    int grow_restarts = 5;
    bool grow_new_only = false;
    std::string grow_out = default_out_dir();
    grow->add_option("--target", grow_target, "target matrix file")->required();
    grow->add_option("--threshold", grow_threshold, "fidelity threshold");
    grow->add_option("--max-blocks", grow_max_blocks, "block limit");
    grow->add_option("--seed", grow_seed, "optimizer seed");
    grow->add_option("--restarts", grow_restarts, "simplex restarts per stage");
    grow->add_flag("--new-only", grow_new_only, "optimize only the newest block's angles");
    grow->add_option("--out", grow_out, "output directory");

    auto* render = app.add_subcommand("render", "ASCII diagram of a setup file");
    std::string render_setup;
    render->add_option("setup", render_setup, "setup file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (search->parsed()) {
        nlohmann::json overrides = nlohmann::json::object();
        if (seed_opt->count()) overrides["seed"] = seed_flag;
        if (budget_opt->count()) overrides["budget"] = budget_flag;
        if (workers_opt->count()) overrides["workers"] = workers_flag;
        if (maxsol_opt->count()) overrides["max_solutions"] = max_solutions_flag;
        if (objective_opt->count()) overrides["objective"] = objective_flag;
        if (toolbox_opt->count()) {
            std::vector<std::string> names;
            std::stringstream ss(toolbox_flag);
            std::string tok;
            while (std::getline(ss, tok, ',')) names.push_back(tok);
            overrides["toolbox"] = names;
        }
        return cmd_search(config_path, overrides, out_dir, progress_every);
    }
    if (verify->parsed()) {
        if (verify_setup.empty() && verify_state.empty()) {
            std::cerr << "verify: need a setup file or --state\n";
            return kExitUsage;
        }
        return cmd_verify(verify_setup, verify_state, verify_objective);
    }
    if (srv_cmd->parsed()) {
        if (srv_setup.empty() && srv_state.empty()) {
            std::cerr << "srv: need a setup file or --state\n";
            return kExitUsage;
        }
        return cmd_verify(srv_setup, srv_state, "srv");
    }
    if (simplify_cmd->parsed()) {
        return cmd_simplify(simplify_setup, simplify_objective, simplify_out);
    }
    if (grow->parsed()) {
        if (grow_max_blocks < 1) {
            std::cerr << "grow: --max-blocks must be >= 1\n";
            return kExitUsage;
        }
        return cmd_grow(grow_target, grow_threshold, grow_max_blocks, grow_seed, grow_restarts,
                        grow_new_only, grow_out);
    }
    if (render->parsed()) return cmd_render(render_setup);
    return kExitUsage;
}
