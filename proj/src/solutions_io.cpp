#include "quphox/solutions_io.hpp"

#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "quphox/version.hpp"

namespace quphox {

nlohmann::json config_to_json(const SearchConfig& config) {
    nlohmann::json j;
    nlohmann::json paths = nlohmann::json::array();
    for (int p = 0; p < config.base.num_paths; ++p) paths.push_back(path_name(p));
    j["paths"] = paths;
    nlohmann::json sources = nlohmann::json::array();
    for (const Spdc& s : config.base.sources) sources.push_back(spdc_to_string(s));
    j["sources"] = sources;
    if (config.base.source_modes) j["source_modes"] = *config.base.source_modes;
    j["cutoff"] = config.base.mode_cutoff;
    j["double_emission"] = config.base.include_double_emission;
    j["trigger"] = detection_to_string(config.base.detection);
    nlohmann::json coincidence = nlohmann::json::array();
    for (int p : config.base.detection.coincidence_paths) coincidence.push_back(path_name(p));
    j["coincidence"] = coincidence;
    nlohmann::json toolbox = nlohmann::json::array();
    for (const ToolboxTemplate& tmpl : config.toolbox.templates()) {
        if (tmpl.kind == ToolboxTemplate::Kind::kComposite) {
            toolbox.push_back(Element{tmpl.composite}.to_string());
        } else {
            toolbox.push_back(tmpl.name());
        }
    }
    j["toolbox"] = toolbox;
    j["objective"] = objective_to_string(config.objective);
    j["budget"] = config.budget;
    j["seed"] = config.seed;
    j["workers"] = config.workers;
    j["max_elements"] = config.max_elements;
    j["augment_toolbox"] = config.augment_toolbox;
    j["simplify_solutions"] = config.simplify_solutions;
    j["search_trigger_mode"] = config.search_trigger_mode;
    j["max_solutions"] = config.max_solutions;
    return j;
}

namespace {

[[noreturn]] void config_error(const std::string& what) {
    throw std::invalid_argument("config: " + what);
}

} // namespace

SearchConfig config_from_json(const nlohmann::json& j) {
    SearchConfig config = SearchConfig::defaults();
    try {
        if (j.contains("paths")) {
            auto names = j["paths"].get<std::vector<std::string>>();
            for (size_t k = 0; k < names.size(); ++k) {
                auto p = parse_path_name(names[k]);
                if (!p || *p != static_cast<int>(k)) config_error("paths must be a, b, c, ...");
            }
            config.base.num_paths = static_cast<int>(names.size());
        }
        if (j.contains("sources")) {
            config.base.sources.clear();
            for (const auto& entry : j["sources"]) {
                auto s = parse_spdc(entry.get<std::string>());
                if (!s) config_error("bad source " + entry.get<std::string>());
                config.base.sources.push_back(*s);
            }
        }
        if (j.contains("source_modes")) {
            config.base.source_modes = j["source_modes"].get<std::vector<int>>();
        }
        if (j.contains("cutoff")) config.base.mode_cutoff = j["cutoff"].get<int>();
        if (j.contains("double_emission")) {
            config.base.include_double_emission = j["double_emission"].get<bool>();
        }
        if (j.contains("trigger")) {
            std::string text = j["trigger"].get<std::string>();
            auto colon = text.find(':');
            if (colon == std::string::npos) config_error("trigger needs path:mode");
            auto p = parse_path_name(text.substr(0, colon));
            if (!p) config_error("bad trigger path");
            config.base.detection.trigger_path = *p;
            std::string mode = text.substr(colon + 1);
            if (mode == "any") {
                config.base.detection.trigger_oam = std::nullopt;
            } else {
                config.base.detection.trigger_oam = std::stoi(mode);
            }
        }
        if (j.contains("coincidence")) {
            config.base.detection.coincidence_paths.clear();
            for (const auto& entry : j["coincidence"]) {
                auto p = parse_path_name(entry.get<std::string>());
                if (!p) config_error("bad coincidence path");
                config.base.detection.coincidence_paths.push_back(*p);
            }
        }
        if (j.contains("toolbox")) {
            auto names = j["toolbox"].get<std::vector<std::string>>();
            auto toolbox = Toolbox::from_names(names);
            if (!toolbox) config_error("bad toolbox");
            config.toolbox = *toolbox;
        }
        if (j.contains("objective")) {
            auto objective = parse_objective(j["objective"].get<std::string>());
            if (!objective) config_error("bad objective " + j["objective"].get<std::string>());
            config.objective = *objective;
        }
        if (j.contains("budget")) config.budget = j["budget"].get<std::uint64_t>();
        if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("workers")) config.workers = j["workers"].get<int>();
        if (j.contains("max_elements")) config.max_elements = j["max_elements"].get<int>();
        if (j.contains("augment_toolbox")) config.augment_toolbox = j["augment_toolbox"].get<bool>();
        if (j.contains("simplify_solutions")) {
            config.simplify_solutions = j["simplify_solutions"].get<bool>();
        }
        if (j.contains("search_trigger_mode")) {
            config.search_trigger_mode = j["search_trigger_mode"].get<bool>();
        }
        if (j.contains("max_solutions")) config.max_solutions = j["max_solutions"].get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        config_error(e.what());
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        config_error(e.what());
    }
    validate(config);
    return config;
}

nlohmann::json solution_to_json(const Solution& solution) {
    nlohmann::json j;
    j["schema"] = 1;
    j["trial"] = solution.trial;
    j["worker"] = solution.worker;
    j["seed_path"] = solution.seed_path;
    j["novel"] = solution.novel;
    j["setup"] = to_text(solution.setup);
    j["certificate"] = certificate_to_json(solution.certificate);
    j["state"] = solution.heralded.to_string();
    return j;
}

std::optional<Solution> solution_from_json(const nlohmann::json& j) {
    try {
        Solution out;
        out.trial = j.at("trial").get<std::uint64_t>();
        out.worker = j.at("worker").get<int>();
        out.seed_path = j.at("seed_path").get<std::string>();
        out.novel = j.at("novel").get<bool>();
        out.setup = parse_setup(j.at("setup").get<std::string>());
        auto cert = certificate_from_json(j.at("certificate"));
        if (!cert) return std::nullopt;
        out.certificate = *cert;
        auto state = PhotonicState::parse(j.at("state").get<std::string>());
        if (!state) return std::nullopt;
        out.heralded = *state;
        return out;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void write_solution_line(std::ostream& out, const Solution& solution) {
    out << solution_to_json(solution).dump() << "\n";
}

std::vector<Solution> read_solutions_jsonl(std::istream& in) {
    std::vector<Solution> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto solution = solution_from_json(nlohmann::json::parse(line));
        if (!solution) {
            throw std::invalid_argument("solutions line " + std::to_string(line_no) + ": malformed");
        }
        out.push_back(std::move(*solution));
    }
    return out;
}

nlohmann::json manifest_to_json(const SearchConfig& config, const SearchResult& result,
                                const std::string& started_utc, const std::string& finished_utc,
                                double elapsed_seconds) {
    nlohmann::json j;
    j["schema"] = 1;
    j["version"] = kVersion;
    j["config"] = config_to_json(config);
    j["counters"] = {
        {"generated", result.counters.generated},
        {"rejected_mixing", result.counters.rejected_mixing},
        {"rejected_empty", result.counters.rejected_empty},
        {"rejected_cheap", result.counters.rejected_cheap},
        {"rejected_objective", result.counters.rejected_objective},
        {"solutions", result.counters.solutions},
    };
    j["solutions"] = result.counters.solutions;
    nlohmann::json registry = nlohmann::json::array();
    for (const Srv& srv : result.srv_registry) registry.push_back(srv.ranks);
    j["srv_registry"] = registry;
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    j["elapsed_seconds"] = elapsed_seconds;
    return j;
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

} // namespace quphox
