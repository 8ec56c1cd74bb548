#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "quphox/search.hpp"

namespace quphox {

/// Declarative config; the same schema is embedded in run manifests, so a
/// manifest reproduces its run (single-worker runs bit-exactly).
nlohmann::json config_to_json(const SearchConfig& config);
SearchConfig config_from_json(const nlohmann::json& j); // throws std::invalid_argument

/// One JSONL record per solution. Deterministic: no timestamps; wall-clock
/// lives in the manifest only.
nlohmann::json solution_to_json(const Solution& solution);
std::optional<Solution> solution_from_json(const nlohmann::json& j);

void write_solution_line(std::ostream& out, const Solution& solution);
std::vector<Solution> read_solutions_jsonl(std::istream& in); // throws on malformed lines

nlohmann::json manifest_to_json(const SearchConfig& config, const SearchResult& result,
                                const std::string& started_utc, const std::string& finished_utc,
                                double elapsed_seconds);

std::string utc_timestamp();

/// Write-then-rename so partially written files are never observed.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace quphox
