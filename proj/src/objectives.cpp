#include "quphox/objectives.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace quphox {

void validate(const Objective& objective) {
    std::visit(
        [](const auto& obj) {
            using T = std::decay_t<decltype(obj)>;
            if constexpr (std::is_same_v<T, GhzPattern>) {
                if (obj.dims < 2) throw std::invalid_argument("ghz objective: dims must be >= 2");
            } else if constexpr (std::is_same_v<T, SrvTargetObjective>) {
                if (obj.targets.empty()) throw std::invalid_argument("srv objective: empty target set");
                for (const Srv& t : obj.targets) {
                    if (!t.is_consistent()) {
                        throw std::invalid_argument("srv objective: impossible target " + t.to_string());
                    }
                }
            } else if constexpr (std::is_same_v<T, TargetStateObjective>) {
                if (obj.min_fidelity <= 0.0 || obj.min_fidelity > 1.0) {
                    throw std::invalid_argument("target objective: min_fidelity outside (0,1]");
                }
                if (obj.target.empty()) throw std::invalid_argument("target objective: empty state");
            } else if constexpr (std::is_same_v<T, GatePattern>) {
                if (obj.control_modes.size() != 2) {
                    throw std::invalid_argument("gate objective: exactly two control modes");
                }
                if (obj.target_modes.size() < 2) {
                    throw std::invalid_argument("gate objective: need >= 2 target modes");
                }
                if (obj.control_path == obj.target_path) {
                    throw std::invalid_argument("gate objective: control and target paths equal");
                }
            }
        },
        objective);
}

bool cheap_state_check(const PhotonicState& state, int dims) {
    if (state.empty()) return false;
    for (int slot = 0; slot < state.order(); ++slot) {
        if (static_cast<int>(state.slot_modes(slot).size()) < dims) return false;
    }
    return true;
}

// --- ghz_match ----------------------------------------------------------------

namespace {

bool slotwise_distinct(const FockTerm& a, const FockTerm& b) {
    for (int k = 0; k < a.size(); ++k) {
        if (a.photon(k).oam == b.photon(k).oam) return false;
    }
    return true;
}

std::optional<GhzCertificate> certify_core(const PhotonicState& state,
                                           const std::vector<size_t>& core_idx, int dims,
                                           bool allow_mavericks) {
    const auto& terms = state.terms();
    const int slots = state.order();

    std::vector<std::vector<int>> slot_modes(static_cast<size_t>(slots));
    for (size_t idx : core_idx) {
        for (int k = 0; k < slots; ++k) {
            slot_modes[static_cast<size_t>(k)].push_back(terms[idx].first.photon(k).oam);
        }
    }
    for (auto& modes : slot_modes) std::sort(modes.begin(), modes.end());

    GhzCertificate cert;
    cert.dims = dims;
    cert.slot_modes = slot_modes;
    for (size_t idx : core_idx) {
        cert.core.push_back(terms[idx].first);
        cert.gammas.push_back(terms[idx].second);
    }

    for (size_t idx = 0; idx < terms.size(); ++idx) {
        if (std::find(core_idx.begin(), core_idx.end(), idx) != core_idx.end()) continue;
        if (!allow_mavericks) return std::nullopt;
        int removable = -1;
        for (int k = 0; k < slots; ++k) {
            const auto& modes = slot_modes[static_cast<size_t>(k)];
            if (!std::binary_search(modes.begin(), modes.end(),
                                    static_cast<int>(terms[idx].first.photon(k).oam))) {
                removable = k;
                break;
            }
        }
        if (removable < 0) return std::nullopt; // survives every local filter
        cert.mavericks.push_back({terms[idx].first, removable});
    }
    return cert;
}

bool search_core(const PhotonicState& state, int dims, bool allow_mavericks, size_t start,
                 std::vector<size_t>& chosen, std::optional<GhzCertificate>& found) {
    const auto& terms = state.terms();
    if (static_cast<int>(chosen.size()) == dims) {
        auto cert = certify_core(state, chosen, dims, allow_mavericks);
        if (cert) {
            found = std::move(cert);
            return true;
        }
        return false;
    }
    for (size_t idx = start; idx < terms.size(); ++idx) {
        bool compatible = true;
        for (size_t prev : chosen) {
            if (!slotwise_distinct(terms[prev].first, terms[idx].first)) {
                compatible = false;
                break;
            }
        }
        if (!compatible) continue;
        chosen.push_back(idx);
        if (search_core(state, dims, allow_mavericks, idx + 1, chosen, found)) return true;
        chosen.pop_back();
    }
    return false;
}

} // namespace

std::optional<GhzCertificate> ghz_match(const PhotonicState& state, int dims, bool allow_mavericks) {
    if (state.empty() || static_cast<int>(state.term_count()) < dims) return std::nullopt;
    if (!allow_mavericks && static_cast<int>(state.term_count()) != dims) return std::nullopt;
    std::vector<size_t> chosen;
    std::optional<GhzCertificate> found;
    search_core(state, dims, allow_mavericks, 0, chosen, found);
    return found;
}

// --- SRV objectives -----------------------------------------------------------

bool SrvRegistry::insert(const Srv& srv) {
    std::lock_guard<std::mutex> lock(mutex_);
    return seen_.insert(srv).second;
}

bool SrvRegistry::contains(const Srv& srv) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return seen_.count(srv) > 0;
}

std::size_t SrvRegistry::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return seen_.size();
}

std::vector<Srv> SrvRegistry::snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return {seen_.begin(), seen_.end()};
}

std::optional<SrvHit> srv_objective(const PhotonicState& state, const SrvTargetObjective& objective) {
    if (state.empty()) return std::nullopt;
    Srv srv = state.srv();
    if (std::find(objective.targets.begin(), objective.targets.end(), srv) ==
        objective.targets.end()) {
        return std::nullopt;
    }
    return SrvHit{srv, true};
}

std::optional<SrvHit> srv_objective(const PhotonicState& state, const SrvScanObjective&,
                                    SrvRegistry& registry) {
    if (state.empty()) return std::nullopt;
    Srv srv = state.srv();
    for (int rank : srv.ranks) {
        if (rank < 2) return std::nullopt;
    }
    bool novel = registry.insert(srv);
    return SrvHit{srv, novel};
}

// --- Objective text forms -------------------------------------------------------

std::string objective_to_string(const Objective& objective) {
    return std::visit(
        [](const auto& obj) -> std::string {
            using T = std::decay_t<decltype(obj)>;
            if constexpr (std::is_same_v<T, GhzPattern>) {
                return "ghz:dims=" + std::to_string(obj.dims) +
                       (obj.allow_mavericks ? ",mavericks" : ",strict");
            } else if constexpr (std::is_same_v<T, SrvTargetObjective>) {
                std::string out = "srv:";
                for (size_t k = 0; k < obj.targets.size(); ++k) {
                    if (k > 0) out += ";";
                    for (size_t j = 0; j < obj.targets[k].ranks.size(); ++j) {
                        if (j > 0) out += ",";
                        out += std::to_string(obj.targets[k].ranks[j]);
                    }
                }
                return out;
            } else if constexpr (std::is_same_v<T, SrvScanObjective>) {
                return "srv-scan";
            } else if constexpr (std::is_same_v<T, TargetStateObjective>) {
                std::string fid = std::to_string(obj.min_fidelity);
                return "target:fid=" + fid + ":" + obj.target.to_string();
            } else {
                return "gate:control=" + path_name(obj.control_path) +
                       ",target=" + path_name(obj.target_path) +
                       ",dc=" + std::to_string(obj.control_modes.size()) +
                       ",dt=" + std::to_string(obj.target_modes.size());
            }
        },
        objective);
}

std::optional<Objective> parse_objective(const std::string& text) {
    if (text == "srv-scan") return Objective{SrvScanObjective{}};
    if (text.rfind("ghz:", 0) == 0) {
        GhzPattern ghz;
        ghz.allow_mavericks = true;
        std::string rest = text.substr(4);
        size_t pos = 0;
        while (pos <= rest.size()) {
            size_t comma = rest.find(',', pos);
            std::string tok = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
            if (tok.rfind("dims=", 0) == 0) {
                try {
                    ghz.dims = std::stoi(tok.substr(5));
                } catch (const std::exception&) {
                    return std::nullopt;
                }
            } else if (tok == "mavericks") {
                ghz.allow_mavericks = true;
            } else if (tok == "strict") {
                ghz.allow_mavericks = false;
            } else if (!tok.empty()) {
                return std::nullopt;
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return Objective{ghz};
    }
    if (text.rfind("srv:", 0) == 0) {
        SrvTargetObjective obj;
        std::string rest = text.substr(4);
        size_t pos = 0;
        while (pos <= rest.size()) {
            size_t semi = rest.find(';', pos);
            std::string tok = rest.substr(pos, semi == std::string::npos ? semi : semi - pos);
            auto srv = Srv::parse(tok);
            if (!srv) return std::nullopt;
            obj.targets.push_back(*srv);
            if (semi == std::string::npos) break;
            pos = semi + 1;
        }
        if (obj.targets.empty()) return std::nullopt;
        return Objective{obj};
    }
    if (text.rfind("target:fid=", 0) == 0) {
        std::string rest = text.substr(11);
        size_t colon = rest.find(':');
        if (colon == std::string::npos) return std::nullopt;
        TargetStateObjective obj;
        try {
            obj.min_fidelity = std::stod(rest.substr(0, colon));
        } catch (const std::exception&) {
            return std::nullopt;
        }
        auto state = PhotonicState::parse(rest.substr(colon + 1));
        if (!state) return std::nullopt;
        obj.target = *state;
        return Objective{obj};
    }
    if (text.rfind("gate:", 0) == 0) {
        GatePattern gate;
        std::string rest = text.substr(5);
        size_t pos = 0;
        int dc = 2, dt = 3;
        while (pos <= rest.size()) {
            size_t comma = rest.find(',', pos);
            std::string tok = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
            auto keyed = [&tok](const char* key) -> std::optional<std::string> {
                std::string prefix(key);
                if (tok.rfind(prefix, 0) != 0) return std::nullopt;
                return tok.substr(prefix.size());
            };
            if (auto v = keyed("control=")) {
                auto p = parse_path_name(*v);
                if (!p) return std::nullopt;
                gate.control_path = *p;
            } else if (auto v = keyed("target=")) {
                auto p = parse_path_name(*v);
                if (!p) return std::nullopt;
                gate.target_path = *p;
            } else if (auto v = keyed("dc=")) {
                try { dc = std::stoi(*v); } catch (const std::exception&) { return std::nullopt; }
            } else if (auto v = keyed("dt=")) {
                try { dt = std::stoi(*v); } catch (const std::exception&) { return std::nullopt; }
            } else if (!tok.empty()) {
                return std::nullopt;
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        gate.control_modes.clear();
        gate.target_modes.clear();
        for (int m = 0; m < dc; ++m) gate.control_modes.push_back(m);
        for (int m = 0; m < dt; ++m) gate.target_modes.push_back(m);
        return Objective{gate};
    }
    return std::nullopt;
}

// --- Certificate JSON -----------------------------------------------------------

nlohmann::json certificate_to_json(const Certificate& cert) {
    nlohmann::json j;
    std::visit(
        [&j](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, GhzCertificate>) {
                j["type"] = "ghz";
                j["dims"] = c.dims;
                nlohmann::json core = nlohmann::json::array();
                for (size_t k = 0; k < c.core.size(); ++k) {
                    core.push_back({{"term", c.core[k].to_string()},
                                    {"gamma", c.gammas[k].to_string()}});
                }
                j["core"] = core;
                j["slot_modes"] = c.slot_modes;
                nlohmann::json mavericks = nlohmann::json::array();
                for (const auto& m : c.mavericks) {
                    mavericks.push_back({{"term", m.term.to_string()}, {"slot", m.removable_slot}});
                }
                j["mavericks"] = mavericks;
                // Filter construction: project each slot onto its core modes.
                nlohmann::json filters = nlohmann::json::array();
                for (size_t slot = 0; slot < c.slot_modes.size(); ++slot) {
                    filters.push_back({{"slot", slot}, {"keep_modes", c.slot_modes[slot]}});
                }
                j["filters"] = filters;
            } else if constexpr (std::is_same_v<T, SrvCertificate>) {
                j["type"] = "srv";
                j["srv"] = c.srv.ranks;
            } else if constexpr (std::is_same_v<T, FidelityCertificate>) {
                j["type"] = "fidelity";
                j["fidelity"] = c.fidelity;
            } else {
                j["type"] = "gate";
                j["control_in"] = c.control_in;
                j["target_in"] = c.target_in;
                j["control_out"] = c.control_out;
                j["target_out"] = c.target_out;
            }
        },
        cert);
    return j;
}

std::optional<Certificate> certificate_from_json(const nlohmann::json& j) {
    try {
        std::string type = j.at("type").get<std::string>();
        if (type == "srv") {
            SrvCertificate c;
            c.srv.ranks = j.at("srv").get<std::vector<int>>();
            return Certificate{c};
        }
        if (type == "fidelity") {
            FidelityCertificate c;
            c.fidelity = j.at("fidelity").get<double>();
            return Certificate{c};
        }
        if (type == "gate") {
            GateCertificate c;
            c.control_in = j.at("control_in").get<std::vector<int>>();
            c.target_in = j.at("target_in").get<std::vector<int>>();
            c.control_out = j.at("control_out").get<std::vector<std::vector<int>>>();
            c.target_out = j.at("target_out").get<std::vector<std::vector<int>>>();
            return Certificate{c};
        }
        if (type == "ghz") {
            GhzCertificate c;
            c.dims = j.at("dims").get<int>();
            c.slot_modes = j.at("slot_modes").get<std::vector<std::vector<int>>>();
            for (const auto& entry : j.at("core")) {
                auto state = PhotonicState::parse("(" + entry.at("gamma").get<std::string>() +
                                                  ") |" + entry.at("term").get<std::string>() +
                                                  "⟩");
                if (!state || state->term_count() != 1) return std::nullopt;
                c.core.push_back(state->terms().front().first);
                c.gammas.push_back(state->terms().front().second);
            }
            for (const auto& entry : j.at("mavericks")) {
                auto state = PhotonicState::parse("(1) |" + entry.at("term").get<std::string>() +
                                                  "⟩");
                if (!state || state->term_count() != 1) return std::nullopt;
                c.mavericks.push_back({state->terms().front().first, entry.at("slot").get<int>()});
            }
            return Certificate{c};
        }
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace quphox
