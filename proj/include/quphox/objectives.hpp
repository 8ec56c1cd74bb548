#pragma once

#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "quphox/setup.hpp"

#include <nlohmann/json_fwd.hpp>

namespace quphox {

// --- Objective descriptions ---------------------------------------------------

struct GhzPattern {
    int dims = 3;
    bool allow_mavericks = true;
    bool operator==(const GhzPattern&) const = default;
};

struct SrvTargetObjective {
    std::vector<Srv> targets;
    bool operator==(const SrvTargetObjective&) const = default;
};

struct SrvScanObjective {
    bool operator==(const SrvScanObjective&) const = default;
};

struct TargetStateObjective {
    PhotonicState target;
    double min_fidelity = 1.0;
    bool operator==(const TargetStateObjective&) const = default;
};

/// Controlled-gate pattern: probes enumerate control x target single-photon
/// product inputs; the heralded outputs must fill a table obeying the
/// orthogonality constraints (necessary, not sufficient).
struct GatePattern {
    int control_path = 0;
    int target_path = 1;
    std::vector<int> control_modes = {0, 1};
    std::vector<int> target_modes = {0, 1, 2};
    bool operator==(const GatePattern&) const = default;
};

using Objective =
    std::variant<GhzPattern, SrvTargetObjective, SrvScanObjective, TargetStateObjective, GatePattern>;

/// Throws std::invalid_argument on invalid parameters (dims < 2, fidelity
/// outside (0,1], algebraically impossible SRV targets).
void validate(const Objective& objective);

/// Compact text form used by the CLI: "ghz:dims=3,mavericks" |
/// "ghz:dims=2,strict" | "srv:3,3,3;4,2,2" | "srv-scan" |
/// "gate:control=a,target=b,dc=2,dt=3" | "srv" (report-only).
std::optional<Objective> parse_objective(const std::string& text);
std::string objective_to_string(const Objective& objective);

// --- Certificates ---------------------------------------------------------

/// Witness that local mode filters turn the state into a dims-dimensional
/// GHZ-class state with fidelity 1: `core` terms are pairwise mode-distinct
/// in every slot, every other term is removable because at least one of its
/// slots carries a mode outside that slot's core set.
struct GhzCertificate {
    int dims = 3;
    std::vector<FockTerm> core;
    std::vector<CycNum> gammas;
    std::vector<std::vector<int>> slot_modes; // per slot, sorted
    struct Maverick {
        FockTerm term;
        int removable_slot; // first slot whose mode falls outside the core set
        bool operator==(const Maverick&) const = default;
    };
    std::vector<Maverick> mavericks;

    bool operator==(const GhzCertificate&) const = default;
};

struct SrvCertificate {
    Srv srv;
    bool operator==(const SrvCertificate&) const = default;
};

struct FidelityCertificate {
    double fidelity = 0.0;
    bool operator==(const FidelityCertificate&) const = default;
};

/// Output tables of a gate probe run satisfying the pattern constraints.
struct GateCertificate {
    std::vector<int> control_in;                 // c_1..c_dc
    std::vector<int> target_in;                  // t_1..t_dt
    std::vector<std::vector<int>> control_out;   // [ci][tj]
    std::vector<std::vector<int>> target_out;    // [ci][tj]
    bool operator==(const GateCertificate&) const = default;
};

using Certificate = std::variant<GhzCertificate, SrvCertificate, FidelityCertificate, GateCertificate>;

nlohmann::json certificate_to_json(const Certificate& cert);
std::optional<Certificate> certificate_from_json(const nlohmann::json& j);

// --- Objective evaluation ---------------------------------------------------

/// Cheap necessary criterion: every photon slot carries at least `dims`
/// distinct OAM values across terms. Linear in the term count.
bool cheap_state_check(const PhotonicState& state, int dims);

/// Exhaustive search (with slot-0 distinctness pruning) for a `dims`-term
/// core that is pairwise mode-distinct in every slot; when allow_mavericks,
/// the remaining terms must each be filter-removable. Absence is a normal
/// outcome.
std::optional<GhzCertificate> ghz_match(const PhotonicState& state, int dims, bool allow_mavericks);

/// Run-wide registry of already-seen SRVs (atomic insert-if-absent: exactly
/// one caller observes novelty for a given vector).
class SrvRegistry {
public:
    /// True iff the vector was not present yet.
    bool insert(const Srv& srv);
    bool contains(const Srv& srv) const;
    std::size_t size() const;
    std::vector<Srv> snapshot() const;

private:
    mutable std::mutex mutex_;
    std::set<Srv> seen_;
};

struct SrvHit {
    Srv srv;
    bool novel = false;
};

/// SrvTarget: state's SRV is in the target set (novel always true).
std::optional<SrvHit> srv_objective(const PhotonicState& state, const SrvTargetObjective& objective);
/// SrvScan: all ranks >= 2 (genuine tripartite entanglement proxy); the
/// registry records the vector and flags novelty.
std::optional<SrvHit> srv_objective(const PhotonicState& state, const SrvScanObjective& objective,
                                    SrvRegistry& registry);

// --- Gate machinery ---------------------------------------------------------

/// Probe outcomes: for each (control_in, target_in) the single product term
/// the heralded output collapsed to, as (control_out, target_out) modes.
struct GateTable {
    std::vector<int> control_in;
    std::vector<int> target_in;
    std::vector<std::vector<int>> control_out; // [ci][tj]
    std::vector<std::vector<int>> target_out;  // [ci][tj]
};

/// Checks exactly the pattern constraints on a probe table: within each
/// control row the target outputs are pairwise distinct, and the rows differ
/// target-wise at every column. Control outputs are unconstrained.
std::optional<GateCertificate> gate_match_table(const GateTable& table);

/// Simulates each probe through the element chain; every heralded output
/// must be a single product term over (control, target) paths, otherwise no
/// match. Requires control modes = 2 entries.
std::optional<GateTable> probe_gate_table(const Setup& setup, const GatePattern& pattern);

std::optional<GateCertificate> gate_match(const Setup& setup, const GatePattern& pattern);

} // namespace quphox
