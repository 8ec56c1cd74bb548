#include <algorithm>
#include <stdexcept>

#include "quphox/objectives.hpp"

namespace quphox {

std::optional<GateCertificate> gate_match_table(const GateTable& table) {
    const size_t dc = table.control_in.size();
    const size_t dt = table.target_in.size();
    if (dc != 2 || dt < 2) return std::nullopt;
    if (table.control_out.size() != dc || table.target_out.size() != dc) return std::nullopt;
    for (size_t ci = 0; ci < dc; ++ci) {
        if (table.control_out[ci].size() != dt || table.target_out[ci].size() != dt) {
            return std::nullopt;
        }
    }

    // Within each control row the target outputs are pairwise distinct.
    for (size_t ci = 0; ci < dc; ++ci) {
        std::vector<int> sorted = table.target_out[ci];
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return std::nullopt;
    }
    // The two rows disagree target-wise at every column (the control acts).
    for (size_t tj = 0; tj < dt; ++tj) {
        if (table.target_out[0][tj] == table.target_out[1][tj]) return std::nullopt;
    }

    GateCertificate cert;
    cert.control_in = table.control_in;
    cert.target_in = table.target_in;
    cert.control_out = table.control_out;
    cert.target_out = table.target_out;
    return cert;
}

std::optional<GateTable> probe_gate_table(const Setup& setup, const GatePattern& pattern) {
    if (pattern.control_modes.size() != 2) {
        throw std::invalid_argument("probe_gate_table: exactly two control modes required");
    }
    GateTable table;
    table.control_in = pattern.control_modes;
    table.target_in = pattern.target_modes;
    table.control_out.assign(pattern.control_modes.size(), {});
    table.target_out.assign(pattern.control_modes.size(), {});

    for (size_t ci = 0; ci < pattern.control_modes.size(); ++ci) {
        for (int t : pattern.target_modes) {
            FockTerm input;
            input.add(ModeLabel{static_cast<std::int8_t>(pattern.control_path),
                                static_cast<std::int8_t>(pattern.control_modes[ci])});
            input.add(ModeLabel{static_cast<std::int8_t>(pattern.target_path),
                                static_cast<std::int8_t>(t)});
            PhotonicState state = PhotonicState::single_term(input, CycNum::from_int(1));
            for (const Element& element : setup.elements) {
                if (state.empty()) break;
                state = state.substitute(rules_of(element, setup.mode_cutoff));
            }
            // Herald: one photon back in each of the two designated paths.
            state = state.filter_coincidence({pattern.control_path, pattern.target_path});
            if (state.term_count() != 1) return std::nullopt; // not a clean product output
            const FockTerm& out = state.terms().front().first;
            int cout_idx = out.find_single_in_path(pattern.control_path);
            int tout_idx = out.find_single_in_path(pattern.target_path);
            if (cout_idx < 0 || tout_idx < 0) return std::nullopt;
            table.control_out[ci].push_back(out.photon(cout_idx).oam);
            table.target_out[ci].push_back(out.photon(tout_idx).oam);
        }
    }
    return table;
}

std::optional<GateCertificate> gate_match(const Setup& setup, const GatePattern& pattern) {
    auto table = probe_gate_table(setup, pattern);
    if (!table) return std::nullopt;
    return gate_match_table(*table);
}

} // namespace quphox
