#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quphox/elements.hpp"

namespace quphox {

/// An experiment: two pair sources, an ordered element chain (physical
/// encounter order) and a heralding pattern. This is the search's genotype.
struct Setup {
    int num_paths = 4;
    int mode_cutoff = 2;
    std::vector<Spdc> sources;
    std::optional<std::vector<int>> source_modes; // truncates both crystals when set
    bool include_double_emission = true;
    std::vector<Element> elements;
    DetectionSpec detection;

    bool operator==(const Setup&) const = default;
};

/// Throws std::invalid_argument on malformed setups (bad paths, parameter
/// ranges, element count above max_elements, overlapping detection paths).
void validate(const Setup& setup, int max_elements = 15);

/// Four-photon emission rewritten through the element chain, before
/// post-selection.
PhotonicState simulate_emission(const Setup& setup, std::uint64_t* cutoff_dropped = nullptr);

/// Full pipeline: sources -> element chain -> postselect. Possibly empty
/// (no heralding coincidence).
PhotonicState simulate(const Setup& setup, std::uint64_t* cutoff_dropped = nullptr);

/// Cheap topology criterion, no state is built: true iff some detector path
/// can receive amplitude from both crystals through the two-path elements
/// taken in order.
bool mixes_pairs(const Setup& setup);

/// Greedy pass: repeatedly remove the first element whose removal keeps
/// `satisfies` true, until no single removal survives. Throws
/// std::domain_error when the input setup does not satisfy the objective.
Setup simplify(const Setup& setup, const std::function<bool(const Setup&)>& satisfies);

/// Wraps the element chain as a composite on canonically renumbered paths
/// (first-encounter order), instantiable on fresh path assignments.
Element to_composite(const Setup& setup, const std::string& name);

/// Line-oriented text form; bit-exact round trip with parse_setup.
std::string to_text(const Setup& setup);
Setup parse_setup(const std::string& text); // throws std::invalid_argument

std::string detection_to_string(const DetectionSpec& detection);

} // namespace quphox
