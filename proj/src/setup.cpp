#include "quphox/setup.hpp"

#include <algorithm>
#include <stdexcept>

namespace quphox {

namespace {

void validate_element(const Element& element, int num_paths, int mode_cutoff) {
    for (int p : element.paths_touched()) {
        if (p < 0 || p >= num_paths) throw std::invalid_argument("element path outside path set");
    }
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, DovePrism> || std::is_same_v<T, PhaseShifter>) {
                if (e.k < 0 || e.k > 7) throw std::invalid_argument("phase step outside 0..7");
            } else if constexpr (std::is_same_v<T, Hologram>) {
                if (e.shift == 0 || std::abs(e.shift) > 2 * mode_cutoff) {
                    throw std::invalid_argument("hologram shift outside +-2M");
                }
            } else if constexpr (std::is_same_v<T, BeamSplitter> || std::is_same_v<T, ParitySorter>) {
                if (e.path_a == e.path_b) throw std::invalid_argument("two-path element on one path");
            } else if constexpr (std::is_same_v<T, Composite>) {
                for (const Element& inner : e.inner) validate_element(inner, num_paths, mode_cutoff);
            }
        },
        element.value);
}

} // namespace

void validate(const Setup& setup, int max_elements) {
    if (setup.num_paths < 1) throw std::invalid_argument("empty path set");
    if (setup.mode_cutoff < 1) throw std::invalid_argument("mode cutoff must be >= 1");
    if (static_cast<int>(setup.elements.size()) > max_elements) {
        throw std::invalid_argument("element count above configured maximum");
    }
    for (const Spdc& s : setup.sources) {
        if (s.path_a < 0 || s.path_a >= setup.num_paths || s.path_b < 0 ||
            s.path_b >= setup.num_paths || s.path_a == s.path_b) {
            throw std::invalid_argument("source paths invalid");
        }
    }
    for (const Element& e : setup.elements) validate_element(e, setup.num_paths, setup.mode_cutoff);

    const DetectionSpec& det = setup.detection;
    if (det.trigger_path < 0 || det.trigger_path >= setup.num_paths) {
        throw std::invalid_argument("trigger path invalid");
    }
    for (int p : det.coincidence_paths) {
        if (p < 0 || p >= setup.num_paths) throw std::invalid_argument("coincidence path invalid");
        if (p == det.trigger_path) throw std::invalid_argument("trigger inside coincidence paths");
    }
}

PhotonicState simulate_emission(const Setup& setup, std::uint64_t* cutoff_dropped) {
    if (setup.num_paths < 1) throw std::invalid_argument("simulate: empty path set");
    if (setup.sources.size() != 2) throw std::invalid_argument("simulate: exactly two sources required");
    Spdc c1 = setup.sources[0];
    Spdc c2 = setup.sources[1];
    if (setup.source_modes) {
        c1.modes = setup.source_modes;
        c2.modes = setup.source_modes;
    }
    PhotonicState state = spdc_state(c1, c2, setup.include_double_emission);
    for (const Element& element : setup.elements) {
        if (state.empty()) break;
        state = state.substitute(rules_of(element, setup.mode_cutoff), CutoffPolicy::kDrop,
                                 cutoff_dropped);
    }
    return state;
}

PhotonicState simulate(const Setup& setup, std::uint64_t* cutoff_dropped) {
    return simulate_emission(setup, cutoff_dropped).postselect(setup.detection);
}

namespace {

void propagate_coupling(const Element& element, std::vector<unsigned>& mask) {
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitter> || std::is_same_v<T, ParitySorter>) {
                unsigned joined = mask[static_cast<size_t>(e.path_a)] |
                                  mask[static_cast<size_t>(e.path_b)];
                mask[static_cast<size_t>(e.path_a)] = joined;
                mask[static_cast<size_t>(e.path_b)] = joined;
            } else if constexpr (std::is_same_v<T, Composite>) {
                for (const Element& inner : e.inner) propagate_coupling(inner, mask);
            }
        },
        element.value);
}

} // namespace

bool mixes_pairs(const Setup& setup) {
    if (setup.sources.size() != 2) return false;
    std::vector<unsigned> mask(static_cast<size_t>(setup.num_paths), 0);
    mask[static_cast<size_t>(setup.sources[0].path_a)] |= 1u;
    mask[static_cast<size_t>(setup.sources[0].path_b)] |= 1u;
    mask[static_cast<size_t>(setup.sources[1].path_a)] |= 2u;
    mask[static_cast<size_t>(setup.sources[1].path_b)] |= 2u;
    for (const Element& element : setup.elements) propagate_coupling(element, mask);

    std::vector<int> detectors = setup.detection.coincidence_paths;
    detectors.push_back(setup.detection.trigger_path);
    for (int p : detectors) {
        if (mask[static_cast<size_t>(p)] == 3u) return true;
    }
    return false;
}

Setup simplify(const Setup& setup, const std::function<bool(const Setup&)>& satisfies) {
    if (!satisfies(setup)) throw std::domain_error("simplify: objective not satisfied initially");
    Setup current = setup;
    bool reduced = true;
    while (reduced) {
        reduced = false;
        for (size_t k = 0; k < current.elements.size(); ++k) {
            Setup candidate = current;
            candidate.elements.erase(candidate.elements.begin() + static_cast<std::ptrdiff_t>(k));
            if (satisfies(candidate)) {
                current = std::move(candidate);
                reduced = true;
                break; // earliest removable element first, then rescan
            }
        }
    }
    return current;
}

Element to_composite(const Setup& setup, const std::string& name) {
    // Renumber touched paths in first-encounter order so the composite can be
    // instantiated on any fresh path assignment.
    std::vector<int> order;
    for (const Element& element : setup.elements) {
        for (int p : element.paths_touched()) {
            if (std::find(order.begin(), order.end(), p) == order.end()) order.push_back(p);
        }
    }
    std::vector<int> mapping(static_cast<size_t>(setup.num_paths), -1);
    for (size_t k = 0; k < order.size(); ++k) mapping[static_cast<size_t>(order[k])] = static_cast<int>(k);

    Composite comp;
    comp.name = name;
    for (const Element& element : setup.elements) comp.inner.push_back(element.with_paths(mapping));
    return Element{comp};
}

} // namespace quphox
