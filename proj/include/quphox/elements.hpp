#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "quphox/state.hpp"

namespace quphox {

/// Pair source: emits OAM-anticorrelated photon pairs on two paths,
/// sum over m of |path_a:m, path_b:-m> with unit amplitudes. `dim` n emits
/// m in -floor(n/2)..floor(n/2); `modes` overrides that range (truncation).
struct Spdc {
    int path_a = 0;
    int path_b = 1;
    int dim = 3;
    std::optional<std::vector<int>> modes;

    std::vector<int> emission_modes() const;
    bool operator==(const Spdc&) const = default;
};

struct Element;

struct BeamSplitter {
    int path_a = 0, path_b = 1;
    bool operator==(const BeamSplitter&) const = default;
};
struct Reflection {
    int path = 0;
    bool operator==(const Reflection&) const = default;
};
struct DovePrism {
    int path = 0;
    int k = 0; // orientation in pi/8 steps, 0..7
    bool operator==(const DovePrism&) const = default;
};
struct Hologram {
    int path = 0;
    int shift = 1;
    bool operator==(const Hologram&) const = default;
};
struct PhaseShifter {
    int path = 0;
    int k = 0; // phase exp(i*k*pi/4), 0..7
    bool operator==(const PhaseShifter&) const = default;
};
struct ParitySorter {
    int path_a = 0, path_b = 1;
    bool operator==(const ParitySorter&) const = default;
};
struct Composite {
    std::string name;
    std::vector<Element> inner;
    bool operator==(const Composite&) const;
};

/// One toolbox element instance with concrete paths and parameters.
struct Element {
    std::variant<BeamSplitter, Reflection, DovePrism, Hologram, PhaseShifter, ParitySorter,
                 Composite>
        value;

    std::vector<int> paths_touched() const;
    /// Same element on relabeled paths (used to instantiate composites).
    Element with_paths(const std::vector<int>& mapping) const;

    /// Text syntax: "BS[a,b]", "Dove[a,k=2]", "Holo[c,+1]", "PS[b,k=3]",
    /// "LI[a,b]", "REFL[c]", "CMP[name](...;...)".
    std::string to_string() const;
    static std::optional<Element> parse(std::string_view text);

    bool operator==(const Element&) const = default;
};

/// Substitution rule set of a (non-source) element over modes |m| <= cutoff.
/// Conventions are fixed once; all golden values derive from them:
///   BS(a,b):   a(m) -> (b(m) + i a(-m))/sqrt2,  b(m) -> (a(m) + i b(-m))/sqrt2
///   REFL(a):   a(m) -> i a(-m)
///   Dove(a,k): a(m) -> phase(2km mod 8) a(-m)
///   Holo(a,s): a(m) -> a(m+s), dropped/rejected past the cutoff
///   PS(a,k):   a(m) -> phase(k) a(m)
///   LI(a,b):   even m stays, odd m swaps paths
SubstitutionRules rules_of(const Element& element, int mode_cutoff);

/// Sequential composition: applying the result equals applying each element's
/// rules in order.
SubstitutionRules compose_rules(const std::vector<Element>& chain, int mode_cutoff);

/// Two-photon emission operator of one crystal firing once.
PhotonicState spdc_emission(const Spdc& crystal);
/// Four-photon emission: crystal1 x crystal2 cross term, plus each crystal's
/// double emission (the square of its single-emission operator) when
/// include_double_emission is set. Crystals must not share paths.
PhotonicState spdc_state(const Spdc& crystal1, const Spdc& crystal2,
                         bool include_double_emission = true);

/// Element templates the random search instantiates. A template fixes the
/// element kind (and, for composites, the canonical inner chain on paths
/// 0..arity-1); paths and discrete parameters are sampled per draw.
struct ToolboxTemplate {
    enum class Kind { kBeamSplitter, kReflection, kDove, kHologram, kPhaseShifter, kParitySorter, kComposite };

    Kind kind = Kind::kBeamSplitter;
    Composite composite; // only for kComposite, paths numbered 0..arity-1

    int arity() const;
    std::string name() const;
    /// Identity key used for duplicate detection when augmenting.
    std::string canonical_key() const;
};

class Toolbox {
public:
    Toolbox() = default;
    explicit Toolbox(std::vector<ToolboxTemplate> templates) : templates_(std::move(templates)) {}

    /// BS, REFL, Dove, Holo, PS, LI.
    static Toolbox standard();
    /// Named subset, e.g. {"BS", "LI"}.
    static std::optional<Toolbox> from_names(const std::vector<std::string>& names);

    const std::vector<ToolboxTemplate>& templates() const { return templates_; }
    bool empty() const { return templates_.empty(); }
    std::size_t size() const { return templates_.size(); }

    /// Appends a template; returns false (no-op) when an identical canonical
    /// key is already present.
    bool add(ToolboxTemplate tmpl);

private:
    std::vector<ToolboxTemplate> templates_;
};

std::string spdc_to_string(const Spdc& crystal);
std::optional<Spdc> parse_spdc(std::string_view text);

} // namespace quphox
