#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quphox/cyclotomic.hpp"

namespace quphox {

/// One creation operator: a photon on a path carrying an OAM value.
/// Paths are small indices rendered as letters 'a', 'b', ... in text forms.
struct ModeLabel {
    std::int8_t path = 0;
    std::int8_t oam = 0;

    auto operator<=>(const ModeLabel&) const = default;
};

/// Canonically sorted multiset of photons; the monomial basis of states.
class FockTerm {
public:
    static constexpr int kMaxPhotons = 6;

    FockTerm() = default;
    explicit FockTerm(std::span<const ModeLabel> photons);

    int size() const { return size_; }
    const ModeLabel& photon(int idx) const { return photons_[static_cast<size_t>(idx)]; }

    void add(ModeLabel label); // keeps (path, oam) order
    FockTerm without(int idx) const;
    int count_in_path(int path) const;
    /// Index of the unique photon on `path`, or -1 if count != 1.
    int find_single_in_path(int path) const;

    auto operator<=>(const FockTerm&) const = default;

    /// "a:0 b:-1 b:2"
    std::string to_string() const;

private:
    std::array<ModeLabel, kMaxPhotons> photons_{};
    std::int8_t size_ = 0;
};

/// Single-photon rewrite rules: each mode maps to a weighted sum of modes.
/// A present-but-empty image means the photon leaves the monitored mode
/// space (hologram pushed past the cutoff) and the term is dropped or
/// rejected depending on policy.
using SubstitutionRules = std::map<ModeLabel, std::vector<std::pair<ModeLabel, CycNum>>>;

enum class CutoffPolicy { kDrop, kStrict };

/// Heralding pattern: one photon in each coincidence path plus a trigger
/// photon. trigger_oam empty = herald on trigger presence in any mode.
struct DetectionSpec {
    int trigger_path = 0;
    std::optional<int> trigger_oam;
    std::vector<int> coincidence_paths;

    bool operator==(const DetectionSpec&) const = default;
};

/// Schmidt-rank vector: one rank per single-photon-vs-rest bipartition,
/// sorted descending.
struct Srv {
    std::vector<int> ranks;

    /// max rank <= product of the others (algebraic feasibility).
    bool is_consistent() const;
    std::string to_string() const; // "(3, 3, 2)"
    static std::optional<Srv> parse(std::string_view text);

    auto operator<=>(const Srv&) const = default;
};

/// Unnormalized multi-photon state: sparse map from Fock terms to exact
/// amplitudes. Terms are kept sorted for deterministic iteration; zero
/// amplitudes are never stored. Normalization is deferred to floating-point
/// reporting time (fidelity), since 1/sqrt(3)-type factors leave Q(zeta_8).
class PhotonicState {
public:
    PhotonicState() = default;
    explicit PhotonicState(int order) : order_(order) {}

    static PhotonicState single_term(const FockTerm& term, CycNum amplitude);

    int order() const { return order_; }
    bool empty() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<std::pair<FockTerm, CycNum>>& terms() const { return terms_; }

    /// Zero if absent.
    CycNum amplitude(const FockTerm& term) const;

    /// Adds amplitude to a term, combining exactly and dropping zeros.
    void add_term(const FockTerm& term, const CycNum& amplitude);

    PhotonicState& operator+=(const PhotonicState& rhs);

    /// Operator product: photon multisets merge, amplitudes multiply.
    friend PhotonicState product(const PhotonicState& lhs, const PhotonicState& rhs);

    /// Rewrites every photon by its rule (identity when absent), expands the
    /// products and combines like terms exactly. Photon order is preserved.
    /// `dropped` counts terms lost to empty images under kDrop.
    PhotonicState substitute(const SubstitutionRules& rules,
                             CutoffPolicy policy = CutoffPolicy::kDrop,
                             std::uint64_t* dropped = nullptr) const;

    /// Keep terms with the trigger photon present (and in the trigger mode,
    /// when fixed); strip that photon. Result order = order - 1.
    PhotonicState project_trigger(const DetectionSpec& detection) const;
    /// Keep terms with exactly one photon in each listed path and none
    /// elsewhere.
    PhotonicState filter_coincidence(const std::vector<int>& paths) const;
    /// filter_coincidence after project_trigger: the heralded state.
    PhotonicState postselect(const DetectionSpec& detection) const;

    /// <this|other> with bosonic weights: repeated modes contribute
    /// multiplicity factorials, so unitary rule sets preserve norms exactly.
    CycNum inner_product(const PhotonicState& other) const;
    CycNum norm2() const { return inner_product(*this); }

    /// |<target|state>|^2 / (<state|state><target|target>), floating point.
    /// Throws std::domain_error when either state is empty.
    double fidelity(const PhotonicState& target) const;

    /// Schmidt-rank vector of a post-selected state (one photon per path in
    /// every term). Ranks are computed by fraction-free elimination over the
    /// exact field; throws std::invalid_argument on mixed-path terms.
    Srv srv() const;

    /// Distinct OAM values seen in photon slot `slot` across all terms.
    std::vector<int> slot_modes(int slot) const;

    /// Canonical text: "(1) |a:0 b:0 c:0⟩ + (1) |a:1 b:1 c:1⟩".
    std::string to_string() const;
    static std::optional<PhotonicState> parse(std::string_view text);

private:
    int order_ = 0;
    std::vector<std::pair<FockTerm, CycNum>> terms_; // sorted by term
};

/// Exact rank of a dense matrix over Q(zeta_8) via Bareiss-style
/// fraction-free Gaussian elimination (division by the previous pivot is
/// exact field division).
int exact_rank(std::vector<std::vector<CycNum>> matrix);

std::string path_name(int path);
std::optional<int> parse_path_name(std::string_view name);

} // namespace quphox
