#include "quphox/elements.hpp"

#include <algorithm>
#include <stdexcept>

namespace quphox {

namespace {

ModeLabel mode(int path, int oam) {
    return ModeLabel{static_cast<std::int8_t>(path), static_cast<std::int8_t>(oam)};
}

int positive_mod8(int v) { return ((v % 8) + 8) % 8; }

} // namespace

bool Composite::operator==(const Composite& other) const {
    return name == other.name && inner == other.inner;
}

std::vector<int> Spdc::emission_modes() const {
    if (modes) return *modes;
    std::vector<int> out;
    int half = dim / 2;
    for (int m = -half; m <= half; ++m) out.push_back(m);
    return out;
}

// --- Element basics ---------------------------------------------------------

std::vector<int> Element::paths_touched() const {
    return std::visit(
        [](const auto& e) -> std::vector<int> {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitter> || std::is_same_v<T, ParitySorter>) {
                return {e.path_a, e.path_b};
            } else if constexpr (std::is_same_v<T, Composite>) {
                std::vector<int> all;
                for (const Element& inner : e.inner) {
                    for (int p : inner.paths_touched()) {
                        if (std::find(all.begin(), all.end(), p) == all.end()) all.push_back(p);
                    }
                }
                return all;
            } else {
                return {e.path};
            }
        },
        value);
}

Element Element::with_paths(const std::vector<int>& mapping) const {
    auto remap = [&mapping](int p) {
        if (p < 0 || p >= static_cast<int>(mapping.size())) {
            throw std::invalid_argument("Element::with_paths: path outside mapping");
        }
        return mapping[static_cast<size_t>(p)];
    };
    Element out = *this;
    std::visit(
        [&](auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitter> || std::is_same_v<T, ParitySorter>) {
                e.path_a = remap(e.path_a);
                e.path_b = remap(e.path_b);
            } else if constexpr (std::is_same_v<T, Composite>) {
                for (Element& inner : e.inner) inner = inner.with_paths(mapping);
            } else {
                e.path = remap(e.path);
            }
        },
        out.value);
    return out;
}

// --- Rules ------------------------------------------------------------------

namespace {

void add_beam_splitter_rules(SubstitutionRules& rules, int a, int b, int cutoff) {
    const CycNum inv_sqrt2 = CycNum::inv_sqrt2();
    const CycNum i_inv_sqrt2 = CycNum::i() * inv_sqrt2;
    for (int m = -cutoff; m <= cutoff; ++m) {
        rules[mode(a, m)] = {{mode(b, m), inv_sqrt2}, {mode(a, -m), i_inv_sqrt2}};
        rules[mode(b, m)] = {{mode(a, m), inv_sqrt2}, {mode(b, -m), i_inv_sqrt2}};
    }
}

void add_rules(SubstitutionRules& rules, const Element& element, int cutoff);

void add_composite_rules(SubstitutionRules& rules, const Composite& comp, int cutoff) {
    SubstitutionRules chain;
    for (const Element& element : comp.inner) {
        SubstitutionRules step;
        add_rules(step, element, cutoff);
        // chain := step ∘ chain
        SubstitutionRules composed;
        for (auto& [label, image] : chain) {
            std::map<ModeLabel, CycNum> accum;
            for (const auto& [target, coeff] : image) {
                auto it = step.find(target);
                if (it == step.end()) {
                    accum[target] += coeff;
                    continue;
                }
                if (it->second.empty()) {
                    // target falls outside the cutoff at this step; the
                    // component is dropped from the image.
                    continue;
                }
                for (const auto& [t2, c2] : it->second) accum[t2] += coeff * c2;
            }
            std::vector<std::pair<ModeLabel, CycNum>> flattened;
            for (auto& [t, c] : accum) {
                if (!c.is_zero()) flattened.push_back({t, c});
            }
            composed[label] = std::move(flattened);
        }
        // Labels untouched so far but rewritten by this step.
        for (auto& [label, image] : step) {
            if (!composed.count(label) && !chain.count(label)) composed[label] = image;
        }
        chain = std::move(composed);
    }
    for (auto& [label, image] : chain) rules[label] = std::move(image);
}

void add_rules(SubstitutionRules& rules, const Element& element, int cutoff) {
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitter>) {
                add_beam_splitter_rules(rules, e.path_a, e.path_b, cutoff);
            } else if constexpr (std::is_same_v<T, Reflection>) {
                for (int m = -cutoff; m <= cutoff; ++m) {
                    rules[mode(e.path, m)] = {{mode(e.path, -m), CycNum::i()}};
                }
            } else if constexpr (std::is_same_v<T, DovePrism>) {
                for (int m = -cutoff; m <= cutoff; ++m) {
                    rules[mode(e.path, m)] = {{mode(e.path, -m), CycNum::phase(positive_mod8(2 * e.k * m))}};
                }
            } else if constexpr (std::is_same_v<T, Hologram>) {
                for (int m = -cutoff; m <= cutoff; ++m) {
                    int shifted = m + e.shift;
                    if (shifted < -cutoff || shifted > cutoff) {
                        rules[mode(e.path, m)] = {}; // outside the encoding space
                    } else {
                        rules[mode(e.path, m)] = {{mode(e.path, shifted), CycNum::from_int(1)}};
                    }
                }
            } else if constexpr (std::is_same_v<T, PhaseShifter>) {
                for (int m = -cutoff; m <= cutoff; ++m) {
                    rules[mode(e.path, m)] = {{mode(e.path, m), CycNum::phase(e.k)}};
                }
            } else if constexpr (std::is_same_v<T, ParitySorter>) {
                for (int m = -cutoff; m <= cutoff; ++m) {
                    if (m % 2 == 0) continue; // even modes stay put
                    rules[mode(e.path_a, m)] = {{mode(e.path_b, m), CycNum::from_int(1)}};
                    rules[mode(e.path_b, m)] = {{mode(e.path_a, m), CycNum::from_int(1)}};
                }
            } else if constexpr (std::is_same_v<T, Composite>) {
                add_composite_rules(rules, e, cutoff);
            }
        },
        element.value);
}

} // namespace

SubstitutionRules rules_of(const Element& element, int mode_cutoff) {
    SubstitutionRules rules;
    add_rules(rules, element, mode_cutoff);
    return rules;
}

SubstitutionRules compose_rules(const std::vector<Element>& chain, int mode_cutoff) {
    Composite comp{"", chain};
    SubstitutionRules rules;
    add_composite_rules(rules, comp, mode_cutoff);
    return rules;
}

// --- SPDC -------------------------------------------------------------------

PhotonicState spdc_emission(const Spdc& crystal) {
    if (crystal.path_a == crystal.path_b) throw std::invalid_argument("spdc: degenerate path pair");
    PhotonicState out(2);
    for (int m : crystal.emission_modes()) {
        FockTerm term;
        term.add(mode(crystal.path_a, m));
        term.add(mode(crystal.path_b, -m));
        out.add_term(term, CycNum::from_int(1));
    }
    return out;
}

PhotonicState spdc_state(const Spdc& crystal1, const Spdc& crystal2, bool include_double_emission) {
    for (int p : {crystal1.path_a, crystal1.path_b}) {
        if (p == crystal2.path_a || p == crystal2.path_b) {
            throw std::invalid_argument("spdc_state: crystals share a path");
        }
    }
    PhotonicState em1 = spdc_emission(crystal1);
    PhotonicState em2 = spdc_emission(crystal2);
    PhotonicState state = product(em1, em2);
    if (include_double_emission) {
        state += product(em1, em1);
        state += product(em2, em2);
    }
    return state;
}

// --- Text forms -------------------------------------------------------------

namespace {

std::string bracket_paths(int a, int b) {
    return "[" + path_name(a) + "," + path_name(b) + "]";
}

} // namespace

std::string Element::to_string() const {
    return std::visit(
        [](const auto& e) -> std::string {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, BeamSplitter>) {
                return "BS" + bracket_paths(e.path_a, e.path_b);
            } else if constexpr (std::is_same_v<T, Reflection>) {
                return "REFL[" + path_name(e.path) + "]";
            } else if constexpr (std::is_same_v<T, DovePrism>) {
                return "Dove[" + path_name(e.path) + ",k=" + std::to_string(e.k) + "]";
            } else if constexpr (std::is_same_v<T, Hologram>) {
                std::string s = e.shift >= 0 ? "+" + std::to_string(e.shift) : std::to_string(e.shift);
                return "Holo[" + path_name(e.path) + "," + s + "]";
            } else if constexpr (std::is_same_v<T, PhaseShifter>) {
                return "PS[" + path_name(e.path) + ",k=" + std::to_string(e.k) + "]";
            } else if constexpr (std::is_same_v<T, ParitySorter>) {
                return "LI" + bracket_paths(e.path_a, e.path_b);
            } else {
                std::string out = "CMP[" + e.name + "](";
                for (size_t k = 0; k < e.inner.size(); ++k) {
                    if (k > 0) out += ";";
                    out += e.inner[k].to_string();
                }
                return out + ")";
            }
        },
        value);
}

namespace {

std::optional<std::vector<std::string>> split_args(std::string_view inside) {
    std::vector<std::string> args;
    size_t pos = 0;
    while (pos <= inside.size()) {
        size_t comma = inside.find(',', pos);
        args.emplace_back(inside.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (args.empty()) return std::nullopt;
    return args;
}

std::optional<int> parse_int(std::string_view text) {
    try {
        size_t used = 0;
        int v = std::stoi(std::string(text), &used);
        if (used != text.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::optional<int> parse_keyed_int(std::string_view text, std::string_view key) {
    if (text.substr(0, key.size()) != key) return std::nullopt;
    return parse_int(text.substr(key.size()));
}

} // namespace

std::optional<Element> Element::parse(std::string_view text) {
    auto open = text.find('[');
    if (open == std::string_view::npos) return std::nullopt;
    std::string_view tag = text.substr(0, open);

    if (tag == "CMP") {
        auto close = text.find(']', open);
        if (close == std::string_view::npos) return std::nullopt;
        Composite comp;
        comp.name = std::string(text.substr(open + 1, close - open - 1));
        if (close + 1 >= text.size() || text[close + 1] != '(' || text.back() != ')') {
            return std::nullopt;
        }
        std::string_view body = text.substr(close + 2, text.size() - close - 3);
        size_t pos = 0;
        int depth = 0;
        size_t start = 0;
        while (pos <= body.size()) {
            if (pos == body.size() || (body[pos] == ';' && depth == 0)) {
                if (pos > start) {
                    auto inner = Element::parse(body.substr(start, pos - start));
                    if (!inner) return std::nullopt;
                    comp.inner.push_back(*inner);
                }
                if (pos == body.size()) break;
                start = pos + 1;
            } else if (body[pos] == '(') {
                ++depth;
            } else if (body[pos] == ')') {
                --depth;
            }
            ++pos;
        }
        return Element{comp};
    }

    if (text.back() != ']') return std::nullopt;
    auto args_opt = split_args(text.substr(open + 1, text.size() - open - 2));
    if (!args_opt) return std::nullopt;
    const auto& args = *args_opt;

    auto path_arg = [&](size_t idx) -> std::optional<int> {
        if (idx >= args.size()) return std::nullopt;
        return parse_path_name(args[idx]);
    };

    if (tag == "BS" || tag == "LI") {
        auto a = path_arg(0), b = path_arg(1);
        if (!a || !b || args.size() != 2 || *a == *b) return std::nullopt;
        if (tag == "BS") return Element{BeamSplitter{*a, *b}};
        return Element{ParitySorter{*a, *b}};
    }
    if (tag == "REFL") {
        auto p = path_arg(0);
        if (!p || args.size() != 1) return std::nullopt;
        return Element{Reflection{*p}};
    }
    if (tag == "Dove" || tag == "PS") {
        auto p = path_arg(0);
        if (!p || args.size() != 2) return std::nullopt;
        auto k = parse_keyed_int(args[1], "k=");
        if (!k || *k < 0 || *k > 7) return std::nullopt;
        if (tag == "Dove") return Element{DovePrism{*p, *k}};
        return Element{PhaseShifter{*p, *k}};
    }
    if (tag == "Holo") {
        auto p = path_arg(0);
        if (!p || args.size() != 2) return std::nullopt;
        auto s = parse_int(args[1]);
        if (!s) return std::nullopt;
        return Element{Hologram{*p, *s}};
    }
    return std::nullopt;
}

std::string spdc_to_string(const Spdc& crystal) {
    std::string out = "SPDC[" + path_name(crystal.path_a) + "," + path_name(crystal.path_b) +
                      ",dim=" + std::to_string(crystal.dim) + "]";
    return out;
}

std::optional<Spdc> parse_spdc(std::string_view text) {
    if (text.substr(0, 5) != "SPDC[" || text.back() != ']') return std::nullopt;
    auto args_opt = split_args(text.substr(5, text.size() - 6));
    if (!args_opt || args_opt->size() != 3) return std::nullopt;
    const auto& args = *args_opt;
    auto a = parse_path_name(args[0]);
    auto b = parse_path_name(args[1]);
    auto dim = parse_keyed_int(args[2], "dim=");
    if (!a || !b || !dim || *dim < 1) return std::nullopt;
    return Spdc{*a, *b, *dim, std::nullopt};
}

// --- Toolbox ----------------------------------------------------------------

int ToolboxTemplate::arity() const {
    switch (kind) {
        case Kind::kBeamSplitter:
        case Kind::kParitySorter:
            return 2;
        case Kind::kComposite: {
            int max_path = -1;
            Element probe{composite};
            for (int p : probe.paths_touched()) max_path = std::max(max_path, p);
            return max_path + 1;
        }
        default:
            return 1;
    }
}

std::string ToolboxTemplate::name() const {
    switch (kind) {
        case Kind::kBeamSplitter: return "BS";
        case Kind::kReflection: return "REFL";
        case Kind::kDove: return "Dove";
        case Kind::kHologram: return "Holo";
        case Kind::kPhaseShifter: return "PS";
        case Kind::kParitySorter: return "LI";
        case Kind::kComposite: return "CMP:" + composite.name;
    }
    return "?";
}

std::string ToolboxTemplate::canonical_key() const {
    if (kind != Kind::kComposite) return name();
    // Composites are identified by their canonical chain, not their name.
    std::string key = "CMP(";
    for (size_t k = 0; k < composite.inner.size(); ++k) {
        if (k > 0) key += ";";
        key += composite.inner[k].to_string();
    }
    return key + ")";
}

Toolbox Toolbox::standard() {
    using K = ToolboxTemplate::Kind;
    std::vector<ToolboxTemplate> templates;
    for (K kind : {K::kBeamSplitter, K::kReflection, K::kDove, K::kHologram, K::kPhaseShifter,
                   K::kParitySorter}) {
        templates.push_back(ToolboxTemplate{kind, {}});
    }
    return Toolbox(std::move(templates));
}

std::optional<Toolbox> Toolbox::from_names(const std::vector<std::string>& names) {
    using K = ToolboxTemplate::Kind;
    Toolbox out;
    for (const std::string& name : names) {
        if (name == "BS") out.add({K::kBeamSplitter, {}});
        else if (name == "REFL") out.add({K::kReflection, {}});
        else if (name == "Dove") out.add({K::kDove, {}});
        else if (name == "Holo") out.add({K::kHologram, {}});
        else if (name == "PS") out.add({K::kPhaseShifter, {}});
        else if (name == "LI") out.add({K::kParitySorter, {}});
        else {
            auto element = Element::parse(name);
            if (!element || !std::holds_alternative<Composite>(element->value)) return std::nullopt;
            out.add({K::kComposite, std::get<Composite>(element->value)});
        }
    }
    if (out.empty()) return std::nullopt;
    return out;
}

bool Toolbox::add(ToolboxTemplate tmpl) {
    std::string key = tmpl.canonical_key();
    for (const ToolboxTemplate& existing : templates_) {
        if (existing.canonical_key() == key) return false;
    }
    templates_.push_back(std::move(tmpl));
    return true;
}

} // namespace quphox
