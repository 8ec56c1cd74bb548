#include "quphox/state.hpp"

#include <algorithm>
#include <stdexcept>

namespace quphox {

// --- FockTerm ---------------------------------------------------------------

FockTerm::FockTerm(std::span<const ModeLabel> photons) {
    if (photons.size() > kMaxPhotons) throw std::invalid_argument("FockTerm: too many photons");
    for (const ModeLabel& m : photons) add(m);
}

void FockTerm::add(ModeLabel label) {
    if (size_ >= kMaxPhotons) throw std::invalid_argument("FockTerm: too many photons");
    int pos = size_;
    while (pos > 0 && label < photons_[static_cast<size_t>(pos - 1)]) {
        photons_[static_cast<size_t>(pos)] = photons_[static_cast<size_t>(pos - 1)];
        --pos;
    }
    photons_[static_cast<size_t>(pos)] = label;
    ++size_;
}

FockTerm FockTerm::without(int idx) const {
    FockTerm out;
    for (int k = 0; k < size_; ++k) {
        if (k == idx) continue;
        out.photons_[static_cast<size_t>(out.size_++)] = photons_[static_cast<size_t>(k)];
    }
    return out;
}

int FockTerm::count_in_path(int path) const {
    int n = 0;
    for (int k = 0; k < size_; ++k) {
        if (photons_[static_cast<size_t>(k)].path == path) ++n;
    }
    return n;
}

int FockTerm::find_single_in_path(int path) const {
    int found = -1;
    for (int k = 0; k < size_; ++k) {
        if (photons_[static_cast<size_t>(k)].path == path) {
            if (found >= 0) return -1;
            found = k;
        }
    }
    return found;
}

std::string FockTerm::to_string() const {
    std::string out;
    for (int k = 0; k < size_; ++k) {
        if (k > 0) out += " ";
        const ModeLabel& m = photons_[static_cast<size_t>(k)];
        out += path_name(m.path);
        out += ":";
        out += std::to_string(static_cast<int>(m.oam));
    }
    return out;
}

std::string path_name(int path) {
    if (path < 0 || path > 25) throw std::invalid_argument("path index out of range");
    return std::string(1, static_cast<char>('a' + path));
}

std::optional<int> parse_path_name(std::string_view name) {
    if (name.size() != 1 || name[0] < 'a' || name[0] > 'z') return std::nullopt;
    return name[0] - 'a';
}

// --- PhotonicState ----------------------------------------------------------

PhotonicState PhotonicState::single_term(const FockTerm& term, CycNum amplitude) {
    PhotonicState out(term.size());
    out.add_term(term, amplitude);
    return out;
}

CycNum PhotonicState::amplitude(const FockTerm& term) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                               [](const auto& entry, const FockTerm& t) { return entry.first < t; });
    if (it != terms_.end() && it->first == term) return it->second;
    return CycNum();
}

void PhotonicState::add_term(const FockTerm& term, const CycNum& amplitude) {
    if (amplitude.is_zero()) return;
    if (term.size() != order_) throw std::invalid_argument("PhotonicState: photon count mismatch");
    auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                               [](const auto& entry, const FockTerm& t) { return entry.first < t; });
    if (it != terms_.end() && it->first == term) {
        it->second += amplitude;
        if (it->second.is_zero()) terms_.erase(it);
    } else {
        terms_.insert(it, {term, amplitude});
    }
}

PhotonicState& PhotonicState::operator+=(const PhotonicState& rhs) {
    if (rhs.empty()) return *this;
    if (empty() && order_ == 0) order_ = rhs.order_;
    if (order_ != rhs.order_) throw std::invalid_argument("PhotonicState: order mismatch in sum");
    for (const auto& [term, amp] : rhs.terms_) add_term(term, amp);
    return *this;
}

PhotonicState product(const PhotonicState& lhs, const PhotonicState& rhs) {
    PhotonicState out(lhs.order_ + rhs.order_);
    for (const auto& [lt, la] : lhs.terms_) {
        for (const auto& [rt, ra] : rhs.terms_) {
            FockTerm merged = lt;
            for (int k = 0; k < rt.size(); ++k) merged.add(rt.photon(k));
            out.add_term(merged, la * ra);
        }
    }
    return out;
}

PhotonicState PhotonicState::substitute(const SubstitutionRules& rules, CutoffPolicy policy,
                                        std::uint64_t* dropped) const {
    PhotonicState out(order_);
    std::vector<std::pair<FockTerm, CycNum>> partial, next;
    for (const auto& [term, amp] : terms_) {
        partial.clear();
        partial.push_back({FockTerm(), amp});
        bool dead = false;
        for (int k = 0; k < term.size() && !dead; ++k) {
            const ModeLabel& photon = term.photon(k);
            auto rule = rules.find(photon);
            if (rule == rules.end()) {
                for (auto& [t, a] : partial) t.add(photon);
                continue;
            }
            if (rule->second.empty()) {
                if (policy == CutoffPolicy::kStrict) {
                    throw std::domain_error("substitute: photon pushed outside the mode cutoff");
                }
                if (dropped) ++*dropped;
                dead = true;
                break;
            }
            next.clear();
            for (const auto& [t, a] : partial) {
                for (const auto& [image, coeff] : rule->second) {
                    FockTerm grown = t;
                    grown.add(image);
                    next.push_back({grown, a * coeff});
                }
            }
            partial.swap(next);
        }
        if (dead) continue;
        for (auto& [t, a] : partial) out.add_term(t, a);
    }
    return out;
}

PhotonicState PhotonicState::project_trigger(const DetectionSpec& detection) const {
    PhotonicState out(order_ > 0 ? order_ - 1 : 0);
    for (const auto& [term, amp] : terms_) {
        int idx = term.find_single_in_path(detection.trigger_path);
        if (idx < 0) continue;
        if (detection.trigger_oam && term.photon(idx).oam != *detection.trigger_oam) continue;
        out.add_term(term.without(idx), amp);
    }
    return out;
}

PhotonicState PhotonicState::filter_coincidence(const std::vector<int>& paths) const {
    PhotonicState out(order_);
    for (const auto& [term, amp] : terms_) {
        if (term.size() != static_cast<int>(paths.size())) continue;
        bool ok = true;
        for (int path : paths) {
            if (term.count_in_path(path) != 1) {
                ok = false;
                break;
            }
        }
        if (ok) out.add_term(term, amp);
    }
    return out;
}

PhotonicState PhotonicState::postselect(const DetectionSpec& detection) const {
    return project_trigger(detection).filter_coincidence(detection.coincidence_paths);
}

namespace {

// Bosonic weight of a monomial: product over distinct modes of multiplicity!.
CycNum term_weight(const FockTerm& term) {
    long long weight = 1;
    int run = 1;
    for (int k = 1; k < term.size(); ++k) {
        if (term.photon(k) == term.photon(k - 1)) {
            ++run;
            weight *= run;
        } else {
            run = 1;
        }
    }
    return CycNum::from_int(weight);
}

} // namespace

CycNum PhotonicState::inner_product(const PhotonicState& other) const {
    CycNum total;
    auto lhs = terms_.begin();
    auto rhs = other.terms_.begin();
    while (lhs != terms_.end() && rhs != other.terms_.end()) {
        if (lhs->first < rhs->first) {
            ++lhs;
        } else if (rhs->first < lhs->first) {
            ++rhs;
        } else {
            total += lhs->second.conj() * rhs->second * term_weight(lhs->first);
            ++lhs;
            ++rhs;
        }
    }
    return total;
}

double PhotonicState::fidelity(const PhotonicState& target) const {
    if (empty() || target.empty()) throw std::domain_error("fidelity: empty state");
    if (order_ != target.order_) throw std::invalid_argument("fidelity: order mismatch");
    std::complex<double> overlap = target.inner_product(*this).to_complex();
    double norm_s = norm2().to_complex().real();
    double norm_t = target.norm2().to_complex().real();
    return std::norm(overlap) / (norm_s * norm_t);
}

std::vector<int> PhotonicState::slot_modes(int slot) const {
    std::vector<int> modes;
    for (const auto& [term, amp] : terms_) {
        if (slot >= term.size()) continue;
        int m = term.photon(slot).oam;
        if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
    }
    std::sort(modes.begin(), modes.end());
    return modes;
}

std::string PhotonicState::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [term, amp] : terms_) {
        if (!out.empty()) out += " + ";
        out += "(" + amp.to_string() + ") |" + term.to_string() + "⟩";
    }
    return out;
}

std::optional<PhotonicState> PhotonicState::parse(std::string_view text) {
    if (text == "0") return PhotonicState();
    PhotonicState out;
    bool first = true;
    size_t pos = 0;
    while (pos < text.size()) {
        if (!first) {
            if (text.compare(pos, 3, " + ") != 0) return std::nullopt;
            pos += 3;
        }
        if (pos >= text.size() || text[pos] != '(') return std::nullopt;
        size_t close = text.find(") |", pos);
        if (close == std::string_view::npos) return std::nullopt;
        auto amp = CycNum::parse(text.substr(pos + 1, close - pos - 1));
        if (!amp) return std::nullopt;
        size_t ket_start = close + 3;
        size_t ket_end = text.find("⟩", ket_start);
        if (ket_end == std::string_view::npos) return std::nullopt;
        std::string_view ket = text.substr(ket_start, ket_end - ket_start);

        FockTerm term;
        size_t p = 0;
        while (p < ket.size()) {
            size_t sp = ket.find(' ', p);
            std::string_view tok = ket.substr(p, sp == std::string_view::npos ? sp : sp - p);
            size_t colon = tok.find(':');
            if (colon == std::string_view::npos) return std::nullopt;
            auto path = parse_path_name(tok.substr(0, colon));
            if (!path) return std::nullopt;
            int oam = 0;
            try {
                oam = std::stoi(std::string(tok.substr(colon + 1)));
            } catch (const std::exception&) {
                return std::nullopt;
            }
            term.add(ModeLabel{static_cast<std::int8_t>(*path), static_cast<std::int8_t>(oam)});
            if (sp == std::string_view::npos) break;
            p = sp + 1;
        }
        if (first) {
            out = PhotonicState(term.size());
            first = false;
        }
        if (term.size() != out.order()) return std::nullopt;
        out.add_term(term, *amp);
        pos = ket_end + 3; // UTF-8 "⟩" is three bytes
    }
    if (first) return std::nullopt;
    return out;
}

} // namespace quphox
