#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "quphox/state.hpp"

namespace quphox {

int exact_rank(std::vector<std::vector<CycNum>> m) {
    if (m.empty() || m[0].empty()) return 0;
    const size_t rows = m.size();
    const size_t cols = m[0].size();
    size_t pivot_row = 0;
    CycNum prev_pivot = CycNum::from_int(1);
    for (size_t col = 0; col < cols && pivot_row < rows; ++col) {
        // First nonzero entry in this column at or below pivot_row.
        size_t sel = pivot_row;
        while (sel < rows && m[sel][col].is_zero()) ++sel;
        if (sel == rows) continue;
        std::swap(m[pivot_row], m[sel]);
        const CycNum pivot = m[pivot_row][col];
        const CycNum inv_prev = prev_pivot.inverse();
        for (size_t r = pivot_row + 1; r < rows; ++r) {
            // One-step fraction-free update; the division is exact.
            for (size_t c = col + 1; c < cols; ++c) {
                m[r][c] = (m[r][c] * pivot - m[r][col] * m[pivot_row][c]) * inv_prev;
            }
            m[r][col] = CycNum();
        }
        prev_pivot = pivot;
        ++pivot_row;
    }
    return static_cast<int>(pivot_row);
}

bool Srv::is_consistent() const {
    if (ranks.empty()) return false;
    for (size_t k = 0; k < ranks.size(); ++k) {
        if (ranks[k] < 1) return false;
        long long prod = 1;
        for (size_t j = 0; j < ranks.size(); ++j) {
            if (j != k) prod *= ranks[j];
        }
        if (ranks[k] > prod) return false;
    }
    return true;
}

std::string Srv::to_string() const {
    std::string out = "(";
    for (size_t k = 0; k < ranks.size(); ++k) {
        if (k > 0) out += ", ";
        out += std::to_string(ranks[k]);
    }
    return out + ")";
}

std::optional<Srv> Srv::parse(std::string_view text) {
    Srv out;
    size_t pos = 0;
    if (!text.empty() && text.front() == '(') {
        if (text.back() != ')') return std::nullopt;
        text = text.substr(1, text.size() - 2);
    }
    while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        std::string tok(text.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
        try {
            out.ranks.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            return std::nullopt;
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
        while (pos < text.size() && text[pos] == ' ') ++pos;
    }
    if (out.ranks.empty()) return std::nullopt;
    return out;
}

Srv PhotonicState::srv() const {
    if (terms_.empty()) throw std::invalid_argument("srv: empty state");
    const int slots = order_;
    // Post-selected precondition: exactly one photon per path, and every term
    // covers the same path set; slot i is the i-th path in sorted order.
    const FockTerm& first = terms_.front().first;
    for (const auto& [term, amp] : terms_) {
        for (int k = 0; k < slots; ++k) {
            if (term.photon(k).path != first.photon(k).path) {
                throw std::invalid_argument("srv: terms are not one-photon-per-path");
            }
        }
        for (int k = 1; k < slots; ++k) {
            if (term.photon(k).path == term.photon(k - 1).path) {
                throw std::invalid_argument("srv: multiple photons share a path");
            }
        }
    }

    Srv out;
    for (int slot = 0; slot < slots; ++slot) {
        // Rows: this slot's modes. Columns: joint modes of the complement in
        // lexicographic (path, oam) order — fixed for reproducible goldens.
        std::map<int, size_t> row_index;
        std::map<std::vector<int>, size_t> col_index;
        for (const auto& [term, amp] : terms_) {
            int mode = term.photon(slot).oam;
            row_index.emplace(mode, row_index.size());
            std::vector<int> rest;
            for (int k = 0; k < slots; ++k) {
                if (k != slot) rest.push_back(term.photon(k).oam);
            }
            col_index.emplace(std::move(rest), col_index.size());
        }
        // Re-number in sorted key order.
        size_t idx = 0;
        for (auto& [mode, i] : row_index) i = idx++;
        idx = 0;
        for (auto& [key, i] : col_index) i = idx++;

        std::vector<std::vector<CycNum>> matrix(row_index.size(),
                                                std::vector<CycNum>(col_index.size()));
        for (const auto& [term, amp] : terms_) {
            std::vector<int> rest;
            for (int k = 0; k < slots; ++k) {
                if (k != slot) rest.push_back(term.photon(k).oam);
            }
            matrix[row_index[term.photon(slot).oam]][col_index[rest]] = amp;
        }
        out.ranks.push_back(exact_rank(std::move(matrix)));
    }
    std::sort(out.ranks.begin(), out.ranks.end(), std::greater<>());
    return out;
}

} // namespace quphox
