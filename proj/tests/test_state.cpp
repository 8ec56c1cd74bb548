#include <algorithm>
#include <complex>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include <doctest.h>
#include <Eigen/Dense>

#include "quphox/elements.hpp"
#include "quphox/state.hpp"

using namespace quphox;

namespace {

ModeLabel ml(int path, int oam) {
    return ModeLabel{static_cast<std::int8_t>(path), static_cast<std::int8_t>(oam)};
}

FockTerm term(std::initializer_list<ModeLabel> photons) {
    FockTerm t;
    for (const ModeLabel& m : photons) t.add(m);
    return t;
}

PhotonicState from_terms(std::initializer_list<FockTerm> terms) {
    PhotonicState out(terms.begin()->size());
    for (const FockTerm& t : terms) out.add_term(t, CycNum::from_int(1));
    return out;
}

PhotonicState ghz3() {
    return from_terms({term({ml(0, 0), ml(1, 0), ml(2, 0)}), term({ml(0, 1), ml(1, 1), ml(2, 1)}),
                       term({ml(0, 2), ml(1, 2), ml(2, 2)})});
}

// Independent SVD-threshold rank oracle (floating point).
std::vector<int> svd_srv_oracle(const PhotonicState& state, double threshold) {
    const int slots = state.order();
    std::vector<int> ranks;
    for (int slot = 0; slot < slots; ++slot) {
        std::map<int, int> rows;
        std::map<std::vector<int>, int> cols;
        for (const auto& [t, amp] : state.terms()) {
            rows.emplace(t.photon(slot).oam, 0);
            std::vector<int> rest;
            for (int k = 0; k < slots; ++k) {
                if (k != slot) rest.push_back(t.photon(k).oam);
            }
            cols.emplace(rest, 0);
        }
        int idx = 0;
        for (auto& [k, v] : rows) v = idx++;
        idx = 0;
        for (auto& [k, v] : cols) v = idx++;
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<long>(rows.size()),
                                                    static_cast<long>(cols.size()));
        for (const auto& [t, amp] : state.terms()) {
            std::vector<int> rest;
            for (int k = 0; k < slots; ++k) {
                if (k != slot) rest.push_back(t.photon(k).oam);
            }
            m(rows[t.photon(slot).oam], cols[rest]) = amp.to_complex();
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
        int rank = 0;
        for (long k = 0; k < svd.singularValues().size(); ++k) {
            if (svd.singularValues()(k) > threshold) ++rank;
        }
        ranks.push_back(rank);
    }
    std::sort(ranks.begin(), ranks.end(), std::greater<>());
    return ranks;
}

CycNum random_amp(std::mt19937_64& rng) {
    auto coeff = [&rng]() {
        return Rational(BigInt(static_cast<long long>(rng() % 5) - 2),
                        BigInt(1 + static_cast<long long>(rng() % 2)));
    };
    return CycNum(coeff(), coeff(), coeff(), coeff());
}

PhotonicState random_three_photon_state(std::mt19937_64& rng, int max_modes, int max_terms) {
    while (true) {
        PhotonicState state(3);
        const int terms = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_terms));
        for (int k = 0; k < terms; ++k) {
            FockTerm t;
            for (int slot = 0; slot < 3; ++slot) {
                t.add(ml(slot, static_cast<int>(rng() % static_cast<std::uint64_t>(max_modes))));
            }
            state.add_term(t, random_amp(rng));
        }
        if (!state.empty()) return state;
    }
}

} // namespace

TEST_CASE("fock term ordering and multiset") {
    FockTerm t;
    t.add(ml(1, 2));
    t.add(ml(0, 1));
    t.add(ml(1, -1));
    CHECK(t.photon(0) == ml(0, 1));
    CHECK(t.photon(1) == ml(1, -1));
    CHECK(t.photon(2) == ml(1, 2));
    CHECK(t.count_in_path(1) == 2);
    CHECK(t.find_single_in_path(0) == 0);
    CHECK(t.find_single_in_path(1) == -1);
    CHECK(t.to_string() == "a:1 b:-1 b:2");
}

TEST_CASE("substitute is linear on a single photon") {
    PhotonicState state = PhotonicState::single_term(term({ml(0, 0)}), CycNum::from_int(1));
    SubstitutionRules rules;
    rules[ml(0, 0)] = {{ml(1, 0), CycNum::inv_sqrt2()},
                       {ml(0, 0), CycNum::i() * CycNum::inv_sqrt2()}};
    PhotonicState out = state.substitute(rules);
    CHECK(out.term_count() == 2);
    CHECK(out.amplitude(term({ml(1, 0)})) == CycNum::inv_sqrt2());
    CHECK(out.amplitude(term({ml(0, 0)})) == CycNum::i() * CycNum::inv_sqrt2());
}

TEST_CASE("Hong-Ou-Mandel cancellation is exact") {
    PhotonicState state =
        PhotonicState::single_term(term({ml(0, 0), ml(1, 0)}), CycNum::from_int(1));
    PhotonicState out = state.substitute(rules_of(Element{BeamSplitter{0, 1}}, 2));
    const CycNum half_i = CycNum::i() * CycNum(Rational(1, 2), 0, 0, 0);
    CHECK(out.amplitude(term({ml(0, 0), ml(1, 0)})).is_zero()); // coincidence cancels
    CHECK(out.amplitude(term({ml(0, 0), ml(0, 0)})) == half_i);
    CHECK(out.amplitude(term({ml(1, 0), ml(1, 0)})) == half_i);
    CHECK(out.term_count() == 2);
}

TEST_CASE("empty rule map is the identity") {
    PhotonicState state = ghz3();
    CHECK(state.substitute(SubstitutionRules{}).terms() == state.terms());
}

TEST_CASE("postselect keeps one photon per path with the trigger in its mode") {
    DetectionSpec det{3, 0, {0, 1, 2}};
    PhotonicState state(4);
    state.add_term(term({ml(0, 0), ml(1, 1), ml(2, 2), ml(3, 0)}), CycNum::from_int(1));
    state.add_term(term({ml(0, 0), ml(0, 1), ml(2, 2), ml(3, 0)}), CycNum::from_int(1));
    state.add_term(term({ml(0, 0), ml(1, 1), ml(2, 2), ml(3, 1)}), CycNum::from_int(1));
    PhotonicState heralded = state.postselect(det);
    CHECK(heralded.order() == 3);
    CHECK(heralded.term_count() == 1);
    CHECK(heralded.amplitude(term({ml(0, 0), ml(1, 1), ml(2, 2)})) == CycNum::from_int(1));
}

TEST_CASE("postselect with trigger presence keeps every trigger mode") {
    DetectionSpec det{3, std::nullopt, {0, 1, 2}};
    PhotonicState state(4);
    state.add_term(term({ml(0, 0), ml(1, 1), ml(2, 2), ml(3, 0)}), CycNum::from_int(1));
    state.add_term(term({ml(0, 1), ml(1, 0), ml(2, 2), ml(3, -1)}), CycNum::from_int(1));
    CHECK(state.postselect(det).term_count() == 2);
}

TEST_CASE("empty postselection result is a normal outcome") {
    DetectionSpec det{3, 0, {0, 1, 2}};
    PhotonicState state(4);
    state.add_term(term({ml(0, 0), ml(0, 1), ml(1, 0), ml(1, 1)}), CycNum::from_int(1));
    PhotonicState heralded = state.postselect(det);
    CHECK(heralded.empty());
}

TEST_CASE("srv golden values") {
    CHECK(ghz3().srv().ranks == std::vector<int>{3, 3, 3});

    PhotonicState psi1 = from_terms({term({ml(0, 0), ml(1, 0), ml(2, 0)}),
                                     term({ml(0, 1), ml(1, 1), ml(2, 1)}),
                                     term({ml(0, 2), ml(1, 2), ml(2, 1)})});
    CHECK(psi1.srv().ranks == std::vector<int>{3, 3, 2});

    PhotonicState psi2 = from_terms({term({ml(0, 0), ml(1, 0), ml(2, 0)}),
                                     term({ml(0, 1), ml(1, 0), ml(2, 1)}),
                                     term({ml(0, 2), ml(1, 1), ml(2, 0)}),
                                     term({ml(0, 3), ml(1, 1), ml(2, 1)})});
    CHECK(psi2.srv().ranks == std::vector<int>{4, 2, 2});

    PhotonicState product_state = from_terms({term({ml(0, 0), ml(1, 0), ml(2, 0)})});
    CHECK(product_state.srv().ranks == std::vector<int>{1, 1, 1});
}

TEST_CASE("srv rejects mixed-path terms") {
    PhotonicState bad(2);
    bad.add_term(term({ml(0, 0), ml(0, 1)}), CycNum::from_int(1));
    CHECK_THROWS_AS(bad.srv(), std::invalid_argument);
}

TEST_CASE("fidelity examples") {
    PhotonicState g = ghz3();
    CHECK(g.fidelity(g) == doctest::Approx(1.0).epsilon(1e-12));

    PhotonicState zero_ket = from_terms({term({ml(0, 0), ml(1, 0), ml(2, 0)})});
    PhotonicState one_ket = from_terms({term({ml(0, 1), ml(1, 1), ml(2, 1)})});
    CHECK(zero_ket.fidelity(one_ket) == doctest::Approx(0.0));

    PhotonicState two_term = from_terms(
        {term({ml(0, 0), ml(1, 0), ml(2, 0)}), term({ml(0, 1), ml(1, 1), ml(2, 1)})});
    CHECK(two_term.fidelity(g) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    PhotonicState empty;
    CHECK_THROWS_AS(g.fidelity(empty), std::domain_error);
}

TEST_CASE("norm preservation under unitary rule sets is exact") {
    std::mt19937_64 rng(23);
    std::vector<Element> unitaries = {
        Element{BeamSplitter{0, 1}}, Element{Reflection{0}}, Element{DovePrism{0, 3}},
        Element{PhaseShifter{1, 5}}, Element{ParitySorter{0, 1}},
    };
    for (int trial = 0; trial < 40; ++trial) {
        PhotonicState state(2);
        for (int k = 0; k < 4; ++k) {
            FockTerm t;
            t.add(ml(static_cast<int>(rng() % 2), static_cast<int>(rng() % 5) - 2));
            t.add(ml(static_cast<int>(rng() % 2), static_cast<int>(rng() % 5) - 2));
            state.add_term(t, random_amp(rng));
        }
        if (state.empty()) continue;
        for (const Element& e : unitaries) {
            PhotonicState out = state.substitute(rules_of(e, 2));
            CHECK(out.norm2() == state.norm2());
        }
        // Hologram away from the cutoff boundary (the documented exception).
        PhotonicState inner(2);
        for (const auto& [t, amp] : state.terms()) {
            bool safe = true;
            for (int k = 0; k < t.size(); ++k) {
                if (t.photon(k).oam > 1) safe = false;
            }
            if (safe) inner.add_term(t, amp);
        }
        if (!inner.empty()) {
            PhotonicState out = inner.substitute(rules_of(Element{Hologram{0, 1}}, 2));
            CHECK(out.norm2() == inner.norm2());
        }
    }
}

TEST_CASE("exact srv matches the SVD oracle on random sparse states") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 150; ++trial) {
        PhotonicState state = random_three_photon_state(rng, 4, 8);
        CHECK(state.srv().ranks == svd_srv_oracle(state, 1e-8));
    }
}

TEST_CASE("srv invariances") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        PhotonicState state = random_three_photon_state(rng, 4, 6);
        Srv base = state.srv();

        // Permute slot-0 modes by a relabeling (mode m -> 3 - m).
        PhotonicState permuted(3);
        for (const auto& [t, amp] : state.terms()) {
            FockTerm nt;
            nt.add(ml(0, 3 - t.photon(0).oam));
            nt.add(t.photon(1));
            nt.add(t.photon(2));
            permuted.add_term(nt, amp);
        }
        CHECK(permuted.srv() == base);

        // Multiply one term's amplitude by a lattice phase.
        PhotonicState phased(3);
        bool first = true;
        for (const auto& [t, amp] : state.terms()) {
            phased.add_term(t, first ? amp * CycNum::phase(static_cast<int>(rng() % 8)) : amp);
            first = false;
        }
        CHECK(phased.srv() == base);
    }
}

TEST_CASE("trigger projection commutes with trigger-untouched substitution") {
    std::mt19937_64 rng(37);
    DetectionSpec det{3, 0, {0, 1, 2}};
    SubstitutionRules rules = rules_of(Element{BeamSplitter{0, 1}}, 2);
    for (int trial = 0; trial < 30; ++trial) {
        PhotonicState state(4);
        for (int k = 0; k < 5; ++k) {
            FockTerm t;
            for (int photon = 0; photon < 4; ++photon) {
                t.add(ml(static_cast<int>(rng() % 4), static_cast<int>(rng() % 3) - 1));
            }
            state.add_term(t, random_amp(rng));
        }
        PhotonicState lhs = state.substitute(rules).postselect(det);
        PhotonicState rhs =
            state.project_trigger(det).substitute(rules).filter_coincidence(det.coincidence_paths);
        CHECK(lhs.terms() == rhs.terms());
    }
}

TEST_CASE("state text round trip") {
    PhotonicState g = ghz3();
    CHECK(g.to_string() ==
          "(1) |a:0 b:0 c:0⟩ + (1) |a:1 b:1 c:1⟩ + (1) |a:2 b:2 c:2⟩");
    auto parsed = PhotonicState::parse(g.to_string());
    REQUIRE(parsed.has_value());
    CHECK(parsed->terms() == g.terms());

    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        PhotonicState state = random_three_photon_state(rng, 4, 6);
        auto round = PhotonicState::parse(state.to_string());
        REQUIRE(round.has_value());
        CHECK(round->terms() == state.terms());
    }
    CHECK(PhotonicState::parse("garbage") == std::nullopt);
}

TEST_CASE("bosonic weights make bunched norms consistent") {
    // |a:0 a:0> has squared norm 2 (two identical photons).
    PhotonicState bunched =
        PhotonicState::single_term(term({ml(0, 0), ml(0, 0)}), CycNum::from_int(1));
    CHECK(bunched.norm2() == CycNum::from_int(2));
}
