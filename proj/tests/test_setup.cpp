#include <random>

#include <doctest.h>

#include "quphox/objectives.hpp"
#include "quphox/setup.hpp"

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

Setup base_setup() {
    Setup setup;
    setup.num_paths = 4;
    setup.mode_cutoff = 2;
    setup.sources = {Spdc{0, 1, 3, std::nullopt}, Spdc{2, 3, 3, std::nullopt}};
    setup.detection = DetectionSpec{3, std::nullopt, {0, 1, 2}};
    return setup;
}

Setup dim1_setup() {
    Setup setup = base_setup();
    setup.sources = {Spdc{0, 1, 1, std::nullopt}, Spdc{2, 3, 1, std::nullopt}};
    setup.detection.trigger_oam = 0;
    return setup;
}

/// Truncated-mode sources: the hand-built dims-2 witness base.
Setup witness_base() {
    Setup setup = base_setup();
    setup.source_modes = std::vector<int>{0, 1};
    return setup;
}

} // namespace

TEST_CASE("simulate with no elements heralds the bare coincidence") {
    PhotonicState heralded = simulate(dim1_setup());
    CHECK(heralded.order() == 3);
    CHECK(heralded.term_count() == 1);
    CHECK(heralded.amplitude(term({ml(0, 0), ml(1, 0), ml(2, 0)})) == CycNum::from_int(1));
}

TEST_CASE("parity sorter is inert on all-even states") {
    Setup setup = dim1_setup();
    setup.elements = {Element{ParitySorter{1, 2}}};
    CHECK(simulate(setup).terms() == simulate(dim1_setup()).terms());
}

TEST_CASE("hand-built dims-2 witness: truncated sources + parity sorter") {
    Setup setup = witness_base();
    setup.elements = {Element{ParitySorter{1, 2}}};

    // Pre-trigger coincidence structure: exactly the two mode-correlated terms.
    PhotonicState emission = simulate_emission(setup);
    PhotonicState coincident(4);
    for (const auto& [t, amp] : emission.terms()) {
        bool one_each = true;
        for (int p = 0; p < 4; ++p) one_each = one_each && t.count_in_path(p) == 1;
        if (one_each) coincident.add_term(t, amp);
    }
    CHECK(coincident.term_count() == 2);

    PhotonicState heralded = simulate(setup);
    CHECK(heralded.term_count() == 2);
    CHECK(heralded.amplitude(term({ml(0, 0), ml(1, 0), ml(2, 0)})) == CycNum::from_int(1));
    CHECK(heralded.amplitude(term({ml(0, 1), ml(1, 1), ml(2, -1)})) == CycNum::from_int(1));
    CHECK(heralded.srv().ranks == std::vector<int>{2, 2, 2});
    CHECK(ghz_match(heralded, 2, false).has_value());
}

TEST_CASE("mixes_pairs on the coupling graph") {
    Setup setup = base_setup();
    CHECK(!mixes_pairs(setup)); // no two-path elements at all

    setup.elements = {Element{BeamSplitter{1, 2}}};
    CHECK(mixes_pairs(setup)); // bridges the two crystals

    setup.elements = {Element{BeamSplitter{0, 1}}};
    CHECK(!mixes_pairs(setup)); // couples crystal 1 to itself

    setup.elements = {Element{DovePrism{0, 1}}, Element{PhaseShifter{2, 3}}};
    CHECK(!mixes_pairs(setup)); // single-path elements never mix

    // Two hops: crystal 1 reaches d through b-c then c-d couplings.
    setup.elements = {Element{BeamSplitter{1, 2}}, Element{ParitySorter{2, 3}}};
    CHECK(mixes_pairs(setup));
}

TEST_CASE("mixes_pairs soundness by exhaustive enumeration") {
    // Every non-mixing setup's heralded state factorizes across the
    // source-induced bipartition of the detector paths (exact rank-1 check).
    Setup base = witness_base();
    std::vector<Element> instances;
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
            instances.push_back(Element{BeamSplitter{a, b}});
            instances.push_back(Element{ParitySorter{a, b}});
        }
    }
    std::uint64_t checked = 0;
    for (int len = 0; len <= 3; ++len) {
        std::vector<size_t> odometer(static_cast<size_t>(len), 0);
        bool carry = false;
        while (!carry) {
            Setup candidate = base;
            for (size_t digit : odometer) candidate.elements.push_back(instances[digit]);
            if (!mixes_pairs(candidate)) {
                PhotonicState heralded = simulate(candidate);
                if (!heralded.empty()) {
                    ++checked;
                    // Independent re-derivation of per-path source reachability.
                    std::vector<unsigned> mask(4, 0);
                    mask[0] = mask[1] = 1u;
                    mask[2] = mask[3] = 2u;
                    for (const Element& e : candidate.elements) {
                        auto touched = e.paths_touched();
                        unsigned joined = mask[static_cast<size_t>(touched[0])] |
                                          mask[static_cast<size_t>(touched[1])];
                        mask[static_cast<size_t>(touched[0])] = joined;
                        mask[static_cast<size_t>(touched[1])] = joined;
                    }
                    // Bipartition the three heralded slots (paths 0,1,2).
                    std::vector<int> left, right;
                    for (int p = 0; p < 3; ++p) {
                        (mask[static_cast<size_t>(p)] & 1u ? left : right).push_back(p);
                    }
                    if (!left.empty() && !right.empty()) {
                        std::map<std::vector<int>, size_t> rows, cols;
                        for (const auto& [t, amp] : heralded.terms()) {
                            std::vector<int> lkey, rkey;
                            for (int k = 0; k < t.size(); ++k) {
                                const ModeLabel& photon = t.photon(k);
                                auto& key = (mask[static_cast<size_t>(photon.path)] & 1u) ? lkey : rkey;
                                key.push_back(photon.oam);
                            }
                            rows.emplace(lkey, rows.size());
                            cols.emplace(rkey, cols.size());
                        }
                        size_t idx = 0;
                        for (auto& [k, v] : rows) v = idx++;
                        idx = 0;
                        for (auto& [k, v] : cols) v = idx++;
                        std::vector<std::vector<CycNum>> matrix(rows.size(),
                                                                std::vector<CycNum>(cols.size()));
                        for (const auto& [t, amp] : heralded.terms()) {
                            std::vector<int> lkey, rkey;
                            for (int k = 0; k < t.size(); ++k) {
                                const ModeLabel& photon = t.photon(k);
                                auto& key = (mask[static_cast<size_t>(photon.path)] & 1u) ? lkey : rkey;
                                key.push_back(photon.oam);
                            }
                            matrix[rows[lkey]][cols[rkey]] = amp;
                        }
                        CHECK(exact_rank(std::move(matrix)) == 1);
                    }
                }
            }
            carry = true;
            for (size_t k = odometer.size(); k-- > 0;) {
                if (++odometer[k] < instances.size()) {
                    carry = false;
                    break;
                }
            }
            if (odometer.empty()) break;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("simplify removes irrelevant elements") {
    Setup witness = witness_base();
    witness.elements = {Element{ParitySorter{1, 2}}};

    auto srv_222 = [](const Setup& candidate) {
        PhotonicState heralded = simulate(candidate);
        return !heralded.empty() && heralded.srv() == Srv{{2, 2, 2}};
    };

    Setup padded = witness;
    padded.elements.push_back(Element{PhaseShifter{0, 3}}); // phase never changes the SRV
    Setup reduced = simplify(padded, srv_222);
    CHECK(reduced == witness);

    CHECK(simplify(witness, srv_222) == witness); // already minimal

    // Two redundant reflections on the trigger path vanish across passes.
    Setup doubly_padded = witness;
    doubly_padded.elements.insert(doubly_padded.elements.begin(), Element{Reflection{3}});
    doubly_padded.elements.push_back(Element{Reflection{3}});
    CHECK(simplify(doubly_padded, srv_222) == witness);

    Setup unsatisfied = witness_base();
    CHECK_THROWS_AS(simplify(unsatisfied, srv_222), std::domain_error);
}

TEST_CASE("to_composite reproduces the chain on fresh paths") {
    Setup setup = witness_base();
    setup.elements = {Element{BeamSplitter{1, 2}}, Element{DovePrism{1, 2}},
                      Element{BeamSplitter{1, 2}}};
    Element composite = to_composite(setup, "probe");
    const Composite& comp = std::get<Composite>(composite.value);
    CHECK(comp.inner.size() == 3);
    // Canonical numbering starts at 0 in first-encounter order.
    CHECK(std::get<BeamSplitter>(comp.inner[0].value).path_a == 0);
    CHECK(std::get<BeamSplitter>(comp.inner[0].value).path_b == 1);

    // Instantiating back on the original paths reproduces the simulation.
    Setup rebuilt = setup;
    rebuilt.elements = {composite.with_paths({1, 2})};
    CHECK(simulate(rebuilt).terms() == simulate(setup).terms());

    Setup empty_chain = witness_base();
    Element identity = to_composite(empty_chain, "empty");
    CHECK(std::get<Composite>(identity.value).inner.empty());
    Setup with_identity = witness_base();
    with_identity.elements = {identity};
    CHECK(simulate(with_identity).terms() == simulate(empty_chain).terms());
}

TEST_CASE("setup text round trip") {
    Setup setup = witness_base();
    setup.elements = {Element{ParitySorter{1, 2}}, Element{DovePrism{0, 2}},
                      Element{Hologram{2, -1}}};
    std::string text = to_text(setup);
    Setup parsed = parse_setup(text);
    CHECK(parsed == setup);
    CHECK(to_text(parsed) == text);

    CHECK_THROWS_AS(parse_setup("paths: a b\n"), std::invalid_argument);          // no trigger
    CHECK_THROWS_AS(parse_setup("garbage file"), std::invalid_argument);
    CHECK_THROWS_AS(parse_setup(text + "\nBS[a,a]\n"), std::invalid_argument);
}

TEST_CASE("setup validation") {
    Setup setup = base_setup();
    for (int k = 0; k < 16; ++k) setup.elements.push_back(Element{Reflection{0}});
    CHECK_THROWS_AS(validate(setup, 15), std::invalid_argument);
    setup.elements.clear();

    setup.detection.coincidence_paths = {0, 1, 3}; // includes the trigger
    CHECK_THROWS_AS(validate(setup, 15), std::invalid_argument);

    setup = base_setup();
    setup.elements = {Element{Hologram{0, 5}}}; // |shift| > 2M
    CHECK_THROWS_AS(validate(setup, 15), std::invalid_argument);

    setup = base_setup();
    setup.elements = {Element{BeamSplitter{0, 7}}}; // path outside the set
    CHECK_THROWS_AS(validate(setup, 15), std::invalid_argument);

    CHECK_THROWS_AS(simulate(Setup{}), std::invalid_argument); // no sources
}
