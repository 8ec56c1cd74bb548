#include <random>

#include <doctest.h>

#include "quphox/elements.hpp"

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

PhotonicState single_photon(int path, int oam) {
    return PhotonicState::single_term(term({ml(path, oam)}), CycNum::from_int(1));
}

CycNum random_amp(std::mt19937_64& rng) {
    auto coeff = [&rng]() {
        return Rational(BigInt(static_cast<long long>(rng() % 5) - 2),
                        BigInt(1 + static_cast<long long>(rng() % 2)));
    };
    return CycNum(coeff(), coeff(), coeff(), coeff());
}

} // namespace

TEST_CASE("spdc emission and four-photon patterns") {
    Spdc c1{0, 1, 3, std::nullopt};
    Spdc c2{2, 3, 3, std::nullopt};

    PhotonicState em = spdc_emission(c1);
    CHECK(em.term_count() == 3); // m in {-1, 0, 1}, anticorrelated
    CHECK(em.amplitude(term({ml(0, 1), ml(1, -1)})) == CycNum::from_int(1));

    PhotonicState cross_only = spdc_state(c1, c2, false);
    CHECK(cross_only.term_count() == 9);
    for (const auto& [t, amp] : cross_only.terms()) CHECK(amp == CycNum::from_int(1));

    PhotonicState full = spdc_state(c1, c2, true);
    CHECK(full.term_count() == 21); // 9 cross + 6 + 6 double-emission patterns
    // Double emission amplitudes: diagonal pairs 1, mixed pairs 2.
    CHECK(full.amplitude(term({ml(0, 0), ml(0, 0), ml(1, 0), ml(1, 0)})) == CycNum::from_int(1));
    CHECK(full.amplitude(term({ml(0, 0), ml(0, 1), ml(1, -1), ml(1, 0)})) == CycNum::from_int(2));

    CHECK_THROWS_AS(spdc_state(c1, Spdc{1, 2, 3, std::nullopt}, true), std::invalid_argument);
}

TEST_CASE("one dim-1 crystal fired twice") {
    Spdc c{0, 1, 1, std::nullopt};
    PhotonicState doubled = product(spdc_emission(c), spdc_emission(c));
    CHECK(doubled.term_count() == 1);
    CHECK(doubled.amplitude(term({ml(0, 0), ml(0, 0), ml(1, 0), ml(1, 0)})) == CycNum::from_int(1));
}

TEST_CASE("truncated emission modes") {
    Spdc c{0, 1, 3, std::vector<int>{0, 1}};
    PhotonicState em = spdc_emission(c);
    CHECK(em.term_count() == 2);
    CHECK(em.amplitude(term({ml(0, 1), ml(1, -1)})) == CycNum::from_int(1));
}

TEST_CASE("parity sorter routes by parity") {
    SubstitutionRules li = rules_of(Element{ParitySorter{0, 1}}, 2);
    PhotonicState odd = single_photon(0, 1).substitute(li);
    CHECK(odd.amplitude(term({ml(1, 1)})) == CycNum::from_int(1));
    CHECK(odd.term_count() == 1);
    PhotonicState even = single_photon(0, 2).substitute(li);
    CHECK(even.amplitude(term({ml(0, 2)})) == CycNum::from_int(1));
    CHECK(even.term_count() == 1);
}

TEST_CASE("hologram shifts and drops at the cutoff") {
    SubstitutionRules holo = rules_of(Element{Hologram{0, 1}}, 2);
    std::uint64_t dropped = 0;
    PhotonicState shifted = single_photon(0, 1).substitute(holo, CutoffPolicy::kDrop, &dropped);
    CHECK(shifted.amplitude(term({ml(0, 2)})) == CycNum::from_int(1));
    CHECK(dropped == 0);

    PhotonicState gone = single_photon(0, 2).substitute(holo, CutoffPolicy::kDrop, &dropped);
    CHECK(gone.empty());
    CHECK(dropped == 1);

    CHECK_THROWS_AS(single_photon(0, 2).substitute(holo, CutoffPolicy::kStrict),
                    std::domain_error);
}

TEST_CASE("dove prism example") {
    SubstitutionRules dove = rules_of(Element{DovePrism{0, 2}}, 2);
    PhotonicState out = single_photon(0, 1).substitute(dove);
    CHECK(out.amplitude(term({ml(0, -1)})) == -CycNum::from_int(1)); // phase(4) = -1
}

TEST_CASE("reflection squared is a global minus sign") {
    SubstitutionRules refl = rules_of(Element{Reflection{0}}, 2);
    std::mt19937_64 rng(5);
    PhotonicState state(1);
    for (int m = -2; m <= 2; ++m) state.add_term(term({ml(0, m)}), random_amp(rng));
    PhotonicState twice = state.substitute(refl).substitute(refl);
    PhotonicState negated(1);
    for (const auto& [t, amp] : state.terms()) negated.add_term(t, -amp);
    CHECK(twice.terms() == negated.terms());
}

TEST_CASE("parity sorter squared is the identity") {
    SubstitutionRules li = rules_of(Element{ParitySorter{0, 1}}, 2);
    std::mt19937_64 rng(6);
    PhotonicState state(1);
    for (int m = -2; m <= 2; ++m) {
        state.add_term(term({ml(0, m)}), random_amp(rng));
        state.add_term(term({ml(1, m)}), random_amp(rng));
    }
    CHECK(state.substitute(li).substitute(li).terms() == state.terms());
}

TEST_CASE("single-photon norm preservation per element") {
    std::mt19937_64 rng(9);
    std::vector<Element> elements = {
        Element{BeamSplitter{0, 1}}, Element{Reflection{1}},    Element{DovePrism{0, 5}},
        Element{PhaseShifter{0, 3}}, Element{ParitySorter{0, 1}},
    };
    for (int trial = 0; trial < 30; ++trial) {
        PhotonicState state(1);
        for (int path = 0; path < 2; ++path) {
            for (int m = -2; m <= 2; ++m) state.add_term(term({ml(path, m)}), random_amp(rng));
        }
        for (const Element& e : elements) {
            CHECK(state.substitute(rules_of(e, 2)).norm2() == state.norm2());
        }
    }
}

TEST_CASE("composite rules equal sequential application") {
    std::mt19937_64 rng(15);
    std::vector<Element> chain = {Element{BeamSplitter{0, 1}}, Element{DovePrism{0, 2}},
                                  Element{DovePrism{1, 0}}, Element{BeamSplitter{0, 1}}};
    SubstitutionRules composed = compose_rules(chain, 2);
    for (int trial = 0; trial < 20; ++trial) {
        PhotonicState state(2);
        for (int k = 0; k < 4; ++k) {
            FockTerm t;
            t.add(ml(static_cast<int>(rng() % 2), static_cast<int>(rng() % 5) - 2));
            t.add(ml(static_cast<int>(rng() % 2), static_cast<int>(rng() % 5) - 2));
            state.add_term(t, random_amp(rng));
        }
        PhotonicState sequential = state;
        for (const Element& e : chain) sequential = sequential.substitute(rules_of(e, 2));
        CHECK(state.substitute(composed).terms() == sequential.terms());
    }
}

TEST_CASE("beam-splitter Mach-Zehnder with a pi/2 Dove offset sorts parity") {
    // Composite [BS, Dove(k=2)@0, Dove(k=0)@1, BS]: even modes swap rails with
    // phase i, odd modes stay with an OAM flip.
    Composite leach{"leach", {Element{BeamSplitter{0, 1}}, Element{DovePrism{0, 2}},
                              Element{DovePrism{1, 0}}, Element{BeamSplitter{0, 1}}}};
    SubstitutionRules rules = rules_of(Element{leach}, 2);

    PhotonicState even = single_photon(0, 2).substitute(rules);
    CHECK(even.amplitude(term({ml(1, 2)})) == CycNum::i());
    CHECK(even.term_count() == 1);

    PhotonicState odd = single_photon(0, 1).substitute(rules);
    CHECK(odd.amplitude(term({ml(0, -1)})) == CycNum::from_int(1));
    CHECK(odd.term_count() == 1);

    PhotonicState odd_b = single_photon(1, 1).substitute(rules);
    CHECK(odd_b.amplitude(term({ml(1, -1)})) == -CycNum::from_int(1));
    CHECK(odd_b.term_count() == 1);
}

TEST_CASE("element text round trip") {
    std::vector<std::string> forms = {
        "BS[a,b]", "Dove[a,k=2]", "Holo[c,+1]", "Holo[b,-2]", "PS[b,k=3]", "LI[a,b]", "REFL[c]",
        "CMP[leach](BS[a,b];Dove[a,k=2];Dove[b,k=0];BS[a,b])",
    };
    for (const std::string& text : forms) {
        auto element = Element::parse(text);
        REQUIRE_MESSAGE(element.has_value(), text);
        CHECK(element->to_string() == text);
    }
    CHECK(!Element::parse("BS[a,a]").has_value());
    CHECK(!Element::parse("Nope[a]").has_value());
    CHECK(!Element::parse("Dove[a,k=9]").has_value());
}

TEST_CASE("toolbox duplicate detection") {
    Toolbox toolbox = Toolbox::standard();
    CHECK(toolbox.size() == 6);
    CHECK(!toolbox.add(ToolboxTemplate{ToolboxTemplate::Kind::kBeamSplitter, {}}));
    Composite comp{"x", {Element{Reflection{0}}}};
    CHECK(toolbox.add(ToolboxTemplate{ToolboxTemplate::Kind::kComposite, comp}));
    Composite same_chain{"renamed", {Element{Reflection{0}}}};
    CHECK(!toolbox.add(ToolboxTemplate{ToolboxTemplate::Kind::kComposite, same_chain}));
    CHECK(toolbox.size() == 7);
}

TEST_CASE("toolbox from names") {
    auto toolbox = Toolbox::from_names({"BS", "LI"});
    REQUIRE(toolbox.has_value());
    CHECK(toolbox->size() == 2);
    CHECK(!Toolbox::from_names({"XYZ"}).has_value());
    auto with_composite = Toolbox::from_names({"BS", "CMP[p](LI[a,b])"});
    REQUIRE(with_composite.has_value());
    CHECK(with_composite->templates()[1].arity() == 2);
}
