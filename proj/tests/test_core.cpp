#include "doctest.h"
#include "support/support.hpp"

#include "atas/errors.hpp"
#include "atas/lshape.hpp"

using namespace atas;

namespace {

const ActiveTile& rep(const std::string& name) {
    static const auto reps = lshape::tiles();
    for (const auto& t : reps)
        if (t.name == name) return t;
    throw std::invalid_argument(name);
}

bool has_clause(const std::vector<Violation>& vs, const std::string& clause) {
    for (const auto& v : vs)
        if (v.clause == clause) return true;
    return false;
}

// Half turn written out directly: every side and every signal direction flips.
ActiveTile half_turn(const ActiveTile& t) {
    ActiveTile out = t;
    for (auto d : kDirections) out.side(opposite(d)) = t.side(d);
    auto flip = [](const SignalSet& in) {
        SignalSet o;
        for (auto s : in) {
            if (s.source) s.source = opposite(*s.source);
            s.target = opposite(s.target);
            o.insert(s);
        }
        return o;
    };
    out.activation = flip(t.activation);
    out.transmission = flip(t.transmission);
    return out;
}

} // namespace

TEST_CASE("negation is a sign involution") {
    CHECK(Label::parse("55")->negated().str() == "-55");
    CHECK(Label::parse("-55")->negated().str() == "55");
    CHECK(Label::parse("-2")->negated().str() == "2");
    auto l = *Label::parse("-7");
    CHECK(l.negated().negated() == l);
    CHECK_FALSE(Label::parse("").has_value());
    CHECK_FALSE(Label::parse("-").has_value());
}

TEST_CASE("signal grammar") {
    auto s = Signal::parse("55(0->-x)");
    REQUIRE(s);
    CHECK(s->is_initiation());
    CHECK(s->target == Direction::NegX);
    CHECK(s->str() == "55(0->-x)");
    auto r = Signal::parse("g(+y->-y)");
    REQUIRE(r);
    CHECK(r->source == Direction::PosY);
    for (const char* bad : {"55", "55(0-x)", "55(0->0)", "55(+z->-x)", "-55(0->-x)", "(0->+x)", "55(0->+x"})
        CHECK_MESSAGE(!Signal::parse(bad), bad);
}

TEST_CASE("direction algebra") {
    CHECK(rotate_ccw(Direction::PosX) == Direction::PosY);
    CHECK(rotate_ccw(Direction::PosY) == Direction::NegX);
    CHECK(rotate_ccw(Direction::NegX) == Direction::NegY);
    CHECK(rotate_ccw(Direction::NegY) == Direction::PosX);
    for (auto d : kDirections) {
        CHECK(opposite(opposite(d)) == d);
        CHECK(rotate_ccw(rotate_ccw(d)) == opposite(d));
        CHECK(parse_direction(to_string(d)) == d);
        CHECK(dx(d) == -dx(opposite(d)));
        CHECK(dy(d) == -dy(opposite(d)));
    }
}

TEST_CASE("validate_active_tile") {
    CHECK(validate_active_tile(rep("G3")).empty());

    auto co_resident = ts::make_tile("bad", {{"r"}, {"r"}}, {}, {}, {});
    CHECK(has_clause(validate_active_tile(co_resident), "1a"));

    auto with_complement = ts::make_tile("bad", {{"r"}, {"-r"}}, {}, {}, {});
    CHECK(has_clause(validate_active_tile(with_complement), "1a"));

    auto both_inactive = ts::make_tile("bad", {{}, {"r", "-r"}}, {}, {}, {});
    CHECK(has_clause(validate_active_tile(both_inactive), "1b"));

    auto initiation = ts::make_tile("bad", {}, {}, {}, {{}, {"g"}}, {"g(0->-x)"});
    auto vs = validate_active_tile(initiation);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].clause == "2");

    StrengthFunction s({{"r", 1}});
    auto foreign = ts::make_tile("t", {{"q"}, {}}, {}, {}, {});
    CHECK(has_clause(validate_active_tile(foreign, &s), "alphabet"));
}

TEST_CASE("every corpus tile and rotation is legal") {
    for (const auto& a : lshape::builtin_system().seed)
        CHECK_MESSAGE(validate_active_tile(a.cells().begin()->second, &lshape::builtin_system().strength).empty(),
                      a.cells().begin()->second.id());
}

TEST_CASE("G3 first rotation matches the reference listing") {
    auto want = ts::make_tile("G3", {{"2"}, {}}, {{"-66"}, {}}, {{}, {"-4"}}, {{"1"}, {}}, {"4(-x->-y)"},
                              {"2(0->+x)", "55(-y->-x)", "55(+x->-y)"});
    auto got = rotate_ccw(rep("G3"));
    CHECK(got.same_state(want));
    CHECK(got.id() == "G3_E");
}

TEST_CASE("rotation_class") {
    auto cls = rotation_class(rep("G3"));
    REQUIRE(cls.size() == 4);
    CHECK(cls[0].id() == "G3_N");
    CHECK(cls[1].id() == "G3_E");
    CHECK(cls[2].id() == "G3_S");
    CHECK(cls[3].id() == "G3_W");

    ActiveTile plain;
    plain.name = "P";
    CHECK(rotation_class(plain).size() == 1);

    std::size_t n = 0;
    for (const auto& t : lshape::tiles()) n += rotation_class(t).size();
    CHECK(n == 112);
}

TEST_CASE("X1 turned twice is the X1_S seed tile, componentwise") {
    auto twice = rotate_ccw(rotate_ccw(rep("X1")));
    CHECK(twice.same_state(half_turn(rep("X1"))));
    CHECK(twice.same_state(ts::seed_tile("X1_S")));
    CHECK(twice.id() == "X1_S");
}

TEST_CASE("initiation signals keep their source when rotated") {
    auto t = ts::make_tile("t", {}, {}, {}, {}, {}, {"a(0->+x)"});
    auto r = rotate_ccw(t);
    REQUIRE(r.transmission.size() == 1);
    CHECK(r.transmission.begin()->str() == "a(0->+y)");
}

TEST_CASE("strength lookup") {
    auto s = lshape::strengths();
    CHECK(s(*Label::parse("55")) == 2);
    CHECK(s(*Label::parse("3")) == 1);
    for (const auto& [base, w] : s.table()) {
        Label l{base, false};
        CHECK(s(l) == s(l.negated()));
    }
    CHECK_THROWS_AS(s("zz"), ConfigurationError);
}

TEST_CASE("labels order by signed spelling") {
    LabelSet set{*Label::parse("5"), *Label::parse("-5"), *Label::parse("11")};
    std::vector<std::string> seen;
    for (const auto& l : set) seen.push_back(l.str());
    CHECK(seen == std::vector<std::string>{"-5", "11", "5"});
}
