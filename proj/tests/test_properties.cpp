#include "doctest.h"
#include "support/support.hpp"

#include "atas/lshape.hpp"

namespace {

void expect(const ts::PropertyResult& r, long min_cases) {
    INFO(r.name << ": " << r.failures << " of " << r.cases << " failed; first: " << r.first_failure);
    CHECK(r.cases >= min_cases);
    CHECK(r.failures == 0);
}

} // namespace

TEST_CASE("property: simultaneous update is order independent") { expect(ts::prop_f_order_independence(1000, 1), 1000); }

TEST_CASE("property: engine agrees with the rule-text reference") { expect(ts::prop_f_matches_reference(1000, 2), 1000); }

TEST_CASE("property: potential strictly decreases until the fixpoint") { expect(ts::prop_potential_decrease(1000, 3), 1000); }

TEST_CASE("property: dirty-cell completion equals naive iteration") { expect(ts::prop_complete_matches_naive(1000, 4), 1000); }

TEST_CASE("property: min cut agrees with enumeration on stage 0-6 members") {
    expect(ts::prop_min_cut_members(ts::builtin_run(), atas::lshape::strengths(), atas::lshape::kTheta), 100);
}

TEST_CASE("property: min cut agrees with enumeration on random configurations") {
    expect(ts::prop_min_cut_random(1000, 5), 1000);
}

TEST_CASE("property: normalize is idempotent and translation invariant") {
    expect(ts::prop_normalize_idempotent(1000, 6), 1000);
}

TEST_CASE("property: four quarter turns are the identity on all seed tiles") { expect(ts::prop_rotation_order_four(), 112); }
