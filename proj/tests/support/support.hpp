#pragma once

#include "atas/assembler.hpp"
#include "atas/signal_engine.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ts {

using namespace atas;

struct SideText {
    std::vector<std::string> active, inactive;
};

// Sides in +y, +x, -y, -x order. Throws on unparsable text.
ActiveTile make_tile(const std::string& name, SideText py, SideText px, SideText ny, SideText nx,
                     std::vector<std::string> activation = {}, std::vector<std::string> transmission = {});

// A rotated copy from the built-in seed, by id such as "X1_N".
const ActiveTile& seed_tile(const std::string& id);
Assembly unit(const std::string& id);
Configuration place(std::initializer_list<std::pair<Cell, std::string>> cells);

// Built-in run through stage 42, computed once per process.
const std::vector<StageSet>& builtin_run();

// ---- oracles ----

// Minimum over all 2^(n-1)-1 bipartitions of the crossing weight. n >= 2.
int brute_min_cut(const Configuration& c, const StrengthFunction& s);
bool brute_stable(const Configuration& c, const StrengthFunction& s, int theta);

// Every offset in the Minkowski range of the two bounding boxes, checked directly.
std::vector<Placement> brute_placements(const Assembly& a, const Assembly& b, const TileSystem& sys);

// f written out directly from the update rules on plain tuples; independent of the engine.
Configuration reference_f(const Configuration& c);

// ---- random generation ----

struct RandomConfigOptions {
    int width = 3;
    int height = 3;
    double fill = 0.75;
    int bases = 4;  // alphabet a, b, c, ...
};
Configuration random_config(std::mt19937_64& rng, const RandomConfigOptions& o = {});
StrengthFunction random_strengths(std::mt19937_64& rng, int bases, int max_strength);

// ---- four-tile signalling fixture ----

struct ExampleFixture {
    Configuration initial, after_one, after_two;
    Cell center{0, 0};
};
const ExampleFixture& example_fixture();

// ---- property suites, shared by unit tests and the acceptance gate ----

struct PropertyResult {
    std::string name;
    long cases = 0;
    long failures = 0;
    std::string first_failure;
    bool ok() const { return failures == 0 && cases > 0; }
};

PropertyResult prop_f_order_independence(int cases, std::uint64_t seed);
PropertyResult prop_f_matches_reference(int cases, std::uint64_t seed);
PropertyResult prop_potential_decrease(int cases, std::uint64_t seed);
PropertyResult prop_complete_matches_naive(int cases, std::uint64_t seed);
// Exhaustive over members of stages 0..6 with at most 12 tiles.
PropertyResult prop_min_cut_members(const std::vector<StageSet>& stages, const StrengthFunction& s, int theta);
PropertyResult prop_min_cut_random(int cases, std::uint64_t seed);
PropertyResult prop_normalize_idempotent(int cases, std::uint64_t seed);
// Exhaustive over the 112 seed tiles.
PropertyResult prop_rotation_order_four();

} // namespace ts
