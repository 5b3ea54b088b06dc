#pragma once

#include "atas/assembler.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace atas {

// coeff * 2^(level + shift) + constant. coeff == 0 gives a constant.
struct LevelExpr {
    long long coeff = 0;
    int shift = 0;
    long long constant = 0;

    static LevelExpr constant_of(long long c) { return {0, 0, c}; }
    // Throws DomainError when level + shift < 0 with a nonzero coefficient.
    long long eval(int level) const;
    // "3*2^(l+1)-6", "3*2^(l)-2", "7"
    std::string str() const;
    static std::optional<LevelExpr> parse(std::string_view s);

    friend bool operator==(const LevelExpr&, const LevelExpr&) = default;
};

struct OffsetExpr {
    LevelExpr x, y;
    Cell eval(int level) const { return {static_cast<int>(x.eval(level)), static_cast<int>(y.eval(level))}; }
    friend bool operator==(const OffsetExpr&, const OffsetExpr&) = default;
};

// A seed tile (by name and rotation tag) at a relative position.
struct TilePlacement {
    Cell at;
    std::string tile;  // e.g. "A1_W"

    friend bool operator==(const TilePlacement&, const TilePlacement&) = default;
};

struct SubregionRule {
    enum class Kind { Fixed, TileType };
    Kind kind = Kind::Fixed;
    std::vector<TilePlacement> tiles;  // Fixed
    int type = 0;                      // TileType: T_type(level + level_shift)
    int level_shift = 0;
    OffsetExpr base;   // position of the first subregion
    Cell step{0, 0};   // between consecutive subregions
    // After subregion number skip_after (1-based) the next one moves by step + skip_extra.
    std::optional<LevelExpr> skip_after;
    Cell skip_extra{0, 0};
    LevelExpr count = LevelExpr::constant_of(1);

    friend bool operator==(const SubregionRule&, const SubregionRule&) = default;
};

struct RegionSpec {
    int index = 0;
    SubregionRule rule;
    friend bool operator==(const RegionSpec&, const RegionSpec&) = default;
};

struct TileTypeSpec {
    int index = 0;
    // Derived types are normalized quarter turns of another spec at every level.
    int rotation_of = 0;
    int quarter_turns = 0;
    std::vector<TilePlacement> level0;  // explicit level-0 layout
    int first_region_level = 1;         // regions describe levels >= this
    std::vector<RegionSpec> regions;

    bool derived() const { return rotation_of != 0; }
    friend bool operator==(const TileTypeSpec&, const TileTypeSpec&) = default;
};

struct PlacedTile {
    Cell at;
    std::string tile;
    int region = 0;  // 0 for explicit level-0 layouts
    int sub = 0;     // 1-based subregion number
};

// Specs plus the unit tiles they place. Instantiations are memoized.
class TileTypeSet {
public:
    TileTypeSet() = default;
    TileTypeSet(std::vector<TileTypeSpec> specs, const std::vector<Assembly>& seed);

    const std::vector<TileTypeSpec>& specs() const { return specs_; }
    const TileTypeSpec& spec(int i) const;
    bool has(int i) const;
    const ActiveTile& tile(const std::string& id) const;

    // Normalized cell list of T_i(level), tagged with region and subregion numbers.
    const std::vector<PlacedTile>& layout(int i, int level) const;

private:
    std::vector<PlacedTile> build(int i, int level) const;

    std::vector<TileTypeSpec> specs_;
    std::map<std::string, ActiveTile> tiles_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<int, int>, std::shared_ptr<const std::vector<PlacedTile>>> cache_;
};

// Unit-tile states at each placed position. Throws SpecError on overlap.
Configuration instantiate(const TileTypeSet& set, int i, int level);
std::vector<Cell> domain(const TileTypeSet& set, int i, int level);
// Domain of region j of T_i(level).
std::vector<Cell> region_domain(const TileTypeSet& set, int i, int j, int level);

// Advance a "NAME_T" id by k quarter turns.
std::string rotate_id(const std::string& id, int k);

struct RegionCount {
    int region = 0;
    long long expected = 0;  // count expression at this level
    long long placed = 0;    // subregions in the instantiated layout
    long long matched = 0;   // subregions whose cells all carry the expected tiles
};

struct RegionReport {
    bool match = false;
    std::string first_mismatch;  // empty on success
    std::vector<RegionCount> regions;  // empty for explicit level-0 layouts
};

// Compares tile identities (name and rotation tag) cell by cell.
RegionReport verify_regions(const Assembly& a, const TileTypeSet& set, int i, int level);

struct Rational {
    long long num = 0;
    long long den = 1;
    Rational() = default;
    Rational(long long n, long long d);
    std::string str() const;
    friend bool operator==(const Rational&, const Rational&) = default;
};

// Rectilinear boundary as edge lengths with the turn (+1 left, -1 right) after each edge,
// traversed counter-clockwise. Empty when the domain is not a single hole-free region.
struct Polygon {
    std::vector<long long> lengths;
    std::vector<int> turns;
};
std::optional<Polygon> boundary_polygon(const std::vector<Cell>& cells);
// Scale factor taking dom(a) onto dom(b), allowing rotations and reflections.
std::optional<Rational> similarity_ratio(const std::vector<Cell>& a, const std::vector<Cell>& b);

struct SelfSimilarReport {
    bool ok = false;
    std::vector<Rational> ratios;  // level l -> l+1
    std::string detail;
};
SelfSimilarReport check_self_similar(const TileTypeSet& set, int i, int max_level);

struct RegionFailure {
    int type = 0;
    int region = 0;
    int level = 0;
    bool stretching = false;  // subregion count grows with level
};

struct StrongReport {
    bool ok = false;
    std::map<std::pair<int, int>, int> witness;  // (type, region) -> similar type in the subset
    std::vector<RegionFailure> failures;
    std::string detail;
};
StrongReport check_strongly_self_similar(const TileTypeSet& set, const std::vector<int>& subset,
                                         int max_level);

struct Classification {
    enum class Kind { Seed, Exact, Intermediate, Unknown };
    Kind kind = Kind::Unknown;
    int type = 0;
    int level = 0;
    Cell offset;  // where the assembly sits inside T_type(level)
    std::vector<int> provenance;  // ancestor member ids, nearest first
    std::string str() const;
};

// Exact if equal to some T_i(l) by tile identity, intermediate if it embeds by translation into one.
// Levels 0..max_level of every spec are candidates.
class Classifier {
public:
    Classifier(const TileTypeSet& set, int max_level);
    Classification operator()(const Assembly& a, const std::vector<StageSet>& trace) const;

private:
    struct Target {
        int type = 0;
        int level = 0;
        std::string identity;
        std::map<Cell, std::string> cells;
        std::map<std::string, std::vector<Cell>> by_tile;
    };
    std::vector<Target> targets_;  // ordered by level, then type
};

Classification classify(const Assembly& a, const std::vector<StageSet>& trace, const TileTypeSet& set,
                        int max_level);

} // namespace atas
