#pragma once

#include "atas/tiletype.hpp"

#include <optional>
#include <string>
#include <vector>

namespace atas::lshape {

// One row that had to be corrected before the tables assemble as described.
struct Erratum {
    std::string tile;
    std::string field;
    std::string printed;
    std::string corrected;
    std::string reason;
};

// The 28 representatives exactly as tabulated, before any correction.
std::vector<ActiveTile> printed_tiles();
// The 28 representatives used by the built-in system.
std::vector<ActiveTile> tiles();
const std::vector<Erratum>& errata();

StrengthFunction strengths();
constexpr int kTheta = 2;

struct AuditResult {
    bool passed = false;
    std::vector<std::string> unreproduced;
    std::vector<std::string> report;  // reconciliation notes, one line each
};

// Replays stages 1-13 and checks the fixtures: seven two-tile classes at stage 1, only the
// T1(0) L at stage 2, only its A0/E0 border starts at stage 3, T1(1) at stage 12, and its
// two border starts at stage 13.
AuditResult audit(const std::vector<ActiveTile>& reps);

// Rotation-closed 112-tile seed, theta 2. Runs the audit once; throws CorpusIntegrityError on failure.
const TileSystem& builtin_system();
const AuditResult& builtin_audit();

// T1..T12. T1-T3 are explicit; T_{i+3k} is T_i turned k quarter turns.
std::vector<TileTypeSpec> tiletype_specs();
const TileTypeSet& builtin_tiletypes();

long long short_side(int level);
long long assembly_stage(int level);

struct LDimensions {
    int arm = 0;     // short side of each arm
    int length = 0;  // long side, twice the arm
};
// Three arm-by-arm squares filling a 2arm-by-2arm box minus one corner square; nullopt otherwise.
std::optional<LDimensions> l_dimensions(const Assembly& a);
// Region count table. Throws DomainError outside it (including level 0).
long long eta(int i, int j, int level);
// Number of regions of T_i.
int rho(int i);

struct MarkerReport {
    int c2_markers = 0;  // C2 tiles with active -2 facing an empty cell
    int c3_markers = 0;
    bool unique = false;
    bool collinear = false;
    int a3_between = -1;  // A3 tiles strictly between the two markers
    int a3_expected = -1; // A3 tiles on the bottom border of T2(level-1)
    bool level_encoded = false;
    std::vector<Cell> c2_at, c3_at;
};

// level >= 1; a is expected to be T1(level).
MarkerReport aperiodicity_scan(const Assembly& a, int level);

} // namespace atas::lshape
