#pragma once

#include "atas/assembly.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace atas {

struct TileSystem {
    std::vector<Assembly> seed;
    StrengthFunction strength;
    int theta = 0;
};

// Unit assemblies for every rotation of every representative.
// Throws ConfigurationError listing violations if a representative is not a legal active tile.
std::vector<Assembly> close_under_rotation(const std::vector<ActiveTile>& reps);

// Seed without rotation closure, each tile as given.
std::vector<Assembly> unit_assemblies(const std::vector<ActiveTile>& tiles);

struct Placement {
    Cell offset;  // added to b's cells
    int seam = 0;

    friend bool operator==(const Placement&, const Placement&) = default;
};

// Offsets of b against a with disjoint footprints and seam weight >= theta, sorted by offset.
std::vector<Placement> seam_placements(const Assembly& a, const Assembly& b, const TileSystem& sys);

struct Combination {
    Assembly result;
    Cell offset;
    int seam = 0;
    int iterations = 0;  // applications of f to reach completion
};

struct CombineOptions {
    // Cross-check the seam shortcut with a full min-cut before and after completion.
    bool paranoid = false;
};

// One result per distinct completed class, in placement order.
std::vector<Combination> combine(const Assembly& a, const Assembly& b, const TileSystem& sys,
                                 const CombineOptions& opts = {});

struct Provenance {
    int left = -1;  // member ids, -1 for seed tiles
    int right = -1;
    Cell offset;
    int seam = 0;
    int iterations = 0;
};

struct Member {
    Assembly assembly;
    int id = 0;     // position in the run's member list
    int stage = 0;  // first stage containing it
    Provenance provenance;
};

using MemberRef = std::shared_ptr<const Member>;

struct StageSet {
    int stage = 0;
    std::vector<MemberRef> members;  // ordered by id; members(i-1) is a prefix
    std::size_t first_new = 0;
    bool partial = false;  // cut short by a budget

    std::size_t new_count() const { return members.size() - first_new; }
    std::vector<MemberRef> new_members() const {
        return {members.begin() + static_cast<std::ptrdiff_t>(first_new), members.end()};
    }
};

struct RunOptions {
    bool paranoid = false;
    int threads = 1;
    std::size_t max_members = 0;  // 0: no cap
    double budget_secs = 0;       // per stage wall time, 0: no cap
    // Reorder pair processing (tests only). Seeded permutation, 0 keeps natural order.
    std::uint64_t shuffle_seed = 0;
    std::function<void(const StageSet&)> on_stage;
};

// Reads ATAS_THREADS and ATAS_BUDGET_SECS.
RunOptions options_from_env();

struct BudgetExceeded : std::runtime_error {
    BudgetExceeded(const std::string& what, std::vector<StageSet> done)
        : std::runtime_error(what), stages(std::move(done)) {}
    std::vector<StageSet> stages;  // completed stages, then the partial one
};

StageSet seed_stage(const TileSystem& sys);
StageSet expand_stage(const StageSet& prev, const TileSystem& sys, const RunOptions& opts = {});

// Stages 0..max_stage, stopping early at a fixpoint (a stage with no new members).
std::vector<StageSet> run(const TileSystem& sys, int max_stage, const RunOptions& opts = {});

// Stochastic demo: each step combines one random pair from the pool and keeps one random result.
std::vector<StageSet> run_trajectory(const TileSystem& sys, int steps, std::uint64_t rng_seed);

// Smallest canonical key over the four rotations.
std::string rotation_class_key(const Assembly& a);
std::size_t count_rotation_classes(const std::vector<MemberRef>& members);

} // namespace atas
