#pragma once

#include "atas/assembly.hpp"

#include <array>

namespace atas {

// A tile and its four neighbors; nullptr marks an empty cell.
struct NeighborContext {
    const ActiveTile* center = nullptr;
    std::array<const ActiveTile*, 4> neighbors{};  // indexed by Direction

    const ActiveTile* at(Direction d) const { return neighbors[index(d)]; }
};

NeighborContext context_at(const Configuration& c, Cell p);

// One application of the modification rules to a single tile. Pure.
ActiveTile modify_tile(const NeighborContext& ctx);

// Synchronous update of every cell from the pre-step state.
// Throws ConfigurationError if a rewritten tile breaks the side invariants.
Configuration apply_f(const Configuration& c);

struct CompletionResult {
    Configuration config;
    int iterations = 0;
};

// Iterate apply_f to the fixpoint. max_iters < 0 means potential(c) + 1.
CompletionResult complete(const Configuration& c, int max_iters = -1);

long long tile_potential(const ActiveTile& t);
long long potential(const Configuration& c);

} // namespace atas
