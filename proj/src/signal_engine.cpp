#include "atas/signal_engine.hpp"
#include "atas/errors.hpp"

#include <set>

namespace atas {

NeighborContext context_at(const Configuration& c, Cell p) {
    NeighborContext ctx;
    ctx.center = &c.at(p);
    for (auto d : kDirections) {
        auto it = c.find(step(p, d));
        ctx.neighbors[index(d)] = it == c.end() ? nullptr : &it->second;
    }
    return ctx;
}

namespace {

bool has_initiation(const ActiveTile& t, const std::string& base, Direction to) {
    return t.transmission.contains(Signal{base, std::nullopt, to});
}

// Neighbor at i already fired b toward us, or holds no relay of b toward us and never will.
bool fired_or_dead(const NeighborContext& ctx, const std::string& base, Direction i) {
    const ActiveTile* n = ctx.at(i);
    if (!n) return false;
    const Direction back = opposite(i);
    if (has_initiation(*n, base, back)) return true;
    for (const auto& s : n->transmission)
        if (s.base == base && s.source && s.target == back) return false;
    return true;
}

bool sides_valid(const ActiveTile& t) {
    for (const auto& side : t.sides) {
        for (const auto& c : side.active) {
            auto nc = c.negated();
            if (side.active.contains(nc) || side.inactive.contains(c) || side.inactive.contains(nc))
                return false;
        }
        for (const auto& c : side.inactive)
            if (side.inactive.contains(c.negated())) return false;
    }
    return true;
}

void check(const ActiveTile& t, Cell p) {
    if (sides_valid(t)) return;
    std::string msg = "tile " + t.id() + " at " + std::to_string(p.x) + "," + std::to_string(p.y) +
                      " violates side invariants after f:";
    for (const auto& v : validate_active_tile(t)) msg += " [" + v.clause + "] " + v.detail;
    throw ConfigurationError(msg);
}

} // namespace

ActiveTile modify_tile(const NeighborContext& ctx) {
    const ActiveTile& t = *ctx.center;
    ActiveTile out;
    out.name = t.name;
    out.tag = t.tag;

    // rule 1
    for (auto i : kDirections) {
        const auto& side = t.side(i);
        auto& nside = out.side(i);
        nside.active = side.active;
        for (const auto& c : side.inactive) {
            bool targeted = false, fire = false;
            for (const auto& a : t.activation) {
                if (a.base != c.base || a.target != i || !a.source) continue;
                targeted = true;
                const ActiveTile* n = ctx.at(*a.source);
                if (n && has_initiation(*n, c.base, opposite(*a.source))) fire = true;
            }
            if (fire) nside.active.insert(c);
            else if (targeted) nside.inactive.insert(c);
            // no activation signal at all: dropped
        }
    }

    // rule 2
    for (const auto& a : t.activation)
        if (!a.source || !fired_or_dead(ctx, a.base, *a.source)) out.activation.insert(a);

    // rule 3
    std::vector<Signal> added;
    for (const auto& s : t.transmission) {
        if (!s.source) continue;
        const ActiveTile* n = ctx.at(*s.source);
        if (n && has_initiation(*n, s.base, opposite(*s.source)))
            added.push_back(Signal{s.base, std::nullopt, s.target});
    }
    auto removed = [&](const Signal& s) {
        if (s.source && fired_or_dead(ctx, s.base, *s.source)) return true;  // S1
        if (const ActiveTile* n = ctx.at(s.target)) {
            if (!s.source) return true;  // S3
            // S2: the neighbor has nothing that receives from our side
            const Direction back = opposite(s.target);
            bool receiver = false;
            for (const auto* set : {&n->transmission, &n->activation})
                for (const auto& r : *set)
                    if (r.base == s.base && r.source == back) receiver = true;
            if (!receiver) return true;
        }
        return false;
    };
    for (const auto& s : t.transmission)
        if (!removed(s)) out.transmission.insert(s);
    for (auto& s : added)
        if (!t.transmission.contains(s) || !removed(s)) out.transmission.insert(std::move(s));
    return out;
}

Configuration apply_f(const Configuration& c) {
    Configuration out;
    for (const auto& [p, t] : c) {
        ActiveTile nt = modify_tile(context_at(c, p));
        check(nt, p);
        out.emplace_hint(out.end(), p, std::move(nt));
    }
    return out;
}

CompletionResult complete(const Configuration& c, int max_iters) {
    if (max_iters < 0) max_iters = static_cast<int>(potential(c)) + 1;
    CompletionResult r{c, 0};
    Configuration& cur = r.config;

    // Only cells whose own or neighboring state changed last step can change next step.
    std::set<Cell> dirty;
    for (const auto& [p, t] : cur) dirty.insert(p);
    std::vector<std::pair<Cell, ActiveTile>> changes;
    while (true) {
        changes.clear();
        for (const auto& p : dirty) {
            ActiveTile nt = modify_tile(context_at(cur, p));
            if (!nt.same_state(cur.at(p))) changes.emplace_back(p, std::move(nt));
        }
        if (changes.empty()) return r;
        if (++r.iterations > max_iters)
            throw CompletionError("complete: no fixpoint within " + std::to_string(max_iters) +
                                  " iterations");
        dirty.clear();
        for (auto& [p, t] : changes) {
            check(t, p);
            cur.at(p) = std::move(t);
            dirty.insert(p);
            for (auto d : kDirections) {
                Cell q = step(p, d);
                if (cur.count(q)) dirty.insert(q);
            }
        }
    }
}

long long tile_potential(const ActiveTile& t) {
    long long v = 0;
    for (const auto& side : t.sides) v += static_cast<long long>(side.inactive.size());
    v += static_cast<long long>(t.activation.size());
    for (const auto& s : t.transmission) v += s.is_initiation() ? 1 : 2;
    return v;
}

long long potential(const Configuration& c) {
    long long v = 0;
    for (const auto& [p, t] : c) v += tile_potential(t);
    return v;
}

} // namespace atas
