#include "atas/assembly.hpp"
#include "atas/errors.hpp"

#include <limits>
#include <numeric>

namespace atas {

int bond_weight(const ActiveTile& a, Direction d, const ActiveTile& b, const StrengthFunction& s) {
    const auto& mine = a.side(d).active;
    const auto& theirs = b.side(opposite(d)).active;
    int w = 0;
    for (const auto& c : mine)
        if (theirs.contains(c.negated())) w += s(c);
    return w;
}

BindingGraph binding_graph(const Configuration& c, const StrengthFunction& s) {
    BindingGraph g;
    std::map<Cell, int> idx;
    for (const auto& [p, t] : c) {
        idx[p] = static_cast<int>(g.vertices.size());
        g.vertices.push_back(p);
    }
    for (const auto& [p, t] : c) {
        for (auto d : {Direction::PosX, Direction::PosY}) {
            auto it = c.find(step(p, d));
            if (it == c.end()) continue;
            g.edges.push_back({idx[p], idx[it->first], bond_weight(t, d, it->second, s),
                               d == Direction::PosY});
        }
    }
    return g;
}

bool is_connected(const BindingGraph& g) {
    const int n = static_cast<int>(g.vertices.size());
    if (n <= 1) return true;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    int comps = n;
    for (const auto& e : g.edges) {
        int a = find(e.u), b = find(e.v);
        if (a != b) {
            parent[a] = b;
            --comps;
        }
    }
    return comps == 1;
}

int min_cut(const BindingGraph& g) {
    const int n = static_cast<int>(g.vertices.size());
    if (n < 2) throw ConfigurationError("min_cut needs at least two vertices");
    std::vector<std::vector<long long>> w(n, std::vector<long long>(n, 0));
    for (const auto& e : g.edges) {
        w[e.u][e.v] += e.weight;
        w[e.v][e.u] += e.weight;
    }
    std::vector<int> alive(n);
    std::iota(alive.begin(), alive.end(), 0);
    long long best = std::numeric_limits<long long>::max();
    std::vector<long long> key(n);
    std::vector<char> added(n);
    while (alive.size() > 1) {
        std::fill(key.begin(), key.end(), 0);
        std::fill(added.begin(), added.end(), 0);
        int prev = -1, last = -1;
        for (std::size_t k = 0; k < alive.size(); ++k) {
            int sel = -1;
            for (int v : alive)
                if (!added[v] && (sel < 0 || key[v] > key[sel])) sel = v;
            if (sel < 0) break;
            added[sel] = 1;
            prev = last;
            last = sel;
            for (int v : alive)
                if (!added[v]) key[v] += w[sel][v];
        }
        best = std::min(best, key[last]);
        // merge last into prev
        for (int v : alive) {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        alive.erase(std::find(alive.begin(), alive.end(), last));
    }
    return static_cast<int>(best);
}

bool is_theta_stable(const Configuration& c, const StrengthFunction& s, int theta) {
    if (c.size() == 1) return true;
    if (c.empty()) return false;
    auto g = binding_graph(c, s);
    if (!is_connected(g)) return false;
    return min_cut(g) >= theta;
}

AssemblyInstance make_instance(Configuration c, const StrengthFunction& s, int theta) {
    if (c.empty()) throw ConfigurationError("empty configuration");
    if (!is_theta_stable(c, s, theta))
        throw ConfigurationError("configuration is not " + std::to_string(theta) + "-stable");
    return AssemblyInstance{std::move(c), theta};
}

Configuration translate(const Configuration& c, Cell by) {
    Configuration out;
    for (const auto& [p, t] : c) out.emplace_hint(out.end(), p + by, t);
    return out;
}

Configuration normalized(const Configuration& c) {
    if (c.empty()) return c;
    int mx = std::numeric_limits<int>::max(), my = mx;
    for (const auto& [p, t] : c) {
        mx = std::min(mx, p.x);
        my = std::min(my, p.y);
    }
    if (mx == 0 && my == 0) return c;
    return translate(c, {-mx, -my});
}

Configuration rotate_config(const Configuration& c) {
    Configuration out;
    for (const auto& [p, t] : c) out.emplace(Cell{-p.y, p.x}, rotate_ccw(t));
    return out;
}

std::string canonical_key(const Configuration& c) {
    std::string out;
    for (const auto& [p, t] : c) {
        out += std::to_string(p.x);
        out += ',';
        out += std::to_string(p.y);
        out += ':';
        out += state_key(t);
        out += ';';
    }
    return out;
}

std::string identity_key(const Configuration& c) {
    std::string out;
    for (const auto& [p, t] : c) {
        out += std::to_string(p.x);
        out += ',';
        out += std::to_string(p.y);
        out += ':';
        out += t.id();
        out += ';';
    }
    return out;
}

Assembly::Assembly(const Configuration& c, int theta) : cells_(normalized(c)), theta_(theta) {
    key_ = canonical_key(cells_);
    identity_ = identity_key(cells_);
    for (const auto& [p, t] : cells_) {
        width_ = std::max(width_, p.x + 1);
        height_ = std::max(height_, p.y + 1);
        for (auto d : kDirections) {
            if (cells_.count(step(p, d))) continue;
            for (const auto& l : t.side(d).active) exposed_.push_back({p, d, l});
        }
    }
}

Assembly normalize(const AssemblyInstance& inst) { return Assembly(inst.config, inst.theta); }

bool translations_equal(const Configuration& a, const Configuration& b) {
    return canonical_key(normalized(a)) == canonical_key(normalized(b));
}

} // namespace atas
