#include "support.hpp"

#include "atas/lshape.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace ts {

namespace {

LabelSet labels(const std::vector<std::string>& xs) {
    LabelSet out;
    for (const auto& x : xs) {
        auto l = Label::parse(x);
        if (!l) throw std::invalid_argument("bad label " + x);
        out.insert(*l);
    }
    return out;
}

SignalSet signals(const std::vector<std::string>& xs) {
    SignalSet out;
    for (const auto& x : xs) {
        auto s = Signal::parse(x);
        if (!s) throw std::invalid_argument("bad signal " + x);
        out.insert(*s);
    }
    return out;
}

} // namespace

ActiveTile make_tile(const std::string& name, SideText py, SideText px, SideText ny, SideText nx,
                     std::vector<std::string> activation, std::vector<std::string> transmission) {
    ActiveTile t;
    t.name = name;
    SideText* sides[4] = {&py, &px, &ny, &nx};
    for (int d = 0; d < 4; ++d) {
        t.sides[d].active = labels(sides[d]->active);
        t.sides[d].inactive = labels(sides[d]->inactive);
    }
    t.activation = signals(activation);
    t.transmission = signals(transmission);
    return t;
}

const ActiveTile& seed_tile(const std::string& id) {
    static const std::map<std::string, ActiveTile> all = [] {
        std::map<std::string, ActiveTile> m;
        for (const auto& a : lshape::builtin_system().seed) {
            const auto& t = a.cells().begin()->second;
            m.emplace(t.id(), t);
        }
        return m;
    }();
    auto it = all.find(id);
    if (it == all.end()) throw std::invalid_argument("no seed tile " + id);
    return it->second;
}

Assembly unit(const std::string& id) { return Assembly(Configuration{{Cell{0, 0}, seed_tile(id)}}, lshape::kTheta); }

Configuration place(std::initializer_list<std::pair<Cell, std::string>> cells) {
    Configuration c;
    for (const auto& [p, id] : cells) c.emplace(p, seed_tile(id));
    return c;
}

const std::vector<StageSet>& builtin_run() {
    static const std::vector<StageSet> stages = run(lshape::builtin_system(), 42, options_from_env());
    return stages;
}

// ---- min cut ----

namespace {

// Bond strength straight from the definition: complementary active labels on facing sides.
int facing_weight(const ActiveTile& lo, const ActiveTile& hi, bool vertical, const StrengthFunction& s) {
    const auto& a = lo.sides[vertical ? 0 : 1].active;  // +y or +x of the lower/left tile
    const auto& b = hi.sides[vertical ? 2 : 3].active;
    int w = 0;
    for (const auto& x : a)
        for (const auto& y : b)
            if (x.base == y.base && x.negative != y.negative) w += s(x.base);
    return w;
}

struct Graph {
    int n = 0;
    std::vector<std::tuple<int, int, int>> edges;
};

Graph graph_of(const Configuration& c, const StrengthFunction& s) {
    Graph g;
    std::map<Cell, int> idx;
    for (const auto& [p, t] : c) idx[p] = g.n++;
    for (const auto& [p, t] : c) {
        if (auto it = c.find({p.x + 1, p.y}); it != c.end())
            g.edges.emplace_back(idx[p], idx[it->first], facing_weight(t, it->second, false, s));
        if (auto it = c.find({p.x, p.y + 1}); it != c.end())
            g.edges.emplace_back(idx[p], idx[it->first], facing_weight(t, it->second, true, s));
    }
    return g;
}

} // namespace

int brute_min_cut(const Configuration& c, const StrengthFunction& s) {
    Graph g = graph_of(c, s);
    if (g.n < 2) throw std::invalid_argument("brute_min_cut needs two tiles");
    if (g.n > 20) throw std::invalid_argument("brute_min_cut is exponential");
    int best = -1;
    // vertex n-1 always on side 0; mask ranges over nonempty proper subsets of the rest
    const unsigned long full = 1UL << (g.n - 1);
    for (unsigned long mask = 1; mask < full; ++mask) {
        int w = 0;
        for (const auto& [u, v, wt] : g.edges) {
            bool su = u < g.n - 1 && (mask >> u & 1);
            bool sv = v < g.n - 1 && (mask >> v & 1);
            if (su != sv) w += wt;
        }
        if (best < 0 || w < best) best = w;
    }
    return best;
}

bool brute_stable(const Configuration& c, const StrengthFunction& s, int theta) {
    if (c.size() == 1) return true;
    if (c.empty()) return false;
    // a disconnected graph has a zero cut; with theta <= 0 we still need connectivity
    Graph g = graph_of(c, s);
    std::vector<int> comp(g.n);
    for (int i = 0; i < g.n; ++i) comp[i] = i;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [u, v, w] : g.edges) {
            int m = std::min(comp[u], comp[v]);
            if (comp[u] != m || comp[v] != m) {
                comp[u] = comp[v] = m;
                changed = true;
            }
        }
    }
    for (int i = 0; i < g.n; ++i)
        if (comp[i] != 0) return false;
    return brute_min_cut(c, s) >= theta;
}

std::vector<Placement> brute_placements(const Assembly& a, const Assembly& b, const TileSystem& sys) {
    std::vector<Placement> out;
    for (int oy = -b.height(); oy <= a.height(); ++oy)
        for (int ox = -b.width(); ox <= a.width(); ++ox) {
            Cell off{ox, oy};
            Configuration u = a.cells();
            bool overlap = false;
            for (const auto& [p, t] : b.cells())
                if (!u.emplace(p + off, t).second) overlap = true;
            if (overlap) continue;
            int seam = 0;
            bool touching = false;
            for (const auto& [p, t] : a.cells())
                for (const auto& [q, s] : b.cells()) {
                    Cell r = q + off;
                    if (r.x == p.x + 1 && r.y == p.y) seam += facing_weight(t, s, false, sys.strength), touching = true;
                    if (r.x == p.x - 1 && r.y == p.y) seam += facing_weight(s, t, false, sys.strength), touching = true;
                    if (r.y == p.y + 1 && r.x == p.x) seam += facing_weight(t, s, true, sys.strength), touching = true;
                    if (r.y == p.y - 1 && r.x == p.x) seam += facing_weight(s, t, true, sys.strength), touching = true;
                }
            if (touching && seam >= sys.theta) out.push_back({off, seam});
        }
    std::sort(out.begin(), out.end(), [](const Placement& x, const Placement& y) { return x.offset < y.offset; });
    return out;
}

// ---- reference f ----

namespace {

using Sig = std::tuple<std::string, int, int>;  // base, source (-1 for 0), target
constexpr int neg(int d) { return (d + 2) % 4; }
constexpr Cell kOff[4] = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};

struct RTile {
    std::string name;
    Orientation tag;
    std::array<std::set<std::string>, 4> A, I;  // signed spellings
    std::set<Sig> act, tr;
};

std::string base_of(const std::string& l) { return l[0] == '-' ? l.substr(1) : l; }

RTile to_r(const ActiveTile& t) {
    RTile r{t.name, t.tag, {}, {}, {}, {}};
    for (int d = 0; d < 4; ++d) {
        for (const auto& l : t.sides[d].active) r.A[d].insert(l.str());
        for (const auto& l : t.sides[d].inactive) r.I[d].insert(l.str());
    }
    auto conv = [](const Signal& s) { return Sig{s.base, s.source ? index(*s.source) : -1, index(s.target)}; };
    for (const auto& s : t.activation) r.act.insert(conv(s));
    for (const auto& s : t.transmission) r.tr.insert(conv(s));
    return r;
}

ActiveTile from_r(const RTile& r) {
    ActiveTile t;
    t.name = r.name;
    t.tag = r.tag;
    for (int d = 0; d < 4; ++d) {
        for (const auto& l : r.A[d]) t.sides[d].active.insert(*Label::parse(l));
        for (const auto& l : r.I[d]) t.sides[d].inactive.insert(*Label::parse(l));
    }
    auto conv = [](const Sig& s) {
        Signal x;
        x.base = std::get<0>(s);
        if (std::get<1>(s) >= 0) x.source = static_cast<Direction>(std::get<1>(s));
        x.target = static_cast<Direction>(std::get<2>(s));
        return x;
    };
    for (const auto& s : r.act) t.activation.insert(conv(s));
    for (const auto& s : r.tr) t.transmission.insert(conv(s));
    return t;
}

RTile ref_tile(const RTile& T, const std::array<const RTile*, 4>& nb) {
    static const std::set<Sig> none;
    auto S = [&](int i) -> const std::set<Sig>& { return nb[i] ? nb[i]->tr : none; };
    auto has_relay_toward = [&](const std::string& b, int i) {
        for (int k = 0; k < 4; ++k)
            if (S(i).count({b, k, neg(i)})) return true;
        return false;
    };
    RTile out = T;

    // side modification
    for (int i = 0; i < 4; ++i) {
        for (const auto& c : T.I[i]) {
            const std::string b = base_of(c);
            bool any = false, fired = false;
            for (int j = 0; j < 4; ++j)
                if (T.act.count({b, j, i})) {
                    any = true;
                    if (S(j).count({b, -1, neg(j)})) fired = true;
                }
            if (fired) {
                out.A[i].insert(c);
                out.I[i].erase(c);
            } else if (!any) {
                out.I[i].erase(c);
            }
        }
    }

    // activation signals
    for (const auto& s : T.act) {
        const auto& [b, i, j] = s;
        if (i < 0 || !nb[i]) continue;
        if (S(i).count({b, -1, neg(i)}) || !has_relay_toward(b, i)) out.act.erase(s);
    }

    // transmission signals
    std::set<Sig> added, removed;
    for (const auto& [b, k, j] : T.tr)
        if (k >= 0 && S(k).count({b, -1, neg(k)})) added.insert({b, -1, j});
    for (const auto& s : T.tr) {
        const auto& [b, i, j] = s;
        if (i >= 0 && nb[i] && (S(i).count({b, -1, neg(i)}) || !has_relay_toward(b, i))) removed.insert(s);  // S1
        if (i >= 0 && nb[j]) {  // S2
            bool receiver = false;
            for (int k = 0; k < 4; ++k)
                if (nb[j]->tr.count({b, neg(j), k}) || nb[j]->act.count({b, neg(j), k})) receiver = true;
            if (!receiver) removed.insert(s);
        }
        if (i < 0 && nb[j]) removed.insert(s);  // S3
    }
    out.tr = T.tr;
    out.tr.insert(added.begin(), added.end());
    for (const auto& s : removed) out.tr.erase(s);
    return out;
}

} // namespace

Configuration reference_f(const Configuration& c) {
    std::map<Cell, RTile> r;
    for (const auto& [p, t] : c) r.emplace(p, to_r(t));
    Configuration out;
    for (const auto& [p, t] : r) {
        std::array<const RTile*, 4> nb{};
        for (int d = 0; d < 4; ++d) {
            auto it = r.find(p + kOff[d]);
            nb[d] = it == r.end() ? nullptr : &it->second;
        }
        out.emplace(p, from_r(ref_tile(t, nb)));
    }
    return out;
}

// ---- random generation ----

Configuration random_config(std::mt19937_64& rng, const RandomConfigOptions& o) {
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> dir(0, 3), base(0, o.bases - 1), small(0, 2);
    auto name = [](int b) { return std::string(1, static_cast<char>('a' + b)); };
    Configuration c;
    while (c.empty()) {
        for (int y = 0; y < o.height; ++y)
            for (int x = 0; x < o.width; ++x) {
                if (u(rng) > o.fill) continue;
                ActiveTile t;
                t.name = "R" + std::to_string(x) + "_" + std::to_string(y);
                for (int d = 0; d < 4; ++d) {
                    // each base appears at most once per side, so the side invariants hold
                    std::vector<int> bs(o.bases);
                    for (int k = 0; k < o.bases; ++k) bs[k] = k;
                    std::shuffle(bs.begin(), bs.end(), rng);
                    int na = small(rng), ni = small(rng);
                    for (int k = 0; k < na + ni && k < o.bases; ++k) {
                        Label l{name(bs[k]), u(rng) < 0.5};
                        if (k < na) t.sides[d].active.insert(l);
                        else {
                            t.sides[d].inactive.insert(l);
                            if (u(rng) < 0.75) {
                                int src = dir(rng);
                                t.activation.insert(Signal{l.base, static_cast<Direction>(src), static_cast<Direction>(d)});
                            }
                        }
                    }
                }
                if (u(rng) < 0.3)
                    t.activation.insert(Signal{name(base(rng)), static_cast<Direction>(dir(rng)),
                                               static_cast<Direction>(dir(rng))});
                int nt = std::uniform_int_distribution<int>(0, 4)(rng);
                for (int k = 0; k < nt; ++k) {
                    Signal s;
                    s.base = name(base(rng));
                    s.target = static_cast<Direction>(dir(rng));
                    if (u(rng) >= 0.4) {
                        int src = dir(rng);
                        if (src == index(s.target)) src = (src + 1) % 4;
                        s.source = static_cast<Direction>(src);
                    }
                    t.transmission.insert(s);
                }
                c.emplace(Cell{x, y}, std::move(t));
            }
    }
    return c;
}

StrengthFunction random_strengths(std::mt19937_64& rng, int bases, int max_strength) {
    StrengthFunction s;
    std::uniform_int_distribution<int> w(0, max_strength);
    for (int b = 0; b < bases; ++b) s.set(std::string(1, static_cast<char>('a' + b)), w(rng));
    return s;
}

// ---- Example fixture ----

const ExampleFixture& example_fixture() {
    static const ExampleFixture fx = [] {
        ExampleFixture f;
        // Colors r, g, b, y on the center; p, q, s only glue the neighbors on.
        auto center = [](SideText px, std::vector<std::string> act, std::vector<std::string> tr) {
            return make_tile("T", {{"p"}, {}}, px, {{"q"}, {}}, {{"s"}, {}}, act, tr);
        };
        auto top = [](std::vector<std::string> tr) { return make_tile("U", {}, {}, {{"-p"}, {}}, {}, {}, tr); };
        auto bottom = [](std::vector<std::string> tr) {
            return make_tile("V", {{"-q"}, {}}, {}, {}, {}, {}, tr);
        };
        ActiveTile left = make_tile("W", {}, {{"-s"}, {}}, {}, {});
        const Cell c{0, 0}, up{0, 1}, down{0, -1}, west{-1, 0};

        f.initial = {
            {c, center({{}, {"r", "g"}}, {"r(+y->+x)", "g(-y->+x)"},
                       {"b(0->-x)", "y(0->+x)", "y(0->-y)", "g(+y->-y)", "b(+y->-y)"})},
            {up, top({"b(0->-y)", "g(+y->-y)"})},
            {down, bottom({"g(0->+y)"})},
            {west, left},
        };
        f.after_one = {
            {c, center({{"g"}, {"r"}}, {}, {"y(0->+x)", "b(0->-y)"})},
            {up, top({"g(+y->-y)"})},
            {down, bottom({})},
            {west, left},
        };
        f.after_two = {
            {c, center({{"g"}, {}}, {}, {"y(0->+x)"})},
            {up, top({})},
            {down, bottom({})},
            {west, left},
        };
        return f;
    }();
    return fx;
}

// ---- properties ----

namespace {

std::string dump(const Configuration& c) {
    std::string s;
    for (const auto& [p, t] : c) s += std::to_string(p.x) + "," + std::to_string(p.y) + ":" + state_key(t) + " ";
    return s;
}

struct Tally {
    PropertyResult r;
    explicit Tally(std::string name) { r.name = std::move(name); }
    void check(bool ok, const std::string& why) {
        ++r.cases;
        if (!ok && r.failures++ == 0) r.first_failure = why;
    }
};

} // namespace

PropertyResult prop_f_order_independence(int cases, std::uint64_t seed) {
    Tally t("f order independence");
    std::mt19937_64 rng(seed);
    for (int k = 0; k < cases; ++k) {
        Configuration c = random_config(rng);
        Configuration want = apply_f(c);
        std::vector<Cell> order;
        for (const auto& [p, tile] : c) order.push_back(p);
        std::shuffle(order.begin(), order.end(), rng);
        Configuration got;
        for (Cell p : order) got.emplace(p, modify_tile(context_at(c, p)));
        // same rule seen from a rotated and translated frame
        Cell shift{static_cast<int>(rng() % 7) - 3, static_cast<int>(rng() % 7) - 3};
        bool equivariant = apply_f(rotate_config(c)) == rotate_config(want) &&
                           apply_f(translate(c, shift)) == translate(want, shift);
        t.check(got == want && equivariant, dump(c));
    }
    return t.r;
}

PropertyResult prop_f_matches_reference(int cases, std::uint64_t seed) {
    Tally t("f matches reference");
    std::mt19937_64 rng(seed);
    for (int k = 0; k < cases; ++k) {
        Configuration c = random_config(rng);
        for (int step = 0; step < 4; ++step) {
            Configuration want = reference_f(c);
            bool ok = apply_f(c) == want;
            t.check(ok, dump(c));
            if (!ok || want == c) break;
            c = std::move(want);
        }
    }
    return t.r;
}

PropertyResult prop_potential_decrease(int cases, std::uint64_t seed) {
    Tally t("potential strictly decreases");
    std::mt19937_64 rng(seed);
    for (int k = 0; k < cases; ++k) {
        Configuration c = random_config(rng);
        const long long bound = potential(c) + 1;
        bool ok = true;
        long long steps = 0;
        while (ok) {
            Configuration next = apply_f(c);
            if (next == c) break;
            ok = potential(next) < potential(c) && ++steps <= bound;
            c = std::move(next);
        }
        t.check(ok, dump(c));
    }
    return t.r;
}

PropertyResult prop_complete_matches_naive(int cases, std::uint64_t seed) {
    Tally t("complete matches naive iteration");
    std::mt19937_64 rng(seed);
    RandomConfigOptions big;
    big.width = 5;
    big.height = 4;
    for (int k = 0; k < cases; ++k) {
        Configuration c = random_config(rng, k % 2 ? big : RandomConfigOptions{});
        Configuration cur = c;
        int n = 0;
        while (true) {
            Configuration next = apply_f(cur);
            if (next == cur) break;
            cur = std::move(next);
            ++n;
        }
        auto res = complete(c);
        t.check(res.config == cur && res.iterations == n && complete(res.config).iterations == 0, dump(c));
    }
    return t.r;
}

PropertyResult prop_min_cut_members(const std::vector<StageSet>& stages, const StrengthFunction& s, int theta) {
    Tally t("min cut oracle on stage members");
    const std::size_t last = std::min<std::size_t>(stages.size(), 7);
    if (last == 0) return t.r;
    for (const auto& m : stages[last - 1].members) {
        const auto& c = m->assembly.cells();
        if (c.size() > 12) continue;
        bool ok = is_theta_stable(c, s, theta) == brute_stable(c, s, theta) && brute_stable(c, s, theta);
        if (c.size() >= 2) ok = ok && min_cut(binding_graph(c, s)) == brute_min_cut(c, s);
        t.check(ok, "member " + std::to_string(m->id));
    }
    return t.r;
}

PropertyResult prop_min_cut_random(int cases, std::uint64_t seed) {
    Tally t("min cut oracle on random configurations");
    std::mt19937_64 rng(seed);
    RandomConfigOptions o;
    o.width = 4;
    o.height = 3;
    o.fill = 0.85;
    o.bases = 3;
    for (int k = 0; k < cases; ++k) {
        Configuration c = random_config(rng, o);
        StrengthFunction s = random_strengths(rng, o.bases, 3);
        bool ok = true;
        if (c.size() >= 2) {
            auto g = binding_graph(c, s);
            // Stoer-Wagner reports 0 on a disconnected graph, as does the enumeration
            ok = min_cut(g) == brute_min_cut(c, s);
        }
        for (int theta = 0; theta <= 4; ++theta) ok = ok && is_theta_stable(c, s, theta) == brute_stable(c, s, theta);
        t.check(ok, dump(c));
    }
    return t.r;
}

PropertyResult prop_normalize_idempotent(int cases, std::uint64_t seed) {
    Tally t("normalize idempotent and translation invariant");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> off(-50, 50);
    for (int k = 0; k < cases; ++k) {
        Configuration c = translate(random_config(rng), {off(rng), off(rng)});
        Configuration n1 = normalized(c);
        Cell shift{off(rng), off(rng)};
        Assembly a(c);
        bool ok = normalized(n1) == n1 && Assembly(n1).key() == a.key() &&
                  Assembly(translate(c, shift)).key() == a.key() && Assembly(a.cells()).key() == a.key() &&
                  translations_equal(c, translate(c, shift));
        int mx = 1 << 30, my = 1 << 30;
        for (const auto& [p, tile] : a.cells()) {
            mx = std::min(mx, p.x);
            my = std::min(my, p.y);
        }
        t.check(ok && mx == 0 && my == 0, dump(c));
    }
    return t.r;
}

PropertyResult prop_rotation_order_four() {
    Tally t("rotation has order four");
    for (const auto& a : lshape::builtin_system().seed) {
        const ActiveTile& tile = a.cells().begin()->second;
        ActiveTile r = tile;
        bool valid = true;
        for (int k = 0; k < 4; ++k) {
            r = rotate_ccw(r);
            valid = valid && validate_active_tile(r).empty();
        }
        t.check(valid && r.same_state(tile) && r.id() == tile.id(), tile.id());
    }
    return t.r;
}

} // namespace ts
