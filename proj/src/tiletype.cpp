#include "atas/tiletype.hpp"
#include "atas/errors.hpp"

#include <deque>
#include <numeric>
#include <regex>
#include <set>

namespace atas {

long long LevelExpr::eval(int level) const {
    if (coeff == 0) return constant;
    const int e = level + shift;
    if (e < 0) throw DomainError("expression " + str() + " undefined at level " + std::to_string(level));
    return coeff * (1LL << e) + constant;
}

std::string LevelExpr::str() const {
    if (coeff == 0) return std::to_string(constant);
    std::string out = std::to_string(coeff) + "*2^(l";
    if (shift > 0) out += "+" + std::to_string(shift);
    if (shift < 0) out += std::to_string(shift);
    out += ")";
    if (constant > 0) out += "+" + std::to_string(constant);
    if (constant < 0) out += std::to_string(constant);
    return out;
}

std::optional<LevelExpr> LevelExpr::parse(std::string_view s) {
    static const std::regex konst(R"(^(-?\d+)$)");
    static const std::regex pow2(R"(^(-?\d+)\*2\^\(l([+-]\d+)?\)([+-]\d+)?$)");
    std::string str(s);
    std::smatch m;
    if (std::regex_match(str, m, konst)) return LevelExpr::constant_of(std::stoll(m[1]));
    if (std::regex_match(str, m, pow2)) {
        LevelExpr e;
        e.coeff = std::stoll(m[1]);
        if (m[2].matched) e.shift = std::stoi(m[2]);
        if (m[3].matched) e.constant = std::stoll(m[3]);
        return e;
    }
    return std::nullopt;
}

std::string rotate_id(const std::string& id, int k) {
    auto us = id.rfind('_');
    if (us == std::string::npos || us + 2 != id.size()) throw SpecError("bad tile id '" + id + "'");
    auto o = parse_orientation(id.back());
    if (!o) throw SpecError("bad rotation tag in '" + id + "'");
    int t = ((static_cast<int>(*o) + k) % 4 + 4) % 4;
    return id.substr(0, us + 1) + to_char(static_cast<Orientation>(t));
}

TileTypeSet::TileTypeSet(std::vector<TileTypeSpec> specs, const std::vector<Assembly>& seed)
    : specs_(std::move(specs)) {
    for (const auto& a : seed)
        for (const auto& [p, t] : a.cells()) tiles_.emplace(t.id(), t);
}

bool TileTypeSet::has(int i) const {
    return std::any_of(specs_.begin(), specs_.end(), [&](const TileTypeSpec& s) { return s.index == i; });
}

const TileTypeSpec& TileTypeSet::spec(int i) const {
    for (const auto& s : specs_)
        if (s.index == i) return s;
    throw SpecError("no tile type T" + std::to_string(i));
}

const ActiveTile& TileTypeSet::tile(const std::string& id) const {
    auto it = tiles_.find(id);
    if (it == tiles_.end()) throw SpecError("spec places unknown tile '" + id + "'");
    return it->second;
}

const std::vector<PlacedTile>& TileTypeSet::layout(int i, int level) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find({i, level});
        if (it != cache_.end()) return *it->second;
    }
    auto built = std::make_shared<const std::vector<PlacedTile>>(build(i, level));
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, fresh] = cache_.emplace(std::make_pair(i, level), built);
    return *it->second;
}

namespace {

std::vector<PlacedTile> normalize_layout(std::vector<PlacedTile> v) {
    if (v.empty()) return v;
    int mx = v[0].at.x, my = v[0].at.y;
    for (const auto& p : v) {
        mx = std::min(mx, p.at.x);
        my = std::min(my, p.at.y);
    }
    for (auto& p : v) p.at = p.at - Cell{mx, my};
    std::sort(v.begin(), v.end(), [](const PlacedTile& a, const PlacedTile& b) { return a.at < b.at; });
    return v;
}

} // namespace

std::vector<PlacedTile> TileTypeSet::build(int i, int level) const {
    if (level < 0) throw SpecError("negative level");
    const auto& sp = spec(i);
    std::vector<PlacedTile> out;
    if (sp.derived()) {
        for (const auto& p : layout(sp.rotation_of, level)) {
            PlacedTile q = p;
            for (int k = 0; k < sp.quarter_turns; ++k) q.at = Cell{-q.at.y, q.at.x};
            q.tile = rotate_id(p.tile, sp.quarter_turns);
            out.push_back(std::move(q));
        }
        return normalize_layout(std::move(out));
    }
    if (level < sp.first_region_level) {
        if (level != 0 || sp.level0.empty())
            throw SpecError("T" + std::to_string(i) + " has no layout at level " + std::to_string(level));
        for (const auto& p : sp.level0) out.push_back({p.at, p.tile, 0, 0});
    } else {
        for (const auto& reg : sp.regions) {
            const auto& r = reg.rule;
            const long long n = r.count.eval(level);
            if (n < 0)
                throw SpecError("T" + std::to_string(i) + " region " + std::to_string(reg.index) +
                                ": negative count at level " + std::to_string(level));
            Cell pos = r.base.eval(level);
            const long long skip = r.skip_after ? r.skip_after->eval(level) : -1;
            for (long long k = 1; k <= n; ++k) {
                const int sub = static_cast<int>(k);
                if (r.kind == SubregionRule::Kind::Fixed) {
                    for (const auto& t : r.tiles) out.push_back({pos + t.at, t.tile, reg.index, sub});
                } else {
                    for (const auto& p : layout(r.type, level + r.level_shift))
                        out.push_back({pos + p.at, p.tile, reg.index, sub});
                }
                pos = pos + r.step;
                if (k == skip) pos = pos + r.skip_extra;
            }
        }
    }
    std::map<Cell, std::pair<int, int>> owner;
    for (const auto& p : out) {
        auto [it, fresh] = owner.emplace(p.at, std::make_pair(p.region, p.sub));
        if (!fresh)
            throw SpecError("T" + std::to_string(i) + "(" + std::to_string(level) + "): region " +
                            std::to_string(it->second.first) + "." + std::to_string(it->second.second) +
                            " collides with region " + std::to_string(p.region) + "." +
                            std::to_string(p.sub) + " at " + std::to_string(p.at.x) + "," +
                            std::to_string(p.at.y));
    }
    return normalize_layout(std::move(out));
}

Configuration instantiate(const TileTypeSet& set, int i, int level) {
    Configuration c;
    for (const auto& p : set.layout(i, level)) c.emplace(p.at, set.tile(p.tile));
    return c;
}

std::vector<Cell> domain(const TileTypeSet& set, int i, int level) {
    std::vector<Cell> out;
    for (const auto& p : set.layout(i, level)) out.push_back(p.at);
    return out;
}

std::vector<Cell> region_domain(const TileTypeSet& set, int i, int j, int level) {
    std::vector<Cell> out;
    for (const auto& p : set.layout(i, level))
        if (p.region == j) out.push_back(p.at);
    return out;
}

RegionReport verify_regions(const Assembly& a, const TileTypeSet& set, int i, int level) {
    RegionReport rep;
    const auto& lay = set.layout(i, level);
    std::map<Cell, const PlacedTile*> want;
    for (const auto& p : lay) want[p.at] = &p;
    const auto& have = a.cells();

    std::set<Cell> all;
    for (const auto& [c, p] : want) all.insert(c);
    for (const auto& [c, t] : have) all.insert(c);
    for (const auto& c : all) {
        auto w = want.find(c);
        auto h = have.find(c);
        std::string at = std::to_string(c.x) + "," + std::to_string(c.y);
        if (w == want.end()) {
            rep.first_mismatch = "unexpected " + h->second.id() + " at " + at;
            break;
        }
        if (h == have.end()) {
            rep.first_mismatch = "missing " + w->second->tile + " at " + at;
            break;
        }
        if (h->second.id() != w->second->tile) {
            rep.first_mismatch = "expected " + w->second->tile + " at " + at + ", found " + h->second.id();
            break;
        }
    }
    rep.match = rep.first_mismatch.empty();

    const auto& sp = set.spec(i);
    const auto& owner = sp.derived() ? set.spec(sp.rotation_of) : sp;
    if (level < owner.first_region_level) return rep;
    for (const auto& reg : owner.regions) {
        RegionCount rc;
        rc.region = reg.index;
        rc.expected = reg.rule.count.eval(level);
        std::map<int, bool> subs;
        for (const auto& p : lay) {
            if (p.region != reg.index) continue;
            auto h = have.find(p.at);
            bool ok = h != have.end() && h->second.id() == p.tile;
            auto [it, fresh] = subs.emplace(p.sub, ok);
            if (!fresh) it->second = it->second && ok;
        }
        rc.placed = static_cast<long long>(subs.size());
        for (const auto& [k, ok] : subs) rc.matched += ok ? 1 : 0;
        rep.regions.push_back(rc);
    }
    return rep;
}

Rational::Rational(long long n, long long d) {
    if (d == 0) throw DomainError("zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::optional<Polygon> boundary_polygon(const std::vector<Cell>& cells) {
    if (cells.empty()) return std::nullopt;
    std::set<Cell> in(cells.begin(), cells.end());
    // directed unit edges with the interior on the left
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> next;
    std::size_t total = 0;
    auto add = [&](int x0, int y0, int x1, int y1) {
        next[{x0, y0}].push_back({x1, y1});
        ++total;
    };
    for (const auto& c : in) {
        if (!in.count({c.x, c.y - 1})) add(c.x, c.y, c.x + 1, c.y);
        if (!in.count({c.x + 1, c.y})) add(c.x + 1, c.y, c.x + 1, c.y + 1);
        if (!in.count({c.x, c.y + 1})) add(c.x + 1, c.y + 1, c.x, c.y + 1);
        if (!in.count({c.x - 1, c.y})) add(c.x, c.y + 1, c.x, c.y);
    }
    for (const auto& [v, outs] : next)
        if (outs.size() != 1) return std::nullopt;  // cells touching only at a corner

    std::vector<std::pair<int, int>> dirs;
    auto start = next.begin()->first;
    auto cur = start;
    do {
        auto nxt = next.at(cur)[0];
        dirs.push_back({nxt.first - cur.first, nxt.second - cur.second});
        cur = nxt;
    } while (cur != start && dirs.size() <= total);
    if (dirs.size() != total) return std::nullopt;  // holes or several pieces

    // start the walk at a corner so runs do not wrap
    std::size_t s0 = 0;
    while (dirs[s0] == dirs[(s0 + dirs.size() - 1) % dirs.size()]) ++s0;
    std::rotate(dirs.begin(), dirs.begin() + static_cast<std::ptrdiff_t>(s0), dirs.end());

    Polygon poly;
    std::vector<std::pair<int, int>> runs;
    for (const auto& d : dirs) {
        if (!runs.empty() && runs.back() == d) {
            ++poly.lengths.back();
        } else {
            runs.push_back(d);
            poly.lengths.push_back(1);
        }
    }
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto& a = runs[k];
        const auto& b = runs[(k + 1) % runs.size()];
        poly.turns.push_back(a.first * b.second - a.second * b.first > 0 ? 1 : -1);
    }
    return poly;
}

namespace {

std::optional<Rational> match_polygons(const Polygon& p, const Polygon& q) {
    const std::size_t n = p.lengths.size();
    if (n != q.lengths.size()) return std::nullopt;
    for (std::size_t s = 0; s < n; ++s) {
        bool ok = true;
        for (std::size_t k = 0; k < n && ok; ++k) {
            const std::size_t m = (k + s) % n;
            ok = p.turns[k] == q.turns[m] && q.lengths[m] * p.lengths[0] == p.lengths[k] * q.lengths[s];
        }
        if (ok) return Rational(q.lengths[s], p.lengths[0]);
    }
    return std::nullopt;
}

} // namespace

std::optional<Rational> similarity_ratio(const std::vector<Cell>& a, const std::vector<Cell>& b) {
    auto pa = boundary_polygon(a);
    if (!pa) return std::nullopt;
    if (auto pb = boundary_polygon(b))
        if (auto r = match_polygons(*pa, *pb)) return r;
    std::vector<Cell> mirrored;
    for (const auto& c : b) mirrored.push_back({-c.x, c.y});
    if (auto pm = boundary_polygon(mirrored))
        if (auto r = match_polygons(*pa, *pm)) return r;
    return std::nullopt;
}

SelfSimilarReport check_self_similar(const TileTypeSet& set, int i, int max_level) {
    SelfSimilarReport rep;
    rep.ok = true;
    for (int l = 0; l < max_level; ++l) {
        auto r = similarity_ratio(domain(set, i, l), domain(set, i, l + 1));
        if (!r) {
            rep.ok = false;
            rep.detail = "dom T" + std::to_string(i) + "(" + std::to_string(l + 1) +
                         ") is not similar to dom T" + std::to_string(i) + "(" + std::to_string(l) + ")";
            return rep;
        }
        rep.ratios.push_back(*r);
    }
    return rep;
}

StrongReport check_strongly_self_similar(const TileTypeSet& set, const std::vector<int>& subset,
                                         int max_level) {
    StrongReport rep;
    rep.ok = true;
    for (int i : subset) {
        auto ss = check_self_similar(set, i, max_level);
        if (!ss.ok) {
            rep.ok = false;
            rep.failures.push_back({i, 0, 0, false});
            if (rep.detail.empty()) rep.detail = ss.detail;
        }
    }
    for (int i : subset) {
        const auto& sp = set.spec(i);
        const auto& owner = sp.derived() ? set.spec(sp.rotation_of) : sp;
        for (const auto& reg : owner.regions) {
            const int j = reg.index;
            // works[k][l]: region j at level l is similar to T_k
            std::optional<int> witness;
            int failed_at = -1;
            std::map<int, std::vector<bool>> works;
            for (int l = owner.first_region_level; l <= max_level; ++l) {
                const auto dom = region_domain(set, i, j, l);
                bool any = false;
                for (int k : subset) {
                    bool ok = similarity_ratio(domain(set, k, 0), dom).has_value();
                    works[k].push_back(ok);
                    any = any || ok;
                }
                if (!any && failed_at < 0) failed_at = l;
            }
            for (int k : subset)
                if (std::all_of(works[k].begin(), works[k].end(), [](bool b) { return b; })) {
                    witness = k;
                    break;
                }
            if (witness) {
                rep.witness[{i, j}] = *witness;
                continue;
            }
            rep.ok = false;
            const bool stretching = reg.rule.count.coeff != 0;
            rep.failures.push_back({i, j, failed_at < 0 ? owner.first_region_level : failed_at, stretching});
            if (rep.detail.empty())
                rep.detail = "R_{" + std::to_string(i) + "," + std::to_string(j) +
                             "} is similar to no member of the subset";
        }
    }
    return rep;
}

std::string Classification::str() const {
    switch (kind) {
    case Kind::Seed: return "exact: seed";
    case Kind::Exact: return "exact: T" + std::to_string(type) + " level " + std::to_string(level);
    case Kind::Intermediate:
        return "intermediate: inside T" + std::to_string(type) + " level " + std::to_string(level) + " at " +
               std::to_string(offset.x) + "," + std::to_string(offset.y);
    case Kind::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

Classifier::Classifier(const TileTypeSet& set, int max_level) {
    for (int l = 0; l <= max_level; ++l)
        for (const auto& sp : set.specs()) {
            Target t;
            t.type = sp.index;
            t.level = l;
            for (const auto& p : set.layout(sp.index, l)) {
                t.cells.emplace(p.at, p.tile);
                t.by_tile[p.tile].push_back(p.at);
                t.identity += std::to_string(p.at.x) + "," + std::to_string(p.at.y) + ":" + p.tile + ";";
            }
            targets_.push_back(std::move(t));
        }
}

namespace {

std::vector<int> ancestry(const Assembly& a, const std::vector<StageSet>& trace) {
    std::vector<int> out;
    if (trace.empty()) return out;
    const auto& mem = trace.back().members;
    const Member* self = nullptr;
    for (const auto& m : mem)
        if (m->assembly.key() == a.key()) self = m.get();
    if (!self) return out;
    std::deque<int> todo{self->provenance.left, self->provenance.right};
    std::set<int> seen;
    while (!todo.empty()) {
        int id = todo.front();
        todo.pop_front();
        if (id < 0 || id >= static_cast<int>(mem.size()) || !seen.insert(id).second) continue;
        out.push_back(id);
        todo.push_back(mem[id]->provenance.left);
        todo.push_back(mem[id]->provenance.right);
    }
    return out;
}

} // namespace

Classification Classifier::operator()(const Assembly& a, const std::vector<StageSet>& trace) const {
    Classification c;
    c.provenance = ancestry(a, trace);
    if (a.size() == 1) {
        c.kind = Classification::Kind::Seed;
        return c;
    }
    for (const auto& t : targets_) {
        if (t.identity == a.identity()) {
            c.kind = Classification::Kind::Exact;
            c.type = t.type;
            c.level = t.level;
            return c;
        }
    }
    // anchor on the tile name that is rarest in the assembly
    std::map<std::string, int> freq;
    for (const auto& [p, tile] : a.cells()) ++freq[tile.id()];
    for (const auto& t : targets_) {
        if (t.cells.size() < a.size()) continue;
        const std::string* anchor = nullptr;
        std::size_t best = SIZE_MAX;
        bool impossible = false;
        for (const auto& [id, n] : freq) {
            auto it = t.by_tile.find(id);
            if (it == t.by_tile.end()) {
                impossible = true;
                break;
            }
            if (it->second.size() < best) {
                best = it->second.size();
                anchor = &id;
            }
        }
        if (impossible || !anchor) continue;
        Cell from{};
        for (const auto& [p, tile] : a.cells())
            if (tile.id() == *anchor) {
                from = p;
                break;
            }
        for (const auto& at : t.by_tile.at(*anchor)) {
            const Cell off = at - from;
            bool ok = true;
            for (const auto& [p, tile] : a.cells()) {
                auto it = t.cells.find(p + off);
                if (it == t.cells.end() || it->second != tile.id()) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                c.kind = Classification::Kind::Intermediate;
                c.type = t.type;
                c.level = t.level;
                c.offset = off;
                return c;
            }
        }
    }
    c.kind = Classification::Kind::Unknown;
    return c;
}

Classification classify(const Assembly& a, const std::vector<StageSet>& trace, const TileTypeSet& set,
                        int max_level) {
    return Classifier(set, max_level)(a, trace);
}

} // namespace atas
