#include "atas/assembler.hpp"
#include "atas/errors.hpp"
#include "atas/signal_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace atas {

std::vector<Assembly> close_under_rotation(const std::vector<ActiveTile>& reps) {
    std::vector<Assembly> out;
    std::unordered_set<std::string> seen;
    for (const auto& rep : reps) {
        auto bad = validate_active_tile(rep);
        if (!bad.empty()) {
            std::string msg = "invalid tile " + rep.id() + ":";
            for (const auto& v : bad) msg += " [" + v.clause + "] " + v.detail;
            throw ConfigurationError(msg);
        }
        for (const auto& t : rotation_class(rep)) {
            Assembly a(Configuration{{Cell{0, 0}, t}});
            if (seen.insert(a.key()).second) out.push_back(std::move(a));
        }
    }
    return out;
}

std::vector<Assembly> unit_assemblies(const std::vector<ActiveTile>& tiles) {
    std::vector<Assembly> out;
    std::unordered_set<std::string> seen;
    for (const auto& t : tiles) {
        Assembly a(Configuration{{Cell{0, 0}, t}});
        if (seen.insert(a.key()).second) out.push_back(std::move(a));
    }
    return out;
}

namespace {

// Overlap test and seam weight for b shifted by off, or -1 on overlap.
int seam_at(const Assembly& a, const Assembly& b, Cell off, const StrengthFunction& s) {
    const auto& ca = a.cells();
    const auto& cb = b.cells();
    int w = 0;
    // walk the smaller footprint
    if (cb.size() <= ca.size()) {
        for (const auto& [q, tb] : cb)
            if (ca.count(q + off)) return -1;
        for (const auto& [q, tb] : cb) {
            Cell p = q + off;
            for (auto d : kDirections) {
                auto it = ca.find(step(p, d));
                if (it != ca.end()) w += bond_weight(tb, d, it->second, s);
            }
        }
    } else {
        const Cell back{-off.x, -off.y};
        for (const auto& [p, ta] : ca)
            if (cb.count(p + back)) return -1;
        for (const auto& [p, ta] : ca) {
            Cell q = p + back;
            for (auto d : kDirections) {
                auto it = cb.find(step(q, d));
                if (it != cb.end()) w += bond_weight(ta, d, it->second, s);
            }
        }
    }
    return w;
}

} // namespace

std::vector<Placement> seam_placements(const Assembly& a, const Assembly& b, const TileSystem& sys) {
    std::set<Cell> candidates;
    if (sys.theta > 0) {
        // a positive seam needs at least one complementary exposed pair
        std::map<std::pair<int, Label>, std::vector<Cell>> idx;
        for (const auto& e : b.exposed()) idx[{index(e.dir), e.label}].push_back(e.cell);
        for (const auto& e : a.exposed()) {
            auto it = idx.find({index(opposite(e.dir)), e.label.negated()});
            if (it == idx.end()) continue;
            Cell target = step(e.cell, e.dir);
            for (const auto& q : it->second) candidates.insert(target - q);
        }
    } else {
        // weight-0 seams are admissible, so every adjacency is a candidate
        for (const auto& [p, ta] : a.cells())
            for (auto d : kDirections) {
                Cell target = step(p, d);
                if (a.cells().count(target)) continue;
                for (const auto& [q, tb] : b.cells()) candidates.insert(target - q);
            }
    }
    std::vector<Placement> out;
    for (const auto& off : candidates) {
        int w = seam_at(a, b, off, sys.strength);
        if (w >= 0 && w >= sys.theta) out.push_back({off, w});
    }
    return out;
}

std::vector<Combination> combine(const Assembly& a, const Assembly& b, const TileSystem& sys,
                                 const CombineOptions& opts) {
    std::vector<Combination> out;
    std::unordered_set<std::string> seen;
    for (const auto& pl : seam_placements(a, b, sys)) {
        Configuration u = a.cells();
        for (const auto& [q, t] : b.cells()) u.emplace(q + pl.offset, t);
        if (opts.paranoid && !is_theta_stable(u, sys.strength, sys.theta))
            throw ConfigurationError("paranoid: seam shortcut accepted an unstable union");
        auto done = complete(u);
        if (opts.paranoid && !is_theta_stable(done.config, sys.strength, sys.theta))
            throw ConfigurationError("paranoid: completed union lost stability");
        Assembly res(done.config, sys.theta);
        if (!seen.insert(res.key()).second) continue;
        out.push_back({std::move(res), pl.offset, pl.seam, done.iterations});
    }
    return out;
}

RunOptions options_from_env() {
    RunOptions o;
    if (const char* t = std::getenv("ATAS_THREADS")) o.threads = std::max(1, std::atoi(t));
    if (const char* b = std::getenv("ATAS_BUDGET_SECS")) o.budget_secs = std::max(0.0, std::atof(b));
    return o;
}

StageSet seed_stage(const TileSystem& sys) {
    StageSet s;
    s.stage = 0;
    int id = 0;
    for (const auto& a : sys.seed) {
        auto m = std::make_shared<Member>();
        m->assembly = a;
        m->id = id++;
        m->stage = 0;
        s.members.push_back(std::move(m));
    }
    s.first_new = 0;
    return s;
}

namespace {

struct Found {
    std::size_t pair = 0;  // smallest pair index that produced it
    std::size_t order = 0; // placement order within that pair
    Combination comb;
    int left = 0, right = 0;
};

} // namespace

StageSet expand_stage(const StageSet& prev, const TileSystem& sys, const RunOptions& opts) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();

    // Pairs of older members were combined at an earlier stage, so only pairs touching a new one matter.
    std::vector<std::pair<int, int>> pairs;
    const auto& mem = prev.members;
    for (std::size_t i = prev.first_new; i < mem.size(); ++i)
        for (std::size_t j = 0; j < mem.size(); ++j) {
            if (j >= prev.first_new && j < i) continue;  // unordered, already taken as (j, i)
            pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    if (opts.shuffle_seed) {
        std::mt19937_64 rng(opts.shuffle_seed);
        std::shuffle(order.begin(), order.end(), rng);
    }

    std::unordered_set<std::string_view> known;
    for (const auto& m : mem) known.insert(m->assembly.key());

    const CombineOptions copts{opts.paranoid};
    std::atomic<std::size_t> next{0};
    std::atomic<bool> over_time{false};
    std::mutex err_mu;
    std::exception_ptr err;
    int nthreads = std::max(1, opts.threads);
    std::vector<std::unordered_map<std::string, Found>> local(nthreads);

    auto worker = [&](int w) {
        auto& mine = local[w];
        try {
            while (true) {
                std::size_t k = next.fetch_add(1);
                if (k >= order.size() || over_time.load()) return;
                if (opts.budget_secs > 0 && (k & 15) == 0 &&
                    std::chrono::duration<double>(clock::now() - start).count() > opts.budget_secs) {
                    over_time = true;
                    return;
                }
                const std::size_t pi = order[k];
                const auto [i, j] = pairs[pi];
                auto res = combine(mem[i]->assembly, mem[j]->assembly, sys, copts);
                for (std::size_t r = 0; r < res.size(); ++r) {
                    std::string key = res[r].result.key();
                    if (known.count(key)) continue;
                    auto it = mine.find(key);
                    if (it != mine.end() && std::tie(it->second.pair, it->second.order) <= std::tie(pi, r))
                        continue;
                    mine.insert_or_assign(std::move(key), Found{pi, r, std::move(res[r]), i, j});
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!err) err = std::current_exception();
            over_time = true;
        }
    };
    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);

    // merge, keeping the earliest producing pair for each class
    std::unordered_map<std::string, Found> merged;
    for (auto& m : local)
        for (auto& [key, f] : m) {
            auto it = merged.find(key);
            if (it == merged.end() ||
                std::tie(f.pair, f.order) < std::tie(it->second.pair, it->second.order))
                merged[key] = std::move(f);
        }
    std::vector<Found*> fresh;
    for (auto& [key, f] : merged) fresh.push_back(&f);
    std::sort(fresh.begin(), fresh.end(), [](const Found* x, const Found* y) {
        if (x->pair != y->pair) return x->pair < y->pair;
        if (x->order != y->order) return x->order < y->order;
        return x->comb.result.key() < y->comb.result.key();
    });

    StageSet out;
    out.stage = prev.stage + 1;
    out.members = prev.members;
    out.first_new = prev.members.size();
    for (auto* f : fresh) {
        auto m = std::make_shared<Member>();
        m->id = static_cast<int>(out.members.size());
        m->stage = out.stage;
        m->provenance = Provenance{f->left, f->right, f->comb.offset, f->comb.seam, f->comb.iterations};
        m->assembly = std::move(f->comb.result);
        out.members.push_back(std::move(m));
    }

    if (over_time) {
        out.partial = true;
        throw BudgetExceeded("stage " + std::to_string(out.stage) + " exceeded " +
                                 std::to_string(opts.budget_secs) + " s",
                             {out});
    }
    if (opts.max_members && out.members.size() > opts.max_members) {
        out.members.resize(std::max(opts.max_members, out.first_new));
        out.partial = true;
        throw BudgetExceeded("stage " + std::to_string(out.stage) + " exceeded " +
                                 std::to_string(opts.max_members) + " members",
                             {out});
    }
    return out;
}

std::vector<StageSet> run(const TileSystem& sys, int max_stage, const RunOptions& opts) {
    std::vector<StageSet> stages;
    stages.push_back(seed_stage(sys));
    if (opts.on_stage) opts.on_stage(stages.back());
    for (int i = 1; i <= max_stage; ++i) {
        try {
            stages.push_back(expand_stage(stages.back(), sys, opts));
        } catch (BudgetExceeded& e) {
            auto done = stages;
            for (auto& s : e.stages) done.push_back(std::move(s));
            throw BudgetExceeded(e.what(), std::move(done));
        }
        if (opts.on_stage) opts.on_stage(stages.back());
        if (stages.back().new_count() == 0) break;
    }
    return stages;
}

std::vector<StageSet> run_trajectory(const TileSystem& sys, int steps, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    std::vector<StageSet> stages;
    stages.push_back(seed_stage(sys));
    std::unordered_set<std::string> known;
    for (const auto& m : stages.back().members) known.insert(m->assembly.key());
    for (int i = 1; i <= steps; ++i) {
        StageSet s = stages.back();
        s.stage = i;
        s.first_new = s.members.size();
        const auto& pool = stages.back().members;
        // a bounded number of draws; a step may add nothing
        for (int attempt = 0; attempt < 64 && !pool.empty(); ++attempt) {
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            std::size_t x = pick(rng), y = pick(rng);
            auto res = combine(pool[x]->assembly, pool[y]->assembly, sys);
            std::erase_if(res, [&](const Combination& c) { return known.count(c.result.key()); });
            if (res.empty()) continue;
            std::uniform_int_distribution<std::size_t> which(0, res.size() - 1);
            auto& c = res[which(rng)];
            known.insert(c.result.key());
            auto m = std::make_shared<Member>();
            m->id = static_cast<int>(s.members.size());
            m->stage = i;
            m->provenance = Provenance{pool[x]->id, pool[y]->id, c.offset, c.seam, c.iterations};
            m->assembly = std::move(c.result);
            s.members.push_back(std::move(m));
            break;
        }
        stages.push_back(std::move(s));
    }
    return stages;
}

std::string rotation_class_key(const Assembly& a) {
    std::string best = a.key();
    Configuration c = a.cells();
    for (int k = 1; k < 4; ++k) {
        c = rotate_config(c);
        std::string key = canonical_key(normalized(c));
        if (key < best) best = std::move(key);
    }
    return best;
}

std::size_t count_rotation_classes(const std::vector<MemberRef>& members) {
    std::unordered_set<std::string> keys;
    for (const auto& m : members) keys.insert(rotation_class_key(m->assembly));
    return keys.size();
}

} // namespace atas
