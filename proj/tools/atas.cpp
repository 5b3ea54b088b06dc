#include "atas/errors.hpp"
#include "atas/io.hpp"
#include "atas/lshape.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>

using namespace atas;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kBudget = 2, kCorpus = 3 };

int cmd_validate(const std::string& path) {
    auto res = io::parse_tileset(io::read_file(path));
    for (const auto& d : res.diagnostics) std::cerr << path << ':' << d.str() << '\n';
    if (!res.ok()) return kInvalid;
    try {
        auto sys = res.doc->system();
        std::cout << "ok: " << res.doc->tiles.size() << " tiles, " << sys.seed.size()
                  << " in the seed, theta " << sys.theta << '\n';
    } catch (const ConfigurationError& e) {
        std::cerr << path << ": " << e.what() << '\n';
        return kInvalid;
    }
    if (!res.doc->tiletypes.empty()) {
        try {
            TileTypeSet set(res.doc->tiletypes, res.doc->system().seed);
            for (const auto& s : set.specs()) instantiate(set, s.index, 0);
            std::cout << "ok: " << set.specs().size() << " tile-type specs\n";
        } catch (const std::exception& e) {
            std::cerr << path << ": tile-type specs: " << e.what() << '\n';
            return kInvalid;
        }
    }
    return kOk;
}

struct RunArgs {
    std::string tileset;
    std::string builtin;
    std::optional<int> theta;
    int stages = 12;
    bool paranoid = false;
    std::string out;
    std::size_t max_members = 0;
    std::string seed_mode = "exhaustive";
    std::uint64_t rng_seed = 1;
};

void print_stage(const StageSet& s) {
    std::size_t largest = 0;
    for (const auto& m : s.new_members()) largest = std::max(largest, m->assembly.size());
    std::cout << "stage " << s.stage << ": +" << s.new_count() << " new (" << count_rotation_classes(s.new_members())
              << " up to rotation), " << s.members.size() << " total, largest new " << largest << " tiles"
              << (s.partial ? " [partial]" : "") << '\n';
}

int cmd_run(const RunArgs& a) {
    io::TileSetDocument doc;
    if (!a.builtin.empty()) {
        if (a.builtin != "lshape") {
            std::cerr << "unknown builtin '" << a.builtin << "'\n";
            return kInvalid;
        }
        lshape::builtin_system();  // audit; throws on failure
        doc = io::builtin_lshape_document();
    } else {
        auto res = io::parse_tileset(io::read_file(a.tileset));
        for (const auto& d : res.diagnostics) std::cerr << a.tileset << ':' << d.str() << '\n';
        if (!res.ok()) return kInvalid;
        doc = *res.doc;
    }
    if (a.theta) doc.theta = *a.theta;
    TileSystem sys = doc.system();
    const std::string fp = io::fingerprint(doc);

    auto opts = options_from_env();
    opts.paranoid = a.paranoid;
    opts.max_members = a.max_members;
    opts.on_stage = [&](const StageSet& s) {
        print_stage(s);
        if (!a.out.empty()) io::write_stage(a.out, s, fp);
    };

    auto t0 = std::chrono::steady_clock::now();
    int code = kOk;
    std::vector<StageSet> stages;
    try {
        if (a.seed_mode == "trajectory") {
            stages = run_trajectory(sys, a.stages, a.rng_seed);
            for (const auto& s : stages) opts.on_stage(s);
        } else {
            stages = run(sys, a.stages, opts);
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        if (!e.stages.empty() && e.stages.back().partial) opts.on_stage(e.stages.back());
        stages = e.stages;
        code = kBudget;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "done: " << stages.size() << " stages in " << secs << " s\n";
    if (!a.out.empty()) {
        io::write_file((fs::path(a.out) / "tileset.json").string(), io::serialize_tileset(doc));
        std::cout << "trace written to " << a.out << '\n';
    }
    return code;
}

MemberRef find_member(const std::vector<StageSet>& trace, int id) {
    if (trace.empty() || id < 0 || id >= static_cast<int>(trace.back().members.size())) return nullptr;
    return trace.back().members[id];
}

int cmd_extract(const std::string& dir, int id, const std::string& out) {
    auto trace = io::read_trace(dir);
    auto m = find_member(trace, id);
    if (!m) {
        std::cerr << "no member " << id << " in " << dir << '\n';
        return kInvalid;
    }
    std::string fp;
    if (fs::exists(fs::path(dir) / "tileset.json")) {
        auto res = io::parse_tileset(io::read_file((fs::path(dir) / "tileset.json").string()));
        if (res.ok()) fp = io::fingerprint(*res.doc);
    }
    io::AssemblyDocument doc{m->assembly, m->stage, m->id, m->provenance, fp};
    std::string text = io::serialize_assembly(doc);
    if (out.empty()) std::cout << text;
    else io::write_file(out, text);
    return kOk;
}

int cmd_render(const std::string& path, bool svg, bool ascii, const std::string& out) {
    auto doc = io::parse_assembly(io::read_file(path));
    StrengthFunction s;
    const StrengthFunction* sp = nullptr;
    if (doc.system_fingerprint == io::fingerprint(io::builtin_lshape_document())) {
        s = lshape::strengths();
        sp = &s;
    }
    std::string text = svg && !ascii ? io::render_svg(doc.assembly, sp) : io::render_ascii(doc.assembly);
    if (out.empty()) std::cout << text;
    else io::write_file(out, text);
    return kOk;
}

int cmd_classify(const std::string& path, const std::string& trace_dir, const std::string& tileset,
                 int max_level) {
    auto doc = io::parse_assembly(io::read_file(path));
    auto trace = io::read_trace(trace_dir);
    Classification c;
    if (!tileset.empty()) {
        auto res = io::parse_tileset(io::read_file(tileset));
        for (const auto& d : res.diagnostics) std::cerr << tileset << ':' << d.str() << '\n';
        if (!res.ok()) return kInvalid;
        if (res.doc->tiletypes.empty()) {
            std::cerr << tileset << ": no tile-type specs to classify against\n";
            return kInvalid;
        }
        TileTypeSet set(res.doc->tiletypes, res.doc->system().seed);
        c = classify(doc.assembly, trace, set, max_level);
    } else {
        c = classify(doc.assembly, trace, lshape::builtin_tiletypes(), max_level);
    }
    std::cout << c.str() << '\n';
    return c.kind == Classification::Kind::Unknown ? kInvalid : kOk;
}

int cmd_verify(int level, const std::string& out) {
    const auto& sys = lshape::builtin_system();
    const auto& set = lshape::builtin_tiletypes();
    const bool bordered = level <= 1;
    const int limit = static_cast<int>(bordered ? lshape::assembly_stage(level + 1) : lshape::assembly_stage(level));

    auto opts = options_from_env();
    auto t0 = std::chrono::steady_clock::now();
    std::vector<StageSet> stages;
    try {
        stages = run(sys, limit, opts);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kBudget;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ojson rep;
    rep["level"] = level;
    rep["stages_run"] = static_cast<int>(stages.size()) - 1;
    rep["seconds"] = secs;
    bool ok = true;

    std::vector<int> types{1};
    if (bordered) types.insert(types.end(), {2, 3});
    ojson tt = ojson::array();
    for (int i : types) {
        Assembly want(instantiate(set, i, level));
        int found = -1;
        MemberRef hit;
        for (const auto& s : stages) {
            for (const auto& m : s.new_members())
                if (m->assembly.identity() == want.identity()) {
                    found = s.stage;
                    hit = m;
                    break;
                }
            if (hit) break;
        }
        ojson e;
        e["type"] = i;
        e["first_stage"] = found;
        long long arm = lshape::short_side(level) + (i == 1 ? 0 : 1);
        auto dim = lshape::l_dimensions(want);
        bool dims = dim && dim->arm == arm && dim->length == 2 * arm;
        e["arm"] = dim ? dim->arm : 0;
        e["length"] = dim ? dim->length : 0;
        e["expected_arm"] = arm;
        e["dimensions_ok"] = dims;
        bool pass = dims && hit;
        if (i == 1) {
            e["expected_stage"] = lshape::assembly_stage(level);
            pass = pass && found == lshape::assembly_stage(level);
        }
        if (hit) {
            auto r = verify_regions(hit->assembly, set, i, level);
            e["regions_match"] = r.match;
            if (!r.match) e["first_mismatch"] = r.first_mismatch;
            ojson counts = ojson::array();
            for (const auto& rc : r.regions)
                counts.push_back({{"region", rc.region}, {"expected", rc.expected}, {"placed", rc.placed},
                                  {"matched", rc.matched}});
            e["regions"] = counts;
            pass = pass && r.match;
        }
        e["pass"] = pass;
        ok = ok && pass;
        std::cout << "T" << i << "(" << level << "): " << (pass ? "ok" : "FAIL") << ", arms " << arm << "x"
                  << 2 * arm << ", first at stage " << found << '\n';
        if (i == 1 && level >= 1 && hit) {
            auto mk = lshape::aperiodicity_scan(hit->assembly, level);
            ojson mj;
            mj["c2_markers"] = mk.c2_markers;
            mj["c3_markers"] = mk.c3_markers;
            mj["unique"] = mk.unique;
            mj["collinear"] = mk.collinear;
            mj["a3_between"] = mk.a3_between;
            mj["a3_expected"] = mk.a3_expected;
            mj["level_encoded"] = mk.level_encoded;
            rep["markers"] = mj;
            bool mpass = mk.unique && mk.collinear && mk.level_encoded;
            ok = ok && mpass;
            std::cout << "markers: " << (mpass ? "ok" : "FAIL") << ", " << mk.a3_between << " A3 between\n";
        }
        tt.push_back(e);
    }
    rep["tiletypes"] = tt;

    Classifier cls(set, level + 1);
    std::size_t exact = 0, inter = 0, seed = 0, unknown = 0;
    for (const auto& m : stages.back().members) {
        auto c = cls(m->assembly, stages);
        switch (c.kind) {
        case Classification::Kind::Exact: ++exact; break;
        case Classification::Kind::Intermediate: ++inter; break;
        case Classification::Kind::Seed: ++seed; break;
        case Classification::Kind::Unknown: ++unknown; break;
        }
    }
    rep["classification"] = {{"members", stages.back().members.size()}, {"seed", seed}, {"exact", exact},
                             {"intermediate", inter}, {"unknown", unknown}};
    ok = ok && unknown == 0;
    std::cout << "classified " << stages.back().members.size() << " members: " << unknown << " unknown\n";
    rep["pass"] = ok;
    if (!out.empty()) io::write_file(out, rep.dump(2) + "\n");
    std::cout << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? kOk : kInvalid;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active tile assembly simulator and verifier"};
    app.require_subcommand(1);

    std::string path, out, trace_dir, tileset;
    int level = 0, id = -1, max_level = 3;
    bool svg = false, ascii = false;
    RunArgs ra;

    auto* validate = app.add_subcommand("validate", "Check a tile-set document");
    validate->add_option("tileset", path, "Tile-set JSON")->required()->check(CLI::ExistingFile);

    auto* runc = app.add_subcommand("run", "Run the staged assembly process");
    auto* src = runc->add_option("--tileset", ra.tileset, "Tile-set JSON")->check(CLI::ExistingFile);
    runc->add_option("--builtin", ra.builtin, "Built-in system (lshape)")->excludes(src);
    runc->add_option("--theta", ra.theta, "Override the temperature");
    runc->add_option("--stages", ra.stages, "Last stage to compute")->check(CLI::NonNegativeNumber);
    runc->add_flag("--paranoid", ra.paranoid, "Cross-check every combination with a full min cut");
    runc->add_option("--out", ra.out, "Write a trace directory");
    runc->add_option("--max-members", ra.max_members, "Stop when a stage exceeds this many members");
    runc->add_option("--seed-mode", ra.seed_mode, "exhaustive or trajectory")
        ->check(CLI::IsMember({"exhaustive", "trajectory"}));
    runc->add_option("--rng-seed", ra.rng_seed, "Seed for trajectory mode");

    auto* extract = app.add_subcommand("extract", "Write one member of a trace as an assembly document");
    extract->add_option("trace", trace_dir, "Trace directory")->required();
    extract->add_option("--id", id, "Member id")->required();
    extract->add_option("--out", out, "Output file (stdout if omitted)");

    auto* render = app.add_subcommand("render", "Draw an assembly");
    render->add_option("assembly", path, "Assembly JSON")->required()->check(CLI::ExistingFile);
    auto* fsvg = render->add_flag("--svg", svg, "SVG output");
    render->add_flag("--ascii", ascii, "ASCII output")->excludes(fsvg);
    render->add_option("--out", out, "Output file (stdout if omitted)");

    auto* verify = app.add_subcommand("verify", "Verify the built-in L-shape system at one level");
    std::string which;
    verify->add_option("system", which, "lshape")->required()->check(CLI::IsMember({"lshape"}));
    verify->add_option("--level", level, "0, 1 or 2")->check(CLI::Range(0, 2));
    verify->add_option("--out", out, "Write a JSON report");

    auto* classifyc = app.add_subcommand("classify", "Classify an assembly against tile-type specs");
    classifyc->add_option("assembly", path, "Assembly JSON")->required()->check(CLI::ExistingFile);
    classifyc->add_option("--trace", trace_dir, "Trace directory")->required();
    classifyc->add_option("--tileset", tileset, "Tile-set JSON with tiletypes (default: built-in)");
    classifyc->add_option("--max-level", max_level, "Highest level to try");

    auto* exportc = app.add_subcommand("export", "Write the built-in tile set as a document");
    exportc->add_option("system", which, "lshape")->required()->check(CLI::IsMember({"lshape"}));
    exportc->add_option("--out", out, "Output file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kInvalid;
    }

    try {
        if (*validate) return cmd_validate(path);
        if (*runc) {
            if (ra.tileset.empty() && ra.builtin.empty()) {
                std::cerr << "run needs --tileset or --builtin\n";
                return kInvalid;
            }
            return cmd_run(ra);
        }
        if (*extract) return cmd_extract(trace_dir, id, out);
        if (*render) return cmd_render(path, svg, ascii, out);
        if (*verify) return cmd_verify(level, out);
        if (*classifyc) return cmd_classify(path, trace_dir, tileset, max_level);
        if (*exportc) {
            lshape::builtin_system();
            std::string text = io::serialize_tileset(io::builtin_lshape_document());
            if (out.empty()) std::cout << text;
            else io::write_file(out, text);
            return kOk;
        }
    } catch (const CorpusIntegrityError& e) {
        std::cerr << "corpus integrity failure: " << e.what() << '\n';
        for (const auto& u : e.unreproduced) std::cerr << "  " << u << '\n';
        return kCorpus;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kOk;
}
