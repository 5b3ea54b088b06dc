#include "atas/io.hpp"
#include "atas/errors.hpp"
#include "atas/lshape.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace atas::io {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string Diagnostic::str() const {
    std::string out;
    if (line > 0) out += std::to_string(line) + ":" + std::to_string(column) + ": ";
    out += message;
    if (!path.empty()) out += " (at " + path + ")";
    return out;
}

namespace {

std::string escape_pointer(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

// Maps JSON pointers to the line/column where each value starts.
// Only run on text nlohmann already accepted, so the scanner can be naive.
class SpanIndex {
public:
    explicit SpanIndex(const std::string& text) : s_(text) {
        value("");
    }

    std::pair<int, int> at(std::string ptr) const {
        while (true) {
            auto it = spans_.find(ptr);
            if (it != spans_.end()) return it->second;
            if (ptr.empty()) return {0, 0};
            ptr.erase(ptr.rfind('/'));
        }
    }

private:
    void adv() {
        if (s_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else if ((static_cast<unsigned char>(s_[i_]) & 0xC0) != 0x80) {
            ++col_;
        }
        ++i_;
    }
    void ws() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r'))
            adv();
    }
    std::string string_token() {
        std::size_t start = i_;
        adv();
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\\') adv();
            adv();
        }
        adv();
        return json::parse(s_.substr(start, i_ - start)).get<std::string>();
    }
    void value(const std::string& path) {
        ws();
        if (i_ >= s_.size()) return;
        spans_.emplace(path, std::make_pair(line_, col_));
        char c = s_[i_];
        if (c == '{') {
            adv();
            ws();
            if (s_[i_] == '}') {
                adv();
                return;
            }
            while (true) {
                ws();
                std::string key = string_token();
                ws();
                adv();  // ':'
                value(path + "/" + escape_pointer(key));
                ws();
                char d = s_[i_];
                adv();
                if (d == '}') return;
            }
        } else if (c == '[') {
            adv();
            ws();
            if (s_[i_] == ']') {
                adv();
                return;
            }
            for (int k = 0;; ++k) {
                value(path + "/" + std::to_string(k));
                ws();
                char d = s_[i_];
                adv();
                if (d == ']') return;
            }
        } else if (c == '"') {
            string_token();
        } else {
            while (i_ < s_.size() && std::string_view(",]} \t\r\n").find(s_[i_]) == std::string_view::npos)
                adv();
        }
    }

    const std::string& s_;
    std::size_t i_ = 0;
    int line_ = 1, col_ = 1;
    std::map<std::string, std::pair<int, int>> spans_;
};

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else if ((static_cast<unsigned char>(text[k]) & 0xC0) != 0x80) {
            ++col;
        }
    }
    return {line, col};
}

struct Sink {
    const SpanIndex* spans = nullptr;
    std::vector<Diagnostic> out;

    void err(const std::string& path, std::string msg) {
        auto [l, c] = spans ? spans->at(path) : std::make_pair(0, 0);
        out.push_back({l, c, path, std::move(msg)});
    }
};

const char* kSideKeys[4] = {"+y", "+x", "-y", "-x"};

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed,
                Sink& sink) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) sink.err(path + "/" + escape_pointer(it.key()), "unknown field \"" + it.key() + "\"");
    }
}

std::optional<LabelSet> read_labels(const json& j, const std::string& path,
                                    const StrengthFunction* alphabet, Sink& sink) {
    if (!j.is_array()) {
        sink.err(path, "expected an array of labels");
        return std::nullopt;
    }
    LabelSet out;
    bool ok = true;
    for (std::size_t k = 0; k < j.size(); ++k) {
        std::string p = path + "/" + std::to_string(k);
        if (!j[k].is_string()) {
            sink.err(p, "label must be a string");
            ok = false;
            continue;
        }
        auto l = Label::parse(j[k].get<std::string>());
        if (!l) {
            sink.err(p, "malformed label \"" + j[k].get<std::string>() + "\"");
            ok = false;
            continue;
        }
        if (alphabet && !alphabet->contains(l->base)) {
            sink.err(p, "unknown label \"" + l->base + "\"");
            ok = false;
            continue;
        }
        out.insert(*l);
    }
    if (!ok) return std::nullopt;
    return out;
}

std::optional<SignalSet> read_signals(const json& j, const std::string& path,
                                      const StrengthFunction* alphabet, Sink& sink) {
    if (!j.is_array()) {
        sink.err(path, "expected an array of signals");
        return std::nullopt;
    }
    SignalSet out;
    bool ok = true;
    for (std::size_t k = 0; k < j.size(); ++k) {
        std::string p = path + "/" + std::to_string(k);
        if (!j[k].is_string()) {
            sink.err(p, "signal must be a string");
            ok = false;
            continue;
        }
        auto s = Signal::parse(j[k].get<std::string>());
        if (!s) {
            sink.err(p, "malformed signal \"" + j[k].get<std::string>() +
                            "\", expected LABEL(SRC->DST)");
            ok = false;
            continue;
        }
        if (alphabet && !alphabet->contains(s->base)) {
            sink.err(p, "unknown label \"" + s->base + "\"");
            ok = false;
            continue;
        }
        out.insert(*s);
    }
    if (!ok) return std::nullopt;
    return out;
}

std::optional<ActiveTile> read_tile(const json& j, const std::string& path,
                                    const StrengthFunction* alphabet, Sink& sink) {
    if (!j.is_object()) {
        sink.err(path, "tile record must be an object");
        return std::nullopt;
    }
    std::size_t before = sink.out.size();
    check_keys(j, path, {"name", "tag", "sides", "activation", "transmission"}, sink);
    ActiveTile t;
    if (!j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty())
        sink.err(path + "/name", "tile needs a non-empty name");
    else
        t.name = j["name"].get<std::string>();
    if (j.contains("tag")) {
        const auto& tag = j["tag"];
        std::optional<Orientation> o;
        if (tag.is_string() && tag.get<std::string>().size() == 1)
            o = parse_orientation(tag.get<std::string>()[0]);
        if (!o) sink.err(path + "/tag", "tag must be one of N, E, S, W");
        else t.tag = *o;
    }
    if (!j.contains("sides") || !j["sides"].is_object()) {
        sink.err(path + "/sides", "tile needs a sides object");
    } else {
        const auto& sides = j["sides"];
        check_keys(sides, path + "/sides", {"+y", "+x", "-y", "-x"}, sink);
        for (auto d : kDirections) {
            std::string sp = path + "/sides/" + kSideKeys[index(d)];
            if (!sides.contains(kSideKeys[index(d)])) {
                sink.err(path + "/sides", std::string("missing side ") + kSideKeys[index(d)]);
                continue;
            }
            const auto& side = sides[kSideKeys[index(d)]];
            if (!side.is_object()) {
                sink.err(sp, "side must be an object with active and inactive lists");
                continue;
            }
            check_keys(side, sp, {"active", "inactive"}, sink);
            if (side.contains("active"))
                if (auto ls = read_labels(side["active"], sp + "/active", alphabet, sink))
                    t.side(d).active = *ls;
            if (side.contains("inactive"))
                if (auto ls = read_labels(side["inactive"], sp + "/inactive", alphabet, sink))
                    t.side(d).inactive = *ls;
        }
    }
    if (j.contains("activation"))
        if (auto ss = read_signals(j["activation"], path + "/activation", alphabet, sink))
            t.activation = *ss;
    if (j.contains("transmission"))
        if (auto ss = read_signals(j["transmission"], path + "/transmission", alphabet, sink))
            t.transmission = *ss;
    if (sink.out.size() != before) return std::nullopt;

    for (const auto& v : validate_active_tile(t)) {
        std::string where = path;
        if (v.clause == "2") {
            where += "/activation";
            // point at the first initiation in the listed array
            const auto& arr = j["activation"];
            for (std::size_t k = 0; k < arr.size(); ++k)
                if (auto s = Signal::parse(arr[k].get<std::string>()); s && s->is_initiation()) {
                    where += "/" + std::to_string(k);
                    break;
                }
        }
        sink.err(where, "not a legal active tile, condition (" + v.clause + "): " + v.detail);
    }
    if (sink.out.size() != before) return std::nullopt;
    return t;
}

ojson write_tile(const ActiveTile& t) {
    ojson o;
    o["name"] = t.name;
    if (t.tag != Orientation::N) o["tag"] = std::string(1, to_char(t.tag));
    ojson sides = ojson::object();
    for (auto d : kDirections) {
        ojson side;
        side["active"] = ojson::array();
        for (const auto& l : t.side(d).active) side["active"].push_back(l.str());
        side["inactive"] = ojson::array();
        for (const auto& l : t.side(d).inactive) side["inactive"].push_back(l.str());
        sides[kSideKeys[index(d)]] = side;
    }
    o["sides"] = sides;
    o["activation"] = ojson::array();
    for (const auto& s : t.activation) o["activation"].push_back(s.str());
    o["transmission"] = ojson::array();
    for (const auto& s : t.transmission) o["transmission"].push_back(s.str());
    return o;
}

// ---- tile-type specs ----

ojson write_cell(Cell c) { return ojson::array({c.x, c.y}); }

ojson write_placements(const std::vector<TilePlacement>& ps) {
    ojson a = ojson::array();
    for (const auto& p : ps) {
        ojson o;
        o["at"] = write_cell(p.at);
        o["tile"] = p.tile;
        a.push_back(o);
    }
    return a;
}

ojson write_spec(const TileTypeSpec& s) {
    ojson o;
    o["index"] = s.index;
    if (s.derived()) {
        o["rotation_of"] = s.rotation_of;
        o["quarter_turns"] = s.quarter_turns;
        return o;
    }
    o["level0"] = write_placements(s.level0);
    o["first_region_level"] = s.first_region_level;
    ojson regions = ojson::array();
    for (const auto& r : s.regions) {
        ojson ro;
        ro["index"] = r.index;
        const auto& rule = r.rule;
        if (rule.kind == SubregionRule::Kind::Fixed) {
            ro["kind"] = "fixed";
            ro["tiles"] = write_placements(rule.tiles);
        } else {
            ro["kind"] = "tiletype";
            ro["type"] = rule.type;
            ro["level_shift"] = rule.level_shift;
        }
        ro["base"] = ojson::array({rule.base.x.str(), rule.base.y.str()});
        ro["step"] = write_cell(rule.step);
        ro["count"] = rule.count.str();
        if (rule.skip_after) {
            ro["skip_after"] = rule.skip_after->str();
            ro["skip_extra"] = write_cell(rule.skip_extra);
        }
        regions.push_back(ro);
    }
    o["regions"] = regions;
    return o;
}

std::optional<Cell> read_cell(const json& j, const std::string& path, Sink& sink) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        sink.err(path, "expected [x, y] integers");
        return std::nullopt;
    }
    return Cell{j[0].get<int>(), j[1].get<int>()};
}

std::optional<LevelExpr> read_expr(const json& j, const std::string& path, Sink& sink) {
    if (j.is_number_integer()) return LevelExpr::constant_of(j.get<long long>());
    if (j.is_string())
        if (auto e = LevelExpr::parse(j.get<std::string>())) return e;
    sink.err(path, "expected an integer or an expression like \"3*2^(l)-2\"");
    return std::nullopt;
}

std::vector<TilePlacement> read_placements(const json& j, const std::string& path, Sink& sink) {
    std::vector<TilePlacement> out;
    if (!j.is_array()) {
        sink.err(path, "expected an array of {at, tile}");
        return out;
    }
    for (std::size_t k = 0; k < j.size(); ++k) {
        std::string p = path + "/" + std::to_string(k);
        const auto& e = j[k];
        if (!e.is_object() || !e.contains("at") || !e.contains("tile") || !e["tile"].is_string()) {
            sink.err(p, "expected {at, tile}");
            continue;
        }
        auto c = read_cell(e["at"], p + "/at", sink);
        if (c) out.push_back({*c, e["tile"].get<std::string>()});
    }
    return out;
}

int read_int(const json& j, const char* key, const std::string& path, Sink& sink, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) {
        sink.err(path + "/" + key, std::string(key) + " must be an integer");
        return fallback;
    }
    return j[key].get<int>();
}

std::optional<TileTypeSpec> read_spec(const json& j, const std::string& path, Sink& sink) {
    if (!j.is_object()) {
        sink.err(path, "tile-type spec must be an object");
        return std::nullopt;
    }
    std::size_t before = sink.out.size();
    check_keys(j, path, {"index", "rotation_of", "quarter_turns", "level0", "first_region_level", "regions"},
               sink);
    TileTypeSpec s;
    s.index = read_int(j, "index", path, sink, 0);
    if (s.index <= 0) sink.err(path + "/index", "index must be a positive integer");
    s.rotation_of = read_int(j, "rotation_of", path, sink, 0);
    s.quarter_turns = read_int(j, "quarter_turns", path, sink, 0);
    if (!s.derived()) {
        if (j.contains("level0")) s.level0 = read_placements(j["level0"], path + "/level0", sink);
        s.first_region_level = read_int(j, "first_region_level", path, sink, 1);
        if (j.contains("regions")) {
            const auto& rs = j["regions"];
            if (!rs.is_array()) sink.err(path + "/regions", "regions must be an array");
            for (std::size_t k = 0; rs.is_array() && k < rs.size(); ++k) {
                std::string p = path + "/regions/" + std::to_string(k);
                const auto& r = rs[k];
                if (!r.is_object()) {
                    sink.err(p, "region must be an object");
                    continue;
                }
                check_keys(r, p,
                           {"index", "kind", "tiles", "type", "level_shift", "base", "step", "count",
                            "skip_after", "skip_extra"},
                           sink);
                RegionSpec reg;
                reg.index = read_int(r, "index", p, sink, 0);
                std::string kind = r.value("kind", std::string());
                if (kind == "fixed") {
                    reg.rule.kind = SubregionRule::Kind::Fixed;
                    reg.rule.tiles = read_placements(r.value("tiles", json::array()), p + "/tiles", sink);
                } else if (kind == "tiletype") {
                    reg.rule.kind = SubregionRule::Kind::TileType;
                    reg.rule.type = read_int(r, "type", p, sink, 0);
                    reg.rule.level_shift = read_int(r, "level_shift", p, sink, 0);
                } else {
                    sink.err(p + "/kind", "kind must be \"fixed\" or \"tiletype\"");
                }
                if (r.contains("base") && r["base"].is_array() && r["base"].size() == 2) {
                    auto x = read_expr(r["base"][0], p + "/base/0", sink);
                    auto y = read_expr(r["base"][1], p + "/base/1", sink);
                    if (x && y) reg.rule.base = {*x, *y};
                } else {
                    sink.err(p + "/base", "base must be a pair of expressions");
                }
                if (r.contains("step"))
                    if (auto c = read_cell(r["step"], p + "/step", sink)) reg.rule.step = *c;
                if (r.contains("count"))
                    if (auto e = read_expr(r["count"], p + "/count", sink)) reg.rule.count = *e;
                if (r.contains("skip_after")) {
                    reg.rule.skip_after = read_expr(r["skip_after"], p + "/skip_after", sink);
                    if (r.contains("skip_extra"))
                        if (auto c = read_cell(r["skip_extra"], p + "/skip_extra", sink))
                            reg.rule.skip_extra = *c;
                }
                s.regions.push_back(std::move(reg));
            }
        }
    }
    if (sink.out.size() != before) return std::nullopt;
    return s;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

ojson write_provenance(const Provenance& p) {
    ojson o;
    o["left"] = p.left;
    o["right"] = p.right;
    o["offset"] = write_cell(p.offset);
    o["seam"] = p.seam;
    o["iterations"] = p.iterations;
    return o;
}

ojson write_cells(const Assembly& a) {
    ojson cells = ojson::object();
    for (const auto& [p, t] : a.cells()) cells[std::to_string(p.x) + "," + std::to_string(p.y)] = write_tile(t);
    return cells;
}

[[noreturn]] void fail_at(const Sink& sink) {
    const auto& d = sink.out.front();
    throw std::runtime_error(d.str());
}

json parse_or_throw(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        auto [l, c] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": syntax error: " + e.what());
    }
}

Provenance read_provenance(const json& j, const std::string& path, Sink& sink) {
    Provenance p;
    if (!j.is_object()) {
        sink.err(path, "provenance must be an object");
        return p;
    }
    p.left = read_int(j, "left", path, sink, -1);
    p.right = read_int(j, "right", path, sink, -1);
    if (j.contains("offset"))
        if (auto c = read_cell(j["offset"], path + "/offset", sink)) p.offset = *c;
    p.seam = read_int(j, "seam", path, sink, 0);
    p.iterations = read_int(j, "iterations", path, sink, 0);
    return p;
}

Configuration read_cells(const json& j, const std::string& path, Sink& sink) {
    Configuration c;
    if (!j.is_object() || j.empty()) {
        sink.err(path, "cells must be a non-empty object keyed by \"x,y\"");
        return c;
    }
    static const std::regex key_re(R"(^(-?\d+),(-?\d+)$)");
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string p = path + "/" + escape_pointer(it.key());
        std::smatch m;
        if (!std::regex_match(it.key(), m, key_re)) {
            sink.err(p, "cell key must look like \"x,y\"");
            continue;
        }
        auto t = read_tile(it.value(), p, nullptr, sink);
        if (t) c.emplace(Cell{std::stoi(m[1]), std::stoi(m[2])}, std::move(*t));
    }
    return c;
}

} // namespace

TileSystem TileSetDocument::system() const {
    TileSystem sys;
    sys.seed = rotation_closure ? close_under_rotation(tiles) : unit_assemblies(tiles);
    sys.strength = alphabet;
    sys.theta = theta;
    return sys;
}

ParseResult parse_tileset(const std::string& text) {
    ParseResult res;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [l, c] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        res.diagnostics.push_back({l, c, "", std::string("syntax error: ") + e.what()});
        return res;
    }
    SpanIndex spans(text);
    Sink sink;
    sink.spans = &spans;

    if (!j.is_object()) {
        sink.err("", "document must be a JSON object");
        res.diagnostics = std::move(sink.out);
        return res;
    }
    check_keys(j, "", {"format_version", "theta", "rotation_closure", "alphabet", "tiles", "tiletypes"}, sink);

    TileSetDocument doc;
    if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
        j["format_version"].get<int>() != kFormatVersion)
        sink.err("/format_version", "format_version must be " + std::to_string(kFormatVersion));
    if (!j.contains("theta") || !j["theta"].is_number_integer())
        sink.err("/theta", "theta must be an integer");
    else
        doc.theta = j["theta"].get<int>();
    if (j.contains("rotation_closure")) {
        if (!j["rotation_closure"].is_boolean()) sink.err("/rotation_closure", "rotation_closure must be a boolean");
        else doc.rotation_closure = j["rotation_closure"].get<bool>();
    }
    if (!j.contains("alphabet") || !j["alphabet"].is_object()) {
        sink.err("/alphabet", "alphabet must be an object mapping labels to strengths");
    } else {
        for (auto it = j["alphabet"].begin(); it != j["alphabet"].end(); ++it) {
            std::string p = "/alphabet/" + escape_pointer(it.key());
            auto l = Label::parse(it.key());
            if (!l || l->negative) sink.err(p, "alphabet keys must be unsigned labels");
            else if (!it.value().is_number_integer() || it.value().get<int>() < 0)
                sink.err(p, "strength must be a non-negative integer");
            else doc.alphabet.set(l->base, it.value().get<int>());
        }
    }
    if (!j.contains("tiles") || !j["tiles"].is_array()) {
        sink.err("/tiles", "tiles must be an array");
    } else {
        std::set<std::string> seen;
        for (std::size_t k = 0; k < j["tiles"].size(); ++k) {
            std::string p = "/tiles/" + std::to_string(k);
            auto t = read_tile(j["tiles"][k], p, &doc.alphabet, sink);
            if (!t) continue;
            if (!seen.insert(t->id()).second) {
                sink.err(p + "/name", "duplicate tile " + t->id());
                continue;
            }
            doc.tiles.push_back(std::move(*t));
        }
    }
    if (j.contains("tiletypes")) {
        const auto& ts = j["tiletypes"];
        if (!ts.is_array()) sink.err("/tiletypes", "tiletypes must be an array");
        for (std::size_t k = 0; ts.is_array() && k < ts.size(); ++k)
            if (auto s = read_spec(ts[k], "/tiletypes/" + std::to_string(k), sink))
                doc.tiletypes.push_back(std::move(*s));
    }
    res.diagnostics = std::move(sink.out);
    if (res.diagnostics.empty()) res.doc = std::move(doc);
    return res;
}

std::string serialize_tileset(const TileSetDocument& doc) {
    ojson o;
    o["format_version"] = kFormatVersion;
    o["theta"] = doc.theta;
    o["rotation_closure"] = doc.rotation_closure;
    ojson alpha = ojson::object();
    for (const auto& [base, s] : doc.alphabet.table()) alpha[base] = s;
    o["alphabet"] = alpha;
    ojson tiles = ojson::array();
    for (const auto& t : doc.tiles) tiles.push_back(write_tile(t));
    o["tiles"] = tiles;
    if (!doc.tiletypes.empty()) {
        ojson ts = ojson::array();
        for (const auto& s : doc.tiletypes) ts.push_back(write_spec(s));
        o["tiletypes"] = ts;
    }
    return o.dump(2) + "\n";
}

std::string fingerprint(const TileSetDocument& doc) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_tileset(doc))));
    return buf;
}

TileSetDocument builtin_lshape_document() {
    TileSetDocument doc;
    doc.alphabet = lshape::strengths();
    doc.theta = lshape::kTheta;
    doc.rotation_closure = true;
    doc.tiles = lshape::tiles();
    doc.tiletypes = lshape::tiletype_specs();
    return doc;
}

std::string serialize_assembly(const AssemblyDocument& doc) {
    ojson o;
    o["format_version"] = kFormatVersion;
    o["kind"] = "assembly";
    o["system_fingerprint"] = doc.system_fingerprint;
    o["theta"] = doc.assembly.theta();
    o["stage"] = doc.stage;
    o["id"] = doc.id;
    o["provenance"] = write_provenance(doc.provenance);
    o["cells"] = write_cells(doc.assembly);
    return o.dump(2) + "\n";
}

AssemblyDocument parse_assembly(const std::string& text) {
    json j = parse_or_throw(text);
    SpanIndex spans(text);
    Sink sink;
    sink.spans = &spans;
    if (!j.is_object() || j.value("kind", std::string()) != "assembly") {
        sink.err("", "not an assembly document");
        fail_at(sink);
    }
    AssemblyDocument doc;
    doc.system_fingerprint = j.value("system_fingerprint", std::string());
    doc.stage = read_int(j, "stage", "", sink, 0);
    doc.id = read_int(j, "id", "", sink, -1);
    int theta = read_int(j, "theta", "", sink, 0);
    if (j.contains("provenance")) doc.provenance = read_provenance(j["provenance"], "/provenance", sink);
    auto cells = read_cells(j.value("cells", json()), "/cells", sink);
    if (!sink.out.empty()) fail_at(sink);
    doc.assembly = Assembly(cells, theta);
    return doc;
}

void write_stage(const std::string& dir, const StageSet& s, const std::string& fp) {
    ojson o;
    o["format_version"] = kFormatVersion;
    o["kind"] = "stage";
    o["system_fingerprint"] = fp;
    o["stage"] = s.stage;
    o["partial"] = s.partial;
    o["members_total"] = s.members.size();
    ojson fresh = ojson::array();
    for (const auto& m : s.new_members()) {
        ojson e;
        e["id"] = m->id;
        e["theta"] = m->assembly.theta();
        e["provenance"] = write_provenance(m->provenance);
        e["cells"] = write_cells(m->assembly);
        fresh.push_back(e);
    }
    o["new"] = fresh;
    fs::create_directories(dir);
    char name[32];
    std::snprintf(name, sizeof name, "stage_%03d.json", s.stage);
    write_file((fs::path(dir) / name).string(), o.dump(1) + "\n");
}

std::vector<StageSet> read_trace(const std::string& dir) {
    std::vector<fs::path> files;
    static const std::regex name_re(R"(^stage_(\d+)\.json$)");
    if (!fs::is_directory(dir)) throw std::runtime_error("trace directory not found: " + dir);
    for (const auto& e : fs::directory_iterator(dir))
        if (std::regex_match(e.path().filename().string(), name_re)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<StageSet> out;
    std::vector<MemberRef> all;
    for (const auto& f : files) {
        std::string text = read_file(f.string());
        json j;
        try {
            j = parse_or_throw(text);
        } catch (const std::exception& e) {
            throw std::runtime_error(f.string() + ":" + e.what());
        }
        SpanIndex spans(text);
        Sink sink;
        sink.spans = &spans;
        StageSet s;
        s.stage = read_int(j, "stage", "", sink, 0);
        s.partial = j.value("partial", false);
        if (s.stage != static_cast<int>(out.size()))
            throw std::runtime_error(f.string() + ": expected stage " + std::to_string(out.size()));
        s.first_new = all.size();
        const auto& fresh = j.value("new", json::array());
        for (std::size_t k = 0; k < fresh.size(); ++k) {
            std::string p = "/new/" + std::to_string(k);
            auto m = std::make_shared<Member>();
            m->id = read_int(fresh[k], "id", p, sink, -1);
            m->stage = s.stage;
            m->provenance = read_provenance(fresh[k].value("provenance", json::object()), p + "/provenance", sink);
            auto cells = read_cells(fresh[k].value("cells", json()), p + "/cells", sink);
            if (!sink.out.empty()) throw std::runtime_error(f.string() + ":" + sink.out.front().str());
            m->assembly = Assembly(cells, read_int(fresh[k], "theta", p, sink, 0));
            if (m->id != static_cast<int>(all.size()))
                throw std::runtime_error(f.string() + ": member ids are not contiguous");
            all.push_back(std::move(m));
        }
        s.members = all;
        out.push_back(std::move(s));
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

} // namespace atas::io
