#pragma once

#include "atas/assembler.hpp"
#include "atas/tiletype.hpp"

#include <optional>
#include <string>
#include <vector>

namespace atas::io {

inline constexpr int kFormatVersion = 1;

struct Diagnostic {
    int line = 0;  // 1-based, 0 when unknown
    int column = 0;
    std::string path;  // JSON pointer of the offending value
    std::string message;
    std::string str() const;
};

struct TileSetDocument {
    StrengthFunction alphabet;
    int theta = 0;
    bool rotation_closure = true;
    std::vector<ActiveTile> tiles;  // as listed
    std::vector<TileTypeSpec> tiletypes;

    // Seed per the rotation_closure flag.
    TileSystem system() const;
};

struct ParseResult {
    std::optional<TileSetDocument> doc;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return doc.has_value() && diagnostics.empty(); }
};

ParseResult parse_tileset(const std::string& text);
std::string serialize_tileset(const TileSetDocument& doc);
// FNV-1a of the canonical serialization, as 16 hex digits.
std::string fingerprint(const TileSetDocument& doc);

TileSetDocument builtin_lshape_document();

struct AssemblyDocument {
    Assembly assembly;
    int stage = 0;
    int id = -1;
    Provenance provenance;
    std::string system_fingerprint;
};

std::string serialize_assembly(const AssemblyDocument& doc);
// Throws std::runtime_error with a line:column prefix on malformed input.
AssemblyDocument parse_assembly(const std::string& text);

// Trace directories hold stage_NNN.json, each listing the members new at that stage.
void write_stage(const std::string& dir, const StageSet& s, const std::string& fingerprint);
std::vector<StageSet> read_trace(const std::string& dir);

std::string render_ascii(const Assembly& a);
// Strengths only affect stroke weight; without them every label is drawn single weight.
std::string render_svg(const Assembly& a, const StrengthFunction* strengths = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace atas::io
