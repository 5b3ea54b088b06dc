#pragma once

#include "atas/core.hpp"

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace atas {

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    // Row-major: by y, then x.
    friend std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }
};

inline Cell operator+(Cell a, Cell b) { return {a.x + b.x, a.y + b.y}; }
inline Cell operator-(Cell a, Cell b) { return {a.x - b.x, a.y - b.y}; }
inline Cell step(Cell c, Direction d) { return {c.x + dx(d), c.y + dy(d)}; }

using Configuration = std::map<Cell, ActiveTile>;

struct BindingGraph {
    struct Edge {
        int u = 0;  // index into vertices, u's side faces +x or +y
        int v = 0;
        int weight = 0;
        bool vertical = false;
    };
    std::vector<Cell> vertices;
    std::vector<Edge> edges;
};

// Strength of the bond between side d of a and the facing side of b.
int bond_weight(const ActiveTile& a, Direction d, const ActiveTile& b, const StrengthFunction& s);

BindingGraph binding_graph(const Configuration& c, const StrengthFunction& s);
bool is_connected(const BindingGraph& g);
// Global minimum edge cut (Stoer-Wagner). Zero for a disconnected graph; needs >= 2 vertices.
int min_cut(const BindingGraph& g);
bool is_theta_stable(const Configuration& c, const StrengthFunction& s, int theta);

struct AssemblyInstance {
    Configuration config;
    int theta = 0;
};

// Throws ConfigurationError when c is empty or not theta-stable.
AssemblyInstance make_instance(Configuration c, const StrengthFunction& s, int theta);

Configuration translate(const Configuration& c, Cell by);
// Translate so that min x = min y = 0.
Configuration normalized(const Configuration& c);
// Quarter turn ccw about the origin: (x,y) -> (-y,x), each tile rotated.
Configuration rotate_config(const Configuration& c);

// Row-major serialization of structural tile content. Equal keys iff translates (for normalized input).
std::string canonical_key(const Configuration& normalized);
// Same layout, tile names instead of content.
std::string identity_key(const Configuration& normalized);

// An active label on a side that faces an empty cell.
struct ExposedLabel {
    Cell cell;
    Direction dir;
    Label label;
};

// Normalized, immutable translation-class representative.
class Assembly {
public:
    Assembly() = default;
    explicit Assembly(const Configuration& c, int theta = 0);

    const Configuration& cells() const { return cells_; }
    const std::string& key() const { return key_; }
    const std::string& identity() const { return identity_; }
    const std::vector<ExposedLabel>& exposed() const { return exposed_; }
    int theta() const { return theta_; }
    std::size_t size() const { return cells_.size(); }
    int width() const { return width_; }
    int height() const { return height_; }

    friend bool operator==(const Assembly& a, const Assembly& b) { return a.key_ == b.key_; }

private:
    Configuration cells_;
    std::string key_;
    std::string identity_;
    std::vector<ExposedLabel> exposed_;
    int theta_ = 0;
    int width_ = 0;
    int height_ = 0;
};

Assembly normalize(const AssemblyInstance& inst);
bool translations_equal(const Configuration& a, const Configuration& b);

} // namespace atas
