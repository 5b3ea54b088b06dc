#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace atas {

// Side directions, in the order sides are stored and serialized.
enum class Direction : std::uint8_t { PosY = 0, PosX = 1, NegY = 2, NegX = 3 };

inline constexpr std::array<Direction, 4> kDirections{Direction::PosY, Direction::PosX,
                                                      Direction::NegY, Direction::NegX};

constexpr int index(Direction d) { return static_cast<int>(d); }
constexpr Direction opposite(Direction d) { return static_cast<Direction>(index(d) ^ 2); }
// Quarter turn counter-clockwise: +x -> +y -> -x -> -y -> +x.
constexpr Direction rotate_ccw(Direction d) { return static_cast<Direction>((index(d) + 3) % 4); }
constexpr int dx(Direction d) { return d == Direction::PosX ? 1 : d == Direction::NegX ? -1 : 0; }
constexpr int dy(Direction d) { return d == Direction::PosY ? 1 : d == Direction::NegY ? -1 : 0; }

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

struct Label {
    std::string base;
    bool negative = false;

    std::string str() const { return negative ? "-" + base : base; }
    Label negated() const { return Label{base, !negative}; }
    // Accepts "55" or "-55".
    static std::optional<Label> parse(std::string_view s);

    friend bool operator==(const Label&, const Label&) = default;
    // Lexicographic on the signed spelling.
    friend std::strong_ordering operator<=>(const Label& a, const Label& b);
};

inline Label negate(const Label& l) { return l.negated(); }

// A signal c_i^j. No source means the initiation token 0.
struct Signal {
    std::string base;
    std::optional<Direction> source;
    Direction target = Direction::PosY;

    bool is_initiation() const { return !source.has_value(); }
    // LABEL(SRC->DST), e.g. "55(0->-x)".
    std::string str() const;
    static std::optional<Signal> parse(std::string_view s);

    friend bool operator==(const Signal&, const Signal&) = default;
    friend auto operator<=>(const Signal&, const Signal&) = default;
};

// Sorted vector set. Small and cheap to copy and compare.
template <class T>
class FlatSet {
public:
    FlatSet() = default;
    FlatSet(std::initializer_list<T> xs) {
        for (const auto& x : xs) insert(x);
    }

    bool insert(T x) {
        auto it = std::lower_bound(v_.begin(), v_.end(), x);
        if (it != v_.end() && *it == x) return false;
        v_.insert(it, std::move(x));
        return true;
    }
    bool erase(const T& x) {
        auto it = std::lower_bound(v_.begin(), v_.end(), x);
        if (it == v_.end() || !(*it == x)) return false;
        v_.erase(it);
        return true;
    }
    bool contains(const T& x) const { return std::binary_search(v_.begin(), v_.end(), x); }

    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }

    friend bool operator==(const FlatSet&, const FlatSet&) = default;
    friend auto operator<=>(const FlatSet&, const FlatSet&) = default;

private:
    std::vector<T> v_;
};

using LabelSet = FlatSet<Label>;
using SignalSet = FlatSet<Signal>;

struct TileSide {
    LabelSet active;
    LabelSet inactive;

    friend bool operator==(const TileSide&, const TileSide&) = default;
    friend auto operator<=>(const TileSide&, const TileSide&) = default;
};

enum class Orientation : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };
char to_char(Orientation o);
std::optional<Orientation> parse_orientation(char c);

struct ActiveTile {
    std::string name;
    Orientation tag = Orientation::N;
    std::array<TileSide, 4> sides;
    SignalSet activation;
    SignalSet transmission;

    TileSide& side(Direction d) { return sides[index(d)]; }
    const TileSide& side(Direction d) const { return sides[index(d)]; }
    // Name plus rotation tag, e.g. "G3_E". Metadata only.
    std::string id() const;

    // Structural: names are ignored.
    bool same_state(const ActiveTile& o) const {
        return sides == o.sides && activation == o.activation && transmission == o.transmission;
    }
    friend bool operator==(const ActiveTile& a, const ActiveTile& b) { return a.same_state(b); }
};

// Deterministic text of the tile content, used inside canonical keys.
std::string state_key(const ActiveTile& t);

class StrengthFunction {
public:
    StrengthFunction() = default;
    explicit StrengthFunction(std::map<std::string, int> table) : table_(std::move(table)) {}

    void set(const std::string& base, int s) { table_[base] = s; }
    bool contains(const std::string& base) const { return table_.count(base) != 0; }
    // Throws ConfigurationError for an unregistered base.
    int operator()(const std::string& base) const;
    int operator()(const Label& l) const { return (*this)(l.base); }
    const std::map<std::string, int>& table() const { return table_; }

    friend bool operator==(const StrengthFunction&, const StrengthFunction&) = default;

private:
    std::map<std::string, int> table_;
};

struct Violation {
    std::string clause;  // "1a", "1b", "2" or "alphabet"
    std::string detail;
};

// Empty result means a legal active tile. With an alphabet, unregistered bases are reported too.
std::vector<Violation> validate_active_tile(const ActiveTile& t,
                                            const StrengthFunction* alphabet = nullptr);

ActiveTile rotate_ccw(const ActiveTile& t);
// {t, r(t), r^2(t), r^3(t)} with structural duplicates dropped.
std::vector<ActiveTile> rotation_class(const ActiveTile& t);

} // namespace atas
