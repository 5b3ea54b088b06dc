#include "atas/core.hpp"
#include "atas/errors.hpp"

namespace atas {

std::string_view to_string(Direction d) {
    switch (d) {
    case Direction::PosY: return "+y";
    case Direction::PosX: return "+x";
    case Direction::NegY: return "-y";
    case Direction::NegX: return "-x";
    }
    return "?";
}

std::optional<Direction> parse_direction(std::string_view s) {
    for (auto d : kDirections)
        if (s == to_string(d)) return d;
    return std::nullopt;
}

std::optional<Label> Label::parse(std::string_view s) {
    bool neg = false;
    if (!s.empty() && s.front() == '-') {
        neg = true;
        s.remove_prefix(1);
    }
    if (s.empty()) return std::nullopt;
    for (char c : s)
        if (c == '-' || c == '(' || c == ')' || c == ' ' || c == ',') return std::nullopt;
    return Label{std::string(s), neg};
}

std::strong_ordering operator<=>(const Label& a, const Label& b) {
    if (a.negative == b.negative) return a.base <=> b.base;
    if (a.base.empty() || b.base.empty()) return a.str() <=> b.str();
    // compare "-x" against "y" without allocating
    std::string_view sa = a.base, sb = b.base;
    const char ha = a.negative ? '-' : sa.front();
    const char hb = b.negative ? '-' : sb.front();
    if (ha != hb) return ha <=> hb;
    if (a.negative) sb.remove_prefix(1);
    else sa.remove_prefix(1);
    return sa <=> sb;
}

std::string Signal::str() const {
    std::string out = base;
    out += '(';
    out += source ? std::string(to_string(*source)) : std::string("0");
    out += "->";
    out += to_string(target);
    out += ')';
    return out;
}

std::optional<Signal> Signal::parse(std::string_view s) {
    auto open = s.find('(');
    auto arrow = s.find("->");
    if (open == std::string_view::npos || arrow == std::string_view::npos || s.back() != ')' ||
        arrow < open)
        return std::nullopt;
    auto base = s.substr(0, open);
    auto src = s.substr(open + 1, arrow - open - 1);
    auto dst = s.substr(arrow + 2, s.size() - arrow - 3);
    auto lab = Label::parse(base);
    if (!lab || lab->negative) return std::nullopt;
    Signal out;
    out.base = lab->base;
    if (src != "0") {
        auto d = parse_direction(src);
        if (!d) return std::nullopt;
        out.source = d;
    }
    auto t = parse_direction(dst);
    if (!t) return std::nullopt;
    out.target = *t;
    return out;
}

char to_char(Orientation o) { return "NESW"[static_cast<int>(o)]; }

std::optional<Orientation> parse_orientation(char c) {
    switch (c) {
    case 'N': return Orientation::N;
    case 'E': return Orientation::E;
    case 'S': return Orientation::S;
    case 'W': return Orientation::W;
    default: return std::nullopt;
    }
}

std::string ActiveTile::id() const { return name + "_" + to_char(tag); }

namespace {

void append_labels(std::string& out, const LabelSet& s) {
    bool first = true;
    for (const auto& l : s) {
        if (!first) out += ',';
        first = false;
        out += l.str();
    }
}

void append_signals(std::string& out, const SignalSet& s) {
    bool first = true;
    for (const auto& x : s) {
        if (!first) out += ',';
        first = false;
        out += x.str();
    }
}

} // namespace

std::string state_key(const ActiveTile& t) {
    std::string out;
    out.reserve(96);
    for (const auto& side : t.sides) {
        out += '[';
        append_labels(out, side.active);
        out += '/';
        append_labels(out, side.inactive);
        out += ']';
    }
    out += "A{";
    append_signals(out, t.activation);
    out += "}S{";
    append_signals(out, t.transmission);
    out += '}';
    return out;
}

int StrengthFunction::operator()(const std::string& base) const {
    auto it = table_.find(base);
    if (it == table_.end()) throw ConfigurationError("unregistered label base '" + base + "'");
    return it->second;
}

std::vector<Violation> validate_active_tile(const ActiveTile& t, const StrengthFunction* alphabet) {
    std::vector<Violation> out;
    for (auto d : kDirections) {
        const auto& side = t.side(d);
        const std::string where = t.id() + " side " + std::string(to_string(d));
        for (const auto& c : side.active) {
            if (side.active.contains(c.negated()))
                out.push_back({"1a", where + ": active " + c.str() + " with active complement"});
            if (side.inactive.contains(c))
                out.push_back({"1a", where + ": " + c.str() + " both active and inactive"});
            if (side.inactive.contains(c.negated()))
                out.push_back({"1a", where + ": active " + c.str() + " with inactive complement"});
        }
        for (const auto& c : side.inactive) {
            // report each complementary pair once
            if (!c.negative && side.inactive.contains(c.negated()))
                out.push_back({"1b", where + ": inactive " + c.str() + " with inactive complement"});
        }
        if (alphabet) {
            for (const auto* set : {&side.active, &side.inactive})
                for (const auto& c : *set)
                    if (!alphabet->contains(c.base))
                        out.push_back({"alphabet", where + ": unknown label " + c.str()});
        }
    }
    for (const auto& s : t.activation)
        if (s.is_initiation())
            out.push_back({"2", t.id() + ": activation signal " + s.str() + " is an initiation"});
    if (alphabet) {
        for (const auto* set : {&t.activation, &t.transmission})
            for (const auto& s : *set)
                if (!alphabet->contains(s.base))
                    out.push_back({"alphabet", t.id() + ": signal " + s.str() + " has unknown label"});
    }
    return out;
}

namespace {

Signal rotate_signal(const Signal& s) {
    Signal r = s;
    if (r.source) r.source = rotate_ccw(*r.source);  // 0 has no direction and stays put
    r.target = rotate_ccw(r.target);
    return r;
}

} // namespace

ActiveTile rotate_ccw(const ActiveTile& t) {
    ActiveTile r;
    r.name = t.name;
    r.tag = static_cast<Orientation>((static_cast<int>(t.tag) + 1) % 4);
    for (auto d : kDirections) r.side(rotate_ccw(d)) = t.side(d);
    for (const auto& s : t.activation) r.activation.insert(rotate_signal(s));
    for (const auto& s : t.transmission) r.transmission.insert(rotate_signal(s));
    return r;
}

std::vector<ActiveTile> rotation_class(const ActiveTile& t) {
    std::vector<ActiveTile> out;
    ActiveTile cur = t;
    for (int k = 0; k < 4; ++k) {
        bool dup = std::any_of(out.begin(), out.end(),
                               [&](const ActiveTile& x) { return x.same_state(cur); });
        if (!dup) out.push_back(cur);
        cur = rotate_ccw(cur);
    }
    return out;
}

} // namespace atas
