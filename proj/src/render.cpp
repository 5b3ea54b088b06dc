#include "atas/io.hpp"

#include <sstream>

namespace atas::io {

std::string render_ascii(const Assembly& a) {
    std::size_t w = 1;
    for (const auto& [p, t] : a.cells()) w = std::max(w, t.id().size());
    std::string out;
    for (int y = a.height() - 1; y >= 0; --y) {
        std::string row;
        for (int x = 0; x < a.width(); ++x) {
            auto it = a.cells().find({x, y});
            std::string s = it == a.cells().end() ? "." : it->second.id();
            s.resize(w, ' ');
            if (x) row += ' ';
            row += s;
        }
        while (!row.empty() && row.back() == ' ') row.pop_back();
        out += row + "\n";
    }
    return out;
}

namespace {

constexpr int kCell = 120;
constexpr int kMargin = 10;
constexpr int kTickGap = 7;

struct Pt {
    double x, y;
};

// Screen coordinates for a tile at lattice cell (x, y); screen y grows downward.
struct Frame {
    double x0, y0;  // top-left corner
    Pt center() const { return {x0 + kCell / 2.0, y0 + kCell / 2.0}; }
    // Segment parallel to side d, inset by `inset` pixels, spanning the middle of the side.
    std::pair<Pt, Pt> tick(Direction d, double inset, double half) const {
        Pt c = center();
        double r = kCell / 2.0 - inset;
        switch (d) {
        case Direction::PosY: return {{c.x - half, c.y - r}, {c.x + half, c.y - r}};
        case Direction::NegY: return {{c.x - half, c.y + r}, {c.x + half, c.y + r}};
        case Direction::PosX: return {{c.x + r, c.y - half}, {c.x + r, c.y + half}};
        case Direction::NegX: return {{c.x - r, c.y - half}, {c.x - r, c.y + half}};
        }
        return {c, c};
    }
    Pt side_point(Direction d, double inset) const {
        auto [a, b] = tick(d, inset, 0);
        return a;
    }
};

std::string num(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

} // namespace

std::string render_svg(const Assembly& a, const StrengthFunction* strengths) {
    const int W = a.width() * kCell + 2 * kMargin;
    const int H = a.height() * kCell + 2 * kMargin;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    o << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
         "markerHeight=\"6\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\"/></marker></defs>\n";
    o << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    for (const auto& [p, t] : a.cells()) {
        Frame f{static_cast<double>(kMargin + p.x * kCell),
                static_cast<double>(kMargin + (a.height() - 1 - p.y) * kCell)};
        o << "<g class=\"tile\" data-cell=\"" << p.x << ',' << p.y << "\">\n";
        o << "<rect x=\"" << f.x0 << "\" y=\"" << f.y0 << "\" width=\"" << kCell << "\" height=\"" << kCell
          << "\" fill=\"#f4f4f0\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
        Pt c = f.center();
        o << "<text x=\"" << c.x << "\" y=\"" << c.y + 4 << "\" font-size=\"12\" text-anchor=\"middle\">"
          << escape(t.id()) << "</text>\n";

        for (auto d : kDirections) {
            const auto& side = t.side(d);
            int k = 0;
            auto draw = [&](const Label& l, bool active) {
                int s = 1;
                if (strengths && strengths->contains(l.base)) s = (*strengths)(l);
                auto [u, v] = f.tick(d, 3 + k * kTickGap, kCell / 4.0);
                o << "<line class=\"" << (active ? "active" : "inactive") << "\" data-label=\"" << escape(l.str())
                  << "\" x1=\"" << num(u.x) << "\" y1=\"" << num(u.y) << "\" x2=\"" << num(v.x) << "\" y2=\""
                  << num(v.y) << "\" stroke=\"black\" stroke-width=\"" << (s >= 2 ? 4 : 2) << '"';
                if (!active) o << " stroke-dasharray=\"5 3\"";
                o << "/>\n";
                Pt at = f.side_point(d, 3 + k * kTickGap);
                double tx = at.x + (d == Direction::PosY || d == Direction::NegY ? kCell / 4.0 + 3 : 0);
                double ty = at.y + (d == Direction::PosX || d == Direction::NegX ? -kCell / 4.0 - 3 : 4);
                o << "<text x=\"" << num(tx) << "\" y=\"" << num(ty) << "\" font-size=\"9\">" << escape(l.str())
                  << "</text>\n";
                ++k;
            };
            for (const auto& l : side.active) draw(l, true);
            for (const auto& l : side.inactive) draw(l, false);
        }

        auto arrow = [&](const Signal& s, const char* cls, const char* color) {
            Pt to = f.side_point(s.target, 28);
            Pt from = s.source ? f.side_point(*s.source, 28) : Pt{c.x, c.y - 12};
            o << "<line class=\"" << cls << "\" data-signal=\"" << escape(s.str()) << "\" x1=\"" << num(from.x)
              << "\" y1=\"" << num(from.y) << "\" x2=\"" << num(to.x) << "\" y2=\"" << num(to.y)
              << "\" stroke=\"" << color << "\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\"/>\n";
            if (!s.source)
                o << "<circle cx=\"" << num(from.x) << "\" cy=\"" << num(from.y) << "\" r=\"3\" fill=\"" << color
                  << "\"/>\n";
        };
        for (const auto& s : t.activation) arrow(s, "activation", "#1f5fbf");
        for (const auto& s : t.transmission) arrow(s, "transmission", "#c05a00");
        o << "</g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace atas::io
