#include "flocsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "flocsim/format.hpp"

namespace flocsim::svg {

namespace {

constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    // Two decimals are plenty for pixel coordinates.
    return format_double(std::round(v * 100.0) / 100.0);
}

// Roughly five round-number ticks covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    return out;
}

std::string tick_label(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

} // namespace

Plot::Plot(std::string title, std::string x_label, std::string y_label, double width,
           double height)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)),
      width_(width), height_(height) {}

void Plot::set_range(double x0, double x1, double y0, double y1) { range_ = {x0, x1, y0, y1}; }

void Plot::add_line(const std::vector<std::array<double, 2>>& points, const Style& style,
                    std::string legend) {
    lines_.push_back({points, style, std::move(legend)});
}

void Plot::add_marker(double x, double y, bool filled, const std::string& color,
                      std::string label) {
    markers_.push_back({x, y, filled, color, std::move(label)});
}

void Plot::add_arrow(double x, double y, double dx, double dy, const std::string& color) {
    arrows_.push_back({x, y, dx, dy, color});
}

std::array<double, 4> Plot::window() const {
    if (range_) return *range_;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto grow = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    };
    for (const auto& l : lines_)
        for (const auto& p : l.points) grow(p[0], p[1]);
    for (const auto& m : markers_) grow(m.x, m.y);
    if (!(x0 < x1)) x0 -= 0.5, x1 = x0 + 1.0;
    if (!(y0 < y1)) y0 -= 0.5, y1 = y0 + 1.0;
    const double py = 0.05 * (y1 - y0);
    return {x0, x1, y0 - py, y1 + py};
}

std::string Plot::render() const {
    const auto [x0, x1, y0, y1] = window();
    const double pw = width_ - kLeft - kRight, ph = height_ - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\""
      << num(height_) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<defs><clipPath id=\"plot\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop)
      << "\" width=\"" << num(pw) << "\" height=\"" << num(ph) << "\"/></clipPath></defs>\n";
    s << "<text x=\"" << num(width_ / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title_) << "</text>\n";
    s << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : ticks(x0, x1)) {
        s << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\""
          << num(px(t)) << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>";
        s << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + ph + 18)
          << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    for (double t : ticks(y0, y1)) {
        s << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\""
          << num(kLeft) << "\" y2=\"" << num(py(t)) << "\" stroke=\"black\"/>";
        s << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(t) + 4)
          << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
    }
    s << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(height_ - 12)
      << "\" text-anchor=\"middle\">" << escape(x_label_) << "</text>\n";
    s << "<text transform=\"translate(16," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label_) << "</text>\n";

    s << "<g clip-path=\"url(#plot)\">\n";
    for (const auto& l : lines_) {
        s << "<polyline fill=\"none\" stroke=\"" << l.style.color << "\" stroke-width=\""
          << num(l.style.width) << "\"";
        if (l.style.dashed) s << " stroke-dasharray=\"6,4\"";
        s << " points=\"";
        for (const auto& p : l.points)
            if (std::isfinite(p[0]) && std::isfinite(p[1]))
                s << num(px(p[0])) << ',' << num(py(p[1])) << ' ';
        s << "\"/>\n";
    }
    for (const auto& a : arrows_) {
        const double ax = px(a.x), ay = py(a.y);
        const double bx = px(a.x + a.dx), by = py(a.y + a.dy);
        const double ang = std::atan2(by - ay, bx - ax);
        s << "<line x1=\"" << num(ax) << "\" y1=\"" << num(ay) << "\" x2=\"" << num(bx)
          << "\" y2=\"" << num(by) << "\" stroke=\"" << a.color << "\"/>";
        s << "<polygon fill=\"" << a.color << "\" points=\"" << num(bx) << ',' << num(by) << ' '
          << num(bx - 5 * std::cos(ang - 0.4)) << ',' << num(by - 5 * std::sin(ang - 0.4)) << ' '
          << num(bx - 5 * std::cos(ang + 0.4)) << ',' << num(by - 5 * std::sin(ang + 0.4))
          << "\"/>\n";
    }
    s << "</g>\n";
    for (const auto& m : markers_) {
        s << "<circle cx=\"" << num(px(m.x)) << "\" cy=\"" << num(py(m.y)) << "\" r=\"5\" stroke=\""
          << m.color << "\" stroke-width=\"1.5\" fill=\"" << (m.filled ? m.color : "white")
          << "\"/>";
        if (!m.label.empty())
            s << "<text x=\"" << num(px(m.x) + 8) << "\" y=\"" << num(py(m.y) - 8) << "\">"
              << escape(m.label) << "</text>";
        s << '\n';
    }

    double ly = kTop + 16;
    for (const auto& l : lines_) {
        if (l.legend.empty()) continue;
        const double lx = kLeft + pw - 150;
        s << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 24)
          << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << l.style.color << "\" stroke-width=\""
          << num(l.style.width) << "\"" << (l.style.dashed ? " stroke-dasharray=\"6,4\"" : "")
          << "/><text x=\"" << num(lx + 30) << "\" y=\"" << num(ly) << "\">" << escape(l.legend)
          << "</text>\n";
        ly += 16;
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace flocsim::svg
