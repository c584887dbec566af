#pragma once

// Minimal SVG line plots: axes with ticks, polylines, markers and arrows.

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace flocsim::svg {

struct Style {
    std::string color = "#1f77b4";
    double width = 1.5;
    bool dashed = false;
};

class Plot {
public:
    Plot(std::string title, std::string x_label, std::string y_label, double width = 640,
         double height = 480);

    /// Fixes the data window; otherwise it is fitted to everything added.
    void set_range(double x0, double x1, double y0, double y1);

    void add_line(const std::vector<std::array<double, 2>>& points, const Style& style,
                  std::string legend = {});
    /// Filled or hollow circle.
    void add_marker(double x, double y, bool filled, const std::string& color, std::string label = {});
    void add_arrow(double x, double y, double dx, double dy, const std::string& color);

    std::string render() const;

private:
    struct Line {
        std::vector<std::array<double, 2>> points;
        Style style;
        std::string legend;
    };
    struct Marker {
        double x, y;
        bool filled;
        std::string color, label;
    };
    struct Arrow {
        double x, y, dx, dy;
        std::string color;
    };

    std::array<double, 4> window() const;

    std::string title_, x_label_, y_label_;
    double width_, height_;
    std::optional<std::array<double, 4>> range_;
    std::vector<Line> lines_;
    std::vector<Marker> markers_;
    std::vector<Arrow> arrows_;
};

} // namespace flocsim::svg
