#ifndef FRONTDOOR_SVG_HPP
#define FRONTDOOR_SVG_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace frontdoor::svg {

struct Layer {
    enum class Kind { Points, Line, Band };
    Kind kind = Kind::Line;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_upper;  // bands only: fill between y and y_upper
    std::string color = "#000000";
    std::string label;  // shown in the legend when nonempty
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Layer> layers;
    /// A panel with no layers shows this text centered (scatter matrix diagonal).
    std::string caption;
};

/// Lays the panels out row by row, `columns` per row, each with its own axes
/// fitted to its data. Every layer becomes a <g class="points|line|band">
/// group; points are <circle> elements.
std::string render(const std::vector<Panel>& panels, std::size_t columns, double panel_width = 320,
                   double panel_height = 260);

/// Round tick positions covering [lo, hi], about `target` of them.
std::vector<double> nice_ticks(double lo, double hi, std::size_t target = 5);

std::string escape(const std::string& text);

}  // namespace frontdoor::svg

#endif
