#include "frontdoor/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace frontdoor::svg {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v, double step) {
    char buf[32];
    int digits = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
    std::snprintf(buf, sizeof buf, "%.*f", digits, std::abs(v) < step * 1e-9 ? 0.0 : v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
        double p = 0.04 * (hi - lo);
        lo -= p;
        hi += p;
    }
};

constexpr double kLeft = 52, kRight = 12, kTop = 28, kBottom = 42;

void draw_panel(std::string& out, const Panel& panel, double ox, double oy, double w, double h) {
    out += "<g class=\"panel\" transform=\"translate(" + num(ox) + "," + num(oy) + ")\">\n";
    if (!panel.title.empty())
        out += "<text x=\"" + num(w / 2) + "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">" +
               escape(panel.title) + "</text>\n";
    if (panel.layers.empty()) {
        out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(w - kLeft - kRight) +
               "\" height=\"" + num(h - kTop - kBottom) + "\" fill=\"none\" stroke=\"#888\"/>\n";
        out += "<text x=\"" + num(w / 2 + (kLeft - kRight) / 2) + "\" y=\"" + num(h / 2) +
               "\" text-anchor=\"middle\" font-size=\"18\">" + escape(panel.caption) + "</text>\n</g>\n";
        return;
    }

    Range rx, ry;
    for (const auto& l : panel.layers) {
        for (double v : l.x) rx.add(v);
        for (double v : l.y) ry.add(v);
        for (double v : l.y_upper) ry.add(v);
    }
    rx.pad();
    ry.pad();
    const double pw = w - kLeft - kRight, ph = h - kTop - kBottom;
    auto sx = [&](double v) { return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto sy = [&](double v) { return kTop + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    auto xt = nice_ticks(rx.lo, rx.hi), yt = nice_ticks(ry.lo, ry.hi);
    double xs = xt.size() > 1 ? xt[1] - xt[0] : 1.0, ys = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
    for (double t : xt) {
        out += "<line x1=\"" + num(sx(t)) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(sx(t)) + "\" y2=\"" +
               num(kTop + ph + 4) + "\" stroke=\"#444\"/>";
        out += "<text x=\"" + num(sx(t)) + "\" y=\"" + num(kTop + ph + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + tick_label(t, xs) + "</text>\n";
    }
    for (double t : yt) {
        out += "<line x1=\"" + num(kLeft - 4) + "\" y1=\"" + num(sy(t)) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
               num(sy(t)) + "\" stroke=\"#444\"/>";
        out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(sy(t) + 3) +
               "\" text-anchor=\"end\" font-size=\"10\">" + tick_label(t, ys) + "</text>\n";
    }
    if (!panel.x_label.empty())
        out += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(h - 6) +
               "\" text-anchor=\"middle\" font-size=\"12\">" + escape(panel.x_label) + "</text>\n";
    if (!panel.y_label.empty())
        out += "<text transform=\"translate(12," + num(kTop + ph / 2) +
               ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(panel.y_label) + "</text>\n";

    std::size_t legend_row = 0;
    for (const auto& l : panel.layers) {
        const std::size_t n = std::min(l.x.size(), l.y.size());
        switch (l.kind) {
        case Layer::Kind::Points:
            out += "<g class=\"points\" fill=\"" + l.color + "\" fill-opacity=\"0.5\">\n";
            for (std::size_t i = 0; i < n; ++i)
                out += "<circle cx=\"" + num(sx(l.x[i])) + "\" cy=\"" + num(sy(l.y[i])) + "\" r=\"1.6\"/>\n";
            out += "</g>\n";
            break;
        case Layer::Kind::Line: {
            out += "<g class=\"line\"><polyline fill=\"none\" stroke=\"" + l.color + "\" stroke-width=\"1.8\"";
            if (l.dashed) out += " stroke-dasharray=\"6,4\"";
            out += " points=\"";
            for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + num(sx(l.x[i])) + "," + num(sy(l.y[i]));
            out += "\"/></g>\n";
            break;
        }
        case Layer::Kind::Band: {
            out += "<g class=\"band\"><polygon fill=\"" + l.color + "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + num(sx(l.x[i])) + "," + num(sy(l.y[i]));
            for (std::size_t i = n; i-- > 0;) out += " " + num(sx(l.x[i])) + "," + num(sy(l.y_upper[i]));
            out += "\"/></g>\n";
            break;
        }
        }
        if (!l.label.empty()) {
            double ly = kTop + 12 + 14 * static_cast<double>(legend_row++);
            double lx = kLeft + pw - 150;
            out += "<g class=\"legend\"><line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 18) +
                   "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + l.color + "\" stroke-width=\"" +
                   (l.kind == Layer::Kind::Band ? "8\" stroke-opacity=\"0.3" : "2") + "\"" +
                   (l.dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>";
            out += "<text x=\"" + num(lx + 24) + "\" y=\"" + num(ly) + "\" font-size=\"10\">" + escape(l.label) +
                   "</text></g>\n";
        }
    }
    out += "</g>\n";
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, std::size_t target) {
    if (!(hi > lo) || target == 0) return {lo};
    double raw = (hi - lo) / static_cast<double>(target);
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (f * mag >= raw) {
            step = f * mag;
            break;
        }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) ticks.push_back(t);
    return ticks;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
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

std::string render(const std::vector<Panel>& panels, std::size_t columns, double panel_width, double panel_height) {
    columns = std::max<std::size_t>(1, columns);
    const std::size_t rows = (panels.size() + columns - 1) / columns;
    const double width = panel_width * static_cast<double>(std::min(columns, panels.size()));
    const double height = panel_height * static_cast<double>(rows);
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
           "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t k = 0; k < panels.size(); ++k)
        draw_panel(out, panels[k], panel_width * static_cast<double>(k % columns),
                   panel_height * static_cast<double>(k / columns), panel_width, panel_height);
    out += "</svg>\n";
    return out;
}

}  // namespace frontdoor::svg
