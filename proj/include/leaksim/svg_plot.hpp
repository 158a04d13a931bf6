#pragma once

// Two-panel static trace plot:
//   (a) mapped ancilla readouts (ZZ solid, XX dashed) as step plots;
//   (b) data-register leakage probability and prediction overlap.

#include "leaksim/protocol.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace leaksim {

namespace detail {

inline std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Panel {
    double left, top, width, height;
    double x0, x1; // data range on x
    double y0, y1; // data range on y

    double sx(double x) const { return left + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.5) * width; }
    double sy(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

inline std::string step_path(const Panel& p, const std::vector<double>& xs, const std::vector<double>& ys) {
    std::ostringstream d;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = p.sx(xs[i] - 0.5), y = p.sy(ys[i]);
        d << (i == 0 ? "M" : "H") << fmt2(x);
        if (i == 0) d << "," << fmt2(y);
        else d << "V" << fmt2(y);
        d << "H" << fmt2(p.sx(xs[i] + 0.5));
    }
    return d.str();
}

inline std::string line_path(const Panel& p, const std::vector<double>& xs, const std::vector<double>& ys) {
    std::ostringstream d;
    for (std::size_t i = 0; i < xs.size(); ++i)
        d << (i == 0 ? "M" : "L") << fmt2(p.sx(xs[i])) << "," << fmt2(p.sy(ys[i]));
    return d.str();
}

inline void axes(std::ostringstream& svg, const Panel& p, const std::string& label, const std::string& ylabel,
                 double ytick_lo, double ytick_hi) {
    svg << "<rect x=\"" << fmt2(p.left) << "\" y=\"" << fmt2(p.top) << "\" width=\"" << fmt2(p.width)
        << "\" height=\"" << fmt2(p.height) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << fmt2(p.left - 40) << "\" y=\"" << fmt2(p.top + 12) << "\" font-size=\"14\">" << label
        << "</text>\n";
    svg << "<text x=\"" << fmt2(p.left - 8) << "\" y=\"" << fmt2(p.sy(ytick_lo) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << ytick_lo << "</text>\n";
    svg << "<text x=\"" << fmt2(p.left - 8) << "\" y=\"" << fmt2(p.sy(ytick_hi) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << ytick_hi << "</text>\n";
    svg << "<text x=\"" << fmt2(p.left + p.width / 2) << "\" y=\"" << fmt2(p.top - 6)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << ylabel << "</text>\n";
}

} // namespace detail

inline std::string render_svg(const std::vector<CycleRecord>& records, const std::string& title = "") {
    using detail::fmt2;
    constexpr double W = 900, H = 560;
    double first = records.empty() ? 1.0 : double(records.front().cycle);
    double last = records.empty() ? 1.0 : double(records.back().cycle);
    const detail::Panel a{70, 60, 800, 170, first - 0.5, last + 0.5, -0.25, 1.25};
    const detail::Panel b{70, 310, 800, 190, first - 0.5, last + 0.5, -0.05, 1.05};

    std::vector<double> xs, zz, xx, leak, ovl;
    for (const auto& r : records) {
        xs.push_back(double(r.cycle));
        zz.push_back(r.bit_zz);
        xx.push_back(r.bit_xx);
        leak.push_back(r.p_leak);
        ovl.push_back(r.prediction_overlap);
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
        << W << " " << H << "\" font-family=\"sans-serif\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        svg << "<text x=\"" << W / 2 << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" << title << "</text>\n";

    detail::axes(svg, a, "(a)", "ancilla readout (ZZ solid, XX dashed)", 0, 1);
    detail::axes(svg, b, "(b)", "P(data leaked) black, prediction overlap green", 0, 1);

    if (!records.empty()) {
        svg << "<path d=\"" << detail::step_path(a, xs, zz) << "\" fill=\"none\" stroke=\"#1f4fbf\" stroke-width=\"1.5\"/>\n";
        svg << "<path d=\"" << detail::step_path(a, xs, xx)
            << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"/>\n";
        svg << "<path d=\"" << detail::line_path(b, xs, ovl) << "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2\"/>\n";
        svg << "<path d=\"" << detail::line_path(b, xs, leak) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    }

    for (const auto* p : {&a, &b}) {
        svg << "<text x=\"" << fmt2(p->sx(first)) << "\" y=\"" << fmt2(p->top + p->height + 16)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << first << "</text>\n";
        svg << "<text x=\"" << fmt2(p->sx(last)) << "\" y=\"" << fmt2(p->top + p->height + 16)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << last << "</text>\n";
    }
    svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 20 << "\" font-size=\"12\" text-anchor=\"middle\">cycle</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace leaksim
