// SPDX-License-Identifier: Apache-2.0
//
// gridless: gridless channel estimation for hybrid MIMO receivers with low-resolution ADCs
// Copyright (C) 2026 The gridless authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "gridless/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace gridless
{
namespace
{
constexpr double kPanelW = 360.0, kPanelH = 300.0;
constexpr double kLeft = 60.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;
constexpr int kPanelsPerRow = 3;

const char *colour(EstimatorKind kind)
{
    switch (kind)
    {
    case EstimatorKind::nfcfgs_cv:
        return "#d62728";
    case EstimatorKind::ongrid_fcfgs_cv:
        return "#1f77b4";
    case EstimatorKind::oracle_stop:
        return "#2ca02c";
    }
    return "#000000";
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string exact(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_db(double v)
{
    return 10.0 * std::log10(std::max(v, 1e-300));
}

} // namespace

std::string render_plot_svg(const ResultTable &table)
{
    const std::vector<CurvePoint> points = summarize(table);
    if (points.empty())
        throw InputError("emit_plot: result table has no successful trials");

    std::set<int> bits;
    std::set<int> kinds;
    double xmin = points.front().snr_db, xmax = xmin;
    double ymin = to_db(points.front().mean_nmse), ymax = ymin;
    for (const CurvePoint &p : points)
    {
        bits.insert(p.bits);
        kinds.insert(static_cast<int>(p.estimator));
        xmin = std::min(xmin, p.snr_db);
        xmax = std::max(xmax, p.snr_db);
        ymin = std::min(ymin, to_db(p.mean_nmse));
        ymax = std::max(ymax, to_db(p.mean_nmse));
    }
    if (xmax - xmin < 1e-9)
    {
        xmin -= 1.0;
        xmax += 1.0;
    }
    ymin = 5.0 * std::floor(ymin / 5.0 - 0.2);
    ymax = 5.0 * std::ceil(ymax / 5.0 + 0.2);

    const int n_panels = static_cast<int>(bits.size());
    const int cols = std::min(n_panels, kPanelsPerRow);
    const int rows = (n_panels + kPanelsPerRow - 1) / kPanelsPerRow;
    const double width = cols * kPanelW, height = rows * kPanelH + 30.0;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height) << "\" fill=\"white\"/>\n";

    int panel = 0;
    for (int b : bits)
    {
        const double ox = (panel % kPanelsPerRow) * kPanelW, oy = (panel / kPanelsPerRow) * kPanelH;
        const double pw = kPanelW - kLeft - kRight, ph = kPanelH - kTop - kBottom;
        auto px = [&](double x) { return ox + kLeft + (x - xmin) / (xmax - xmin) * pw; };
        auto py = [&](double y) { return oy + kTop + (ymax - y) / (ymax - ymin) * ph; };

        svg << "<g class=\"subplot\" data-bits=\"" << b << "\">\n";
        svg << "<rect x=\"" << num(ox + kLeft) << "\" y=\"" << num(oy + kTop) << "\" width=\"" << num(pw)
            << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
        const std::string title = b >= 12 ? "B = " + std::to_string(b) + " (unquantized reference)"
                                          : "B = " + std::to_string(b);
        svg << "<text x=\"" << num(ox + kLeft + pw / 2) << "\" y=\"" << num(oy + kTop - 12)
            << "\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
        for (double y = ymin; y <= ymax + 1e-9; y += 5.0)
        {
            svg << "<line x1=\"" << num(ox + kLeft) << "\" x2=\"" << num(ox + kLeft + pw) << "\" y1=\"" << num(py(y))
                << "\" y2=\"" << num(py(y)) << "\" stroke=\"#dddddd\"/>\n";
            svg << "<text x=\"" << num(ox + kLeft - 6) << "\" y=\"" << num(py(y) + 4)
                << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
        }
        std::set<double> xs;
        for (const CurvePoint &p : points)
            xs.insert(p.snr_db);
        for (double x : xs)
            svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(oy + kTop + ph + 16)
                << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
        svg << "<text x=\"" << num(ox + kLeft + pw / 2) << "\" y=\"" << num(oy + kTop + ph + 34)
            << "\" text-anchor=\"middle\">SNR (dB)</text>\n";
        svg << "<text transform=\"translate(" << num(ox + 16) << ',' << num(oy + kTop + ph / 2)
            << ") rotate(-90)\" text-anchor=\"middle\">NMSE (dB)</text>\n";

        for (int k : kinds)
        {
            const auto kind = static_cast<EstimatorKind>(k);
            std::vector<const CurvePoint *> curve;
            for (const CurvePoint &p : points)
                if (p.bits == b && p.estimator == kind)
                    curve.push_back(&p);
            if (curve.empty())
                continue;
            svg << "<polyline class=\"curve\" data-estimator=\"" << to_string(kind) << "\" fill=\"none\" stroke=\""
                << colour(kind) << "\" stroke-width=\"1.5\" points=\"";
            for (const CurvePoint *p : curve)
                svg << num(px(p->snr_db)) << ',' << num(py(to_db(p->mean_nmse))) << ' ';
            svg << "\"/>\n";
            for (const CurvePoint *p : curve)
                svg << "<circle class=\"point\" cx=\"" << num(px(p->snr_db)) << "\" cy=\""
                    << num(py(to_db(p->mean_nmse))) << "\" r=\"3\" fill=\"" << colour(kind) << "\" data-bits=\""
                    << b << "\" data-estimator=\"" << to_string(kind) << "\" data-snr=\"" << exact(p->snr_db)
                    << "\" data-nmse=\"" << exact(p->mean_nmse) << "\" data-trials=\"" << p->count << "\"/>\n";
        }
        svg << "</g>\n";
        ++panel;
    }

    double lx = 10.0;
    for (int k : kinds)
    {
        const auto kind = static_cast<EstimatorKind>(k);
        const double ly = height - 12.0;
        svg << "<line x1=\"" << num(lx) << "\" x2=\"" << num(lx + 20) << "\" y1=\"" << num(ly - 4) << "\" y2=\""
            << num(ly - 4) << "\" stroke=\"" << colour(kind) << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly) << "\">" << to_string(kind) << "</text>\n";
        lx += 150.0;
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const ResultTable &table, const std::string &path)
{
    const std::string svg = render_plot_svg(table);
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write plot '" + path + "'");
    out << svg;
    if (!out)
        throw IoError("write failed for plot '" + path + "'");
}

} // namespace gridless
