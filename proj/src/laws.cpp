#include "citemap/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "citemap/svg.hpp"

namespace citemap {

LawSeries law_series(const CitationGraph& g, std::span<const int> years, TreeStrategy strategy,
                     std::uint64_t seed) {
    for (std::size_t i = 1; i < years.size(); ++i)
        if (years[i] <= years[i - 1]) throw InvalidArgument("law_series: years must be strictly ascending");
    LawSeries s;
    s.strategy = strategy;
    s.rows.resize(years.size());
    parallel_for(years.size(), [&](std::size_t i) {
        const CitationGraph snap = snapshot(g, years[i]);
        LawRow& row = s.rows[i];
        row.year = years[i];
        row.n = snap.node_count();
        row.m = snap.undirected_edge_count();
        for (NodeIndex v = 0; v < snap.node_count(); ++v) row.sarnoff += snap.degree(v) > 0;
        row.reed_log2 = static_cast<double>(row.n);
        if (row.m > 0) row.kqi_bits = kqi_total(snap, build_encoding_tree(snap, strategy, seed)).k;
    });
    return s;
}

SlopeFit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidArgument("fit_loglog: xs and ys differ in length");
    SlopeFit fit;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] > 0 && ys[i] > 0 && std::isfinite(xs[i]) && std::isfinite(ys[i])) {
            lx.push_back(std::log2(xs[i]));
            ly.push_back(std::log2(ys[i]));
        } else {
            ++fit.points_skipped;
        }
    }
    fit.points_used = lx.size();
    if (lx.size() < 2) throw InvalidArgument("fit_loglog: fewer than 2 usable points");
    const double k = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("fit_loglog: all x values are equal");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss_res += r * r;
    }
    const double scale = std::max(1.0, syy);
    if (ss_res <= 1e-24 * scale * k)
        fit.r2 = 1.0;
    else
        fit.r2 = syy > 0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 0.0;
    return fit;
}

std::uint64_t count_connected_subgraphs(const UndirectedGraph& g) {
    const std::size_t n = g.node_count();
    if (n > 20) throw InvalidArgument("count_connected_subgraphs: more than 20 nodes");
    std::vector<std::uint32_t> adj(n, 0);
    for (NodeIndex v = 0; v < n; ++v)
        for (NodeIndex u : g.neighbors(v)) adj[v] |= 1u << u;
    std::uint64_t count = 0;
    const std::uint32_t full = n == 0 ? 0 : (n == 32 ? ~0u : (1u << n) - 1);
    for (std::uint32_t subset = 1; subset <= full && subset != 0; ++subset) {
        // flood fill from the lowest member within the subset
        std::uint32_t reached = subset & (~subset + 1);
        std::uint32_t frontier = reached;
        while (frontier) {
            std::uint32_t next = 0;
            for (std::uint32_t f = frontier; f; f &= f - 1) next |= adj[static_cast<std::size_t>(__builtin_ctz(f))];
            next &= subset & ~reached;
            reached |= next;
            frontier = next;
        }
        count += reached == subset;
    }
    return count;
}

std::uint64_t count_connected_subgraphs(const CitationGraph& g) {
    if (g.node_count() > 20) throw InvalidArgument("count_connected_subgraphs: more than 20 nodes");
    return count_connected_subgraphs(UndirectedGraph::from_citations(g));
}

void export_law_series(const LawSeries& s, std::ostream& out) {
    out << "year,n,m,sarnoff,reed_log2,kqi_bits\n";
    for (const auto& r : s.rows)
        out << r.year << ',' << r.n << ',' << r.m << ',' << r.sarnoff << ',' << format_double(r.reed_log2) << ','
            << format_double(r.kqi_bits) << '\n';
}

std::string slope_fit_json(const SlopeFit& fit) {
    nlohmann::ordered_json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r2"] = fit.r2;
    j["points_used"] = fit.points_used;
    j["points_skipped"] = fit.points_skipped;
    return j.dump(2);
}

std::string law_series_svg(const LawSeries& s) {
    struct Series {
        const char* name;
        const char* color;
        std::vector<std::pair<double, double>> pts;
    };
    std::vector<Series> series = {{"Sarnoff (active papers)", "#1f77b4", {}},
                                  {"Metcalfe (edges)", "#d62728", {}},
                                  {"Reed (log2 subsets)", "#2ca02c", {}},
                                  {"KQI (bits)", "#9467bd", {}}};
    for (const auto& r : s.rows) {
        if (r.n == 0) continue;
        const double x = std::log2(static_cast<double>(r.n));
        const double vals[] = {static_cast<double>(r.sarnoff), static_cast<double>(r.m), r.reed_log2, r.kqi_bits};
        for (std::size_t i = 0; i < 4; ++i)
            if (vals[i] > 0) series[i].pts.emplace_back(x, std::log2(vals[i]));
    }
    double x0 = std::numeric_limits<double>::max(), x1 = std::numeric_limits<double>::lowest();
    double y0 = x0, y1 = x1;
    for (const auto& se : series)
        for (const auto& [x, y] : se.pts) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-9) x1 = x0 + 1;
    if (y1 - y0 < 1e-9) y1 = y0 + 1;

    constexpr double width = 640, height = 480, margin = 60;
    auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
    auto py = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };

    svg::Document doc(width, height);
    doc.rect(0, 0, width, height, "#ffffff");
    doc.line(margin, height - margin, width - margin, height - margin, "#000000", 1);
    doc.line(margin, margin, margin, height - margin, "#000000", 1);
    doc.text(width / 2, height - 15, "log2(n)", 14, "middle");
    doc.text(15, height / 2, "log2(value)", 14, "middle", -90);
    doc.text(margin, height - margin + 18, format_double(std::round(x0 * 100) / 100), 11, "middle");
    doc.text(width - margin, height - margin + 18, format_double(std::round(x1 * 100) / 100), 11, "middle");
    doc.text(margin - 6, height - margin, format_double(std::round(y0 * 100) / 100), 11, "end");
    doc.text(margin - 6, margin, format_double(std::round(y1 * 100) / 100), 11, "end");
    double legend_y = margin;
    for (const auto& se : series) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& [x, y] : se.pts) pts.emplace_back(px(x), py(y));
        doc.polyline(pts, se.color, 2);
        for (const auto& [x, y] : pts) doc.circle(x, y, 2.5, se.color);
        doc.line(width - margin - 170, legend_y, width - margin - 150, legend_y, se.color, 3);
        doc.text(width - margin - 145, legend_y + 4, se.name, 12, "start");
        legend_y += 18;
    }
    return doc.str();
}

}  // namespace citemap
