#include "citemap/svg.hpp"

#include <cstdio>

namespace citemap::svg {

namespace {

std::string num(double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf, static_cast<std::size_t>(len));
    if (s == "-0.00") s = "0.00";
    return s;
}

}  // namespace

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h, std::string_view fill) {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
          << "\" fill=\"" << fill << "\"/>\n";
}

void Document::line(double x1, double y1, double x2, double y2, std::string_view stroke, double width,
                    double opacity) {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
          << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << '"';
    if (opacity < 1.0) body_ << " stroke-opacity=\"" << num(opacity) << '"';
    body_ << "/>\n";
}

void Document::circle(double cx, double cy, double r, std::string_view fill, double opacity) {
    body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r) << "\" fill=\"" << fill
          << '"';
    if (opacity < 1.0) body_ << " fill-opacity=\"" << num(opacity) << '"';
    body_ << "/>\n";
}

void Document::polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke, double width) {
    if (pts.empty()) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
    body_ << "\"/>\n";
}

void Document::text(double x, double y, std::string_view content, double size, std::string_view anchor,
                    double rotate) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"" << num(size)
          << "\" text-anchor=\"" << anchor << '"';
    if (rotate != 0.0) body_ << " transform=\"rotate(" << num(rotate) << ' ' << num(x) << ' ' << num(y) << ")\"";
    body_ << '>' << escape(content) << "</text>\n";
}

void Document::raw(std::string_view fragment) { body_ << fragment; }

std::string Document::str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
        << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n"
        << body_.str() << "</svg>\n";
    return out.str();
}

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string_view palette(std::size_t index) {
    static constexpr std::string_view colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                                  "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
                                                  "#8c6d31", "#843c39", "#7b4173", "#3182bd", "#e6550d", "#31a354",
                                                  "#756bb1", "#636363"};
    return colors[index % std::size(colors)];
}

}  // namespace citemap::svg
