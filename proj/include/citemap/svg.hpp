#pragma once

#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace citemap::svg {

/// Minimal SVG writer. Numbers are written with fixed precision so output is byte-stable.
class Document {
public:
    Document(double width, double height);

    void rect(double x, double y, double w, double h, std::string_view fill);
    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width,
              double opacity = 1.0);
    void circle(double cx, double cy, double r, std::string_view fill, double opacity = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke, double width);
    void text(double x, double y, std::string_view content, double size, std::string_view anchor,
              double rotate = 0.0);
    void raw(std::string_view fragment);

    std::string str() const;

private:
    std::ostringstream body_;
    double width_, height_;
};

std::string escape(std::string_view text);

/// Distinct colors for categorical labels; cycles through a fixed palette.
std::string_view palette(std::size_t index);

}  // namespace citemap::svg
