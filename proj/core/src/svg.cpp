#include "slicekit/svg.hpp"

#include <array>
#include <charconv>
#include <string_view>

namespace slicekit {

namespace {

std::string num(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 3);
    std::string s(buf.data(), ptr);
    if (s == "-0.000") s = "0.000";
    return s;
}

class Canvas {
public:
    Canvas(const Box2& view, double margin)
        : left_(view.min.x - margin), top_(view.max.y + margin),
          width_(view.max.x - view.min.x + 2 * margin), height_(view.max.y - view.min.y + 2 * margin) {}

    std::string x(double v) const { return num(v - left_); }
    std::string y(double v) const { return num(top_ - v); }
    std::string xy(Vec2 p) const { return x(p.x) + ' ' + y(p.y); }
    std::string width() const { return num(width_); }
    std::string height() const { return num(height_); }

private:
    double left_, top_, width_, height_;
};

}  // namespace

std::string render_layer_svg(const Layer& layer, std::span<const ToolMove> moves, const Box2& view,
                             const SvgOptions& options) {
    const Canvas c(view, options.margin);
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + c.width() + "mm\" height=\"" + c.height() +
           "mm\" viewBox=\"0 0 " + c.width() + ' ' + c.height() + "\">\n";
    out += "  <title>z = " + num(layer.z) + " mm</title>\n";

    std::string d;
    for (const Contour& contour : layer.contours.contours) {
        for (std::size_t i = 0; i < contour.points.size(); ++i) {
            if (!d.empty()) d += ' ';
            d += (i == 0 ? "M" : "L") + c.xy(contour.points[i]);
        }
        if (!contour.points.empty()) d += " Z";
    }
    out += "  <path id=\"contours\" fill=\"#c8d8e8\" fill-rule=\"evenodd\" stroke=\"#34495e\" "
           "stroke-width=\"0.05\" d=\"" + d + "\"/>\n";

    if (!moves.empty()) {
        out += "  <g id=\"toolpath\" fill=\"none\" stroke-linecap=\"round\">\n";
        for (const ToolMove& m : moves) {
            if (m.kind == MoveKind::Extrude) {
                out += "    <line x1=\"" + c.x(m.start.x) + "\" y1=\"" + c.y(m.start.y) + "\" x2=\"" + c.x(m.end.x) +
                       "\" y2=\"" + c.y(m.end.y) + "\" stroke=\"#d35400\" stroke-width=\"" + num(m.width * 0.5) +
                       "\"/>\n";
            } else if (m.kind == MoveKind::Travel && options.show_travel && m.start != m.end) {
                out += "    <line x1=\"" + c.x(m.start.x) + "\" y1=\"" + c.y(m.start.y) + "\" x2=\"" + c.x(m.end.x) +
                       "\" y2=\"" + c.y(m.end.y) +
                       "\" stroke=\"#7f8c8d\" stroke-width=\"0.05\" stroke-dasharray=\"0.4 0.4\"/>\n";
            }
        }
        out += "  </g>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace slicekit
