#pragma once

#include <sstream>
#include <string>

#include "skewlab/csv.hpp"

namespace skewlab {

/// Minimal static SVG 1.1 writer, 900x600, no external resources.
class SvgCanvas {
public:
    static constexpr int width = 900;
    static constexpr int height = 600;

    explicit SvgCanvas(const std::string& title) {
        body_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
              << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
              << "width=\"" << width << "\" height=\"" << height << "\" "
              << "viewBox=\"0 0 " << width << " " << height << "\">\n"
              << "<title>" << title << "</title>\n"
              << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
              << "\" fill=\"white\"/>\n";
    }

    // Plot frame: margins 60 left/bottom, 20 right/top; data space [0,1]^2.
    double px(double x) const { return 60.0 + x * (width - 80.0); }
    double py(double y) const { return (height - 60.0) - y * (height - 80.0); }

    void frame() {
        line_px(px(0), py(0), px(1), py(0), "#000000", 1.0);
        line_px(px(0), py(0), px(0), py(1), "#000000", 1.0);
    }

    void rect(double x0, double y0, double x1, double y1, const std::string& fill,
              double opacity = 1.0) {
        body_ << "<rect x=\"" << fmt(px(x0)) << "\" y=\"" << fmt(py(y1)) << "\" width=\""
              << fmt(px(x1) - px(x0)) << "\" height=\"" << fmt(py(y0) - py(y1)) << "\" fill=\""
              << fill << "\" fill-opacity=\"" << fmt(opacity) << "\"/>\n";
    }

    void line(double x0, double y0, double x1, double y1, const std::string& stroke,
              double w = 1.0) {
        line_px(px(x0), py(y0), px(x1), py(y1), stroke, w);
    }

    void dot(double x, double y, double r, const std::string& fill) {
        body_ << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"" << fmt(r)
              << "\" fill=\"" << fill << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12) {
        body_ << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(py(y)) << "\" font-size=\"" << size
              << "\" font-family=\"monospace\">" << s << "</text>\n";
    }

    std::string finish() {
        body_ << "</svg>\n";
        return body_.str();
    }

private:
    void line_px(double x0, double y0, double x1, double y1, const std::string& stroke, double w) {
        body_ << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1)
              << "\" y2=\"" << fmt(y1) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(w)
              << "\"/>\n";
    }

    std::ostringstream body_;
};

} // namespace skewlab
