#include "pslip/export.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pslip/errors.hpp"

namespace pslip {

namespace {

constexpr double width = 720, height = 480;
constexpr double left = 80, right = 140, top = 40, bottom = 60;

std::string num(double v) {
    // Pixel coordinates; two decimals keep files small and stable.
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
}

std::string escape(std::string_view t) {
    std::string out;
    for (char c : t) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

std::string tick_label(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

}  // namespace

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw Error("write to " + path + " failed");
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string s;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) s += ',';
        s += fields[k];
    }
    s += '\n';
    return s;
}

std::vector<Segment> contour_segments(const std::vector<double>& x, const std::vector<double>& y,
                                      const std::vector<double>& values, double level) {
    std::vector<Segment> out;
    const std::size_t nx = x.size(), ny = y.size();
    if (values.size() != nx * ny) throw DomainError("contour grid size mismatch");
    auto v = [&](std::size_t i, std::size_t j) { return values[i * ny + j] - level; };
    auto cross = [](double a, double b, double fa, double fb) { return a + (b - a) * fa / (fa - fb); };
    for (std::size_t i = 0; i + 1 < nx; ++i) {
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            const double f00 = v(i, j), f10 = v(i + 1, j), f11 = v(i + 1, j + 1), f01 = v(i, j + 1);
            if (!std::isfinite(f00) || !std::isfinite(f10) || !std::isfinite(f11) || !std::isfinite(f01)) continue;
            // edge crossings in order: bottom, right, top, left
            std::vector<std::array<double, 2>> pts;
            if ((f00 < 0) != (f10 < 0)) pts.push_back({cross(x[i], x[i + 1], f00, f10), y[j]});
            if ((f10 < 0) != (f11 < 0)) pts.push_back({x[i + 1], cross(y[j], y[j + 1], f10, f11)});
            if ((f01 < 0) != (f11 < 0)) pts.push_back({cross(x[i], x[i + 1], f01, f11), y[j + 1]});
            if ((f00 < 0) != (f01 < 0)) pts.push_back({x[i], cross(y[j], y[j + 1], f00, f01)});
            if (pts.size() == 2) {
                out.push_back({pts[0][0], pts[0][1], pts[1][0], pts[1][1]});
            } else if (pts.size() == 4) {
                // saddle cell: pair by the centre value
                const double c = 0.25 * (f00 + f10 + f11 + f01);
                if ((c < 0) == (f00 < 0)) {
                    out.push_back({pts[0][0], pts[0][1], pts[1][0], pts[1][1]});
                    out.push_back({pts[2][0], pts[2][1], pts[3][0], pts[3][1]});
                } else {
                    out.push_back({pts[0][0], pts[0][1], pts[3][0], pts[3][1]});
                    out.push_back({pts[1][0], pts[1][1], pts[2][0], pts[2][1]});
                }
            }
        }
    }
    return out;
}

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label, bool log_y)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)), log_y_(log_y) {}

void SvgPlot::line(const std::vector<double>& x, const std::vector<double>& y, std::string color, bool dashed,
                   std::string label) {
    series_.push_back({x, y, std::move(color), std::move(label), dashed, Series::polyline, 1.0});
}

void SvgPlot::vline(double x, std::string color, bool dashed) {
    vlines_.emplace_back(x, std::move(color));
    vline_dashed_.push_back(dashed);
}

void SvgPlot::markers(const std::vector<double>& x, const std::vector<double>& y, std::string color) {
    series_.push_back({x, y, std::move(color), {}, false, Series::points, 1.0});
}

void SvgPlot::segments(const std::vector<Segment>& s, std::string color) {
    segs_.insert(segs_.end(), s.begin(), s.end());
    seg_color_ = std::move(color);
}

void SvgPlot::fill(const std::vector<double>& x, const std::vector<double>& y, std::string color, double opacity) {
    series_.push_back({x, y, std::move(color), {}, false, Series::polygon, opacity});
}

void SvgPlot::set_x_range(double lo, double hi) {
    fixed_x_ = true;
    x0_ = lo;
    x1_ = hi;
}

void SvgPlot::set_y_range(double lo, double hi) {
    fixed_y_ = true;
    y0_ = lo;
    y1_ = hi;
}

bool SvgPlot::usable(double x, double y) const {
    return std::isfinite(x) && std::isfinite(y) && (!log_y_ || y > 0.0);
}

std::string SvgPlot::render() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    double xa = inf, xb = -inf, ya = inf, yb = -inf;
    auto grow = [&](double x, double y) {
        if (!usable(x, y)) return;
        xa = std::min(xa, x);
        xb = std::max(xb, x);
        ya = std::min(ya, y);
        yb = std::max(yb, y);
    };
    for (const auto& s : series_)
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) grow(s.x[k], s.y[k]);
    for (const auto& s : segs_) {
        grow(s[0], s[1]);
        grow(s[2], s[3]);
    }
    if (fixed_x_) {
        xa = x0_;
        xb = x1_;
    }
    if (fixed_y_) {
        ya = y0_;
        yb = y1_;
    }
    if (!(xa <= xb)) xa = 0, xb = 1;
    if (!(ya <= yb)) ya = log_y_ ? 1 : 0, yb = log_y_ ? 10 : 1;
    if (xa == xb) xa -= 0.5, xb += 0.5;
    if (log_y_) {
        ya = std::log10(ya);
        yb = std::log10(yb);
    }
    if (ya == yb) ya -= 0.5, yb += 0.5;
    if (!fixed_y_) {
        const double pad = 0.05 * (yb - ya);
        ya -= pad;
        yb += pad;
    }

    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double x) { return left + (x - xa) / (xb - xa) * pw; };
    auto py = [&](double y) {
        double v = log_y_ ? std::log10(y) : y;
        return top + (yb - v) / (yb - ya) * ph;
    };
    auto inside = [&](double x) { return x >= xa && x <= xb; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<defs><clipPath id=\"plot\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
      << "\" height=\"" << ph << "\"/></clipPath></defs>\n";
    o << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title_)
      << "</text>\n";

    // axes and ticks
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        double x = xa + (xb - xa) * k / 5.0;
        o << "<line x1=\"" << num(px(x)) << "\" y1=\"" << top + ph << "\" x2=\"" << num(px(x)) << "\" y2=\""
          << top + ph + 5 << "\" stroke=\"black\"/>";
        o << "<text x=\"" << num(px(x)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
          << tick_label(x) << "</text>\n";
    }
    if (log_y_) {
        for (int d = static_cast<int>(std::ceil(ya)); d <= static_cast<int>(std::floor(yb)); ++d) {
            double yy = top + (yb - d) / (yb - ya) * ph;
            o << "<line x1=\"" << left - 5 << "\" y1=\"" << num(yy) << "\" x2=\"" << left << "\" y2=\"" << num(yy)
              << "\" stroke=\"black\"/>";
            o << "<text x=\"" << left - 8 << "\" y=\"" << num(yy + 4) << "\" text-anchor=\"end\">1e" << d
              << "</text>\n";
        }
    } else {
        for (int k = 0; k <= 5; ++k) {
            double y = ya + (yb - ya) * k / 5.0;
            double yy = top + (yb - y) / (yb - ya) * ph;
            o << "<line x1=\"" << left - 5 << "\" y1=\"" << num(yy) << "\" x2=\"" << left << "\" y2=\"" << num(yy)
              << "\" stroke=\"black\"/>";
            o << "<text x=\"" << left - 8 << "\" y=\"" << num(yy + 4) << "\" text-anchor=\"end\">" << tick_label(y)
              << "</text>\n";
        }
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\">"
      << escape(x_label_) << "</text>\n";
    o << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">" << escape(y_label_) << "</text>\n";

    o << "<g clip-path=\"url(#plot)\">\n";
    for (const auto& s : series_) {
        if (s.kind != Series::polygon) continue;
        o << "<polygon fill=\"" << s.color << "\" fill-opacity=\"" << s.opacity << "\" stroke=\"none\" points=\"";
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k)
            if (usable(s.x[k], s.y[k])) o << num(px(s.x[k])) << ',' << num(py(s.y[k])) << ' ';
        o << "\"/>\n";
    }
    for (std::size_t k = 0; k < vlines_.size(); ++k) {
        double x = vlines_[k].first;
        if (!inside(x)) continue;
        o << "<line x1=\"" << num(px(x)) << "\" y1=\"" << top << "\" x2=\"" << num(px(x)) << "\" y2=\"" << top + ph
          << "\" stroke=\"" << vlines_[k].second << "\"" << (vline_dashed_[k] ? " stroke-dasharray=\"4 3\"" : "")
          << "/>\n";
    }
    if (!segs_.empty()) {
        o << "<path fill=\"none\" stroke=\"" << seg_color_ << "\" stroke-width=\"1\" d=\"";
        for (const auto& s : segs_)
            o << 'M' << num(px(s[0])) << ',' << num(py(s[1])) << 'L' << num(px(s[2])) << ',' << num(py(s[3]));
        o << "\"/>\n";
    }
    for (const auto& s : series_) {
        if (s.kind == Series::polyline) {
            std::string pts;
            auto flush = [&] {
                if (!pts.empty())
                    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
                      << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << pts << "\"/>\n";
                pts.clear();
            };
            for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
                if (!usable(s.x[k], s.y[k])) {
                    flush();
                    continue;
                }
                pts += num(px(s.x[k])) + ',' + num(py(s.y[k])) + ' ';
            }
            flush();
        } else if (s.kind == Series::points) {
            for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k)
                if (usable(s.x[k], s.y[k]))
                    o << "<circle cx=\"" << num(px(s.x[k])) << "\" cy=\"" << num(py(s.y[k])) << "\" r=\"4\" fill=\""
                      << s.color << "\"/>\n";
        }
    }
    o << "</g>\n";

    // legend
    double ly = top + 10;
    for (const auto& s : series_) {
        if (s.label.empty()) continue;
        o << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 30
          << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
          << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>";
        o << "<text x=\"" << width - right + 35 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
        ly += 18;
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace pslip
