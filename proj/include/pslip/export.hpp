#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace pslip {

// Writes text to path; throws Error when the file cannot be written.
void write_text_file(const std::string& path, std::string_view text);

// Comma-joined row of already formatted fields, newline terminated.
[[nodiscard]] std::string csv_row(const std::vector<std::string>& fields);

using Segment = std::array<double, 4>;  // x0, y0, x1, y1

// Marching squares for one level on a rectilinear grid. values is row-major
// [i][j] with i along x and j along y; cells touching NaN are skipped.
[[nodiscard]] std::vector<Segment> contour_segments(const std::vector<double>& x, const std::vector<double>& y,
                                                    const std::vector<double>& values, double level);

// Minimal static line plot. Polylines break at non-finite points (and at
// non-positive ones on a log axis).
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label, bool log_y = false);

    void line(const std::vector<double>& x, const std::vector<double>& y, std::string color, bool dashed = false,
              std::string label = {});
    void vline(double x, std::string color, bool dashed = true);
    void markers(const std::vector<double>& x, const std::vector<double>& y, std::string color);
    void segments(const std::vector<Segment>& s, std::string color);
    // Closed polygon, drawn under everything else.
    void fill(const std::vector<double>& x, const std::vector<double>& y, std::string color, double opacity = 0.25);
    void set_x_range(double lo, double hi);
    void set_y_range(double lo, double hi);

    [[nodiscard]] std::string render() const;

private:
    struct Series {
        std::vector<double> x, y;
        std::string color, label;
        bool dashed = false;
        enum Kind { polyline, points, polygon } kind = polyline;
        double opacity = 1.0;
    };

    [[nodiscard]] bool usable(double x, double y) const;

    std::string title_, x_label_, y_label_;
    bool log_y_;
    std::vector<Series> series_;
    std::vector<std::pair<double, std::string>> vlines_;
    std::vector<bool> vline_dashed_;
    std::vector<Segment> segs_;
    std::string seg_color_;
    bool fixed_x_ = false, fixed_y_ = false;
    double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
};

}  // namespace pslip
