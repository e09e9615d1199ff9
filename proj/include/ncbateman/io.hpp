#pragma once

// Locale-independent number formatting, CSV rows and a minimal SVG line plot.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ncbateman::io {

/// Shortest-trip-safe decimal with 17 significant digits, independent of the C locale.
inline std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int decimals)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::vector<std::string> header) : os_(os), width_(header.size())
    {
        write_fields(header);
    }

    void row(const std::vector<std::string>& fields)
    {
        if (fields.size() != width_) throw std::logic_error("CSV row width does not match header");
        write_fields(fields);
    }

private:
    void write_fields(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) os_ << ',';
            os_ << fields[i];
        }
        os_ << '\n';
    }

    std::ostream& os_;
    std::size_t width_;
};

struct Series {
    std::string label;
    std::string colour;
    std::vector<double> y;
};

/// Polyline plot on a fixed 960x540 view box.
inline void write_svg_plot(std::ostream& os, std::span<const double> x, std::span<const Series> series, std::string_view title)
{
    constexpr double width = 960, height = 540, margin = 50;
    double xmin = x.empty() ? 0.0 : x.front(), xmax = x.empty() ? 1.0 : x.back();
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& s : series) {
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(ymax > ymin)) {
        const double c = std::isfinite(ymin) ? ymin : 0.0;
        ymin = c - 1.0;
        ymax = c + 1.0;
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    auto px = [&](double v) { return margin + (v - xmin) / (xmax - xmin) * (width - 2 * margin); };
    auto py = [&](double v) { return height - margin - (v - ymin) / (ymax - ymin) * (height - 2 * margin); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 540\" width=\"960\" height=\"540\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" fill=\"white\"/>\n";
    os << "<rect x=\"50\" y=\"50\" width=\"860\" height=\"440\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"480\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    os << "<text x=\"50\" y=\"520\" font-family=\"sans-serif\" font-size=\"12\">t = " << format_double(xmin) << "</text>\n";
    os << "<text x=\"910\" y=\"520\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">t = " << format_double(xmax)
       << "</text>\n";
    if (ymin < 0.0 && ymax > 0.0) {
        os << "<line x1=\"50\" x2=\"910\" y1=\"" << format_fixed(py(0.0), 2) << "\" y2=\"" << format_fixed(py(0.0), 2)
           << "\" stroke=\"#bbbbbb\"/>\n";
    }
    double legend_y = 70;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1\" points=\"";
        const std::size_t n = std::min(x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.y[i])) continue;
            os << format_fixed(px(x[i]), 2) << ',' << format_fixed(py(s.y[i]), 2) << (i + 1 < n ? " " : "");
        }
        os << "\"/>\n";
        os << "<text x=\"890\" y=\"" << format_fixed(legend_y, 0) << "\" text-anchor=\"end\" fill=\"" << s.colour
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
        legend_y += 16;
    }
    os << "</svg>\n";
}

} // namespace ncbateman::io
