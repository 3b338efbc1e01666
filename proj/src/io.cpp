#include "xlnum/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace xlnum {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
    require(out_.good(), "csv: cannot open " + path.string());
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k) out_ << ',';
        out_ << header[k];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    require(values.size() == columns_, "csv: row width mismatch");
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out_ << ',';
        out_ << format_number(values[k]);
    }
    out_ << '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    require(values.size() == columns_, "csv: row width mismatch");
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out_ << ',';
        out_ << values[k];
    }
    out_ << '\n';
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec && std::filesystem::is_directory(dir),
            "cannot create output directory " + dir.string());
}

void write_svg_chart(const std::filesystem::path& path, const std::string& title,
                     const std::vector<SvgSeries>& series) {
    const int width = 720, height = 440;
    const int ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            xmin = std::min(xmin, s.x[k]);
            xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, s.y[k]);
            ymax = std::max(ymax, s.y[k]);
        }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) {
        return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
    };
    auto py = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    std::ofstream out(path);
    require(out.good(), "svg: cannot open " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
        << width - mr << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + k * (xmax - xmin) / 4;
        const double yv = ymin + k * (ymax - ymin) / 4;
        out << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << format_number(xv) << "</text>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << format_number(yv) << "</text>\n";
    }
    int legend_y = mt;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (k) out << ' ';
            out << format_number(px(s.x[k])) << ',' << format_number(py(s.y[k]));
        }
        out << "\"/>\n";
        if (!s.label.empty() && series.size() > 1 && legend_y < height - mb) {
            out << "<text x=\"" << width - mr - 120 << "\" y=\"" << legend_y
                << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
                << s.color << "\">" << s.label << "</text>\n";
            legend_y += 14;
        }
    }
    out << "</svg>\n";
}

}  // namespace xlnum
