#include "lrf/plot.hpp"

#include "lrf/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lrf {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

MetricsTable read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open metrics file: " + path);
    MetricsTable table;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("metrics file is empty: " + path);
    table.columns = split_csv(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != table.columns.size())
            throw ValidationError(path + ":" + std::to_string(line_no) + ": wrong field count");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(std::strtod(f.c_str(), nullptr));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<std::string> plot_metrics(const MetricsTable& table, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    if (table.columns.empty()) return written;

    const int width = 640, height = 400;
    const int ml = 70, mr = 20, mt = 40, mb = 50;

    for (std::size_t col = 1; col < table.columns.size(); ++col) {
        std::vector<std::pair<double, double>> points;
        for (const auto& row : table.rows)
            if (std::isfinite(row[col])) points.emplace_back(row[0], row[col]);

        double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
        if (!points.empty()) {
            x_lo = x_hi = points.front().first;
            y_lo = y_hi = points.front().second;
            for (const auto& [x, y] : points) {
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x);
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        }
        if (x_hi == x_lo) x_hi = x_lo + 1;
        if (y_hi == y_lo) {
            y_lo -= 0.5;
            y_hi += 0.5;
        }
        const auto px = [&](double x) {
            return ml + (x - x_lo) / (x_hi - x_lo) * (width - ml - mr);
        };
        const auto py = [&](double y) {
            return height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb);
        };

        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
            << height << "\">\n";
        svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
            << table.columns[col] << "</text>\n";
        svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
            << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
            << height - mb << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << ml << "\" y=\"" << height - mb + 20
            << "\" text-anchor=\"middle\" font-size=\"12\">" << fmt(x_lo) << "</text>\n";
        svg << "<text x=\"" << width - mr << "\" y=\"" << height - mb + 20
            << "\" text-anchor=\"middle\" font-size=\"12\">" << fmt(x_hi) << "</text>\n";
        svg << "<text x=\"" << ml - 6 << "\" y=\"" << height - mb
            << "\" text-anchor=\"end\" font-size=\"12\">" << fmt(y_lo) << "</text>\n";
        svg << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 6
            << "\" text-anchor=\"end\" font-size=\"12\">" << fmt(y_hi) << "</text>\n";
        svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
            << "\" text-anchor=\"middle\" font-size=\"12\">" << table.columns[0] << "</text>\n";
        if (!points.empty()) {
            svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
            for (const auto& [x, y] : points) svg << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
            svg << "\"/>\n";
        }
        svg << "</svg>\n";

        const std::string path = out_dir + "/" + table.columns[col] + ".svg";
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write plot file: " + path);
        out << svg.str();
        written.push_back(path);
    }
    return written;
}

}  // namespace lrf
