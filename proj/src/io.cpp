#include "bouss/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bouss {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (row[i]) out << format_double(*row[i]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

namespace {

double nice_tick(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5) return mag;
    if (r < 3.5) return 2.0 * mag;
    if (r < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                    const PlotSpec& spec) {
    const double W = 720, H = 480;
    const double ml = 80, mr = 30, mt = 45, mb = 55;
    double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (std::isnan(y)) continue;
            if (spec.logy && !(y > 0.0)) continue;
            if (spec.logy) y = std::log10(y);
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!(xmax > xmin)) {
        xmax = xmin + 1.0;
        xmin -= 1.0;
    }
    if (!(ymax > ymin)) {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    const double padx = 0.03 * (xmax - xmin), pady = 0.05 * (ymax - ymin);
    xmin -= padx;
    xmax += padx;
    ymin -= pady;
    ymax += pady;
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double y) {
        if (spec.logy) y = std::log10(y);
        return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb);
    };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
        << "font-family=\"sans-serif\">" << spec.title << "</text>\n";

    // axes box
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
        << H - mt - mb << "\" fill=\"none\" stroke=\"#333\"/>\n";

    // x ticks
    const double tx = nice_tick(xmax - xmin);
    for (double t = std::ceil(xmin / tx) * tx; t <= xmax + 1e-12; t += tx) {
        svg << "<line x1=\"" << X(t) << "\" y1=\"" << H - mb << "\" x2=\"" << X(t) << "\" y2=\""
            << H - mb + 5 << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << X(t) << "\" y=\"" << H - mb + 20
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << format_double(std::abs(t) < 1e-12 ? 0.0 : t) << "</text>\n";
    }
    // y ticks
    const double ty = nice_tick(ymax - ymin);
    for (double t = std::ceil(ymin / ty) * ty; t <= ymax + 1e-12; t += ty) {
        const double ypix = H - mb - (t - ymin) / (ymax - ymin) * (H - mt - mb);
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << ypix << "\" x2=\"" << ml << "\" y2=\"" << ypix
            << "\" stroke=\"#333\"/>\n";
        std::string lbl = spec.logy ? ("1e" + format_double(std::abs(t) < 1e-12 ? 0.0 : t))
                                    : format_double(std::abs(t) < 1e-12 ? 0.0 : t);
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << ypix + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << lbl
            << "</text>\n";
    }
    svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << spec.xlabel
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << H / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" transform=\"rotate(-90 "
        << 18 << " " << H / 2 << ")\">" << spec.ylabel << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        std::ostringstream pts;
        bool open = false;
        std::string d;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double y = s.y[i];
            if (std::isnan(y) || (spec.logy && !(y > 0.0))) {
                open = false;
                continue;
            }
            d += (open ? " L" : " M");
            d += format_double(X(s.x[i]));
            d += ",";
            d += format_double(Y(y));
            open = true;
        }
        svg << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << colors[si % 6]
            << "\" stroke-width=\"1.6\"/>\n";
        svg << "<text x=\"" << W - mr - 8 << "\" y=\"" << mt + 18 + 16 * si
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\""
            << colors[si % 6] << "\">" << s.label << "</text>\n";
    }
    if (!spec.annotation.empty())
        svg << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 18
            << "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"#333\">" << spec.annotation
            << "</text>\n";
    svg << "</svg>\n";
    write_text(path, svg.str());
}

}  // namespace bouss
