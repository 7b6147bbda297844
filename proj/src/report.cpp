#include "epfbench/report.hpp"

#include "epfbench/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace epf::report {

namespace fs = std::filesystem;
using eval::ForecastRecord;

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::Io, "cannot write " + path.string());
    }
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) {
        throw Error(Errc::Io, "write failed for " + path.string());
    }
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

double parse_number(const std::string& text, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw Error(Errc::FormatViolation, "bad number '" + text + "'", line);
    }
    return v;
}

std::string hour_tag(int h) {
    char buf[4];
    std::snprintf(buf, sizeof buf, "%02d", h);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

// Linear blend between two RGB colours, t in [0, 1].
std::string ramp(double t) {
    static constexpr int light[3] = {0xff, 0xf7, 0xbc};
    static constexpr int dark[3] = {0x08, 0x30, 0x6b};
    t = std::clamp(t, 0.0, 1.0);
    char buf[8];
    int c[3];
    for (int i = 0; i < 3; ++i) {
        c[i] = static_cast<int>(std::lround(light[i] + (dark[i] - light[i]) * t));
    }
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

} // namespace

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_records_csv(const std::vector<ForecastRecord>& records, const fs::path& path) {
    auto out = open_out(path);
    out << "model,zone,date";
    for (int h = 0; h < kHoursPerDay; ++h) {
        out << ",y_" << hour_tag(h);
    }
    for (int h = 0; h < kHoursPerDay; ++h) {
        out << ",yhat_" << hour_tag(h);
    }
    out << '\n';
    for (const auto& r : records) {
        out << r.model << ',' << r.zone << ',' << format_date(r.target_date);
        for (double v : r.actuals) {
            out << ',' << format_number(v);
        }
        for (double v : r.predictions) {
            out << ',' << format_number(v);
        }
        out << '\n';
    }
    finish(out, path);
}

std::vector<ForecastRecord> read_records_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::FileUnreadable, "cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) {
        throw Error(Errc::EmptyInput, path.string() + " is empty");
    }
    const std::size_t columns = 3 + 2 * kHoursPerDay;
    if (split(line, ',').size() != columns || line.rfind("model,zone,date,", 0) != 0) {
        throw Error(Errc::FormatViolation, "unexpected records header", line_no);
    }
    std::vector<ForecastRecord> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != columns) {
            throw Error(Errc::FormatViolation, "expected " + std::to_string(columns) + " fields, got " +
                                                   std::to_string(cells.size()), line_no);
        }
        ForecastRecord r;
        r.model = cells[0];
        r.zone = cells[1];
        try {
            r.target_date = parse_date(cells[2]);
        } catch (const Error&) {
            throw Error(Errc::FormatViolation, "bad date '" + cells[2] + "'", line_no);
        }
        for (int h = 0; h < kHoursPerDay; ++h) {
            r.actuals[h] = parse_number(cells[3 + h], line_no);
            r.predictions[h] = parse_number(cells[3 + kHoursPerDay + h], line_no);
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_metrics_csv(const std::vector<eval::MetricRow>& rows, const fs::path& path) {
    auto out = open_out(path);
    out << "model,zone,mae,rmse,smape,mae_rank,rmse_rank,smape_rank,mae_mark,rmse_mark,smape_mark,days,completeness\n";
    for (const auto& r : rows) {
        out << r.model << ',' << r.zone << ',' << format_number(r.mae) << ',' << format_number(r.rmse) << ','
            << format_number(r.smape) << ',' << r.mae_rank << ',' << r.rmse_rank << ',' << r.smape_rank << ','
            << eval::rank_marker(r.mae_rank) << ',' << eval::rank_marker(r.rmse_rank) << ','
            << eval::rank_marker(r.smape_rank) << ',' << r.days << ',' << format_number(r.completeness) << '\n';
    }
    finish(out, path);
}

void write_dm_csv(const eval::DmMatrix& matrix, const fs::path& path) {
    auto out = open_out(path);
    out << "model_x";
    for (const auto& m : matrix.models) {
        out << ',' << m;
    }
    out << '\n';
    for (std::size_t x = 0; x < matrix.models.size(); ++x) {
        out << matrix.models[x];
        for (std::size_t y = 0; y < matrix.models.size(); ++y) {
            out << ',';
            if (matrix.p[x][y]) {
                out << format_number(*matrix.p[x][y]);
            }
        }
        out << '\n';
    }
    finish(out, path);
}

std::string render_dm_svg(const eval::DmMatrix& matrix, double threshold) {
    const int n = static_cast<int>(matrix.models.size());
    constexpr int cell = 56;
    constexpr int left = 170;
    constexpr int top = 50;
    constexpr int bottom = 150;
    const int width = left + n * cell + 20;
    const int height = top + n * cell + bottom;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    s << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">DM p-values, " << xml_escape(matrix.zone)
      << " (black: p &gt; " << format_number(threshold) << ")</text>\n";
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const int px = left + x * cell;
            const int py = top + y * cell;
            const auto& p = matrix.p[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
            std::string fill = "#ffffff";
            std::string ink = "#000000";
            if (p) {
                if (*p > threshold) {
                    fill = "#000000";
                    ink = "#ffffff";
                } else {
                    const double t = threshold > 0.0 ? *p / threshold : 0.0;
                    fill = ramp(t);
                    ink = t > 0.5 ? "#ffffff" : "#000000";
                }
            }
            s << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell << "\" height=\"" << cell
              << "\" fill=\"" << fill << "\" stroke=\"#808080\" stroke-width=\"0.5\"/>\n";
            if (p) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.3f", *p);
                s << "<text x=\"" << px + cell / 2 << "\" y=\"" << py + cell / 2 + 4
                  << "\" text-anchor=\"middle\" fill=\"" << ink << "\">" << buf << "</text>\n";
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        const auto label = xml_escape(matrix.models[static_cast<std::size_t>(i)]);
        s << "<text x=\"" << left - 6 << "\" y=\"" << top + i * cell + cell / 2 + 4 << "\" text-anchor=\"end\">"
          << label << "</text>\n";
        const int lx = left + i * cell + cell / 2;
        const int ly = top + n * cell + 8;
        s << "<text x=\"" << lx << "\" y=\"" << ly << "\" text-anchor=\"end\" transform=\"rotate(-60 " << lx << ' '
          << ly << ")\">" << label << "</text>\n";
    }
    s << "<text x=\"" << left + n * cell / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">model x (more accurate when p is small)</text>\n";
    s << "<text x=\"14\" y=\"" << top + n * cell / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
      << top + n * cell / 2 << ")\">model y</text>\n";
    s << "</svg>\n";
    return s.str();
}

void write_dm_svg(const eval::DmMatrix& matrix, const fs::path& path, double threshold) {
    auto out = open_out(path);
    out << render_dm_svg(matrix, threshold);
    finish(out, path);
}

std::vector<std::string> zones_of(const std::vector<ForecastRecord>& records) {
    std::vector<std::string> zones;
    for (const auto& r : records) {
        if (std::find(zones.begin(), zones.end(), r.zone) == zones.end()) {
            zones.push_back(r.zone);
        }
    }
    return zones;
}

std::vector<eval::LossSeries> complete_loss_series(const std::vector<ForecastRecord>& records,
                                                   const std::string& zone) {
    std::vector<std::string> models;
    std::map<std::string, std::vector<ForecastRecord>> by_model;
    std::set<long> all_days;
    for (const auto& r : records) {
        if (r.zone != zone) {
            continue;
        }
        if (!by_model.contains(r.model)) {
            models.push_back(r.model);
        }
        by_model[r.model].push_back(r);
        all_days.insert(std::chrono::sys_days{r.target_date}.time_since_epoch().count());
    }
    std::vector<eval::LossSeries> out;
    for (const auto& m : models) {
        try {
            auto series = eval::daily_l1_losses(by_model[m]);
            if (series.dates.size() == all_days.size()) {
                out.push_back(std::move(series));
            }
        } catch (const Error& e) {
            if (e.code() != Errc::MissingDay && e.code() != Errc::DuplicateDay) {
                throw;
            }
        }
    }
    return out;
}

void emit_dm_reports(const std::vector<ForecastRecord>& records, const fs::path& out_dir, double threshold) {
    for (const auto& zone : zones_of(records)) {
        auto matrix = eval::dm_matrix(complete_loss_series(records, zone));
        matrix.zone = zone;
        write_dm_csv(matrix, out_dir / ("dm_" + zone + ".csv"));
        write_dm_svg(matrix, out_dir / ("dm_" + zone + ".svg"), threshold);
    }
}

void emit_reports(const std::vector<ForecastRecord>& records, const fs::path& out_dir, double threshold,
                  std::optional<std::size_t> expected_days) {
    if (!expected_days) {
        std::set<long> days;
        for (const auto& r : records) {
            days.insert(std::chrono::sys_days{r.target_date}.time_since_epoch().count());
        }
        expected_days = days.size();
    }
    write_metrics_csv(eval::metric_table(records, expected_days), out_dir / "metrics.csv");
    emit_dm_reports(records, out_dir, threshold);
}

} // namespace epf::report
