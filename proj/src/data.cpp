#include "epfbench/data.hpp"

#include "epfbench/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

namespace epf::data {

using std::chrono::hours;
using std::chrono::minutes;
using std::chrono::seconds;
using std::chrono::sys_days;
using std::chrono::sys_seconds;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
        s.remove_suffix(1);
    }
    return s;
}

// Splits one delimited line, honouring double-quoted fields.
std::vector<std::string> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

bool parse_uint(std::string_view text, int& out) {
    if (text.empty() || text.front() == '-' || text.front() == '+') {
        return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

std::optional<double> parse_finite(std::string_view text) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

struct LocalStamp {
    sys_seconds local;  // wall-clock time encoded as if it were UTC
    std::optional<minutes> offset;
};

std::optional<sys_seconds> make_stamp(int y, int mo, int d, int h, int mi, int s) {
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) {
        return std::nullopt;
    }
    return sys_seconds{sys_days{date}} + hours{h} + minutes{mi} + seconds{s};
}

// yyyy-MM-dd[T ]HH:mm[:ss[.fff]][Z|±HH:mm|±HHmm]
std::optional<LocalStamp> parse_iso(std::string_view t) {
    if (t.size() < 16 || t[4] != '-' || t[7] != '-' || (t[10] != 'T' && t[10] != ' ') || t[13] != ':') {
        return std::nullopt;
    }
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!parse_uint(t.substr(0, 4), y) || !parse_uint(t.substr(5, 2), mo) || !parse_uint(t.substr(8, 2), d) ||
        !parse_uint(t.substr(11, 2), h) || !parse_uint(t.substr(14, 2), mi)) {
        return std::nullopt;
    }
    std::size_t pos = 16;
    if (pos < t.size() && t[pos] == ':') {
        if (pos + 3 > t.size() || !parse_uint(t.substr(pos + 1, 2), s)) {
            return std::nullopt;
        }
        pos += 3;
        if (pos < t.size() && t[pos] == '.') {
            ++pos;
            while (pos < t.size() && t[pos] >= '0' && t[pos] <= '9') {
                if (t[pos] != '0') {
                    return std::nullopt;  // sub-second precision is not hourly
                }
                ++pos;
            }
        }
    }
    auto stamp = make_stamp(y, mo, d, h, mi, s);
    if (!stamp) {
        return std::nullopt;
    }
    LocalStamp out{*stamp, std::nullopt};
    std::string_view rest = trim(t.substr(pos));
    if (rest.empty()) {
        return out;
    }
    if (rest == "Z") {
        out.offset = minutes{0};
        return out;
    }
    if (rest.front() != '+' && rest.front() != '-') {
        return std::nullopt;
    }
    const int sign = rest.front() == '-' ? -1 : 1;
    rest.remove_prefix(1);
    int oh = 0, om = 0;
    if (rest.size() == 5 && rest[2] == ':') {
        if (!parse_uint(rest.substr(0, 2), oh) || !parse_uint(rest.substr(3, 2), om)) {
            return std::nullopt;
        }
    } else if (rest.size() == 4) {
        if (!parse_uint(rest.substr(0, 2), oh) || !parse_uint(rest.substr(2, 2), om)) {
            return std::nullopt;
        }
    } else if (rest.size() == 2) {
        if (!parse_uint(rest, oh)) {
            return std::nullopt;
        }
    } else {
        return std::nullopt;
    }
    out.offset = minutes{sign * (oh * 60 + om)};
    return out;
}

// dd.MM.yyyy HH:mm[:ss] - dd.MM.yyyy HH:mm[:ss] [(CET/CEST)]; '/' also accepted.
std::optional<LocalStamp> parse_mtu(std::string_view t) {
    if (t.size() < 16 || (t[2] != '.' && t[2] != '/') || t[5] != t[2] || t[10] != ' ' || t[13] != ':') {
        return std::nullopt;
    }
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!parse_uint(t.substr(0, 2), d) || !parse_uint(t.substr(3, 2), mo) || !parse_uint(t.substr(6, 4), y) ||
        !parse_uint(t.substr(11, 2), h) || !parse_uint(t.substr(14, 2), mi)) {
        return std::nullopt;
    }
    std::size_t pos = 16;
    if (pos < t.size() && t[pos] == ':') {
        if (pos + 3 > t.size() || !parse_uint(t.substr(pos + 1, 2), s)) {
            return std::nullopt;
        }
        pos += 3;
    }
    std::string_view rest = trim(t.substr(pos));
    if (!rest.empty() && rest.front() != '-' && rest.front() != '(') {
        return std::nullopt;
    }
    auto stamp = make_stamp(y, mo, d, h, mi, s);
    if (!stamp) {
        return std::nullopt;
    }
    return LocalStamp{*stamp, std::nullopt};
}

// Last Sunday of `month` in `year`, 01:00 UTC: EU summer-time switch instants.
sys_seconds eu_switch(int year, unsigned month) {
    using namespace std::chrono;
    const sys_days last{year_month_day_last{std::chrono::year{year}, month_day_last{std::chrono::month{month}}}};
    const weekday wd{last};
    const sys_days sunday = last - (wd - Sunday);
    return sys_seconds{sunday} + hours{1};
}

bool in_eu_summer(sys_seconds utc) {
    const Date date{std::chrono::floor<std::chrono::days>(utc)};
    const int y = static_cast<int>(date.year());
    return utc >= eu_switch(y, 3) && utc < eu_switch(y, 10);
}

minutes offset_at(const ZoneRule& rule, sys_seconds utc) {
    if (rule.eu_summer_time && in_eu_summer(utc)) {
        return rule.standard_offset + hours{1};
    }
    return rule.standard_offset;
}

} // namespace

Date RawObservation::local_date() const {
    return Date{std::chrono::floor<std::chrono::days>(instant + offset)};
}

int RawObservation::local_hour() const {
    const auto local = instant + offset;
    const auto day_start = std::chrono::floor<std::chrono::days>(local);
    return static_cast<int>(std::chrono::duration_cast<hours>(local - day_start).count());
}

ZoneRule ZoneRule::parse(std::string_view name) {
    if (name == "CET" || name == "CET/CEST" || name == "Europe/Berlin" || name == "Europe/Vienna" ||
        name == "Europe/Brussels" || name == "Europe/Paris" || name == "Europe/Amsterdam") {
        return ZoneRule{minutes{60}, true};
    }
    if (name == "EET") {
        return ZoneRule{minutes{120}, true};
    }
    if (name == "WET") {
        return ZoneRule{minutes{0}, true};
    }
    if (name == "UTC" || name == "Z") {
        return ZoneRule{minutes{0}, false};
    }
    if (name.size() == 6 && (name[0] == '+' || name[0] == '-') && name[3] == ':') {
        int oh = 0, om = 0;
        if (parse_uint(name.substr(1, 2), oh) && parse_uint(name.substr(4, 2), om)) {
            const int sign = name[0] == '-' ? -1 : 1;
            return ZoneRule{minutes{sign * (oh * 60 + om)}, false};
        }
    }
    throw Error(Errc::InvalidArgument, "unknown timezone rule '" + std::string(name) + "'");
}

ParseResult parse_entsoe_csv(const std::filesystem::path& path, const std::string& zone,
                             const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::FileUnreadable, "cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> ts_idx;
    std::optional<std::size_t> price_idx;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto header = split_fields(line, options.delimiter);
        if (!header.empty() && header.front().starts_with("\xEF\xBB\xBF")) {
            header.front().erase(0, 3);
        }
        for (std::size_t i = 0; i < header.size(); ++i) {
            const auto name = trim(header[i]);
            if (name == options.ts_col) {
                ts_idx = i;
            } else if (name == options.price_col) {
                price_idx = i;
            }
        }
        break;
    }
    if (!ts_idx || !price_idx) {
        throw Error(Errc::MalformedRow,
                    "header lacks column '" + (ts_idx ? options.price_col : options.ts_col) + "'",
                    line_no == 0 ? std::nullopt : std::optional<std::size_t>{line_no});
    }

    ParseResult result;
    std::map<sys_seconds, int> ambiguous_seen;
    std::vector<std::pair<RawObservation, std::size_t>> rows;  // with file order
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line, options.delimiter);
        if (fields.size() <= std::max(*ts_idx, *price_idx)) {
            throw Error(Errc::MalformedRow, "too few fields", line_no);
        }
        const auto price_text = trim(fields[*price_idx]);
        if (price_text.empty()) {
            ++result.dropped_empty;
            continue;
        }
        const auto price = parse_finite(price_text);
        if (!price) {
            throw Error(Errc::MalformedRow, "unparseable price '" + std::string(price_text) + "'", line_no);
        }
        const auto ts_text = trim(fields[*ts_idx]);
        auto stamp = parse_iso(ts_text);
        if (!stamp) {
            stamp = parse_mtu(ts_text);
        }
        if (!stamp) {
            throw Error(Errc::MalformedRow, "unparseable timestamp '" + std::string(ts_text) + "'", line_no);
        }
        const auto since_day = stamp->local - std::chrono::floor<std::chrono::days>(stamp->local);
        if (since_day % hours{1} != seconds{0}) {
            throw Error(Errc::MalformedRow, "timestamp not on an hour boundary", line_no);
        }

        RawObservation obs;
        obs.price = *price;
        obs.zone = zone;
        if (stamp->offset) {
            obs.offset = *stamp->offset;
            obs.instant = stamp->local - *stamp->offset;
        } else {
            const auto& rule = options.zone_rule;
            const sys_seconds as_standard = stamp->local - rule.standard_offset;
            const sys_seconds as_summer = stamp->local - (rule.standard_offset + hours{1});
            const bool standard_ok = offset_at(rule, as_standard) == rule.standard_offset;
            const bool summer_ok = rule.eu_summer_time && offset_at(rule, as_summer) != rule.standard_offset;
            if (standard_ok && summer_ok) {
                // Repeated autumn hour: first occurrence is summer time.
                const int seen = ambiguous_seen[stamp->local]++;
                obs.instant = seen == 0 ? as_summer : as_standard;
            } else if (standard_ok) {
                obs.instant = as_standard;
            } else if (summer_ok) {
                obs.instant = as_summer;
            } else {
                throw Error(Errc::MalformedRow, "local time does not exist (spring-forward gap)", line_no);
            }
            obs.offset = offset_at(rule, obs.instant);
        }
        rows.emplace_back(std::move(obs), rows.size());
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first.instant < b.first.instant; });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i + 1 < rows.size() && rows[i + 1].first.instant == rows[i].first.instant) {
            continue;  // a later row for the same instant wins
        }
        result.observations.push_back(std::move(rows[i].first));
    }
    if (result.observations.empty()) {
        throw Error(Errc::EmptyInput, "no valid rows in " + path.string());
    }
    return result;
}

HourlySeries::HourlySeries(std::string zone, Date start_day, std::vector<double> values)
    : zone_(std::move(zone)), start_day_(start_day), values_(std::move(values)) {
    if (!start_day_.ok()) {
        throw Error(Errc::InvalidArgument, "invalid start day");
    }
    if (values_.size() % kHoursPerDay != 0) {
        throw Error(Errc::InvalidArgument,
                    "series length " + std::to_string(values_.size()) + " is not a multiple of 24");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(Errc::InvalidArgument, "non-finite value at hour " + std::to_string(i));
        }
    }
}

Date HourlySeries::end_day() const {
    if (values_.empty()) {
        return add_days(start_day_, -1);
    }
    return add_days(start_day_, static_cast<long>(days()) - 1);
}

bool HourlySeries::covers(const Date& day) const {
    const long offset = days_between(start_day_, day);
    return offset >= 0 && static_cast<std::size_t>(offset) < days();
}

std::size_t HourlySeries::hour_index(const Date& day) const {
    if (!covers(day)) {
        throw Error(Errc::OutOfRange, format_date(day) + " is not covered by the series");
    }
    return static_cast<std::size_t>(days_between(start_day_, day)) * kHoursPerDay;
}

std::span<const double> HourlySeries::day_values(const Date& day) const {
    return values().subspan(hour_index(day), kHoursPerDay);
}

MarketDay market_day(const HourlySeries& series, const Date& day) {
    MarketDay out{day, {}};
    const auto v = series.day_values(day);
    std::copy(v.begin(), v.end(), out.hours.begin());
    return out;
}

HourlySeries normalize_dst(const std::vector<RawObservation>& observations) {
    if (observations.empty()) {
        throw Error(Errc::EmptyInput, "no observations");
    }
    std::vector<RawObservation> obs = observations;
    std::stable_sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.instant < b.instant; });
    const std::string zone = obs.front().zone;

    // Day boundaries in the flattened observation list.
    std::vector<std::pair<std::size_t, std::size_t>> day_ranges;
    std::vector<Date> dates;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (obs[i].zone != zone) {
            throw Error(Errc::InvalidArgument, "observations mix zones " + zone + " and " + obs[i].zone);
        }
        const Date d = obs[i].local_date();
        if (dates.empty() || d != dates.back()) {
            if (!dates.empty() && days_between(dates.back(), d) != 1) {
                throw Error(Errc::NonContiguous,
                            "days missing between " + format_date(dates.back()) + " and " + format_date(d));
            }
            dates.push_back(d);
            day_ranges.emplace_back(i, i);
        }
        day_ranges.back().second = i + 1;
    }

    std::vector<double> values;
    values.reserve(dates.size() * kHoursPerDay);
    for (std::size_t k = 0; k < dates.size(); ++k) {
        const auto [begin, end] = day_ranges[k];
        const std::size_t n = end - begin;
        const std::string day_name = format_date(dates[k]);
        if (n < 23 || n > 25) {
            throw Error(Errc::GapTooLarge, day_name + " has " + std::to_string(n) + " observations");
        }
        for (std::size_t i = begin + 1; i < end; ++i) {
            if (obs[i].instant - obs[i - 1].instant != hours{1}) {
                throw Error(Errc::GapTooLarge, day_name + " has a gap inside the day");
            }
        }
        const bool offset_changes = obs[begin].offset != obs[end - 1].offset;
        std::array<int, kHoursPerDay> seen{};
        for (std::size_t i = begin; i < end; ++i) {
            ++seen[static_cast<std::size_t>(obs[i].local_hour())];
        }
        if (n == 24) {
            if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
                throw Error(Errc::GapTooLarge, day_name + " does not cover hours 0-23 exactly once");
            }
            for (std::size_t i = begin; i < end; ++i) {
                values.push_back(obs[i].price);
            }
        } else if (n == 23) {
            const auto missing = std::find(seen.begin(), seen.end(), 0);
            if (!offset_changes || std::count(seen.begin(), seen.end(), 0) != 1) {
                throw Error(Errc::GapTooLarge, day_name + " has 23 hours but is not a spring-forward day");
            }
            const int missing_hour = static_cast<int>(missing - seen.begin());
            std::size_t next = begin;  // first observation after the skipped hour
            while (next < end && obs[next].local_hour() < missing_hour) {
                ++next;
            }
            for (std::size_t i = begin; i < next; ++i) {
                values.push_back(obs[i].price);
            }
            const bool has_prev = next > 0;
            const bool has_next = next < obs.size();
            double fill = 0.0;
            if (has_prev && has_next) {
                fill = 0.5 * (obs[next - 1].price + obs[next].price);
            } else {
                fill = has_prev ? obs[next - 1].price : obs[next].price;
            }
            values.push_back(fill);
            for (std::size_t i = next; i < end; ++i) {
                values.push_back(obs[i].price);
            }
        } else {
            const auto twice = std::find(seen.begin(), seen.end(), 2);
            if (!offset_changes || twice == seen.end() || std::count(seen.begin(), seen.end(), 1) != 23) {
                throw Error(Errc::GapTooLarge, day_name + " has 25 hours but is not a fall-back day");
            }
            const int repeated = static_cast<int>(twice - seen.begin());
            for (std::size_t i = begin; i < end; ++i) {
                if (obs[i].local_hour() == repeated) {
                    values.push_back(0.5 * (obs[i].price + obs[i + 1].price));
                    ++i;
                } else {
                    values.push_back(obs[i].price);
                }
            }
        }
    }
    return HourlySeries(zone, dates.front(), std::move(values));
}

void write_canonical(const HourlySeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::Io, "cannot write " + path.string());
    }
    out << "date,hour,price\n";
    char buf[64];
    for (std::size_t d = 0; d < series.days(); ++d) {
        const std::string date = format_date(add_days(series.start_day(), static_cast<long>(d)));
        for (int h = 0; h < kHoursPerDay; ++h) {
            const double v = series[d * kHoursPerDay + static_cast<std::size_t>(h)];
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out << date << ',' << h << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
        }
    }
    if (!out) {
        throw Error(Errc::Io, "write failed for " + path.string());
    }
}

HourlySeries read_canonical(const std::filesystem::path& path, const std::string& zone) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::FileUnreadable, "cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || trim(line) != "date,hour,price") {
        throw Error(Errc::FormatViolation, "expected header 'date,hour,price'", line_no);
    }
    std::optional<Date> start;
    Date expected_date{};
    int expected_hour = 0;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty()) {
            continue;
        }
        const auto fields = split_fields(row, ',');
        if (fields.size() != 3) {
            throw Error(Errc::FormatViolation, "expected 3 fields", line_no);
        }
        Date date{};
        try {
            date = parse_date(fields[0]);
        } catch (const Error&) {
            throw Error(Errc::FormatViolation, "bad date '" + fields[0] + "'", line_no);
        }
        int hour = 0;
        if (!parse_uint(fields[1], hour) || hour > 23) {
            throw Error(Errc::FormatViolation, "bad hour '" + fields[1] + "'", line_no);
        }
        const auto price = parse_finite(fields[2]);
        if (!price) {
            throw Error(Errc::FormatViolation, "bad price '" + fields[2] + "'", line_no);
        }
        if (!start) {
            if (hour != 0) {
                throw Error(Errc::FormatViolation, "first row must be hour 0", line_no);
            }
            start = date;
            expected_date = date;
        }
        if (date != expected_date || hour != expected_hour) {
            throw Error(Errc::FormatViolation,
                        "expected " + format_date(expected_date) + " hour " + std::to_string(expected_hour), line_no);
        }
        values.push_back(*price);
        if (++expected_hour == kHoursPerDay) {
            expected_hour = 0;
            expected_date = add_days(expected_date, 1);
        }
    }
    if (!start) {
        throw Error(Errc::FormatViolation, "no data rows", line_no);
    }
    if (values.size() % kHoursPerDay != 0) {
        throw Error(Errc::FormatViolation,
                    "row count " + std::to_string(values.size()) + " is not a multiple of 24", line_no);
    }
    return HourlySeries(zone, *start, std::move(values));
}

HourlySeries slice_window(const HourlySeries& series, const Date& end_day, std::size_t n_days) {
    if (n_days == 0) {
        throw Error(Errc::InvalidArgument, "window must span at least one day");
    }
    const Date first = add_days(end_day, -static_cast<long>(n_days) + 1);
    if (!series.covers(first) || !series.covers(end_day)) {
        throw Error(Errc::OutOfRange, "series " + format_date(series.start_day()) + ".." +
                                          format_date(series.end_day()) + " does not cover " + format_date(first) +
                                          ".." + format_date(end_day));
    }
    const auto all = series.values();
    const auto begin = series.hour_index(first);
    std::vector<double> values(all.begin() + static_cast<std::ptrdiff_t>(begin),
                               all.begin() + static_cast<std::ptrdiff_t>(begin + n_days * kHoursPerDay));
    return HourlySeries(series.zone(), first, std::move(values));
}

} // namespace epf::data
