#include "stgam/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "stgam/errors.hpp"

namespace stgam {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::optional<std::int64_t> parse_int(const std::string& s) {
    std::int64_t v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) return std::nullopt;
    return v;
}

std::optional<double> parse_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

// `YYYY-MM-DDThh:mm:ssZ` only; anything else must be integer epoch seconds.
std::optional<std::int64_t> parse_timestamp(const std::string& s) {
    if (auto v = parse_int(s)) return v;
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
        s[16] != ':' || s[19] != 'Z')
        return std::nullopt;
    auto num = [&](int off, int len) -> std::optional<int> {
        int v = 0;
        for (int i = off; i < off + len; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    auto y = num(0, 4), mo = num(5, 2), d = num(8, 2), h = num(11, 2), mi = num(14, 2),
         se = num(17, 2);
    if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
    if (*mo < 1 || *mo > 12 || *d < 1 || *d > 31 || *h > 23 || *mi > 59 || *se > 59)
        return std::nullopt;
    return utc_to_epoch(*y, *mo, *d, *h, *mi, *se);
}

}  // namespace

TraceParseResult parse_traces_stream(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line))
        throw DataError("ingest.parse_traces: empty file: " + origin);

    TraceParseResult res;
    // Keep file order so duplicate resolution is "first occurrence wins".
    std::map<std::string, std::vector<LocationRecord>> raw;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++res.total_rows;
        auto f = split_csv(line);
        if (f.size() != 4 || f[0].empty()) {
            ++res.malformed_rows;
            continue;
        }
        auto ts = parse_timestamp(f[1]);
        auto lat = parse_real(f[2]);
        auto lon = parse_real(f[3]);
        if (!ts || *ts < 0 || !lat || !lon || *lat < -90.0 || *lat > 90.0 || *lon < -180.0 ||
            *lon > 180.0) {
            ++res.malformed_rows;
            continue;
        }
        raw[f[0]].push_back({f[0], *ts, *lat, *lon});
    }
    if (res.total_rows > 0 && 2 * res.malformed_rows > res.total_rows)
        throw DataError("ingest.parse_traces: more than 50% malformed rows in " + origin +
                        " (wrong file format?)");

    for (auto& [uid, recs] : raw) {
        std::stable_sort(recs.begin(), recs.end(),
                         [](const LocationRecord& a, const LocationRecord& b) {
                             return a.timestamp < b.timestamp;
                         });
        Trace t;
        t.user_id = uid;
        for (auto& r : recs) {
            if (!t.records.empty() && t.records.back().timestamp == r.timestamp) {
                ++res.duplicate_rows;
                continue;
            }
            t.records.push_back(std::move(r));
        }
        res.traces.emplace(uid, std::move(t));
    }
    return res;
}

TraceParseResult parse_traces(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("ingest.parse_traces: cannot open " + path);
    return parse_traces_stream(in, path);
}

namespace {

template <typename E>
std::optional<E> match_level(const std::string& token, const std::vector<std::string>& levels) {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (token == levels[i]) return static_cast<E>(i);
    return std::nullopt;
}

}  // namespace

std::map<std::string, DemographicRecord> parse_demographics_stream(std::istream& in,
                                                                   const std::string& origin) {
    std::string line;
    if (!std::getline(in, line))
        throw DataError("ingest.parse_demographics: empty file: " + origin);

    std::map<std::string, DemographicRecord> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        if (f.size() != 4 || f[0].empty())
            throw DataError("ingest.parse_demographics: malformed row in " + origin + ": " + line);
        DemographicRecord rec;
        rec.user_id = f[0];
        if (!f[1].empty()) {
            rec.gender = match_level<Gender>(lower(f[1]), class_levels(Target::Gender));
            if (!rec.gender)
                throw DataError("ingest.parse_demographics: row '" + f[0] +
                                "': unknown gender token '" + f[1] + "'");
        }
        if (!f[2].empty()) {
            rec.age_group = match_level<AgeGroup>(lower(f[2]), class_levels(Target::AgeGroup));
            if (!rec.age_group)
                throw DataError("ingest.parse_demographics: row '" + f[0] +
                                "': unknown age_group token '" + f[2] + "'");
        }
        if (!f[3].empty()) {
            rec.working_profile =
                match_level<WorkingProfile>(lower(f[3]), class_levels(Target::WorkingProfile));
            if (!rec.working_profile)
                throw DataError("ingest.parse_demographics: row '" + f[0] +
                                "': unknown working_profile token '" + f[3] + "'");
        }
        out[rec.user_id] = rec;
    }
    return out;
}

std::map<std::string, DemographicRecord> parse_demographics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("ingest.parse_demographics: cannot open " + path);
    return parse_demographics_stream(in, path);
}

void write_traces_csv(std::ostream& out, const std::map<std::string, Trace>& traces) {
    out << "user_id,timestamp,lat,lon\n";
    char buf[64];
    for (const auto& [uid, trace] : traces) {
        for (const auto& r : trace.records) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g", r.latitude, r.longitude);
            out << uid << ',' << r.timestamp << ',' << buf << '\n';
        }
    }
}

void write_demographics_csv(std::ostream& out,
                            const std::map<std::string, DemographicRecord>& demographics) {
    out << "user_id,gender,age_group,working_profile\n";
    for (const auto& [uid, rec] : demographics) {
        out << uid << ',';
        if (rec.gender) out << class_levels(Target::Gender)[static_cast<int>(*rec.gender)];
        out << ',';
        if (rec.age_group) out << class_levels(Target::AgeGroup)[static_cast<int>(*rec.age_group)];
        out << ',';
        if (rec.working_profile)
            out << class_levels(Target::WorkingProfile)[static_cast<int>(*rec.working_profile)];
        out << '\n';
    }
}

Dataset make_dataset(TraceParseResult traces,
                     std::map<std::string, DemographicRecord> demographics) {
    Dataset ds;
    ds.traces = std::move(traces.traces);
    ds.demographics = std::move(demographics);
    // Labels without a trace cannot contribute rows anywhere.
    std::erase_if(ds.demographics,
                  [&](const auto& kv) { return !ds.traces.contains(kv.first); });
    return ds;
}

}  // namespace stgam
