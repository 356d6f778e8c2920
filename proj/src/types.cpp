#include "stgam/types.hpp"

#include <array>
#include <cstdio>

namespace stgam {

namespace {

const std::vector<std::string> kGenderLevels = {"female", "male"};
const std::vector<std::string> kAgeLevels = {"lt22", "22to32", "ge33"};
const std::vector<std::string> kWorkLevels = {"full_time", "part_time", "other"};

const std::string kGenderName = "gender";
const std::string kAgeName = "age_group";
const std::string kWorkName = "working_profile";

// Howard Hinnant's days-from-civil algorithm.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

const std::vector<std::string>& class_levels(Target t) {
    switch (t) {
        case Target::Gender: return kGenderLevels;
        case Target::AgeGroup: return kAgeLevels;
        default: return kWorkLevels;
    }
}

const std::string& target_name(Target t) {
    switch (t) {
        case Target::Gender: return kGenderName;
        case Target::AgeGroup: return kAgeName;
        default: return kWorkName;
    }
}

std::optional<Target> target_from_name(const std::string& name) {
    if (name == kGenderName) return Target::Gender;
    if (name == kAgeName) return Target::AgeGroup;
    if (name == kWorkName) return Target::WorkingProfile;
    return std::nullopt;
}

std::optional<int> label_index(const DemographicRecord& rec, Target t) {
    switch (t) {
        case Target::Gender:
            if (!rec.gender) return std::nullopt;
            return static_cast<int>(*rec.gender);
        case Target::AgeGroup:
            if (!rec.age_group) return std::nullopt;
            return static_cast<int>(*rec.age_group);
        default:
            if (!rec.working_profile) return std::nullopt;
            return static_cast<int>(*rec.working_profile);
    }
}

std::int64_t utc_to_epoch(int year, int month, int day, int hour, int minute, int second) {
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string epoch_to_iso(std::int64_t epoch) {
    std::int64_t days = epoch / 86400;
    std::int64_t sod = epoch % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(sod / 3600), static_cast<int>((sod / 60) % 60),
                  static_cast<int>(sod % 60));
    return buf;
}

int day_of_week_utc(std::int64_t epoch) {
    std::int64_t days = epoch / 86400;
    if (epoch % 86400 < 0) days -= 1;
    // 1970-01-01 was a Thursday.
    return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

}  // namespace stgam
