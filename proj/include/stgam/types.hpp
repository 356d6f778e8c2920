#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stgam {

struct LocationRecord {
    std::string user_id;
    std::int64_t timestamp;  // seconds since Unix epoch, UTC
    double latitude;         // degrees in [-90, 90]
    double longitude;        // degrees in [-180, 180]
};

struct Trace {
    std::string user_id;
    std::vector<LocationRecord> records;  // strictly increasing by timestamp
};

enum class Gender { Female, Male };
enum class AgeGroup { Under22, From22To32, From33Up };
enum class WorkingProfile { FullTime, PartTime, Other };

enum class Target { Gender, AgeGroup, WorkingProfile };

struct DemographicRecord {
    std::string user_id;
    std::optional<Gender> gender;
    std::optional<AgeGroup> age_group;
    std::optional<WorkingProfile> working_profile;
};

struct Dataset {
    std::map<std::string, Trace> traces;
    std::map<std::string, DemographicRecord> demographics;
};

// Canonical label tokens, in class-level order.
const std::vector<std::string>& class_levels(Target t);
const std::string& target_name(Target t);
std::optional<Target> target_from_name(const std::string& name);

// Label index of a user for the given target, or nullopt when unlabeled.
std::optional<int> label_index(const DemographicRecord& rec, Target t);

// UTC calendar helpers (proleptic Gregorian, no leap seconds).
std::int64_t utc_to_epoch(int year, int month, int day, int hour, int minute, int second);
std::string epoch_to_iso(std::int64_t epoch);
// 0 = Monday .. 6 = Sunday.
int day_of_week_utc(std::int64_t epoch);

}  // namespace stgam
