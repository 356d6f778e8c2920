#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>

#include "stgam/types.hpp"

namespace stgam {

struct TraceParseResult {
    std::map<std::string, Trace> traces;
    std::size_t total_rows = 0;
    std::size_t malformed_rows = 0;
    std::size_t duplicate_rows = 0;  // identical (user, timestamp), first kept
};

// Trace CSV: header `user_id,timestamp,lat,lon`. Timestamps are integer epoch
// seconds or ISO-8601 `YYYY-MM-DDThh:mm:ssZ`. Rows with out-of-range
// coordinates are counted as malformed; more than 50% malformed rows aborts.
TraceParseResult parse_traces(const std::string& path);
TraceParseResult parse_traces_stream(std::istream& in, const std::string& origin);

// Demographics CSV: header `user_id,gender,age_group,working_profile`.
// Empty fields mean missing; unknown tokens are a parse error naming the row.
std::map<std::string, DemographicRecord> parse_demographics(const std::string& path);
std::map<std::string, DemographicRecord> parse_demographics_stream(std::istream& in,
                                                                   const std::string& origin);

void write_traces_csv(std::ostream& out, const std::map<std::string, Trace>& traces);
void write_demographics_csv(std::ostream& out,
                            const std::map<std::string, DemographicRecord>& demographics);

Dataset make_dataset(TraceParseResult traces, std::map<std::string, DemographicRecord> demographics);

}  // namespace stgam
