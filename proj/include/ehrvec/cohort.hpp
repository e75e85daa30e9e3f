#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ehrvec/types.hpp"

namespace ehr {

struct CaseCriteria {
    std::unordered_set<std::string> qualifying_codes;  // diagnosis codes
    int window_days = 365;
    int min_encounters = 3;
    int min_age_years = 50;
    int max_age_years_exclusive = 85;
    std::unordered_set<Source> qualifying_sources = {
        Source::encounter, Source::problem_list, Source::medication_order};
};

// The 25 bundled qualifying diagnosis codes (398.91 .. 428.9).
const std::vector<std::string>& default_qualifying_codes();
CaseCriteria default_case_criteria();
std::vector<std::string> load_qualifying_codes_file(const std::string& path);

enum class CohortStatus { case_, control };

struct CohortLabel {
    std::string patient_id;
    CohortStatus status;
    Date index_date;                           // HFDx; controls inherit it
    std::optional<std::string> matched_case_id;  // controls only
};

// Scans sorted, per-day-deduplicated qualifying dates with an anchor at the
// first date. A date more than window_days past the anchor re-anchors the
// scan there; the anchor date is returned as soon as min_encounters dates
// (anchor inclusive) fall within window_days of the anchor.
std::optional<Date> find_hf_diagnosis_date(const std::vector<Date>& dates,
                                           const CaseCriteria& criteria);

// A patient is a case iff the re-anchoring scan over their qualifying
// events (qualifying code, qualifying source, deduplicated per day) yields
// a date at which their completed age is within [min, max). Output ordered
// by patient_id.
std::vector<CohortLabel> identify_cases(const std::vector<EventRecord>& events,
                                        const std::vector<PatientRecord>& patients,
                                        const CaseCriteria& criteria);

struct MatchStats {
    size_t n_cases = 0;
    size_t n_controls = 0;
    double mean_controls_per_case = 0.0;
};

// For each case, in ascending HFDx order (ties by patient_id), draws up to
// max_per_case eligible candidates uniformly without replacement across
// cases. Eligibility: same clinic and sex, same 5-year age band at the case
// HFDx, no qualifying code in any source in the 365 days before HFDx, first
// encounter within +-365 days of the case's first encounter, and at least
// one encounter on or after HFDx - 30 days.
// Candidates are all patients that are not cases.
std::vector<CohortLabel> match_controls(
    const std::vector<CohortLabel>& cases,
    const std::vector<PatientRecord>& patients,
    const std::vector<EventRecord>& events, const CaseCriteria& criteria,
    uint64_t seed, size_t max_per_case = 10, MatchStats* stats = nullptr);

}  // namespace ehr
