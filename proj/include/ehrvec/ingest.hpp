#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "ehrvec/types.hpp"

namespace ehr {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON-lines event stream, fields {patient_id, date, code, domain, source}.
// Malformed lines raise ParseError naming the line number and field.
std::vector<EventRecord> parse_events(std::istream& in);
std::vector<EventRecord> parse_events_file(const std::string& path);

// JSON-lines patient stream, fields {patient_id, sex, birth_date, clinic_id}.
std::vector<PatientRecord> parse_patients(std::istream& in);
std::vector<PatientRecord> parse_patients_file(const std::string& path);

// Distinct (code, domain) pairs with occurrence counts, indexed by
// descending frequency. Throws on empty input.
Vocabulary build_vocabulary(const std::vector<EventRecord>& events);

// One timeline per patient, events grouped by date into visits, visits
// sorted by date. Within a visit the stored order is input order; duplicate
// same-day same-code occurrences are kept. Timelines are ordered by
// patient_id. Throws if an event's concept is absent from vocab.
std::vector<PatientTimeline> build_timelines(
    const std::vector<EventRecord>& events, const Vocabulary& vocab);

}  // namespace ehr
