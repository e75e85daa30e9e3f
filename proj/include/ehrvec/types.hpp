#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ehrvec/date.hpp"

namespace ehr {

enum class Domain { diagnosis, medication, procedure };

enum class Source {
    encounter,
    problem_list,
    medication_order,
    procedure_order,
    image_order,
    other_order,
};

enum class Sex { F, M };

std::optional<Domain> parse_domain(std::string_view s);
std::optional<Source> parse_source(std::string_view s);
std::optional<Sex> parse_sex(std::string_view s);
std::string_view to_string(Domain d);
std::string_view to_string(Source s);
std::string_view to_string(Sex s);

// Vocabulary identity is the (code, domain) pair: the same code string in
// two domains names two distinct concepts.
struct ConceptCode {
    std::string code;
    Domain domain = Domain::diagnosis;

    bool operator==(const ConceptCode&) const = default;
    // "domain:code", the concept's spelling in the embedding file format.
    std::string to_string() const;
};

struct ConceptCodeHash {
    size_t operator()(const ConceptCode& c) const {
        return std::hash<std::string>{}(c.code) * 1315423911u ^
               size_t(c.domain);
    }
};

struct EventRecord {
    std::string patient_id;
    Date date;
    ConceptCode concept_code;
    Source source = Source::encounter;
};

struct PatientRecord {
    std::string patient_id;
    Sex sex = Sex::F;
    Date birth_date;
    std::string clinic_id;
};

// Bijection ConceptCode <-> [0, N) with occurrence counts. Indices are
// assigned by descending frequency, ties by lexicographic (domain, code).
class Vocabulary {
  public:
    Vocabulary() = default;
    Vocabulary(std::vector<ConceptCode> codes, std::vector<int64_t> freq);

    size_t size() const { return codes_.size(); }
    const ConceptCode& code_at(size_t i) const { return codes_[i]; }
    int64_t frequency(size_t i) const { return freq_[i]; }
    std::optional<size_t> index_of(const ConceptCode& c) const;

  private:
    std::vector<ConceptCode> codes_;
    std::vector<int64_t> freq_;
    std::unordered_map<ConceptCode, size_t, ConceptCodeHash> index_;
};

struct Visit {
    Date date;
    std::vector<uint32_t> codes;  // vocabulary indices, input order
};

struct PatientTimeline {
    std::string patient_id;
    std::vector<Visit> visits;  // strictly increasing by date
};

}  // namespace ehr
