#include "ehrvec/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>

#include <json.hpp>

namespace ehr {

using nlohmann::json;

std::optional<Domain> parse_domain(std::string_view s) {
    if (s == "diagnosis") return Domain::diagnosis;
    if (s == "medication") return Domain::medication;
    if (s == "procedure") return Domain::procedure;
    return std::nullopt;
}

std::optional<Source> parse_source(std::string_view s) {
    if (s == "encounter") return Source::encounter;
    if (s == "problem_list") return Source::problem_list;
    if (s == "medication_order") return Source::medication_order;
    if (s == "procedure_order") return Source::procedure_order;
    if (s == "image_order") return Source::image_order;
    if (s == "other_order") return Source::other_order;
    return std::nullopt;
}

std::optional<Sex> parse_sex(std::string_view s) {
    if (s == "F") return Sex::F;
    if (s == "M") return Sex::M;
    return std::nullopt;
}

std::string_view to_string(Domain d) {
    switch (d) {
        case Domain::diagnosis: return "diagnosis";
        case Domain::medication: return "medication";
        case Domain::procedure: return "procedure";
    }
    return "?";
}

std::string_view to_string(Source s) {
    switch (s) {
        case Source::encounter: return "encounter";
        case Source::problem_list: return "problem_list";
        case Source::medication_order: return "medication_order";
        case Source::procedure_order: return "procedure_order";
        case Source::image_order: return "image_order";
        case Source::other_order: return "other_order";
    }
    return "?";
}

std::string_view to_string(Sex s) { return s == Sex::F ? "F" : "M"; }

std::string ConceptCode::to_string() const {
    return std::string(ehr::to_string(domain)) + ":" + code;
}

namespace {

[[noreturn]] void fail(size_t line, const std::string& what) {
    throw ParseError("line " + std::to_string(line) + ": " + what);
}

std::string get_string(const json& j, const char* field, size_t line) {
    if (!j.contains(field) || !j[field].is_string())
        fail(line, std::string("missing or non-string field '") + field + "'");
    return j[field].get<std::string>();
}

Date get_date(const json& j, const char* field, size_t line) {
    auto d = Date::parse(get_string(j, field, line));
    if (!d) fail(line, std::string("invalid date in field '") + field + "'");
    return *d;
}

json parse_line(const std::string& raw, size_t line) {
    json j = json::parse(raw, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(line, "malformed JSON object");
    return j;
}

}  // namespace

std::vector<EventRecord> parse_events(std::istream& in) {
    std::vector<EventRecord> out;
    std::string raw;
    size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (raw.empty()) continue;
        json j = parse_line(raw, line);
        EventRecord e;
        e.patient_id = get_string(j, "patient_id", line);
        if (e.patient_id.empty()) fail(line, "empty patient_id");
        e.date = get_date(j, "date", line);
        e.concept_code.code = get_string(j, "code", line);
        if (e.concept_code.code.empty()) fail(line, "empty code");
        auto dom = parse_domain(get_string(j, "domain", line));
        if (!dom) fail(line, "unknown domain token");
        e.concept_code.domain = *dom;
        auto src = parse_source(get_string(j, "source", line));
        if (!src) fail(line, "unknown source token");
        e.source = *src;
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<PatientRecord> parse_patients(std::istream& in) {
    std::vector<PatientRecord> out;
    std::string raw;
    size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (raw.empty()) continue;
        json j = parse_line(raw, line);
        PatientRecord p;
        p.patient_id = get_string(j, "patient_id", line);
        if (p.patient_id.empty()) fail(line, "empty patient_id");
        auto sex = parse_sex(get_string(j, "sex", line));
        if (!sex) fail(line, "unknown sex token");
        p.sex = *sex;
        p.birth_date = get_date(j, "birth_date", line);
        p.clinic_id = get_string(j, "clinic_id", line);
        out.push_back(std::move(p));
    }
    return out;
}

namespace {
template <typename T>
std::vector<T> parse_file(const std::string& path,
                          std::vector<T> (*fn)(std::istream&)) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return fn(in);
}
}  // namespace

std::vector<EventRecord> parse_events_file(const std::string& path) {
    return parse_file(path, parse_events);
}

std::vector<PatientRecord> parse_patients_file(const std::string& path) {
    return parse_file(path, parse_patients);
}

Vocabulary::Vocabulary(std::vector<ConceptCode> codes,
                       std::vector<int64_t> freq)
    : codes_(std::move(codes)), freq_(std::move(freq)) {
    index_.reserve(codes_.size());
    for (size_t i = 0; i < codes_.size(); ++i) index_.emplace(codes_[i], i);
}

std::optional<size_t> Vocabulary::index_of(const ConceptCode& c) const {
    auto it = index_.find(c);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Vocabulary build_vocabulary(const std::vector<EventRecord>& events) {
    if (events.empty())
        throw std::invalid_argument("build_vocabulary: no events");
    // (domain, code) map gives the lexicographic tie-break order directly.
    std::map<std::pair<int, std::string>, int64_t> counts;
    for (const auto& e : events)
        ++counts[{int(e.concept_code.domain), e.concept_code.code}];

    std::vector<std::pair<ConceptCode, int64_t>> entries;
    entries.reserve(counts.size());
    for (auto& [key, n] : counts)
        entries.push_back({{key.second, Domain(key.first)}, n});
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) {
                         return a.second > b.second;
                     });

    std::vector<ConceptCode> codes;
    std::vector<int64_t> freq;
    for (auto& [c, n] : entries) {
        codes.push_back(std::move(c));
        freq.push_back(n);
    }
    return Vocabulary(std::move(codes), std::move(freq));
}

std::vector<PatientTimeline> build_timelines(
    const std::vector<EventRecord>& events, const Vocabulary& vocab) {
    // patient -> date -> codes, keyed maps keep output deterministic.
    std::map<std::string, std::map<Date, std::vector<uint32_t>>> grouped;
    for (const auto& e : events) {
        auto idx = vocab.index_of(e.concept_code);
        if (!idx)
            throw std::invalid_argument("build_timelines: concept not in vocabulary: " +
                                        e.concept_code.to_string());
        grouped[e.patient_id][e.date].push_back(uint32_t(*idx));
    }
    std::vector<PatientTimeline> out;
    out.reserve(grouped.size());
    for (auto& [pid, by_date] : grouped) {
        PatientTimeline t;
        t.patient_id = pid;
        for (auto& [date, codes] : by_date)
            t.visits.push_back({date, std::move(codes)});
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace ehr
