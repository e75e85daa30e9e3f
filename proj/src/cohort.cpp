#include "ehrvec/cohort.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "ehrvec/rng.hpp"

namespace ehr {

const std::vector<std::string>& default_qualifying_codes() {
    static const std::vector<std::string> codes = {
        "398.91", "402.01", "402.11", "402.91", "404.01", "404.03", "404.11",
        "404.13", "404.91", "404.93", "428.0",  "428.1",  "428.20", "428.21",
        "428.22", "428.23", "428.30", "428.31", "428.32", "428.33", "428.40",
        "428.41", "428.42", "428.43", "428.9",
    };
    return codes;
}

CaseCriteria default_case_criteria() {
    CaseCriteria c;
    c.qualifying_codes.insert(default_qualifying_codes().begin(),
                              default_qualifying_codes().end());
    return c;
}

std::vector<std::string> load_qualifying_codes_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> codes;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (!line.empty()) codes.push_back(line);
    }
    if (codes.empty()) throw std::runtime_error("no qualifying codes in " + path);
    return codes;
}

std::optional<Date> find_hf_diagnosis_date(const std::vector<Date>& dates,
                                           const CaseCriteria& criteria) {
    for (size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i - 1] < dates[i]))
            throw std::invalid_argument(
                "find_hf_diagnosis_date: dates not sorted ascending");
    if (dates.empty()) return std::nullopt;
    size_t anchor = 0;
    int count = 1;
    for (size_t i = 1; i < dates.size(); ++i) {
        if (dates[i] - dates[anchor] > criteria.window_days) {
            anchor = i;
            count = 1;
        } else if (++count >= criteria.min_encounters) {
            return dates[anchor];
        }
    }
    return std::nullopt;
}

namespace {

bool is_qualifying_code(const EventRecord& e, const CaseCriteria& c) {
    return e.concept_code.domain == Domain::diagnosis &&
           c.qualifying_codes.count(e.concept_code.code) > 0;
}

// Qualifying dates per patient (qualifying code + source), deduplicated to
// one encounter per calendar day, sorted ascending.
std::map<std::string, std::vector<Date>> qualifying_dates(
    const std::vector<EventRecord>& events, const CaseCriteria& c) {
    std::map<std::string, std::vector<Date>> out;
    for (const auto& e : events)
        if (is_qualifying_code(e, c) && c.qualifying_sources.count(e.source))
            out[e.patient_id].push_back(e.date);
    for (auto& [pid, dates] : out) {
        std::sort(dates.begin(), dates.end());
        dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
    }
    return out;
}

// Band index for "5-year age intervals" anchored at the minimum case age;
// floor division so out-of-range ages land in bands no case occupies.
int age_band(int age, const CaseCriteria& c) {
    int rel = age - c.min_age_years;
    return rel >= 0 ? rel / 5 : (rel - 4) / 5;
}

}  // namespace

std::vector<CohortLabel> identify_cases(
    const std::vector<EventRecord>& events,
    const std::vector<PatientRecord>& patients,
    const CaseCriteria& criteria) {
    std::unordered_map<std::string, const PatientRecord*> by_id;
    for (const auto& p : patients) by_id[p.patient_id] = &p;

    std::vector<CohortLabel> out;
    for (const auto& [pid, dates] : qualifying_dates(events, criteria)) {
        auto hfdx = find_hf_diagnosis_date(dates, criteria);
        if (!hfdx) continue;
        auto it = by_id.find(pid);
        if (it == by_id.end())
            throw std::invalid_argument("identify_cases: no patient record for " +
                                        pid);
        int age = age_in_years(it->second->birth_date, *hfdx);
        if (age < criteria.min_age_years ||
            age >= criteria.max_age_years_exclusive)
            continue;
        out.push_back({pid, CohortStatus::case_, *hfdx, std::nullopt});
    }
    return out;  // map iteration already orders by patient_id
}

std::vector<CohortLabel> match_controls(
    const std::vector<CohortLabel>& cases,
    const std::vector<PatientRecord>& patients,
    const std::vector<EventRecord>& events, const CaseCriteria& criteria,
    uint64_t seed, size_t max_per_case, MatchStats* stats) {
    std::unordered_map<std::string, const PatientRecord*> by_id;
    for (const auto& p : patients) by_id[p.patient_id] = &p;

    std::unordered_set<std::string> case_ids;
    for (const auto& c : cases) case_ids.insert(c.patient_id);

    auto qual = qualifying_dates(events, criteria);

    // First and sorted encounter-source dates per patient.
    std::unordered_map<std::string, std::vector<Date>> encounters;
    for (const auto& e : events)
        if (e.source == Source::encounter)
            encounters[e.patient_id].push_back(e.date);
    for (auto& [pid, dates] : encounters) std::sort(dates.begin(), dates.end());

    std::vector<const PatientRecord*> candidates;
    for (const auto& p : patients)
        if (!case_ids.count(p.patient_id)) candidates.push_back(&p);
    std::sort(candidates.begin(), candidates.end(),
              [](const auto* a, const auto* b) {
                  return a->patient_id < b->patient_id;
              });

    std::vector<const CohortLabel*> order;
    for (const auto& c : cases) order.push_back(&c);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
        if (a->index_date != b->index_date) return a->index_date < b->index_date;
        return a->patient_id < b->patient_id;
    });

    Rng rng(seed);
    std::unordered_set<std::string> used;  // no reuse across cases
    std::vector<CohortLabel> out;
    for (const auto* cs : order) {
        auto cit = by_id.find(cs->patient_id);
        if (cit == by_id.end())
            throw std::invalid_argument("match_controls: no patient record for " +
                                        cs->patient_id);
        const PatientRecord& cp = *cit->second;
        const Date hfdx = cs->index_date;
        const int case_band = age_band(age_in_years(cp.birth_date, hfdx), criteria);
        auto cenc = encounters.find(cs->patient_id);
        if (cenc == encounters.end()) continue;  // no office visits to anchor on
        const Date case_first = cenc->second.front();

        std::vector<const PatientRecord*> eligible;
        for (const auto* cand : candidates) {
            if (used.count(cand->patient_id)) continue;
            if (cand->clinic_id != cp.clinic_id || cand->sex != cp.sex) continue;
            if (age_band(age_in_years(cand->birth_date, hfdx), criteria) !=
                case_band)
                continue;
            auto q = qual.find(cand->patient_id);
            if (q != qual.end()) {
                bool recent_hf = std::any_of(
                    q->second.begin(), q->second.end(), [&](Date d) {
                        return d >= hfdx.plus_days(-365) && d < hfdx;
                    });
                if (recent_hf) continue;
            }
            auto enc = encounters.find(cand->patient_id);
            if (enc == encounters.end()) continue;
            int gap = enc->second.front() - case_first;
            if (gap < -365 || gap > 365) continue;
            if (enc->second.back() < hfdx.plus_days(-30)) continue;
            eligible.push_back(cand);
        }
        size_t take = std::min(max_per_case, eligible.size());
        // Partial Fisher-Yates draw without replacement.
        for (size_t i = 0; i < take; ++i) {
            size_t j = i + rng.below(eligible.size() - i);
            std::swap(eligible[i], eligible[j]);
            out.push_back({eligible[i]->patient_id, CohortStatus::control, hfdx,
                           cs->patient_id});
            used.insert(eligible[i]->patient_id);
        }
    }
    if (stats) {
        stats->n_cases = cases.size();
        stats->n_controls = out.size();
        stats->mean_controls_per_case =
            cases.empty() ? 0.0 : double(out.size()) / double(cases.size());
    }
    return out;
}

}  // namespace ehr
