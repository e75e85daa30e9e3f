#include "ehrvec/synthgen.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "ehrvec/cohort.hpp"
#include "ehrvec/rng.hpp"

namespace ehr {

namespace {

struct ClusterCodes {
    std::vector<ConceptCode> codes;  // all domains, cluster-local
};

std::vector<ClusterCodes> make_cluster_codes(const SynthConfig& cfg) {
    std::vector<ClusterCodes> out(cfg.n_clusters);
    for (size_t k = 0; k < cfg.n_clusters; ++k) {
        auto& cc = out[k].codes;
        for (size_t i = 0; i < cfg.diagnoses_per_cluster; ++i)
            cc.push_back({"D" + std::to_string(k) + "_" + std::to_string(i),
                          Domain::diagnosis});
        for (size_t i = 0; i < cfg.medications_per_cluster; ++i)
            cc.push_back({"M" + std::to_string(k) + "_" + std::to_string(i),
                          Domain::medication});
        for (size_t i = 0; i < cfg.procedures_per_cluster; ++i)
            cc.push_back({"P" + std::to_string(k) + "_" + std::to_string(i),
                          Domain::procedure});
    }
    return out;
}

Source source_for(Domain d, Rng& rng) {
    switch (d) {
        case Domain::diagnosis:
            return rng.next_double() < 0.85 ? Source::encounter
                                            : Source::problem_list;
        case Domain::medication: return Source::medication_order;
        case Domain::procedure: return Source::procedure_order;
    }
    return Source::encounter;
}

}  // namespace

SynthData generate(const SynthConfig& cfg) {
    if (cfg.n_clusters == 0 || cfg.n_patients == 0 || cfg.n_clinics == 0)
        throw std::invalid_argument("synthgen: empty configuration");
    if (cfg.hf_precursor_cluster >= cfg.n_clusters)
        throw std::invalid_argument("synthgen: hf_precursor_cluster out of range");
    if (cfg.visits_min < 1 || cfg.visits_max < cfg.visits_min ||
        cfg.codes_per_visit_min < 1 ||
        cfg.codes_per_visit_max < cfg.codes_per_visit_min)
        throw std::invalid_argument("synthgen: bad ranges");
    size_t per_cluster = cfg.diagnoses_per_cluster +
                         cfg.medications_per_cluster +
                         cfg.procedures_per_cluster;
    if (per_cluster == 0 || size_t(cfg.codes_per_visit_max) > per_cluster)
        throw std::invalid_argument("synthgen: codes_per_visit exceeds available codes");
    if (!(cfg.noise_rate >= 0.0 && cfg.noise_rate <= 1.0) ||
        !(cfg.hf_rate >= 0.0 && cfg.hf_rate <= 1.0))
        throw std::invalid_argument("synthgen: rates out of bounds");

    auto clusters = make_cluster_codes(cfg);
    std::vector<ConceptCode> all_codes;
    for (const auto& c : clusters)
        all_codes.insert(all_codes.end(), c.codes.begin(), c.codes.end());

    SynthData data;
    for (size_t k = 0; k < cfg.n_clusters; ++k)
        for (const auto& c : clusters[k].codes)
            data.code_clusters[c.to_string()] = k;

    Rng rng(cfg.seed);
    const Date base = *Date::from_ymd(2009, 1, 1);
    const auto& hf_codes = default_qualifying_codes();

    for (size_t p = 0; p < cfg.n_patients; ++p) {
        std::string pid = "p" + std::to_string(p);
        PatientRecord rec;
        rec.patient_id = pid;
        rec.sex = rng.next_double() < 0.5 ? Sex::F : Sex::M;
        rec.clinic_id = "clinic" + std::to_string(rng.below(cfg.n_clinics));

        // Latent clusters: 1-3 distinct, drawn uniformly.
        size_t n_own = 1 + rng.below(std::min<size_t>(3, cfg.n_clusters));
        std::vector<size_t> own;
        while (own.size() < n_own) {
            size_t k = rng.below(cfg.n_clusters);
            if (std::find(own.begin(), own.end(), k) == own.end())
                own.push_back(k);
        }
        std::sort(own.begin(), own.end());
        data.patient_clusters[pid] = own;

        bool carrier = std::find(own.begin(), own.end(),
                                 cfg.hf_precursor_cluster) != own.end();
        bool is_case = carrier && rng.next_double() < cfg.hf_rate;
        data.intended_status[pid] = is_case ? "case" : "control";

        // Visit schedule: jittered common start, 10-40 day gaps; cases get
        // enough history to hold an 18-month pre-HFDx window.
        Date d = base.plus_days(rng.range(0, 120));
        int n_visits = rng.range(cfg.visits_min, cfg.visits_max);
        std::vector<Date> visit_dates;
        for (int v = 0; v < n_visits; ++v) {
            visit_dates.push_back(d);
            d = d.plus_days(rng.range(10, 40));
        }
        // Cases need enough history for an 18-month pre-HFDx window; when an
        // HF process is active, controls get a comparable horizon so that
        // they still have encounters near any case's HFDx and stay
        // matchable.
        int target_span = is_case ? 560 : (cfg.hf_rate > 0.0 ? 800 : 0);
        while (visit_dates.back() - visit_dates.front() < target_span) {
            d = visit_dates.back().plus_days(rng.range(10, 40));
            visit_dates.push_back(d);
        }
        Date hfdx;
        if (is_case) {
            for (Date vd : visit_dates)
                if (vd - visit_dates.front() >= 560) {
                    hfdx = vd;
                    break;
                }
        }

        // Age chosen at the patient's (real or pseudo) index date so case
        // and control band distributions line up for matching.
        Date age_ref = is_case ? hfdx : visit_dates.front().plus_days(548);
        int age = rng.range(52, 83);
        rec.birth_date = age_ref.plus_days(-(age * 365 + rng.range(30, 330)));
        data.patients.push_back(rec);

        auto draw_code = [&](bool in_window) -> const ConceptCode& {
            if (is_case && in_window &&
                rng.next_double() < cfg.precursor_boost) {
                const auto& cc = clusters[cfg.hf_precursor_cluster].codes;
                return cc[rng.below(cc.size())];
            }
            if (cfg.noise_rate > 0.0 && rng.next_double() < cfg.noise_rate)
                return all_codes[rng.below(all_codes.size())];
            const auto& cc = clusters[own[rng.below(own.size())]].codes;
            return cc[rng.below(cc.size())];
        };

        for (size_t v = 0; v < visit_dates.size(); ++v) {
            Date vd = visit_dates[v];
            bool in_window = is_case && vd < hfdx && hfdx - vd <= 548;
            int n_codes = rng.range(cfg.codes_per_visit_min,
                                    cfg.codes_per_visit_max);
            for (int c = 0; c < n_codes; ++c) {
                const ConceptCode& code = draw_code(in_window);
                Source src = source_for(code.domain, rng);
                // First and last visits anchor the office-encounter
                // matching clauses.
                if (c == 0 && (v == 0 || v + 1 == visit_dates.size()))
                    src = code.domain == Domain::diagnosis ? Source::encounter
                                                           : src;
                data.events.push_back({pid, vd, code, src});
            }
        }
        // Guarantee office encounters at the start and end of the record.
        data.events.push_back({pid, visit_dates.front(),
                               {clusters[own[0]].codes[0].code,
                                clusters[own[0]].codes[0].domain},
                               Source::encounter});

        if (is_case) {
            // Three qualifying encounters within 365 days anchor HFDx.
            const std::string& q = hf_codes[rng.below(hf_codes.size())];
            for (int offset : {0, 90, 180})
                data.events.push_back({pid, hfdx.plus_days(offset),
                                       {q, Domain::diagnosis},
                                       Source::encounter});
        } else {
            // Encounter near the end of the record keeps controls eligible
            // for the "30 days before or after HFDx" clause.
            data.events.push_back({pid, visit_dates.back(),
                                   {clusters[own[0]].codes[0].code,
                                    clusters[own[0]].codes[0].domain},
                                   Source::encounter});
        }
    }
    return data;
}

void write_events_file(const std::vector<EventRecord>& events,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (const auto& e : events) {
        nlohmann::json j{{"patient_id", e.patient_id},
                         {"date", e.date.to_string()},
                         {"code", e.concept_code.code},
                         {"domain", std::string(to_string(e.concept_code.domain))},
                         {"source", std::string(to_string(e.source))}};
        out << j.dump() << "\n";
    }
}

void write_patients_file(const std::vector<PatientRecord>& patients,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (const auto& p : patients) {
        nlohmann::json j{{"patient_id", p.patient_id},
                         {"sex", std::string(to_string(p.sex))},
                         {"birth_date", p.birth_date.to_string()},
                         {"clinic_id", p.clinic_id}};
        out << j.dump() << "\n";
    }
}

void write_ground_truth_file(const SynthData& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    nlohmann::json j{{"code_clusters", data.code_clusters},
                     {"patient_clusters", data.patient_clusters},
                     {"intended_status", data.intended_status}};
    out << j.dump(2) << "\n";
}

}  // namespace ehr
