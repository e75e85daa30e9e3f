#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehrvec/cohort.hpp"
#include "ehrvec/embedding_space.hpp"
#include "ehrvec/features.hpp"
#include "ehrvec/ingest.hpp"
#include "ehrvec/predict.hpp"
#include "ehrvec/skipgram.hpp"
#include "ehrvec/synthgen.hpp"

namespace {

using namespace ehr;
using nlohmann::json;

ConceptCode parse_concept_arg(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw std::runtime_error("expected <domain>:<code>, got '" + s + "'");
    auto dom = parse_domain(s.substr(0, colon));
    if (!dom) throw std::runtime_error("unknown domain in '" + s + "'");
    return {s.substr(colon + 1), *dom};
}

std::vector<CohortLabel> load_cohort_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<CohortLabel> out;
    std::string raw;
    size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (raw.empty()) continue;
        json j = json::parse(raw, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw std::runtime_error(path + ": malformed JSON at line " +
                                     std::to_string(line));
        CohortLabel l;
        l.patient_id = j.at("patient_id").get<std::string>();
        std::string status = j.at("status").get<std::string>();
        if (status == "case")
            l.status = CohortStatus::case_;
        else if (status == "control")
            l.status = CohortStatus::control;
        else
            throw std::runtime_error(path + ": unknown status at line " +
                                     std::to_string(line));
        auto d = Date::parse(j.at("index_date").get<std::string>());
        if (!d)
            throw std::runtime_error(path + ": invalid index_date at line " +
                                     std::to_string(line));
        l.index_date = *d;
        if (j.contains("matched_case_id"))
            l.matched_case_id = j["matched_case_id"].get<std::string>();
        out.push_back(std::move(l));
    }
    return out;
}

void write_cohort_file(const std::vector<CohortLabel>& labels,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (const auto& l : labels) {
        json j{{"patient_id", l.patient_id},
               {"status", l.status == CohortStatus::case_ ? "case" : "control"},
               {"index_date", l.index_date.to_string()}};
        if (l.matched_case_id) j["matched_case_id"] = *l.matched_case_id;
        out << j.dump() << "\n";
    }
}

// Restricts events to patients named in a JSON-lines file with a
// patient_id field (a cohort file works directly).
std::vector<EventRecord> filter_events(std::vector<EventRecord> events,
                                       const std::string& ids_path) {
    std::ifstream in(ids_path);
    if (!in) throw std::runtime_error("cannot open " + ids_path);
    std::unordered_set<std::string> keep;
    std::string raw;
    while (std::getline(in, raw)) {
        if (raw.empty()) continue;
        json j = json::parse(raw, nullptr, false);
        if (j.is_discarded() || !j.contains("patient_id"))
            throw std::runtime_error(ids_path + ": expected JSON lines with patient_id");
        keep.insert(j["patient_id"].get<std::string>());
    }
    std::erase_if(events, [&](const EventRecord& e) {
        return !keep.count(e.patient_id);
    });
    return events;
}

// Embedding rows re-aligned to the corpus vocabulary; codes the embedding
// does not cover get zero rows and stay out of the coverage set.
std::pair<EmbeddingMatrix, std::unordered_set<uint32_t>> align_embedding(
    const EmbeddingMatrix& emb, const Vocabulary& emb_vocab,
    const Vocabulary& corpus_vocab) {
    EmbeddingMatrix aligned(corpus_vocab.size(), emb.d);
    std::unordered_set<uint32_t> coverage;
    for (size_t i = 0; i < corpus_vocab.size(); ++i) {
        auto j = emb_vocab.index_of(corpus_vocab.code_at(i));
        if (!j) continue;
        auto src = emb.row(*j);
        std::copy(src.begin(), src.end(), aligned.row(i).begin());
        coverage.insert(uint32_t(i));
    }
    return {std::move(aligned), std::move(coverage)};
}

FeatureMatrix featurize(const std::vector<EventRecord>& events,
                        const std::vector<CohortLabel>& cohort,
                        const EmbeddingMatrix* emb,
                        const Vocabulary* emb_vocab) {
    auto vocab = build_vocabulary(events);
    auto timelines = build_timelines(events, vocab);
    std::unordered_map<std::string, const PatientTimeline*> by_id;
    for (const auto& t : timelines) by_id[t.patient_id] = &t;

    EmbeddingMatrix aligned;
    std::unordered_set<uint32_t> coverage;
    if (emb) std::tie(aligned, coverage) = align_embedding(*emb, *emb_vocab, vocab);

    FeatureMatrix fm;
    fm.kind = emb ? FeatureKind::concept_vector : FeatureKind::one_hot_counts;
    fm.f = emb ? emb->d : vocab.size();
    static const PatientTimeline empty_timeline;
    for (const auto& l : cohort) {
        auto it = by_id.find(l.patient_id);
        const PatientTimeline& t =
            it == by_id.end() ? empty_timeline : *it->second;
        auto codes = observation_window(t, l.index_date);
        fm.rows.push_back(emb ? patient_vector(codes, aligned, coverage)
                              : one_hot_counts(codes, vocab.size()));
        fm.labels.push_back(l.status == CohortStatus::case_ ? 1 : 0);
        fm.patient_ids.push_back(l.patient_id);
    }
    return fm;
}

std::string feature_kind_name(FeatureKind k) {
    return k == FeatureKind::concept_vector ? "concept_vector"
                                            : "one_hot_counts";
}

json report_to_json(const EvalReport& r) {
    json j;
    j["classifier"] = std::string(to_string(r.classifier.kind));
    j["feature_kind"] = feature_kind_name(r.feature_kind);
    j["l2"] = r.classifier.l2;
    if (r.classifier.kind == ClassifierKind::mlp)
        j["hidden_size"] = r.classifier.hidden_size;
    if (r.classifier.kind == ClassifierKind::knn)
        j["k_neighbors"] = r.classifier.k_neighbors;
    j["per_fold_auc"] = r.per_fold_auc;
    j["mean_auc"] = r.mean_auc;
    j["std_auc"] = r.std_auc;
    j["train_seconds_per_fold"] = r.train_seconds_per_fold;
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"medical concept embeddings and heart-failure prediction"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic population");
    SynthConfig scfg;
    std::string out_events, out_patients, out_truth;
    synth->add_option("--n-patients", scfg.n_patients);
    synth->add_option("--n-clusters", scfg.n_clusters);
    synth->add_option("--diag-per-cluster", scfg.diagnoses_per_cluster);
    synth->add_option("--med-per-cluster", scfg.medications_per_cluster);
    synth->add_option("--proc-per-cluster", scfg.procedures_per_cluster);
    synth->add_option("--clinics", scfg.n_clinics);
    synth->add_option("--visits-min", scfg.visits_min);
    synth->add_option("--visits-max", scfg.visits_max);
    synth->add_option("--codes-per-visit-min", scfg.codes_per_visit_min);
    synth->add_option("--codes-per-visit-max", scfg.codes_per_visit_max);
    synth->add_option("--noise", scfg.noise_rate);
    synth->add_option("--hf-cluster", scfg.hf_precursor_cluster);
    synth->add_option("--hf-rate", scfg.hf_rate);
    synth->add_option("--precursor-boost", scfg.precursor_boost);
    synth->add_option("--seed", scfg.seed)->required();
    synth->add_option("--out-events", out_events)->required();
    synth->add_option("--out-patients", out_patients)->required();
    synth->add_option("--out-truth", out_truth)->required();

    // train-embeddings
    auto* train_cmd = app.add_subcommand("train-embeddings",
                                         "learn concept vectors");
    std::string tr_events, tr_out, tr_filter;
    TrainConfig tcfg;
    train_cmd->add_option("--events", tr_events)->required();
    train_cmd->add_option("--dim", tcfg.d);
    train_cmd->add_option("--window", tcfg.w);
    train_cmd->add_option("--epochs", tcfg.epochs);
    train_cmd->add_option("--batch", tcfg.batch_size);
    train_cmd->add_option("--seed", tcfg.seed)->required();
    train_cmd->add_option("--out", tr_out)->required();
    train_cmd->add_option("--patients-filter", tr_filter,
                          "JSON-lines file whose patient_id fields restrict "
                          "the training population");

    // query-nn
    auto* nn = app.add_subcommand("query-nn", "nearest neighbors of a concept");
    std::string nn_emb, nn_code;
    size_t nn_k = 50;
    nn->add_option("--emb", nn_emb)->required();
    nn->add_option("--code", nn_code)->required();
    nn->add_option("--k", nn_k);

    // analogy
    auto* an = app.add_subcommand("analogy", "vector addition query");
    std::string an_emb;
    std::vector<std::string> an_plus, an_minus;
    size_t an_k = 50;
    an->add_option("--emb", an_emb)->required();
    an->add_option("--plus", an_plus)->required();
    an->add_option("--minus", an_minus);
    an->add_option("--k", an_k);

    // build-cohort
    auto* bc = app.add_subcommand("build-cohort",
                                  "identify cases and matched controls");
    std::string bc_events, bc_patients, bc_codes, bc_out;
    uint64_t bc_seed = 0;
    size_t bc_max_controls = 10;
    bc->add_option("--events", bc_events)->required();
    bc->add_option("--patients", bc_patients)->required();
    bc->add_option("--codes-file", bc_codes,
                   "qualifying diagnosis codes, one per line");
    bc->add_option("--max-controls", bc_max_controls);
    bc->add_option("--seed", bc_seed)->required();
    bc->add_option("--out", bc_out)->required();

    // featurize
    auto* fz = app.add_subcommand("featurize", "patient feature rows");
    std::string fz_events, fz_patients, fz_cohort, fz_emb, fz_out;
    fz->add_option("--events", fz_events)->required();
    fz->add_option("--patients", fz_patients)->required();
    fz->add_option("--cohort", fz_cohort)->required();
    fz->add_option("--emb", fz_emb,
                   "embedding file; omitted means one-hot counts");
    fz->add_option("--out", fz_out)->required();

    // evaluate
    auto* ev = app.add_subcommand("evaluate",
                                  "6-fold CV over all classifier/feature cells");
    std::string ev_events, ev_patients, ev_cohort, ev_emb, ev_outdir;
    uint64_t ev_seed = 0;
    ev->add_option("--events", ev_events)->required();
    ev->add_option("--patients", ev_patients)->required();
    ev->add_option("--cohort", ev_cohort)->required();
    ev->add_option("--emb", ev_emb)->required();
    ev->add_option("--seed", ev_seed)->required();
    ev->add_option("--out-dir", ev_outdir)->required();

    // export-vectors
    auto* ex = app.add_subcommand("export-vectors",
                                  "re-export an embedding file, optionally "
                                  "filtered by domain");
    std::string ex_emb, ex_out, ex_domain;
    ex->add_option("--emb", ex_emb)->required();
    ex->add_option("--out", ex_out)->required();
    ex->add_option("--domain", ex_domain,
                   "diagnosis | medication | procedure");

    CLI11_PARSE(app, argc, argv);

    if (*synth) {
        auto data = generate(scfg);
        write_events_file(data.events, out_events);
        write_patients_file(data.patients, out_patients);
        write_ground_truth_file(data, out_truth);
        size_t cases = 0;
        for (const auto& [pid, st] : data.intended_status)
            cases += st == "case";
        std::cerr << "synth: " << data.patients.size() << " patients, "
                  << data.events.size() << " events, " << cases
                  << " intended cases\n";
    } else if (*train_cmd) {
        auto events = parse_events_file(tr_events);
        if (!tr_filter.empty()) events = filter_events(std::move(events), tr_filter);
        if (events.empty()) throw std::runtime_error("no events to train on");
        auto vocab = build_vocabulary(events);
        auto timelines = build_timelines(events, vocab);
        auto emb = train(timelines, vocab, tcfg, &std::cerr);
        export_embeddings_file(emb, vocab, tr_out);
    } else if (*nn) {
        auto [emb, vocab] = import_embeddings_file(nn_emb);
        auto query_concept = parse_concept_arg(nn_code);
        auto idx = vocab.index_of(query_concept);
        if (!idx) throw std::runtime_error("unknown concept: " + nn_code);
        auto hits = nearest_neighbors(emb, vocab, emb.row(*idx), nn_k, {*idx});
        for (const auto& h : hits)
            std::cout << h.concept_code.to_string() << "\t" << std::setprecision(9)
                      << h.score << "\n";
    } else if (*an) {
        auto [emb, vocab] = import_embeddings_file(an_emb);
        std::vector<ConceptCode> plus, minus;
        for (const auto& s : an_plus) plus.push_back(parse_concept_arg(s));
        for (const auto& s : an_minus) minus.push_back(parse_concept_arg(s));
        for (const auto& h : additive_query(emb, vocab, plus, minus, an_k))
            std::cout << h.concept_code.to_string() << "\t" << std::setprecision(9)
                      << h.score << "\n";
    } else if (*bc) {
        auto events = parse_events_file(bc_events);
        auto patients = parse_patients_file(bc_patients);
        CaseCriteria criteria = default_case_criteria();
        if (!bc_codes.empty()) {
            auto codes = load_qualifying_codes_file(bc_codes);
            criteria.qualifying_codes =
                std::unordered_set<std::string>(codes.begin(), codes.end());
        }
        auto cases = identify_cases(events, patients, criteria);
        MatchStats stats;
        auto controls = match_controls(cases, patients, events, criteria,
                                       bc_seed, bc_max_controls, &stats);
        std::vector<CohortLabel> all = cases;
        all.insert(all.end(), controls.begin(), controls.end());
        write_cohort_file(all, bc_out);
        std::cerr << "cohort: " << stats.n_cases << " cases, "
                  << stats.n_controls << " controls, "
                  << stats.mean_controls_per_case << " controls/case\n";
    } else if (*fz) {
        auto events = parse_events_file(fz_events);
        parse_patients_file(fz_patients);  // schema check
        auto cohort = load_cohort_file(fz_cohort);
        FeatureMatrix fm;
        if (fz_emb.empty()) {
            fm = featurize(events, cohort, nullptr, nullptr);
        } else {
            auto [emb, evocab] = import_embeddings_file(fz_emb);
            fm = featurize(events, cohort, &emb, &evocab);
        }
        std::ofstream out(fz_out);
        if (!out) throw std::runtime_error("cannot open " + fz_out);
        for (size_t i = 0; i < fm.rows.size(); ++i) {
            json j{{"patient_id", fm.patient_ids[i]},
                   {"label", fm.labels[i]},
                   {"features", fm.rows[i]}};
            out << j.dump() << "\n";
        }
    } else if (*ev) {
        auto events = parse_events_file(ev_events);
        parse_patients_file(ev_patients);  // schema check
        auto cohort = load_cohort_file(ev_cohort);
        auto [emb, evocab] = import_embeddings_file(ev_emb);
        auto concept_fm = featurize(events, cohort, &emb, &evocab);
        auto onehot_fm = featurize(events, cohort, nullptr, nullptr);

        const ClassifierKind kinds[] = {
            ClassifierKind::logistic_regression, ClassifierKind::linear_svm,
            ClassifierKind::mlp, ClassifierKind::knn};
        std::vector<EvalReport> reports;
        for (const FeatureMatrix* fm : {&onehot_fm, &concept_fm})
            for (ClassifierKind kind : kinds) {
                ClassifierSpec spec = default_spec(kind, fm->kind);
                reports.push_back(run_experiment(*fm, spec, ev_seed));
            }

        std::filesystem::create_directories(ev_outdir);
        std::cout << "classifier            features         mean_auc  std_auc\n";
        for (const auto& r : reports) {
            auto path = std::filesystem::path(ev_outdir) /
                        ("report_" + std::string(to_string(r.classifier.kind)) +
                         "_" + feature_kind_name(r.feature_kind) + ".json");
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot open " + path.string());
            out << report_to_json(r).dump(2) << "\n";
            std::cout << std::left << std::setw(22)
                      << to_string(r.classifier.kind) << std::setw(17)
                      << feature_kind_name(r.feature_kind) << std::fixed
                      << std::setprecision(4) << r.mean_auc << "    "
                      << r.std_auc << "\n";
        }
    } else if (*ex) {
        auto [emb, vocab] = import_embeddings_file(ex_emb);
        if (ex_domain.empty()) {
            export_embeddings_file(emb, vocab, ex_out);
        } else {
            auto dom = parse_domain(ex_domain);
            if (!dom) throw std::runtime_error("unknown domain: " + ex_domain);
            std::vector<ConceptCode> codes;
            std::vector<int64_t> freq;
            std::vector<size_t> keep;
            for (size_t i = 0; i < vocab.size(); ++i)
                if (vocab.code_at(i).domain == *dom) {
                    keep.push_back(i);
                    codes.push_back(vocab.code_at(i));
                    freq.push_back(1);
                }
            if (keep.empty())
                throw std::runtime_error("no vectors with domain " + ex_domain);
            EmbeddingMatrix sub(keep.size(), emb.d);
            for (size_t i = 0; i < keep.size(); ++i) {
                auto src = emb.row(keep[i]);
                std::copy(src.begin(), src.end(), sub.row(i).begin());
            }
            export_embeddings_file(sub, Vocabulary(std::move(codes), std::move(freq)),
                                   ex_out);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
