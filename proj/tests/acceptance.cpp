// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails. argv[1] is the path to
// the command-line binary (used by the determinism criterion).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehrvec/cohort.hpp"
#include "ehrvec/corpus.hpp"
#include "ehrvec/date.hpp"
#include "ehrvec/embedding_space.hpp"
#include "ehrvec/features.hpp"
#include "ehrvec/ingest.hpp"
#include "ehrvec/predict.hpp"
#include "ehrvec/rng.hpp"
#include "ehrvec/skipgram.hpp"
#include "ehrvec/synthgen.hpp"

using namespace ehr;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

// ---- criterion 1: tied-softmax gradient vs central finite differences ----

Outcome criterion_gradient_oracle() {
    auto t0 = Clock::now();
    Rng rng(101);
    const double h = 1e-5, tol = 1e-5;
    int instances = 0;
    double worst = 0.0;
    for (int it = 0; it < 150; ++it) {
        size_t n = 2 + rng.below(5), d = 1 + rng.below(4);
        EmbeddingMatrix emb(n, d);
        for (double& v : emb.values) v = rng.uniform(-1, 1);
        TrainingPair pair{uint32_t(rng.below(n)), uint32_t(rng.below(n))};
        auto g = pair_gradient(emb, pair);
        for (size_t i = 0; i < emb.values.size(); ++i) {
            EmbeddingMatrix up = emb, dn = emb;
            up.values[i] += h;
            dn.values[i] -= h;
            double fd =
                (pair_log_prob(up, pair) - pair_log_prob(dn, pair)) / (2 * h);
            double rel = std::abs(g[i] - fd) / std::max(1.0, std::abs(fd));
            worst = std::max(worst, rel);
        }
        ++instances;
    }
    double secs = seconds_since(t0);
    std::ostringstream d;
    d << instances << " instances, worst rel err " << worst << ", " << secs
      << " s";
    return {worst <= 1e-5 && secs < 10.0, d.str()};
}

// ---- criterion 2: softmax normalization and shift invariance ----

Outcome criterion_softmax() {
    Rng rng(202);
    double worst_sum = 0.0, worst_shift = 0.0;
    for (int it = 0; it < 1000; ++it) {
        size_t n = 2 + rng.below(7), d = 1 + rng.below(5);
        EmbeddingMatrix emb(n, d);
        for (double& v : emb.values) v = rng.uniform(-2, 2);
        size_t center = rng.below(n);
        auto p = softmax_probs(emb, center);
        double sum = 0;
        for (double v : p) sum += v;
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));

        // Softmax of the logits shifted by an arbitrary constant must equal
        // the library's result on the unshifted logits.
        std::vector<double> logits(n);
        for (size_t c = 0; c < n; ++c) {
            double dot = 0;
            for (size_t j = 0; j < d; ++j)
                dot += emb.row(c)[j] * emb.row(center)[j];
            logits[c] = dot;
        }
        double shift = rng.uniform(-30, 30);
        double m = *std::max_element(logits.begin(), logits.end()) + shift;
        double denom = 0;
        std::vector<double> q(n);
        for (size_t c = 0; c < n; ++c) {
            q[c] = std::exp(logits[c] + shift - m);
            denom += q[c];
        }
        for (size_t c = 0; c < n; ++c)
            worst_shift = std::max(worst_shift, std::abs(q[c] / denom - p[c]));
    }
    std::ostringstream d;
    d << "worst |sum-1| " << worst_sum << ", worst shift deviation "
      << worst_shift;
    return {worst_sum <= 1e-9 && worst_shift <= 1e-12, d.str()};
}

// ---- criterion 3: cluster recovery from a planted-cluster corpus ----

Outcome criterion_cluster_recovery() {
    auto t0 = Clock::now();
    SynthConfig cfg;
    cfg.n_patients = 2000;
    cfg.n_clusters = 10;
    cfg.diagnoses_per_cluster = 10;
    cfg.medications_per_cluster = 10;
    cfg.procedures_per_cluster = 10;
    cfg.visits_min = 6;
    cfg.visits_max = 12;
    cfg.codes_per_visit_min = 2;
    cfg.codes_per_visit_max = 4;
    cfg.noise_rate = 0.1;
    cfg.hf_rate = 0.0;  // keep the vocabulary to the 300 planted codes
    cfg.seed = 33;
    auto data = generate(cfg);

    auto vocab = build_vocabulary(data.events);
    auto timelines = build_timelines(data.events, vocab);
    TrainConfig tcfg;  // d=100, w=5, 10 epochs, batch 100
    tcfg.seed = 12;
    auto emb = train(timelines, vocab, tcfg);

    std::vector<size_t> cluster_of(vocab.size());
    for (size_t i = 0; i < vocab.size(); ++i)
        cluster_of[i] = data.code_clusters.at(vocab.code_at(i).to_string());

    double intra = 0, inter = 0;
    size_t n_intra = 0, n_inter = 0;
    for (size_t i = 0; i < vocab.size(); ++i)
        for (size_t j = i + 1; j < vocab.size(); ++j) {
            double c = cosine(emb.row(i), emb.row(j));
            if (cluster_of[i] == cluster_of[j]) {
                intra += c;
                ++n_intra;
            } else {
                inter += c;
                ++n_inter;
            }
        }
    intra /= double(n_intra);
    inter /= double(n_inter);

    size_t hits = 0;
    for (size_t i = 0; i < vocab.size(); ++i) {
        auto nn = nearest_neighbors(emb, vocab, emb.row(i), 1, {i});
        if (!nn.empty() &&
            cluster_of[*vocab.index_of(nn[0].concept_code)] == cluster_of[i])
            ++hits;
    }
    double frac = double(hits) / double(vocab.size());
    double secs = seconds_since(t0);
    std::ostringstream d;
    d << "intra " << intra << ", inter " << inter << ", gap " << intra - inter
      << ", same-cluster NN " << frac << ", " << secs << " s";
    return {intra - inter >= 0.2 && frac >= 0.8 && secs < 600.0, d.str()};
}

// ---- criterion 4: rank-based AUC vs brute-force pairwise ----

Outcome criterion_auc_oracle() {
    Rng rng(404);
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
        size_t n = 2 + rng.below(60);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (size_t i = 0; i < n; ++i) {
            scores[i] = double(rng.below(8)) / 2.0;  // coarse grid forces ties
            labels[i] = int(rng.below(2));
        }
        labels[0] = 1;
        labels[1] = 0;
        double got = auc(scores, labels);
        double wins = 0, total = 0;
        for (size_t i = 0; i < n; ++i) {
            if (labels[i] != 1) continue;
            for (size_t j = 0; j < n; ++j) {
                if (labels[j] != 0) continue;
                total += 1;
                if (scores[i] > scores[j])
                    wins += 1;
                else if (scores[i] == scores[j])
                    wins += 0.5;
            }
        }
        worst = std::max(worst, std::abs(got - wins / total));
    }
    std::ostringstream d;
    d << "1000 instances, worst abs diff " << worst;
    return {worst < 1e-12, d.str()};
}

// ---- criterion 5: cohort oracles and matching invariants ----

std::optional<Date> oracle_hfdx(const std::vector<Date>& dates, int window,
                                int min_enc) {
    if (dates.empty()) return std::nullopt;
    Date anchor = dates.front();
    int count = 0;
    for (size_t i = 0; i < dates.size(); ++i) {
        if (dates[i] - anchor > window)
            return oracle_hfdx({dates.begin() + i, dates.end()}, window,
                               min_enc);
        if (++count >= min_enc) return anchor;
    }
    return std::nullopt;
}

int age_band(Date birth, Date at) {
    int age = age_in_years(birth, at);
    int rel = age - 50;
    return rel >= 0 ? rel / 5 : (rel - 4) / 5;
}

Outcome criterion_cohort_oracle() {
    CaseCriteria crit = default_case_criteria();
    Rng rng(505);
    for (int it = 0; it < 10000; ++it) {
        size_t n = rng.below(12);
        std::set<int> uniq;
        while (uniq.size() < n) uniq.insert(int(rng.below(1400)));
        std::vector<Date> dates;
        for (int d : uniq) dates.push_back(Date{d});
        auto got = find_hf_diagnosis_date(dates, crit);
        auto want = oracle_hfdx(dates, crit.window_days, crit.min_encounters);
        if (got != want) return {false, "re-anchoring scan disagrees with oracle"};
    }

    size_t checked_controls = 0;
    for (uint64_t seed = 0; seed < 50; ++seed) {
        SynthConfig cfg;
        cfg.n_patients = 120;
        cfg.n_clusters = 4;
        cfg.diagnoses_per_cluster = 5;
        cfg.medications_per_cluster = 5;
        cfg.procedures_per_cluster = 5;
        cfg.visits_min = 8;
        cfg.visits_max = 16;
        cfg.hf_rate = 0.6;
        cfg.seed = 1000 + seed;
        auto data = generate(cfg);

        auto cases = identify_cases(data.events, data.patients, crit);
        std::set<std::string> detected;
        for (const auto& c : cases) detected.insert(c.patient_id);
        for (const auto& [pid, status] : data.intended_status) {
            bool is_case = detected.count(pid) == 1;
            if ((status == "case") != is_case)
                return {false, "intended status mismatch for " + pid +
                                   " (seed " + std::to_string(cfg.seed) + ")"};
        }

        auto controls = match_controls(cases, data.patients, data.events,
                                       crit, seed);
        std::map<std::string, const PatientRecord*> by_id;
        for (const auto& p : data.patients) by_id[p.patient_id] = &p;
        std::map<std::string, const CohortLabel*> case_by_id;
        for (const auto& c : cases) case_by_id[c.patient_id] = &c;
        std::map<std::string, size_t> per_case;
        std::set<std::string> used;
        for (const auto& ctl : controls) {
            if (!ctl.matched_case_id) return {false, "control without a case"};
            const auto* cs = case_by_id.at(*ctl.matched_case_id);
            const auto* cp = by_id.at(cs->patient_id);
            const auto* tp = by_id.at(ctl.patient_id);
            if (tp->clinic_id != cp->clinic_id)
                return {false, "clinic mismatch"};
            if (tp->sex != cp->sex) return {false, "sex mismatch"};
            if (age_band(tp->birth_date, cs->index_date) !=
                age_band(cp->birth_date, cs->index_date))
                return {false, "age band mismatch"};
            if (ctl.index_date != cs->index_date)
                return {false, "control index date not inherited"};
            if (!used.insert(ctl.patient_id).second)
                return {false, "control reused across cases"};
            if (detected.count(ctl.patient_id))
                return {false, "case drawn as control"};
            if (++per_case[*ctl.matched_case_id] > 10)
                return {false, "more than 10 controls for one case"};
            ++checked_controls;
        }
    }
    if (checked_controls == 0)
        return {false, "no matched controls produced; invariants vacuous"};
    std::ostringstream d;
    d << "10000 scan instances, 50 cohorts, " << checked_controls
      << " matched controls verified";
    return {true, d.str()};
}

// ---- criteria 6 & 7: the prediction experiments ----

FeatureMatrix make_features(const std::vector<EventRecord>& events,
                            const std::vector<CohortLabel>& cohort,
                            const EmbeddingMatrix* emb) {
    auto vocab = build_vocabulary(events);
    auto timelines = build_timelines(events, vocab);
    std::map<std::string, const PatientTimeline*> by_id;
    for (const auto& t : timelines) by_id[t.patient_id] = &t;
    std::unordered_set<uint32_t> coverage;
    for (uint32_t i = 0; i < vocab.size(); ++i) coverage.insert(i);

    FeatureMatrix fm;
    fm.kind = emb ? FeatureKind::concept_vector : FeatureKind::one_hot_counts;
    fm.f = emb ? emb->d : vocab.size();
    static const PatientTimeline empty_timeline;
    for (const auto& l : cohort) {
        auto it = by_id.find(l.patient_id);
        const PatientTimeline& t =
            it == by_id.end() ? empty_timeline : *it->second;
        auto codes = observation_window(t, l.index_date);
        fm.rows.push_back(emb ? patient_vector(codes, *emb, coverage)
                              : one_hot_counts(codes, vocab.size()));
        fm.labels.push_back(l.status == CohortStatus::case_ ? 1 : 0);
        fm.patient_ids.push_back(l.patient_id);
    }
    return fm;
}

std::vector<CohortLabel> build_cohort(const SynthData& data,
                                      const CaseCriteria& crit,
                                      uint64_t seed) {
    auto cases = identify_cases(data.events, data.patients, crit);
    auto controls =
        match_controls(cases, data.patients, data.events, crit, seed);
    auto all = cases;
    all.insert(all.end(), controls.begin(), controls.end());
    return all;
}

Outcome criterion_directional_auc() {
    auto t0 = Clock::now();
    // Calibrated so that precursor-cluster membership alone cannot separate
    // the classes (low hf_rate leaves many carrier controls); the decisive
    // signal is the pre-HFDx enrichment, which Euclidean KNN cannot resolve
    // in the sparse high-dimensional count space.
    SynthConfig cfg;
    cfg.n_patients = 6000;
    cfg.n_clusters = 5;
    cfg.diagnoses_per_cluster = 80;
    cfg.medications_per_cluster = 80;
    cfg.procedures_per_cluster = 80;
    cfg.n_clinics = 2;
    cfg.visits_min = 8;
    cfg.visits_max = 16;
    cfg.codes_per_visit_min = 2;
    cfg.codes_per_visit_max = 4;
    cfg.noise_rate = 0.3;
    cfg.hf_rate = 0.15;
    cfg.precursor_boost = 0.35;
    cfg.seed = 77;
    auto data = generate(cfg);

    CaseCriteria crit = default_case_criteria();
    auto cohort = build_cohort(data, crit, 7);
    size_t n_cases = 0;
    for (const auto& l : cohort) n_cases += l.status == CohortStatus::case_;
    size_t n_controls = cohort.size() - n_cases;
    if (n_cases < 300 || n_controls < 2000) {
        std::ostringstream d;
        d << "cohort too small: " << n_cases << " cases, " << n_controls
          << " controls";
        return {false, d.str()};
    }

    auto vocab = build_vocabulary(data.events);
    auto timelines = build_timelines(data.events, vocab);
    TrainConfig tcfg;
    tcfg.epochs = 5;
    tcfg.seed = 12;
    auto emb = train(timelines, vocab, tcfg);

    auto onehot = make_features(data.events, cohort, nullptr);
    auto concept_fm = make_features(data.events, cohort, &emb);

    const ClassifierKind kinds[] = {
        ClassifierKind::logistic_regression, ClassifierKind::linear_svm,
        ClassifierKind::mlp, ClassifierKind::knn};
    std::map<ClassifierKind, double> auc_onehot, auc_concept;
    for (ClassifierKind k : kinds) {
        auc_onehot[k] =
            run_experiment(onehot, default_spec(k, onehot.kind), 5).mean_auc;
        auc_concept[k] =
            run_experiment(concept_fm, default_spec(k, concept_fm.kind), 5)
                .mean_auc;
    }

    bool ok = auc_concept[ClassifierKind::knn] -
                  auc_onehot[ClassifierKind::knn] >=
              0.05;
    for (ClassifierKind k :
         {ClassifierKind::logistic_regression, ClassifierKind::linear_svm,
          ClassifierKind::mlp})
        ok = ok && auc_concept[k] >= auc_onehot[k] - 0.02;

    double secs = seconds_since(t0);
    std::ostringstream d;
    d << n_cases << " cases/" << n_controls << " controls;";
    for (ClassifierKind k : kinds)
        d << " " << to_string(k) << " " << auc_onehot[k] << "->"
          << auc_concept[k];
    d << "; " << secs << " s";
    return {ok && secs < 1200.0, d.str()};
}

Outcome criterion_training_speed() {
    SynthConfig cfg;
    cfg.n_patients = 1500;
    cfg.n_clusters = 56;
    cfg.diagnoses_per_cluster = 30;
    cfg.medications_per_cluster = 30;
    cfg.procedures_per_cluster = 30;
    cfg.visits_min = 8;
    cfg.visits_max = 14;
    cfg.codes_per_visit_min = 2;
    cfg.codes_per_visit_max = 4;
    cfg.hf_rate = 0.9;
    cfg.seed = 88;
    auto data = generate(cfg);

    CaseCriteria crit = default_case_criteria();
    auto cohort = build_cohort(data, crit, 9);
    auto onehot = make_features(data.events, cohort, nullptr);
    if (onehot.f < 5000) {
        return {false, "one-hot dimensionality only " +
                           std::to_string(onehot.f)};
    }
    // Timing depends only on dimensionality, so an untrained projection
    // (epoch count zero) is enough for the concept side.
    auto vocab = build_vocabulary(data.events);
    auto timelines = build_timelines(data.events, vocab);
    TrainConfig tcfg;
    tcfg.epochs = 0;
    tcfg.seed = 4;
    auto emb = train(timelines, vocab, tcfg);
    auto concept_fm = make_features(data.events, cohort, &emb);

    auto mean_secs = [](const EvalReport& r) {
        double s = 0;
        for (double v : r.train_seconds_per_fold) s += v;
        return s / double(r.train_seconds_per_fold.size());
    };
    double t_onehot = mean_secs(run_experiment(
        onehot,
        default_spec(ClassifierKind::logistic_regression, onehot.kind), 5));
    double t_concept = mean_secs(run_experiment(
        concept_fm,
        default_spec(ClassifierKind::logistic_regression, concept_fm.kind),
        5));

    std::ostringstream d;
    d << "N=" << onehot.f << ": " << t_onehot << " s/fold one-hot vs "
      << t_concept << " s/fold concept (x" << t_onehot / t_concept << ")";
    return {t_onehot >= 5.0 * t_concept, d.str()};
}

// ---- criterion 8: CLI determinism ----

int run_cmd(const std::string& cmd) { return std::system(cmd.c_str()); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion_cli_determinism(const std::string& cli) {
    fs::path root = fs::temp_directory_path() / "ehrvec_acceptance";
    fs::remove_all(root);
    std::vector<std::string> mismatches;

    auto dirs = std::pair{root / "run1", root / "run2"};
    fs::create_directories(dirs.first);
    fs::create_directories(dirs.second);

    auto both = [&](const std::string& args,
                    const std::vector<std::string>& outputs,
                    const std::string& label, bool strip_timing = false) {
        for (const fs::path& dir : {dirs.first, dirs.second}) {
            std::string cmd = cli + " " + args + " > " +
                              (dir / "stdout.txt").string() + " 2> " +
                              (dir / "stderr.txt").string();
            std::string expanded;
            size_t pos = 0, prev = 0;
            while ((pos = cmd.find("{}", prev)) != std::string::npos) {
                expanded += cmd.substr(prev, pos - prev) + dir.string();
                prev = pos + 2;
            }
            expanded += cmd.substr(prev);
            if (run_cmd(expanded) != 0) {
                mismatches.push_back(label + ": nonzero exit");
                return;
            }
        }
        auto files = outputs;
        files.push_back("stdout.txt");
        for (const auto& f : files) {
            std::string a = slurp(dirs.first / f), b = slurp(dirs.second / f);
            if (strip_timing && f.ends_with(".json")) {
                auto strip = [](const std::string& text) {
                    auto j = nlohmann::json::parse(text);
                    j.erase("train_seconds_per_fold");
                    return j.dump();
                };
                a = strip(a);
                b = strip(b);
            }
            if (a != b) mismatches.push_back(label + ": " + f + " differs");
        }
    };

    both("synth --n-patients 150 --n-clusters 4 --diag-per-cluster 4"
         " --med-per-cluster 4 --proc-per-cluster 4 --clinics 1"
         " --visits-min 6 --visits-max 10 --hf-rate 0.9 --seed 5"
         " --out-events {}/events.jsonl --out-patients {}/patients.jsonl"
         " --out-truth {}/truth.json",
         {"events.jsonl", "patients.jsonl", "truth.json"}, "synth");
    both("train-embeddings --events {}/events.jsonl --dim 8 --window 3"
         " --epochs 2 --batch 50 --seed 3 --out {}/emb.txt",
         {"emb.txt"}, "train-embeddings");
    both("query-nn --emb {}/emb.txt --code diagnosis:D0_0 --k 5", {},
         "query-nn");
    both("analogy --emb {}/emb.txt --plus diagnosis:D0_0 --plus diagnosis:D0_1"
         " --k 5",
         {}, "analogy");
    both("build-cohort --events {}/events.jsonl --patients {}/patients.jsonl"
         " --seed 2 --out {}/cohort.jsonl",
         {"cohort.jsonl"}, "build-cohort");
    both("featurize --events {}/events.jsonl --patients {}/patients.jsonl"
         " --cohort {}/cohort.jsonl --out {}/onehot.jsonl",
         {"onehot.jsonl"}, "featurize one-hot");
    both("featurize --events {}/events.jsonl --patients {}/patients.jsonl"
         " --cohort {}/cohort.jsonl --emb {}/emb.txt --out {}/concept.jsonl",
         {"concept.jsonl"}, "featurize concept");
    both("evaluate --events {}/events.jsonl --patients {}/patients.jsonl"
         " --cohort {}/cohort.jsonl --emb {}/emb.txt --seed 11"
         " --out-dir {}/reports",
         {"reports/report_logistic_regression_one_hot_counts.json",
          "reports/report_logistic_regression_concept_vector.json",
          "reports/report_linear_svm_one_hot_counts.json",
          "reports/report_linear_svm_concept_vector.json",
          "reports/report_mlp_one_hot_counts.json",
          "reports/report_mlp_concept_vector.json",
          "reports/report_knn_one_hot_counts.json",
          "reports/report_knn_concept_vector.json"},
         "evaluate", /*strip_timing=*/true);
    both("export-vectors --emb {}/emb.txt --out {}/diag.txt"
         " --domain diagnosis",
         {"diag.txt"}, "export-vectors");

    if (mismatches.empty())
        return {true, "9 subcommands byte-identical across reruns "
                      "(evaluate reports compared net of wall-clock timings)"};
    std::string d;
    for (const auto& m : mismatches) d += (d.empty() ? "" : "; ") + m;
    return {false, d};
}

// ---- criterion 9: cross-validation structure ----

Outcome criterion_cv_structure() {
    Rng rng(909);
    for (int it = 0; it < 200; ++it) {
        size_t n = 40 + rng.below(400);
        double pos_rate = rng.uniform(0.1, 0.9);
        std::vector<int> labels(n);
        for (auto& l : labels) l = rng.next_double() < pos_rate ? 1 : 0;
        labels[0] = 1;
        labels[1] = 0;
        auto plan = make_folds(labels, it);

        std::set<size_t> seen;
        size_t total = 0;
        for (const auto& chunk : plan.chunks) {
            for (size_t i : chunk)
                if (!seen.insert(i).second)
                    return {false, "chunks are not disjoint"};
            total += chunk.size();
        }
        if (total != n) return {false, "chunks do not cover the cohort"};

        std::set<const std::vector<size_t>*> test_chunks;
        for (size_t fold = 0; fold < FoldPlan::n_folds; ++fold) {
            if (&plan.test_indices(fold) != &plan.chunks[fold + 1])
                return {false, "test chunk is not the successor chunk"};
            test_chunks.insert(&plan.test_indices(fold));
        }
        if (test_chunks.size() != 6)
            return {false, "a chunk serves as test more than once"};

        double global = 0;
        for (int l : labels) global += l;
        global /= double(n);
        for (const auto& chunk : plan.chunks) {
            double pos = 0;
            for (size_t i : chunk) pos += labels[i];
            if (std::abs(pos - global * double(chunk.size())) > 1.0 + 1e-9)
                return {false, "per-chunk class ratio off by more than one"};
        }
    }
    return {true, "200 random cohorts, all structural invariants hold"};
}

// ---- criterion 10: embedding file round trip ----

Outcome criterion_round_trip() {
    Rng rng(1010);
    EmbeddingMatrix emb(150, 40);
    for (double& v : emb.values) v = rng.uniform(-5, 5);
    std::vector<ConceptCode> codes;
    std::vector<int64_t> freq(150, 1);
    const Domain doms[] = {Domain::diagnosis, Domain::medication,
                           Domain::procedure};
    for (size_t i = 0; i < 150; ++i)
        codes.push_back({"c" + std::to_string(i), doms[i % 3]});
    Vocabulary vocab(std::move(codes), std::move(freq));

    std::ostringstream out;
    export_embeddings(emb, vocab, out);
    std::istringstream in(out.str());
    auto [emb2, vocab2] = import_embeddings(in);
    if (emb2.n != emb.n || emb2.d != emb.d)
        return {false, "shape not preserved"};
    double worst = 0;
    for (size_t i = 0; i < emb.values.size(); ++i)
        worst = std::max(worst, std::abs(emb.values[i] - emb2.values[i]));
    for (size_t i = 0; i < vocab.size(); ++i) {
        if (vocab2.code_at(i) != vocab.code_at(i))
            return {false, "vocabulary order not preserved"};
        if (*vocab2.index_of(vocab.code_at(i)) != i)
            return {false, "vocabulary bijection broken"};
    }
    std::ostringstream d;
    d << "150x40 matrix, worst value drift " << worst;
    return {worst < 1e-8, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-cli>\n";
        return 2;
    }
    std::string cli = argv[1];
    std::cout.precision(4);

    int failures = 0;
    auto report = [&](int id, const std::string& name, auto&& fn) {
        Outcome o{false, ""};
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << "criterion " << id << " (" << name << "): "
                  << (o.pass ? "PASS" : "FAIL") << " — " << o.detail << "\n"
                  << std::flush;
        failures += !o.pass;
    };

    report(1, "gradient oracle", criterion_gradient_oracle);
    report(2, "softmax normalization", criterion_softmax);
    report(3, "cluster recovery", criterion_cluster_recovery);
    report(4, "AUC oracle", criterion_auc_oracle);
    report(5, "cohort oracle", criterion_cohort_oracle);
    report(6, "directional AUC gains", criterion_directional_auc);
    report(7, "training speed ratio", criterion_training_speed);
    report(8, "CLI determinism",
           [&] { return criterion_cli_determinism(cli); });
    report(9, "CV structure", criterion_cv_structure);
    report(10, "embedding round trip", criterion_round_trip);

    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criteria failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}
