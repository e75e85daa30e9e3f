#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ehrvec/types.hpp"

namespace ehr {

// Synthetic population with planted cross-domain concept clusters and an
// HF-like outcome process driven by one precursor cluster.
struct SynthConfig {
    size_t n_patients = 1000;
    size_t n_clusters = 10;
    size_t diagnoses_per_cluster = 10;
    size_t medications_per_cluster = 10;
    size_t procedures_per_cluster = 10;
    size_t n_clinics = 3;
    int visits_min = 20;
    int visits_max = 40;
    int codes_per_visit_min = 2;
    int codes_per_visit_max = 5;
    double noise_rate = 0.1;
    size_t hf_precursor_cluster = 0;
    double hf_rate = 0.8;
    // Probability that a code drawn inside a case's 18-month pre-HFDx
    // window comes from the precursor cluster.
    double precursor_boost = 0.5;
    uint64_t seed = 0;
};

struct SynthData {
    std::vector<PatientRecord> patients;
    std::vector<EventRecord> events;
    // Ground truth, consumed only by tests and the sidecar file.
    std::map<std::string, size_t> code_clusters;        // "domain:code" -> cluster
    std::map<std::string, std::vector<size_t>> patient_clusters;
    std::map<std::string, std::string> intended_status;  // "case" | "control"
};

// Deterministic in cfg.seed. Throws on infeasible configurations.
SynthData generate(const SynthConfig& cfg);

void write_events_file(const std::vector<EventRecord>& events,
                       const std::string& path);
void write_patients_file(const std::vector<PatientRecord>& patients,
                         const std::string& path);
void write_ground_truth_file(const SynthData& data, const std::string& path);

}  // namespace ehr
