#include "ehrvec/corpus.hpp"

#include "ehrvec/rng.hpp"

namespace ehr {

std::vector<uint32_t> flatten_timeline(const PatientTimeline& t, int epoch,
                                       const WindowConfig& cfg) {
    uint64_t key = cfg.shuffle_seed;
    key = splitmix64(key ^ fnv1a64(t.patient_id));
    key = splitmix64(key ^ uint64_t(epoch));
    Rng rng(key);

    std::vector<uint32_t> out;
    for (const auto& visit : t.visits) {
        size_t start = out.size();
        out.insert(out.end(), visit.codes.begin(), visit.codes.end());
        // Fisher-Yates on the slice just appended.
        for (size_t i = out.size() - start; i > 1; --i)
            std::swap(out[start + i - 1], out[start + rng.below(i)]);
    }
    return out;
}

std::vector<TrainingPair> generate_pairs(const std::vector<uint32_t>& seq,
                                         int w) {
    std::vector<TrainingPair> out;
    for_each_pair(seq, w, [&](TrainingPair p) { out.push_back(p); });
    return out;
}

}  // namespace ehr
