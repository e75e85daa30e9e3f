#pragma once

#include <cstdint>
#include <vector>

#include "ehrvec/types.hpp"

namespace ehr {

struct TrainingPair {
    uint32_t center;
    uint32_t context;

    bool operator==(const TrainingPair&) const = default;
};

struct WindowConfig {
    int w = 5;  // half-window, >= 1
    uint64_t shuffle_seed = 0;
};

// Concatenates visits in date order; within each visit codes are permuted
// by an RNG keyed on (shuffle_seed, patient_id, epoch), so the same call is
// repeatable and different epochs draw independent orders.
std::vector<uint32_t> flatten_timeline(const PatientTimeline& t, int epoch,
                                       const WindowConfig& cfg);

// All (seq[t], seq[t+j]) with j in [-w, w] \ {0} and t+j inside the
// sequence, ordered by t then j.
std::vector<TrainingPair> generate_pairs(const std::vector<uint32_t>& seq,
                                         int w);

// Streaming form of generate_pairs; fn is called in the same order.
template <typename Fn>
void for_each_pair(const std::vector<uint32_t>& seq, int w, Fn&& fn) {
    const int n = int(seq.size());
    for (int t = 0; t < n; ++t)
        for (int j = -w; j <= w; ++j) {
            if (j == 0) continue;
            int u = t + j;
            if (u < 0 || u >= n) continue;
            fn(TrainingPair{seq[t], seq[u]});
        }
}

}  // namespace ehr
