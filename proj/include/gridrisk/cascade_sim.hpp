#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gridrisk/cofpf.hpp"
#include "gridrisk/grid_model.hpp"
#include "gridrisk/rng.hpp"

namespace gridrisk {

struct SampleArchive;

/// One draw round of a cascade. `conditions` holds the load ratio of every
/// component alive when the round's failure draws were made, ascending by
/// component id; `failed` is the subset that failed (empty only in a final
/// round, which terminates the cascade).
struct StageRecord {
    int stage = 0;
    std::vector<int> failed;
    std::vector<std::pair<int, double>> conditions;
};

/// A full sampled cascade path. `stages` covers every state at which failure
/// draws occurred, including the terminal no-failure round, so the recorded
/// conditions are sufficient to recompute the path probability under any
/// CoFPF set. `log_gamma[k]` is the natural log of component k's path factor
/// (survival terms while alive, failure term if it failed) under the
/// generating CoFPF set; their sum reproduces `log_g`, which is accumulated
/// independently stage by stage during sampling.
struct CascadeSample {
    std::int64_t id = 0;
    std::vector<StageRecord> stages;
    double y_mw = 0;  // total demand minus demand served at termination
    std::vector<double> log_gamma;
    double log_g = 0;
};

struct BatchOptions {
    int workers = 0;                   // <= 1 serial reference path, 0 = auto
    std::vector<int> initial_outage;   // components forced OFF before stage 0
    bool fixed_metadata = false;       // omit timestamps for byte-stable output
    bool progress = false;             // coarse progress ticks on stderr
};

/// Draws one cascade: record the conditions of all alive components, draw one
/// uniform per alive component in ascending id order, fail those under their
/// CoFPF value, redispatch, re-solve flows, repeat until a round fails
/// nothing (or nothing is left alive).
CascadeSample sample_cascade(const GridCase& grid, const CoFPFSet& cofpfs, SampleRng& rng,
                             const std::vector<int>& initial_outage = {});

/// N independent samples. Sample i uses the stream (master_seed, i), so the
/// archive is identical whatever the worker count; workers <= 1 runs the
/// plain serial loop that the parallel path is checked against.
SampleArchive run_batch(const GridCase& grid, const CoFPFSet& cofpfs, std::int64_t n,
                        std::uint64_t master_seed, const BatchOptions& opts = {});

int resolve_workers(int requested);

}  // namespace gridrisk
