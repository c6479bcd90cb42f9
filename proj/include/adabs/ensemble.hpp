// Copyright 2026 The adabs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ensemble.hpp — seeded substreams, block-parallel execution, and the
// aggregate record shared by the trajectory and cascade samplers.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "adabs/fock.hpp"

namespace adabs {

// ---------------------------------------------------------------- streams

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Generator for substream `index` of `seed`. The seed is a pure function of
/// (seed, index), so trajectory i sees the same draws whatever order or
/// thread it runs on.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Uniform draw in (0, 1] from the top 53 bits.
inline double uniform_open_closed(std::mt19937_64 &rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// ---------------------------------------------------------------- threads

/// Worker count from ADABS_THREADS, falling back to the hardware count.
/// Results never depend on it.
inline int default_thread_count() {
    if (const char *env = std::getenv("ADABS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, count) on up to `threads` workers.
inline void parallel_for(int count, int threads, const std::function<void(int)> &task) {
    threads = std::clamp(threads, 1, std::max(1, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = next++; i < count; i = next++) task(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) t.join();
    for (auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// ---------------------------------------------------------------- records

struct Histogram {
    std::vector<double> edges;  ///< bins.size() + 1 edges
    std::vector<std::uint64_t> counts;

    static Histogram uniform(double lo, double hi, int bins) {
        Histogram h;
        h.edges.resize(static_cast<std::size_t>(bins) + 1);
        for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
        h.counts.assign(static_cast<std::size_t>(bins), 0);
        return h;
    }

    int bins() const { return static_cast<int>(counts.size()); }

    /// Bin of x; the right edge belongs to the last bin.
    int locate(double x) const {
        const double lo = edges.front(), hi = edges.back();
        int b = static_cast<int>(std::floor((x - lo) / (hi - lo) * bins()));
        return std::clamp(b, 0, bins() - 1);
    }

    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }

    bool operator==(const Histogram &) const = default;
};

struct EnsembleResult {
    std::uint64_t n_traj = 0;
    FockDensityMatrix mean_state;
    Histogram jump_time_histogram;  ///< first detection times (or click indices)
    std::uint64_t no_jump_count = 0;
    double no_jump_fraction = 0.0;
    std::uint64_t seed = 0;
    /// Jackknife estimate of the trace-distance error of mean_state.
    double jackknife_error = 0.0;

    bool operator==(const EnsembleResult &o) const {
        return n_traj == o.n_traj && mean_state.elements() == o.mean_state.elements() &&
               mean_state.tail_mass_bound() == o.mean_state.tail_mass_bound() &&
               jump_time_histogram == o.jump_time_histogram && no_jump_count == o.no_jump_count &&
               no_jump_fraction == o.no_jump_fraction && seed == o.seed && jackknife_error == o.jackknife_error;
    }
};

struct EnsembleOptions {
    int bins = 20;
    int blocks = 20;   ///< contiguous trajectory blocks for jackknife and parallelism
    int threads = 0;   ///< 0: default_thread_count()
};

namespace detail {

struct BlockTally {
    Matrix state_sum;
    std::vector<std::uint64_t> counts;
    std::uint64_t no_jump = 0;
    std::uint64_t size = 0;
};

/// Reduces per-block tallies in block order and forms the jackknife error of
/// the mean state.
inline EnsembleResult reduce_blocks(const std::vector<BlockTally> &blocks, Histogram hist, std::uint64_t seed,
                                    double tail) {
    EnsembleResult r;
    r.seed = seed;
    const Eigen::Index d = blocks.front().state_sum.rows();
    Matrix total = Matrix::Zero(d, d);
    for (const auto &b : blocks) {
        total += b.state_sum;
        for (std::size_t i = 0; i < b.counts.size(); ++i) hist.counts[i] += b.counts[i];
        r.no_jump_count += b.no_jump;
        r.n_traj += b.size;
    }
    const double n = static_cast<double>(r.n_traj);
    r.mean_state = FockDensityMatrix(total / n, tail);
    r.jump_time_histogram = std::move(hist);
    r.no_jump_fraction = static_cast<double>(r.no_jump_count) / n;

    std::vector<Matrix> leave_out;
    for (const auto &b : blocks) {
        if (b.size == 0 || b.size == r.n_traj) continue;
        leave_out.push_back((total - b.state_sum) / (n - static_cast<double>(b.size)));
    }
    const std::size_t m = leave_out.size();
    if (m >= 2) {
        Matrix avg = Matrix::Zero(d, d);
        for (const auto &l : leave_out) avg += l;
        avg /= static_cast<double>(m);
        double ss = 0.0;
        for (const auto &l : leave_out) {
            const double dist = 0.5 * trace_norm(l - avg);
            ss += dist * dist;
        }
        r.jackknife_error = std::sqrt(static_cast<double>(m - 1) / static_cast<double>(m) * ss);
    }
    return r;
}

}  // namespace detail

/// Runs n_traj independent trajectories split into contiguous blocks.
/// `simulate(index, rng)` returns the normalized final state and the
/// histogram bin of the detection (or -1 for none). Reduction is in block
/// order, so the result depends only on (n_traj, seed, blocks).
template <class Simulate>
EnsembleResult run_ensemble(std::uint64_t n_traj, std::uint64_t seed, int dim, Histogram hist, double tail,
                            const EnsembleOptions &opt, const Simulate &simulate) {
    if (n_traj < 1) throw DomainError("run_ensemble: n_traj must be >= 1");
    const int nblocks = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(1, opt.blocks)), n_traj));
    std::vector<detail::BlockTally> tallies(static_cast<std::size_t>(nblocks));
    const int threads = opt.threads > 0 ? opt.threads : default_thread_count();
    parallel_for(nblocks, threads, [&](int b) {
        auto &t = tallies[static_cast<std::size_t>(b)];
        t.state_sum = Matrix::Zero(dim, dim);
        t.counts.assign(hist.counts.size(), 0);
        const std::uint64_t begin = n_traj * static_cast<std::uint64_t>(b) / static_cast<std::uint64_t>(nblocks);
        const std::uint64_t end = n_traj * static_cast<std::uint64_t>(b + 1) / static_cast<std::uint64_t>(nblocks);
        for (std::uint64_t i = begin; i < end; ++i) {
            std::mt19937_64 rng = substream(seed, i);
            auto [state, bin] = simulate(i, rng);
            t.state_sum += state;
            if (bin < 0) {
                ++t.no_jump;
            } else {
                ++t.counts[static_cast<std::size_t>(bin)];
            }
        }
        t.size = end - begin;
    });
    return detail::reduce_blocks(tallies, std::move(hist), seed, tail);
}

}  // namespace adabs
