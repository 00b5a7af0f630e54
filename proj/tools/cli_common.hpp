#pragma once

#include <atomic>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "siegel/io.hpp"
#include "siegel/padic.hpp"
#include "siegel/siegel.hpp"

namespace cli {

using siegel::Json;

struct RunConfig {
    long p = 3;
    int epsilon = 1;
    std::string format = "json";
    unsigned long long seed = 0;
    int jobs = 1;
    std::string cache_path;
    double budget = 3e8;
};

// Raised when a checked identity fails; carries the witness report.
struct Violation {
    Json report;
};

inline unsigned long long splitmix64(unsigned long long x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Generator for case `index` of a seeded suite; independent of how cases are scheduled.
inline std::mt19937_64 case_rng(unsigned long long seed, unsigned long long index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 1)));
}

// Diagonal lattice with random invariants in [0, max_a] and random unit classes, then a unimodular base change.
inline siegel::QuadLattice random_lattice(const siegel::PrimeCtx& ctx, int n, int max_a, std::mt19937_64& rng) {
    using namespace siegel;
    std::vector<Q> d(n);
    for (int i = 0; i < n; ++i)
        d[i] = Q((rng() % 2) ? 1 : ctx.r) * qpow(ctx.p, static_cast<int>(rng() % (max_a + 1)));
    Mat U = identity(n);
    for (int step = 0; step < 3 * n; ++step) {
        int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
        if (i == j) continue;
        long f = static_cast<long>(rng() % 5) - 2;
        for (int k = 0; k < n; ++k) U[k][i] += f * U[k][j];
    }
    return base_change(diag_lattice(ctx, d), U);
}

// Runs fn(0..count-1) on `jobs` threads; results come back in index order.
inline std::vector<Json> fan_out(int count, int jobs, const std::function<Json(int)>& fn) {
    std::vector<Json> out(count);
    std::vector<std::string> errors(count);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                out[i] = fn(i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    int n = std::max(1, std::min(jobs, count));
    std::vector<std::thread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (int i = 0; i < count; ++i)
        if (!errors[i].empty()) throw siegel::Error("CaseFailed", "case " + std::to_string(i) + ": " + errors[i]);
    return out;
}

inline Json report_json(const siegel::Report& R) {
    Json j;
    j["name"] = R.name;
    j["ok"] = R.ok;
    Json facts = Json::object();
    for (auto& [k, v] : R.facts) facts[k] = v;
    j["facts"] = facts;
    j["failures"] = R.failures;
    return j;
}

// Selftest entry point; returns the report object.
Json run_selftest(const RunConfig& cfg);

}  // namespace cli
