#pragma once

#include <string>
#include <utility>
#include <vector>

#include "siegel/padic.hpp"

namespace siegel {

// Representation dimension n(2m-n-1)/2, used as the normalizing exponent for every L.
int rep_dimension(int m, int n);

// #{X in Mat_{m x n}(Z/p^N) : X^t G_M X = G_L mod p^N}, by exact convolution over the rows of X.
// Work is bounded by `budget` elementary steps; BudgetExceeded beyond that.
Z count_representations(const QuadLattice& M, const QuadLattice& L, int N, double budget = 3e8);

// Number of injective X in Mat_{m x n}(F_p) with X^t G X = T, for a nondegenerate diagonal G over F_p.
Z count_injective_mod_p(const std::vector<i64>& g, const std::vector<std::vector<i64>>& T, long p);

enum class OracleMethod { Auto, Literal, Stratified };

struct OracleResult {
    Q density;
    int N_used = 0;
    bool stabilized = false;
    std::vector<std::pair<int, Z>> raw_counts;  // (N, count) for the literal route
    std::string method;                         // "literal" or "stratified"
};

struct OracleOptions {
    OracleMethod method = OracleMethod::Auto;
    double budget = 3e8;
    int max_N = -1;  // default 2*val(L) + 3
};

// Literal route: raise N until two consecutive normalized counts agree, then confirm once more.
// Stratified route (self-dual M only): sum over integral overlattices L' of
// [L':L]^{n+1-m} p^{-dim} times the number of injective solutions mod p for L'.
OracleResult density_oracle(const QuadLattice& M, const QuadLattice& L, const OracleOptions& opt = {});

}  // namespace siegel
