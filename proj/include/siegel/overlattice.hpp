#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "siegel/finite_quad.hpp"
#include "siegel/padic.hpp"

namespace siegel {

// An integral lattice L' with L <= L' <= L'^dual, in the coordinates of L.
struct OverlatticeEntry {
    std::string key;  // canonical Hermite form over Z_p, unique per sublattice
    Mat basis;        // columns: a basis of L' in L-coordinates
    Mat gram;         // Gram matrix of that basis
    int ell = 0;      // length of L'/L
    int t = 0;        // type of L'
    int chi0 = 1;     // discriminant class of the non-degenerate part of L' mod p
    int val = 0;
    int rank = 0;
    int sgn(int k) const { return ((rank - t - k) % 2 == 0) ? chi0 : 0; }
    FiniteQuadSpace kappa(long p) const { return {p, rank, t, chi0}; }
};

struct OverlatticeLimits {
    int max_val = 12;
    int max_rank = 6;
    bool force = false;
};

std::vector<OverlatticeEntry> minimal_overlattices(const QuadLattice& L);
std::vector<OverlatticeEntry> enumerate_integral_overlattices(const QuadLattice& L,
                                                              const OverlatticeLimits& lim = {});

// Memoized enumeration; bounded LRU keyed by (p, Gram matrix).
std::shared_ptr<const std::vector<OverlatticeEntry>> cached_overlattices(const QuadLattice& L,
                                                                         const OverlatticeLimits& lim = {});
void set_overlattice_cache_capacity(size_t cap);
size_t overlattice_cache_size();
void clear_overlattice_cache();
// Cache contents, most recent first, and insertion of precomputed lists (for persistence).
std::vector<std::pair<std::string, std::shared_ptr<const std::vector<OverlatticeEntry>>>> overlattice_cache_snapshot();
void overlattice_cache_insert(const std::string& key, std::vector<OverlatticeEntry> entries);

// Independent count through isotropic subgroups of the discriminant group L^dual/L.
// Returns ell -> number of integral overlattices of that colength.
std::map<int, long> count_overlattices_by_subgroups(const QuadLattice& L);

struct SubLattice {
    Mat basis;  // columns in ambient coordinates
    QuadLattice lattice;
};
// (span of basis_cols) intersected with the Q-span of `subspace`.
SubLattice restrict_to_sublattice(const QuadLattice& ambient, const Mat& basis_cols,
                                  const std::vector<Vec>& subspace);

std::string gram_key(const QuadLattice& L);

}  // namespace siegel
