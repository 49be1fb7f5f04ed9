#ifndef ECZ_CLUSTERING_HPP
#define ECZ_CLUSTERING_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "ecz/types.hpp"

namespace ecz {

struct ZoneAssignment {
  std::vector<int> labels;       // n zone indices in [0, k)
  std::vector<double> centroids; // k x T row-major, mean pattern of each zone
  double wss = 0.0;              // total within-cluster sum of squares
  int k = 0;
  std::uint64_t seed = 0;

  const double* centroid(int c) const {
    return centroids.data() + static_cast<std::size_t>(c) * T;
  }
  int T = 0;
};

struct KmeansOptions {
  int nstart = 25;
  int max_iter = 100;
  std::uint64_t seed = 0;
  bool plus_plus = false;  // k-means++ seeding instead of sampling data rows
};

// Best-of-nstart Lloyd's runs; deterministic for a fixed seed regardless of
// thread count (restart r uses the substream (seed, r)). Labels are
// canonicalized so that zones appear in order of their first member row.
ZoneAssignment kmeans(const PatternMatrix& patterns, int k, const KmeansOptions& opts);

// One Lloyd's run from explicit initial centroids; exposed for the
// per-iteration objective checks. wss_trace, when given, receives the
// objective after every assignment step.
ZoneAssignment lloyd_run(const PatternMatrix& patterns, int k,
                         std::vector<double> init_centroids, int max_iter,
                         std::vector<double>* wss_trace = nullptr);

// Objective recomputed from scratch against member-mean centroids.
double wss(const PatternMatrix& patterns, const std::vector<int>& labels);

struct StabilityEntry {
  int changed = 0;  // block groups that received more than one matched label
  int total = 0;
  double fraction = 0.0;
};

struct StabilityTable {
  std::vector<int> ks;
  std::vector<int> nstarts;
  // keyed by (k, nstart)
  std::map<std::pair<int, int>, StabilityEntry> entries;
};

// `runs` independent kmeans fits per (k, nstart) cell; labels of run r are
// matched to run 0 by greedy nearest-centroid pairing before counting.
StabilityTable stability_analysis(const PatternMatrix& patterns, const std::vector<int>& ks,
                                  const std::vector<int>& nstarts, int runs,
                                  std::uint64_t seed);

struct Dendrogram {
  struct Merge {
    int left = 0;   // node ids: 0..n-1 leaves, n.. internal in merge order
    int right = 0;
    double distance = 0.0;
    int size = 0;   // leaves under the merged node
  };
  std::vector<Merge> merges;     // n-1 entries, nondecreasing distance
  std::vector<int> leaf_order;   // left-to-right dendrogram leaves
};

// Agglomerative clustering, complete linkage on Euclidean distance
// (nearest-neighbor chain). Deterministic: ties resolve to lower indices.
Dendrogram hierarchical_order(const PatternMatrix& patterns);

// Chance-corrected pair-counting agreement in [-1, 1]; invariant under label
// renaming. Returns 1 when both partitions are identical or both degenerate.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace ecz

#endif
