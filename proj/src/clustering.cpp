#include "ecz/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "ecz/kernels.hpp"
#include "ecz/rng.hpp"

namespace ecz {

namespace {

double sq_dist(const double* a, const double* b, int T) {
  double d = 0.0;
  for (int t = 0; t < T; ++t) {
    const double diff = a[t] - b[t];
    d += diff * diff;
  }
  return d;
}

// Initial centroids: k distinct data rows drawn uniformly (the default), or
// k-means++ D^2 seeding.
std::vector<double> initial_centroids(const PatternMatrix& pm, int k, Rng& rng,
                                      bool plus_plus) {
  std::vector<double> cents(static_cast<std::size_t>(k) * pm.T);
  if (!plus_plus) {
    const auto rows = rng.sample_distinct(pm.n, k);
    for (int c = 0; c < k; ++c)
      std::memcpy(cents.data() + static_cast<std::size_t>(c) * pm.T,
                  pm.row(static_cast<int>(rows[c])), sizeof(double) * pm.T);
    return cents;
  }
  std::vector<double> d2(pm.n, std::numeric_limits<double>::infinity());
  int first = static_cast<int>(rng.below(pm.n));
  std::memcpy(cents.data(), pm.row(first), sizeof(double) * pm.T);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < pm.n; ++i) {
      const double d = sq_dist(pm.row(i), cents.data() + static_cast<std::size_t>(c - 1) * pm.T,
                               pm.T);
      d2[i] = std::min(d2[i], d);
      total += d2[i];
    }
    double target = rng.uniform() * total;
    int pick = pm.n - 1;
    for (int i = 0; i < pm.n; ++i) {
      target -= d2[i];
      if (target <= 0.0) {
        pick = i;
        break;
      }
    }
    std::memcpy(cents.data() + static_cast<std::size_t>(c) * pm.T, pm.row(pick),
                sizeof(double) * pm.T);
  }
  return cents;
}

// Relabel so zone ids follow the first member row index; reorders centroids
// to match.
void canonicalize(ZoneAssignment& z) {
  std::vector<int> remap(z.k, -1);
  int next = 0;
  for (int& l : z.labels) {
    if (remap[l] < 0) remap[l] = next++;
    l = remap[l];
  }
  std::vector<double> cents(z.centroids.size());
  for (int c = 0; c < z.k; ++c) {
    if (remap[c] < 0) continue;  // empty zone cannot occur after repair
    std::memcpy(cents.data() + static_cast<std::size_t>(remap[c]) * z.T,
                z.centroids.data() + static_cast<std::size_t>(c) * z.T,
                sizeof(double) * z.T);
  }
  z.centroids = std::move(cents);
}

}  // namespace

ZoneAssignment lloyd_run(const PatternMatrix& pm, int k, std::vector<double> cents,
                         int max_iter, std::vector<double>* wss_trace) {
  const int n = pm.n, T = pm.T;
  std::vector<int> labels(n, -1), prev(n, -1);
  std::vector<double> sqd(n);
  std::vector<int> counts(k);

  double prev_obj = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    kernels::assign_nearest(pm.values.data(), n, T, cents.data(), k, labels.data(),
                            sqd.data());
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += sqd[i];
    if (wss_trace) wss_trace->push_back(obj);
    // Lloyd's objective never increases between assignment steps.
    if (obj > prev_obj * (1.0 + 1e-12) + 1e-12)
      fail(errc::internal, "k-means objective increased");
    prev_obj = obj;

    if (labels == prev) break;
    prev = labels;

    kernels::label_means(pm.values.data(), n, T, labels.data(), k, cents.data(),
                         counts.data());
    // Re-seed each empty cluster with the point farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      int far = 0;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i)
        if (sqd[i] > far_d) {
          far_d = sqd[i];
          far = i;
        }
      std::memcpy(cents.data() + static_cast<std::size_t>(c) * T, pm.row(far),
                  sizeof(double) * T);
      sqd[far] = 0.0;  // keep a second empty cluster from stealing the same row
      counts[c] = 1;
    }
  }

  ZoneAssignment z;
  z.k = k;
  z.T = T;
  z.labels = std::move(labels);
  // Final centroids are exact member means, so the stored objective matches a
  // from-scratch recomputation.
  z.centroids.assign(static_cast<std::size_t>(k) * T, 0.0);
  kernels::label_means(pm.values.data(), n, T, z.labels.data(), k, z.centroids.data(),
                       counts.data());
  double obj = 0.0;
  for (int i = 0; i < n; ++i)
    obj += sq_dist(pm.row(i), z.centroids.data() + static_cast<std::size_t>(z.labels[i]) * T,
                   T);
  z.wss = obj;
  return z;
}

ZoneAssignment kmeans(const PatternMatrix& pm, int k, const KmeansOptions& opts) {
  if (k < 1) fail(errc::domain_violation, "k must be >= 1");
  if (opts.nstart < 1) fail(errc::domain_violation, "nstart must be >= 1");
  if (pm.n < k)
    fail(errc::too_few_rows,
         std::to_string(pm.n) + " rows for k=" + std::to_string(k));
  for (double v : pm.values)
    if (!std::isfinite(v)) fail(errc::domain_violation, "non-finite pattern value");

  const Rng root(opts.seed);
  std::vector<ZoneAssignment> runs(opts.nstart);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < opts.nstart; ++r) {
    Rng rng = root.substream(r);
    runs[r] = lloyd_run(pm, k, initial_centroids(pm, k, rng, opts.plus_plus),
                        opts.max_iter);
  }
  int best = 0;
  for (int r = 1; r < opts.nstart; ++r)
    if (runs[r].wss < runs[best].wss) best = r;

  ZoneAssignment z = std::move(runs[best]);
  z.seed = opts.seed;
  canonicalize(z);
  return z;
}

double wss(const PatternMatrix& pm, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != pm.n)
    fail(errc::length_mismatch, "labels length vs rows");
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  std::vector<double> cents(static_cast<std::size_t>(k) * pm.T, 0.0);
  std::vector<int> counts(k);
  kernels::label_means(pm.values.data(), pm.n, pm.T, labels.data(), k, cents.data(),
                       counts.data());
  double total = 0.0;
  for (int i = 0; i < pm.n; ++i)
    total += sq_dist(pm.row(i), cents.data() + static_cast<std::size_t>(labels[i]) * pm.T,
                     pm.T);
  return total;
}

namespace {

// Greedy pairing of run centroids to reference centroids by smallest
// distance; returns map[run_label] = reference_label.
std::vector<int> match_centroids(const ZoneAssignment& ref, const ZoneAssignment& run) {
  const int k = ref.k;
  std::vector<int> map(k, -1);
  std::vector<bool> ref_used(k, false), run_used(k, false);
  for (int step = 0; step < k; ++step) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < k; ++i) {
      if (run_used[i]) continue;
      for (int j = 0; j < k; ++j) {
        if (ref_used[j]) continue;
        const double d = sq_dist(run.centroid(i), ref.centroid(j), ref.T);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    map[bi] = bj;
    run_used[bi] = true;
    ref_used[bj] = true;
  }
  return map;
}

}  // namespace

StabilityTable stability_analysis(const PatternMatrix& pm, const std::vector<int>& ks,
                                  const std::vector<int>& nstarts, int runs,
                                  std::uint64_t seed) {
  if (runs < 2) fail(errc::domain_violation, "stability analysis needs runs >= 2");
  StabilityTable table;
  table.ks = ks;
  table.nstarts = nstarts;
  const Rng root(seed);
  std::uint64_t cell = 0;
  for (int k : ks) {
    for (int nstart : nstarts) {
      std::vector<ZoneAssignment> fits(runs);
      for (int r = 0; r < runs; ++r) {
        KmeansOptions opt;
        opt.nstart = nstart;
        // One fresh stream per (cell, run); kmeans derives per-restart
        // substreams from it.
        opt.seed = root.substream(cell * 1000 + r).next_u64();
        fits[r] = kmeans(pm, k, opt);
      }
      ++cell;

      std::vector<int> first_label(pm.n);
      std::vector<bool> multi(pm.n, false);
      for (int i = 0; i < pm.n; ++i) first_label[i] = fits[0].labels[i];
      for (int r = 1; r < runs; ++r) {
        const auto map = match_centroids(fits[0], fits[r]);
        for (int i = 0; i < pm.n; ++i)
          if (map[fits[r].labels[i]] != first_label[i]) multi[i] = true;
      }
      StabilityEntry e;
      e.total = pm.n;
      for (int i = 0; i < pm.n; ++i)
        if (multi[i]) ++e.changed;
      e.fraction = pm.n > 0 ? static_cast<double>(e.changed) / pm.n : 0.0;
      table.entries[{k, nstart}] = e;
    }
  }
  return table;
}

Dendrogram hierarchical_order(const PatternMatrix& pm) {
  const int n = pm.n;
  if (n < 2) fail(errc::too_few_rows, "hierarchical clustering needs n >= 2");

  // Condensed distance matrix, updated in place by Lance-Williams (complete
  // linkage: new distance is the max of the two merged rows).
  std::vector<double> dist(static_cast<std::size_t>(n) * (n - 1) / 2);
  kernels::pairwise_sq_dists(pm.values.data(), n, pm.T, dist.data());
  for (double& d : dist) d = std::sqrt(d);
  auto d_at = [&](int i, int j) -> double& {
    return dist[i < j ? kernels::condensed_index(i, j, n) : kernels::condensed_index(j, i, n)];
  };

  std::vector<bool> active(n, true);
  std::vector<int> size(n, 1);
  std::vector<int> node_id(n);           // current dendrogram node id per slot
  for (int i = 0; i < n; ++i) node_id[i] = i;

  struct RawMerge {
    int a, b;        // slots (a < b); merged cluster stays in slot a
    double distance;
  };
  std::vector<RawMerge> raw;
  raw.reserve(n - 1);

  std::vector<int> chain;
  chain.reserve(n);
  int remaining = n;
  while (remaining > 1) {
    if (chain.empty()) {
      for (int i = 0; i < n; ++i)
        if (active[i]) {
          chain.push_back(i);
          break;
        }
    }
    while (true) {
      const int tip = chain.back();
      int nn = -1;
      double nn_d = std::numeric_limits<double>::infinity();
      const int prev = chain.size() >= 2 ? chain[chain.size() - 2] : -1;
      if (prev >= 0) {
        nn = prev;  // prefer the chain predecessor on ties
        nn_d = d_at(tip, prev);
      }
      for (int j = 0; j < n; ++j) {
        if (!active[j] || j == tip || j == prev) continue;
        const double d = d_at(tip, j);
        if (d < nn_d || (d == nn_d && nn != prev && j < nn)) {
          nn_d = d;
          nn = j;
        }
      }
      if (nn == prev) {
        // Reciprocal nearest neighbors: merge tip and prev.
        chain.pop_back();
        chain.pop_back();
        const int a = std::min(tip, prev), b = std::max(tip, prev);
        raw.push_back({a, b, nn_d});
        for (int j = 0; j < n; ++j) {
          if (!active[j] || j == a || j == b) continue;
          d_at(a, j) = std::max(d_at(a, j), d_at(b, j));
        }
        active[b] = false;
        size[a] += size[b];
        --remaining;
        break;
      }
      chain.push_back(nn);
    }
  }

  // NN-chain discovers merges out of height order; sort ascending (stable on
  // ties) and renumber nodes in sorted order.
  std::vector<int> order_idx(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) order_idx[i] = static_cast<int>(i);
  std::stable_sort(order_idx.begin(), order_idx.end(),
                   [&](int x, int y) { return raw[x].distance < raw[y].distance; });

  Dendrogram out;
  out.merges.reserve(raw.size());
  std::vector<int> slot_node(n);
  std::vector<int> node_size(2 * n - 1, 1);
  for (int i = 0; i < n; ++i) slot_node[i] = i;
  std::vector<std::pair<int, int>> children(2 * n - 1, {-1, -1});
  std::vector<int> min_leaf(2 * n - 1);
  for (int i = 0; i < n; ++i) min_leaf[i] = i;

  int next_node = n;
  for (int idx : order_idx) {
    const RawMerge& m = raw[static_cast<std::size_t>(idx)];
    int na = slot_node[m.a], nb = slot_node[m.b];
    // Deterministic child order: the branch holding the lowest original row
    // comes first.
    if (min_leaf[nb] < min_leaf[na]) std::swap(na, nb);
    Dendrogram::Merge rec;
    rec.left = na;
    rec.right = nb;
    rec.distance = m.distance;
    rec.size = node_size[na] + node_size[nb];
    children[next_node] = {na, nb};
    node_size[next_node] = rec.size;
    min_leaf[next_node] = std::min(min_leaf[na], min_leaf[nb]);
    slot_node[m.a] = next_node;
    out.merges.push_back(rec);
    ++next_node;
  }

  // Leaf order by left-first traversal from the root.
  out.leaf_order.reserve(n);
  std::vector<int> stack{next_node - 1};
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    if (node < n) {
      out.leaf_order.push_back(node);
      continue;
    }
    stack.push_back(children[node].second);
    stack.push_back(children[node].first);
  }
  return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) fail(errc::length_mismatch, "label vectors differ in length");
  const int n = static_cast<int>(a.size());
  int ka = 0, kb = 0;
  for (int v : a) ka = std::max(ka, v + 1);
  for (int v : b) kb = std::max(kb, v + 1);
  std::vector<long long> cont(static_cast<std::size_t>(ka) * kb, 0);
  std::vector<long long> ra(ka, 0), rb(kb, 0);
  for (int i = 0; i < n; ++i) {
    ++cont[static_cast<std::size_t>(a[i]) * kb + b[i]];
    ++ra[a[i]];
    ++rb[b[i]];
  }
  auto choose2 = [](long long x) -> double { return 0.5 * x * (x - 1); };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (long long c : cont) sum_ij += choose2(c);
  for (long long c : ra) sum_a += choose2(c);
  for (long long c : rb) sum_b += choose2(c);
  const double pairs = choose2(n);
  const double expected = sum_a * sum_b / pairs;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both partitions degenerate
  return (sum_ij - expected) / (max_index - expected);
}

}  // namespace ecz
