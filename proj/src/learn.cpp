#include "gprbtd/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "gprbtd/core.hpp"
#include "gprbtd/random.hpp"
#include "gprbtd/serialize.hpp"

namespace gprbtd {

namespace {

std::size_t check_rows(std::span<const LabeledFeature> data, const char* who) {
  if (data.empty()) throw std::domain_error(std::string(who) + ": no training rows");
  const std::size_t dim = data[0].values.size();
  if (dim == 0) throw std::domain_error(std::string(who) + ": empty feature vectors");
  for (const auto& r : data) {
    if (r.values.size() != dim) throw std::domain_error(std::string(who) + ": ragged features");
    if (r.label != 0 && r.label != 1) throw std::domain_error(std::string(who) + ": labels must be 0/1");
    for (double v : r.values)
      if (!std::isfinite(v)) throw std::domain_error(std::string(who) + ": non-finite feature");
  }
  return dim;
}

void check_dim(std::size_t expected, std::size_t got, const char* who) {
  if (expected != got) throw std::domain_error(std::string(who) + ": dimension mismatch");
}

}  // namespace

// ---- feature scaling ----------------------------------------------------

Standardizer Standardizer::fit(std::span<const LabeledFeature> rows) {
  const std::size_t dim = check_rows(rows, "Standardizer");
  Standardizer s;
  s.mean.assign(dim, 0.0);
  s.scale.assign(dim, 0.0);
  for (const auto& r : rows)
    for (std::size_t d = 0; d < dim; ++d) s.mean[d] += r.values[d];
  for (double& m : s.mean) m /= static_cast<double>(rows.size());
  for (const auto& r : rows)
    for (std::size_t d = 0; d < dim; ++d) {
      const double e = r.values[d] - s.mean[d];
      s.scale[d] += e * e;
    }
  for (double& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(rows.size()));
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t dim) {
  return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  check_dim(mean.size(), x.size(), "Standardizer");
  std::vector<double> out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = (x[d] - mean[d]) / scale[d];
  return out;
}

void Standardizer::save(BinaryWriter& w) const {
  w.f64s(mean);
  w.f64s(scale);
}

Standardizer Standardizer::load(BinaryReader& r) {
  Standardizer s;
  s.mean = r.f64s();
  s.scale = r.f64s();
  if (s.mean.size() != s.scale.size()) throw DataError("standardizer: size mismatch");
  return s;
}

// ---- SVM ----------------------------------------------------------------

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - b[i];
    d2 += e * e;
  }
  return std::exp(-gamma * d2);
}

namespace {

// Kernel rows K(i, .), precomputed in full for small problems and cached
// otherwise.
class KernelRows {
 public:
  KernelRows(std::span<const LabeledFeature> data, double gamma) : data_(data), gamma_(gamma) {
    n_ = data.size();
    full_ = n_ <= 4000;
    if (full_) {
      k_.assign(n_ * n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j)
          k_[i * n_ + j] = k_[j * n_ + i] = rbf_kernel(data[i].values, data[j].values, gamma);
    } else {
      capacity_ = std::max<std::size_t>(8, (std::size_t{400} << 20) / (8 * n_));
    }
  }

  const double* row(std::size_t i) {
    if (full_) return k_.data() + i * n_;
    if (auto it = cache_.find(i); it != cache_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first.data();
    }
    if (cache_.size() >= capacity_) {
      cache_.erase(lru_.back());
      lru_.pop_back();
    }
    std::vector<double> r(n_);
    for (std::size_t j = 0; j < n_; ++j) r[j] = rbf_kernel(data_[i].values, data_[j].values, gamma_);
    lru_.push_front(i);
    auto& slot = cache_[i];
    slot.first = std::move(r);
    slot.second = lru_.begin();
    return slot.first.data();
  }

  double diag(std::size_t) const { return 1.0; }

 private:
  std::span<const LabeledFeature> data_;
  double gamma_;
  std::size_t n_ = 0;
  bool full_ = true;
  std::vector<double> k_;
  std::size_t capacity_ = 0;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>> cache_;
};

}  // namespace

SvmModel svm_train(std::span<const LabeledFeature> data, double gamma, double C, double tol,
                   SvmTrainInfo* info, long max_iter) {
  const std::size_t dim = check_rows(data, "svm_train");
  if (!(gamma > 0) || !(C > 0) || !(tol > 0))
    throw std::domain_error("svm_train: gamma, C and tol must be positive");
  const std::size_t n = data.size();
  std::vector<double> y(n);
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = data[i].label ? 1.0 : -1.0;
    (data[i].label ? pos : neg) = true;
  }
  if (!pos || !neg) throw std::domain_error("svm_train: both classes are required");

  KernelRows K(data, gamma);
  std::vector<double> alpha(n, 0.0), G(n, -1.0);
  constexpr double tau = 1e-12;
  long iter = 0;
  double gap = 0.0;
  bool converged = false;

  while (iter < max_iter) {
    // second-order working-set selection
    double gmax = -std::numeric_limits<double>::infinity();
    long i = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (alpha[t] < C && -G[t] >= gmax) gmax = -G[t], i = static_cast<long>(t);
      } else {
        if (alpha[t] > 0 && G[t] >= gmax) gmax = G[t], i = static_cast<long>(t);
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    long j = -1;
    double best = std::numeric_limits<double>::infinity();
    const double* Ki = i >= 0 ? K.row(static_cast<std::size_t>(i)) : nullptr;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!(alpha[t] > 0)) continue;
        const double gd = gmax + G[t];
        gmax2 = std::max(gmax2, G[t]);
        if (gd > 0 && Ki) {
          double quad = 2.0 - 2.0 * y[i] * Ki[t];
          if (quad <= 0) quad = tau;
          const double obj = -gd * gd / quad;
          if (obj <= best) best = obj, j = static_cast<long>(t);
        }
      } else {
        if (!(alpha[t] < C)) continue;
        const double gd = gmax - G[t];
        gmax2 = std::max(gmax2, -G[t]);
        if (gd > 0 && Ki) {
          double quad = 2.0 + 2.0 * y[i] * Ki[t];
          if (quad <= 0) quad = tau;
          const double obj = -gd * gd / quad;
          if (obj <= best) best = obj, j = static_cast<long>(t);
        }
      }
    }
    gap = gmax + gmax2;
    if (gap < tol || j < 0) {
      converged = true;
      break;
    }
    ++iter;

    const double* Kj = K.row(static_cast<std::size_t>(j));
    Ki = K.row(static_cast<std::size_t>(i));
    const double Qij = y[i] * y[j] * Ki[j];
    const double old_i = alpha[i], old_j = alpha[j];
    double ai = old_i, aj = old_j;
    if (y[i] != y[j]) {
      double quad = 2.0 + 2.0 * Qij;
      if (quad <= 0) quad = tau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) aj = 0, ai = diff;
      } else {
        if (ai < 0) ai = 0, aj = -diff;
      }
      if (diff > 0) {
        if (ai > C) ai = C, aj = C - diff;
      } else {
        if (aj > C) aj = C, ai = C + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * Qij;
      if (quad <= 0) quad = tau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) ai = C, aj = sum - C;
      } else {
        if (aj < 0) aj = 0, ai = sum;
      }
      if (sum > C) {
        if (aj > C) aj = C, ai = sum - C;
      } else {
        if (ai < 0) ai = 0, aj = sum;
      }
    }
    alpha[i] = ai;
    alpha[j] = aj;
    const double di = ai - old_i, dj = aj - old_j;
    for (std::size_t t = 0; t < n; ++t)
      G[t] += y[t] * (y[i] * Ki[t] * di + y[j] * Kj[t] * dj);
  }

  // bias from free vectors, else the midpoint of the feasible interval
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  int n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);

  SvmModel m;
  m.gamma = gamma;
  m.C = C;
  m.dim = static_cast<int>(dim);
  m.bias = -rho;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0) {
      m.support_vectors.push_back(data[t].values);
      m.dual_coefs.push_back(alpha[t] * y[t]);
    }

  if (info) {
    double s = 0.0, aG = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      s += alpha[t];
      aG += alpha[t] * G[t];
    }
    info->alpha = alpha;
    info->dual_objective = 0.5 * s - 0.5 * aG;
    info->gap = gap;
    info->iterations = iter;
    info->converged = converged;
  }
  return m;
}

double svm_decision(const SvmModel& m, std::span<const double> x) {
  if (!m.trained()) throw std::logic_error("svm_decision: model is not trained");
  check_dim(static_cast<std::size_t>(m.dim), x.size(), "svm_decision");
  double f = m.bias;
  for (std::size_t i = 0; i < m.support_vectors.size(); ++i)
    f += m.dual_coefs[i] * rbf_kernel(m.support_vectors[i], x, m.gamma);
  return f;
}

void SvmModel::save(BinaryWriter& w) const {
  w.u64(static_cast<std::uint64_t>(dim));
  w.f64(gamma);
  w.f64(C);
  w.f64(bias);
  w.f64s(dual_coefs);
  w.u64(support_vectors.size());
  for (const auto& sv : support_vectors) w.f64s(sv);
}

SvmModel SvmModel::load(BinaryReader& r) {
  SvmModel m;
  m.dim = static_cast<int>(r.u64());
  m.gamma = r.f64();
  m.C = r.f64();
  m.bias = r.f64();
  m.dual_coefs = r.f64s();
  const std::uint64_t n = r.u64();
  if (n != m.dual_coefs.size()) throw DataError("svm model: support vector count mismatch");
  m.support_vectors.resize(n);
  for (auto& sv : m.support_vectors) {
    sv = r.f64s();
    if (sv.size() != static_cast<std::size_t>(m.dim)) throw DataError("svm model: bad dimension");
  }
  return m;
}

// ---- random forest -------------------------------------------------------

double DecisionTree::predict(std::span<const double> x) const {
  int k = 0;
  while (nodes[k].feature >= 0) k = x[nodes[k].feature] <= nodes[k].threshold ? nodes[k].left : nodes[k].right;
  return nodes[k].value;
}

namespace {

DecisionTree grow_tree(std::span<const LabeledFeature> data, std::vector<int> idx,
                       const ForestParams& p, int mtry, Rng& rng) {
  const int dim = static_cast<int>(data[0].values.size());
  DecisionTree tree;
  struct Task {
    int node, begin, end;
  };
  std::vector<Task> stack;
  tree.nodes.push_back({});
  stack.push_back({0, 0, static_cast<int>(idx.size())});
  std::vector<int> features(dim);
  std::vector<int> order;

  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    const int n = task.end - task.begin;
    int n_pos = 0;
    for (int k = task.begin; k < task.end; ++k) n_pos += data[idx[k]].label;
    tree.nodes[task.node].value = static_cast<double>(n_pos) / n;
    if (n_pos == 0 || n_pos == n || n < 2 * p.min_leaf) continue;

    std::iota(features.begin(), features.end(), 0);
    for (int k = 0; k < mtry; ++k)
      std::swap(features[k], features[k + static_cast<int>(rng.index(dim - k))]);

    int best_f = -1;
    double best_thr = 0.0, best_imp = std::numeric_limits<double>::infinity();
    for (int m = 0; m < mtry; ++m) {
      const int f = features[m];
      order.assign(idx.begin() + task.begin, idx.begin() + task.end);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return data[a].values[f] < data[b].values[f]; });
      int left_n = 0, left_pos = 0;
      for (int k = 1; k < n; ++k) {
        ++left_n;
        left_pos += data[order[k - 1]].label;
        const double a = data[order[k - 1]].values[f], b = data[order[k]].values[f];
        if (a == b || left_n < p.min_leaf || n - left_n < p.min_leaf) continue;
        const int rn = n - left_n, rp = n_pos - left_pos;
        const double imp = 2.0 * left_pos * (left_n - left_pos) / left_n +
                           2.0 * rp * (rn - rp) / static_cast<double>(rn);
        if (imp < best_imp) {
          best_imp = imp;
          best_f = f;
          best_thr = 0.5 * (a + b);
          if (!(best_thr < b)) best_thr = a;
        }
      }
    }
    if (best_f < 0) continue;

    auto mid = std::stable_partition(idx.begin() + task.begin, idx.begin() + task.end,
                                     [&](int r) { return data[r].values[best_f] <= best_thr; });
    const int split = static_cast<int>(mid - idx.begin());
    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes.push_back({});
    tree.nodes[task.node].feature = best_f;
    tree.nodes[task.node].threshold = best_thr;
    tree.nodes[task.node].left = left;
    tree.nodes[task.node].right = left + 1;
    stack.push_back({left + 1, split, task.end});
    stack.push_back({left, task.begin, split});
  }
  return tree;
}

}  // namespace

ForestModel forest_train(std::span<const LabeledFeature> data, const ForestParams& p,
                         std::uint64_t seed, bool* single_class) {
  const std::size_t dim = check_rows(data, "forest_train");
  if (p.n_trees < 1 || p.min_leaf < 1) throw std::domain_error("forest_train: bad parameters");
  const int mtry = p.mtry > 0 ? std::min<int>(p.mtry, static_cast<int>(dim))
                              : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(dim)))));
  int n_pos = 0;
  for (const auto& r : data) n_pos += r.label;
  const bool one_class = n_pos == 0 || n_pos == static_cast<int>(data.size());
  if (single_class) *single_class = one_class;

  ForestModel m;
  m.dim = static_cast<int>(dim);
  m.n_trees = p.n_trees;
  m.trees.reserve(p.n_trees);
  const int n = static_cast<int>(data.size());
  for (int t = 0; t < p.n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<int> idx(n);
    if (p.bootstrap)
      for (int& v : idx) v = static_cast<int>(rng.index(n));
    else
      std::iota(idx.begin(), idx.end(), 0);
    if (one_class) {
      DecisionTree leaf;
      leaf.nodes.push_back({-1, 0.0, -1, -1, n_pos ? 1.0 : 0.0});
      m.trees.push_back(std::move(leaf));
    } else {
      m.trees.push_back(grow_tree(data, std::move(idx), p, mtry, rng));
    }
  }
  return m;
}

double forest_decision(const ForestModel& m, std::span<const double> x) {
  if (!m.trained()) throw std::logic_error("forest_decision: model is not trained");
  check_dim(static_cast<std::size_t>(m.dim), x.size(), "forest_decision");
  double s = 0.0;
  for (const auto& t : m.trees) s += t.predict(x);
  return s / static_cast<double>(m.trees.size());
}

void ForestModel::save(BinaryWriter& w) const {
  w.u64(static_cast<std::uint64_t>(dim));
  w.u64(trees.size());
  for (const auto& t : trees) {
    w.u64(t.nodes.size());
    for (const auto& nd : t.nodes) {
      w.i64(nd.feature);
      w.f64(nd.threshold);
      w.i64(nd.left);
      w.i64(nd.right);
      w.f64(nd.value);
    }
  }
}

ForestModel ForestModel::load(BinaryReader& r) {
  ForestModel m;
  m.dim = static_cast<int>(r.u64());
  m.trees.resize(r.u64());
  m.n_trees = static_cast<int>(m.trees.size());
  for (auto& t : m.trees) {
    t.nodes.resize(r.u64());
    for (auto& nd : t.nodes) {
      nd.feature = static_cast<int>(r.i64());
      nd.threshold = r.f64();
      nd.left = static_cast<int>(r.i64());
      nd.right = static_cast<int>(r.i64());
      nd.value = r.f64();
      const auto sz = static_cast<int>(t.nodes.size());
      if (nd.feature >= m.dim || (nd.feature >= 0 && (nd.left <= 0 || nd.left >= sz || nd.right <= 0 || nd.right >= sz)))
        throw DataError("forest model: corrupt node");
    }
  }
  return m;
}

// ---- prototypes and KDE --------------------------------------------------

namespace {
double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - b[i];
    s += e * e;
  }
  return s;
}
}  // namespace

PrototypeSet summarize_prototypes(std::span<const std::vector<double>> x, int k,
                                  std::uint64_t seed, int iterations) {
  if (k < 1) throw std::domain_error("summarize_prototypes: k must be >= 1");
  if (static_cast<std::size_t>(k) > x.size())
    throw std::domain_error("summarize_prototypes: k exceeds the number of negatives");
  const std::size_t n = x.size(), dim = x[0].size();
  for (const auto& v : x)
    if (v.size() != dim) throw std::domain_error("summarize_prototypes: ragged features");

  Rng rng(seed);
  std::vector<std::vector<double>> c;
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::vector<bool> used(n, false);
  std::size_t first = rng.index(n);
  c.push_back(x[first]);
  used[first] = true;
  while (static_cast<int>(c.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(x[i], c.back()));
      total += d2[i];
    }
    std::size_t pick = n;
    if (total > 0) {
      double r = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0) continue;
        pick = i;
        r -= d2[i];
        if (r < 0) break;
      }
    } else {
      for (std::size_t i = 0; i < n && pick == n; ++i)
        if (!used[i]) pick = i;
    }
    used[pick] = true;
    c.push_back(x[pick]);
  }

  std::vector<int> assign(n, -1);
  for (int it = 0; it < iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = sq_dist(x[i], c[0]);
      for (int j = 1; j < k; ++j) {
        const double d = sq_dist(x[i], c[j]);
        if (d < bd) bd = d, best = j;
      }
      if (assign[i] != best) assign[i] = best, changed = true;
    }
    if (!changed) break;
    std::vector<std::vector<double>> sum(k, std::vector<double>(dim, 0.0));
    std::vector<int> cnt(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++cnt[assign[i]];
      for (std::size_t d = 0; d < dim; ++d) sum[assign[i]][d] += x[i][d];
    }
    for (int j = 0; j < k; ++j)
      if (cnt[j] > 0)
        for (std::size_t d = 0; d < dim; ++d) c[j][d] = sum[j][d] / cnt[j];
  }

  PrototypeSet p;
  p.prototypes = std::move(c);
  std::vector<double> dist;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) dist.push_back(std::sqrt(sq_dist(p.prototypes[a], p.prototypes[b])));
  double m = 0.0;
  if (!dist.empty()) {
    std::sort(dist.begin(), dist.end());
    const std::size_t h = dist.size() / 2;
    m = dist.size() % 2 ? dist[h] : 0.5 * (dist[h - 1] + dist[h]);
  }
  p.beta = m > 0 ? 1.0 / (2.0 * m * m) : 1.0;
  return p;
}

double kde_score(std::span<const double> f, const PrototypeSet& p) {
  if (p.prototypes.empty()) throw std::logic_error("kde_score: empty prototype set");
  check_dim(p.prototypes[0].size(), f.size(), "kde_score");
  double s = 0.0;
  for (const auto& q : p.prototypes) s += std::exp(-p.beta * std::sqrt(sq_dist(f, q)));
  return s / static_cast<double>(p.prototypes.size());
}

void PrototypeSet::save(BinaryWriter& w) const {
  w.f64(beta);
  w.u64(prototypes.size());
  for (const auto& q : prototypes) w.f64s(q);
}

PrototypeSet PrototypeSet::load(BinaryReader& r) {
  PrototypeSet p;
  p.beta = r.f64();
  p.prototypes.resize(r.u64());
  for (auto& q : p.prototypes) q = r.f64s();
  return p;
}

// ---- Platt scaling -------------------------------------------------------

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct PlattData {
  std::vector<double> t;
};

PlattData targets(std::span<const double> stats, std::span<const int> labels, bool raw) {
  if (stats.size() != labels.size()) throw std::domain_error("platt_fit: size mismatch");
  int np = 0, nn = 0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (!std::isfinite(stats[i])) throw std::domain_error("platt_fit: non-finite statistic");
    if (labels[i] != 0 && labels[i] != 1) throw std::domain_error("platt_fit: labels must be 0/1");
    (labels[i] ? np : nn)++;
  }
  if (np == 0 || nn == 0) throw std::domain_error("platt_fit: both classes are required");
  const double hi = raw ? 1.0 : (np + 1.0) / (np + 2.0);
  const double lo = raw ? 0.0 : 1.0 / (nn + 2.0);
  PlattData d;
  for (int l : labels) d.t.push_back(l ? hi : lo);
  return d;
}

double loss_of(double A, double B, std::span<const double> s, const std::vector<double>& t) {
  double L = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double z = A * s[i] + B;
    L += t[i] * softplus(z) + (1.0 - t[i]) * softplus(-z);
  }
  return L;
}

}  // namespace

double platt_apply(const PlattParams& p, double s) {
  const double z = p.A * s + p.B;
  if (z >= 0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double platt_loss(const PlattParams& p, std::span<const double> stats, std::span<const int> labels,
                  bool raw_targets) {
  auto d = targets(stats, labels, raw_targets);
  return loss_of(p.A, p.B, stats, d.t);
}

PlattParams platt_fit(std::span<const double> s, std::span<const int> labels, bool raw_targets,
                      PlattFitInfo* info, int max_iter) {
  const auto d = targets(s, labels, raw_targets);
  int np = 0;
  for (int l : labels) np += l;
  const int nn = static_cast<int>(labels.size()) - np;
  double A = 0.0, B = std::log((nn + 1.0) / (np + 1.0));
  double L = loss_of(A, B, s, d.t);
  PlattFitInfo st;
  for (st.iterations = 0; st.iterations < max_iter; ++st.iterations) {
    double ga = 0, gb = 0, haa = 1e-12, hab = 0, hbb = 1e-12;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double p = platt_apply({A, B}, s[i]);
      const double r = d.t[i] - p;
      const double w = p * (1.0 - p);
      ga += s[i] * r;
      gb += r;
      haa += s[i] * s[i] * w;
      hab += s[i] * w;
      hbb += w;
    }
    if (std::hypot(ga, gb) < 1e-8) {
      st.converged = true;
      break;
    }
    const double det = haa * hbb - hab * hab;
    const double da = -(hbb * ga - hab * gb) / det;
    const double db = -(-hab * ga + haa * gb) / det;
    const double slope = ga * da + gb * db;
    double step = 1.0;
    bool moved = false;
    while (step >= 1e-10) {
      const double nA = A + step * da, nB = B + step * db;
      const double nL = loss_of(nA, nB, s, d.t);
      if (nL <= L + 1e-4 * step * slope) {
        A = nA;
        B = nB;
        L = nL;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  st.loss = L;
  if (info) *info = st;
  return {A, B};
}

}  // namespace gprbtd
