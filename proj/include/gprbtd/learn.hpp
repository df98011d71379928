#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gprbtd {

class BinaryWriter;
class BinaryReader;

// A training row; label 1 = threat, 0 = non-threat.
struct LabeledFeature {
  std::vector<double> values;
  int label = 0;
};

// ---- feature scaling ----------------------------------------------------

// Per-dimension z-score fitted on training rows (unit scale for constant dims).
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(std::span<const LabeledFeature> rows);
  static Standardizer identity(std::size_t dim);
  std::vector<double> apply(std::span<const double> x) const;
  void save(BinaryWriter& w) const;
  static Standardizer load(BinaryReader& r);
};

// ---- SVM ----------------------------------------------------------------

struct SvmModel {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> dual_coefs;  // alpha_i * y_i, y in {-1, +1}
  double bias = 0.0;
  double gamma = 1.0;
  double C = 1.0;
  int dim = 0;

  bool trained() const { return dim > 0; }
  void save(BinaryWriter& w) const;
  static SvmModel load(BinaryReader& r);
};

struct SvmTrainInfo {
  std::vector<double> alpha;  // per training row
  double dual_objective = 0.0;  // sum(alpha) - 1/2 alpha' Q alpha
  double gap = 0.0;             // final maximal KKT violation
  long iterations = 0;
  bool converged = false;
};

// Soft-margin C-SVM with RBF kernel exp(-gamma |a-b|^2), solved by SMO with
// second-order working-set selection until the KKT gap is below tol.
SvmModel svm_train(std::span<const LabeledFeature> data, double gamma, double C,
                   double tol = 1e-3, SvmTrainInfo* info = nullptr, long max_iter = 10'000'000);
double svm_decision(const SvmModel& model, std::span<const double> x);
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

// ---- random forest -------------------------------------------------------

struct TreeNode {
  int feature = -1;  // -1: leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // positive-class fraction at a leaf
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> x) const;
};

struct ForestParams {
  int n_trees = 100;
  int min_leaf = 2;
  int mtry = 0;  // 0: floor(sqrt(D))
  bool bootstrap = true;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_trees = 0;
  int dim = 0;
  bool trained() const { return dim > 0; }
  void save(BinaryWriter& w) const;
  static ForestModel load(BinaryReader& r);
};

// Single-class data yields a constant model and sets *single_class.
ForestModel forest_train(std::span<const LabeledFeature> data, const ForestParams& p,
                         std::uint64_t seed, bool* single_class = nullptr);
double forest_decision(const ForestModel& model, std::span<const double> x);

// ---- prototypes and KDE --------------------------------------------------

struct PrototypeSet {
  std::vector<std::vector<double>> prototypes;
  double beta = 1.0;
  void save(BinaryWriter& w) const;
  static PrototypeSet load(BinaryReader& r);
};

// k-means (seeded k-means++ initialisation, 50 Lloyd iterations);
// beta = 1 / (2 m^2) with m the median pairwise centroid distance.
PrototypeSet summarize_prototypes(std::span<const std::vector<double>> negatives, int k,
                                  std::uint64_t seed, int iterations = 50);
// (1/k) sum_j exp(-beta |f - p_j|)
double kde_score(std::span<const double> f, const PrototypeSet& p);

// ---- Platt scaling -------------------------------------------------------

struct PlattParams {
  double A = 0.0;
  double B = 0.0;
};

struct PlattFitInfo {
  int iterations = 0;
  bool converged = false;
  double loss = 0.0;
};

// p(s) = 1 / (1 + exp(A s + B)). Newton iterations with backtracking on the
// cross-entropy; targets are smoothed to (N+ + 1)/(N+ + 2) and 1/(N- + 2)
// unless raw_targets is set.
PlattParams platt_fit(std::span<const double> stats, std::span<const int> labels,
                      bool raw_targets = false, PlattFitInfo* info = nullptr,
                      int max_iter = 100);
double platt_apply(const PlattParams& p, double s);
double platt_loss(const PlattParams& p, std::span<const double> stats, std::span<const int> labels,
                  bool raw_targets = false);

}  // namespace gprbtd
