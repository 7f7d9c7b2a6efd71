#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sublm/util/matrix.hpp"

namespace sublm::evalprobe {

// Post-hoc softmax probe over the 16 vowel classes.
struct ProbeOptions {
  size_t steps = 2000;
  double lr = 0.1;
  double l2 = 1e-4;
  uint64_t seed = 0;
};

struct ProbeModel {
  size_t n_classes = 0;
  size_t dim = 0;
  util::RealMatrix w; // n_classes × dim
  std::vector<double> b;
};

// Full-batch gradient descent on multinomial logistic regression;
// deterministic (zero init). labels[i] in [0, n_classes).
ProbeModel probe_train(const util::RealMatrix& features, const std::vector<int>& labels,
                       size_t n_classes = 16, const ProbeOptions& opts = {});

struct ConfusionMatrix {
  size_t n_classes = 0;
  std::vector<size_t> counts; // row = true class, column = predicted
  size_t total = 0;
  double accuracy = 0.0;
  std::vector<double> recall;      // per-class, 0 for empty classes
  bool majority_flag = false;      // one predicted class covers > 90%
  size_t majority_class = 0;

  size_t at(size_t truth, size_t pred) const { return counts[truth * n_classes + pred]; }
};

ConfusionMatrix probe_eval(const ProbeModel& model, const util::RealMatrix& features,
                           const std::vector<int>& labels);

size_t probe_predict(const ProbeModel& model, const double* x);

// 16×16 CSV with a header row of class labels.
void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& cm,
                         const std::vector<std::string>& class_labels);

} // namespace sublm::evalprobe
