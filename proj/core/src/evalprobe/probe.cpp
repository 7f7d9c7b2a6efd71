#include "sublm/evalprobe/probe.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "sublm/error.hpp"
#include "sublm/util/io.hpp"

namespace sublm::evalprobe {

ProbeModel probe_train(const util::RealMatrix& features, const std::vector<int>& labels,
                       size_t n_classes, const ProbeOptions& opts) {
  const size_t n = features.rows, dim = features.cols;
  if (n != labels.size()) throw ValidationError("probe_train: feature/label count mismatch");
  if (n < n_classes)
    throw ValidationError("probe_train: need at least " + std::to_string(n_classes) +
                          " samples, got " + std::to_string(n));
  std::set<int> distinct;
  for (int l : labels) {
    if (l < 0 || static_cast<size_t>(l) >= n_classes)
      throw ValidationError("probe_train: label out of range");
    distinct.insert(l);
  }
  if (distinct.size() < 2)
    throw ValidationError("probe_train: degenerate labels (single class)");

  ProbeModel model;
  model.n_classes = n_classes;
  model.dim = dim;
  model.w = util::RealMatrix(n_classes, dim);
  model.b.assign(n_classes, 0.0);

  util::RealMatrix grad_w(n_classes, dim);
  std::vector<double> grad_b(n_classes), logits(n_classes);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (size_t step = 0; step < opts.steps; ++step) {
    std::fill(grad_w.v.begin(), grad_w.v.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      const double* x = features.row(i);
      double max_logit = -1e300;
      for (size_t c = 0; c < n_classes; ++c) {
        double acc = model.b[c];
        const double* wr = model.w.row(c);
        for (size_t d = 0; d < dim; ++d) acc += wr[d] * x[d];
        logits[c] = acc;
        max_logit = std::max(max_logit, acc);
      }
      double z = 0.0;
      for (size_t c = 0; c < n_classes; ++c) z += std::exp(logits[c] - max_logit);
      for (size_t c = 0; c < n_classes; ++c) {
        const double p = std::exp(logits[c] - max_logit) / z;
        const double g = (p - (static_cast<int>(c) == labels[i] ? 1.0 : 0.0)) * inv_n;
        grad_b[c] += g;
        double* gw = grad_w.row(c);
        for (size_t d = 0; d < dim; ++d) gw[d] += g * x[d];
      }
    }
    for (size_t c = 0; c < n_classes; ++c) {
      model.b[c] -= opts.lr * grad_b[c];
      double* wr = model.w.row(c);
      const double* gw = grad_w.row(c);
      for (size_t d = 0; d < dim; ++d) wr[d] -= opts.lr * (gw[d] + opts.l2 * wr[d]);
    }
  }
  return model;
}

size_t probe_predict(const ProbeModel& model, const double* x) {
  size_t best = 0;
  double best_score = -1e300;
  for (size_t c = 0; c < model.n_classes; ++c) {
    double acc = model.b[c];
    const double* wr = model.w.row(c);
    for (size_t d = 0; d < model.dim; ++d) acc += wr[d] * x[d];
    if (acc > best_score) {
      best_score = acc;
      best = c;
    }
  }
  return best;
}

ConfusionMatrix probe_eval(const ProbeModel& model, const util::RealMatrix& features,
                           const std::vector<int>& labels) {
  if (features.rows != labels.size())
    throw ValidationError("probe_eval: feature/label count mismatch");
  ConfusionMatrix cm;
  cm.n_classes = model.n_classes;
  cm.counts.assign(model.n_classes * model.n_classes, 0);
  cm.total = features.rows;

  std::vector<size_t> predicted_counts(model.n_classes, 0);
  size_t correct = 0;
  for (size_t i = 0; i < features.rows; ++i) {
    const size_t pred = probe_predict(model, features.row(i));
    const size_t truth = static_cast<size_t>(labels[i]);
    ++cm.counts[truth * model.n_classes + pred];
    ++predicted_counts[pred];
    if (pred == truth) ++correct;
  }
  cm.accuracy = cm.total ? static_cast<double>(correct) / static_cast<double>(cm.total) : 0.0;

  cm.recall.assign(model.n_classes, 0.0);
  for (size_t c = 0; c < model.n_classes; ++c) {
    size_t support = 0;
    for (size_t p = 0; p < model.n_classes; ++p) support += cm.at(c, p);
    if (support > 0) cm.recall[c] = static_cast<double>(cm.at(c, c)) / support;
  }

  for (size_t c = 0; c < model.n_classes; ++c) {
    if (cm.total > 0 &&
        static_cast<double>(predicted_counts[c]) > 0.9 * static_cast<double>(cm.total)) {
      cm.majority_flag = true;
      cm.majority_class = c;
    }
  }
  return cm;
}

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& cm,
                         const std::vector<std::string>& class_labels) {
  if (class_labels.size() != cm.n_classes)
    throw ValidationError("write_confusion_csv: label count mismatch");
  std::ostringstream os;
  os << "true\\pred";
  for (const auto& l : class_labels) os << ',' << l;
  os << '\n';
  for (size_t c = 0; c < cm.n_classes; ++c) {
    os << class_labels[c];
    for (size_t p = 0; p < cm.n_classes; ++p) os << ',' << cm.at(c, p);
    os << '\n';
  }
  util::write_text_file(path, os.str());
}

} // namespace sublm::evalprobe
