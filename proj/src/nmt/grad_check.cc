#include "subchar/nmt/grad_check.h"

#include <cmath>

namespace subchar::nmt {

double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), floor);
}

GradCheckResult grad_check(const Seq2SeqModel& model, const std::vector<Example>& batch, double eps) {
  Seq2SeqModel probe = model;
  const std::span<const Example> span(batch);
  const Seq2SeqModel grad = backward(probe, forward(probe, span).cache);

  std::vector<std::pair<std::string, const Mat*>> grads;
  grad.visit([&](const std::string& name, const Mat& g) { grads.push_back({name, &g}); });

  GradCheckResult result;
  std::size_t k = 0;
  probe.visit([&](const std::string& name, Mat& p) {
    const Mat& g = *grads[k++].second;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double saved = p.data()[i];
      p.data()[i] = saved + eps;
      const double up = forward(probe, span).loss;
      p.data()[i] = saved - eps;
      const double down = forward(probe, span).loss;
      p.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double err = relative_error(g.data()[i], numeric);
      ++result.checked;
      if (err > result.max_rel_error || result.checked == 1) {
        result.max_rel_error = err;
        result.worst_parameter = name + "[" + std::to_string(i) + "]";
        result.analytic = g.data()[i];
        result.numeric = numeric;
      }
    }
  });
  return result;
}

}  // namespace subchar::nmt
