#pragma once

#include <string>
#include <vector>

#include "subchar/nmt/model.h"
#include "subchar/nmt/network.h"

namespace subchar::nmt {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_parameter;  // "name[index]"
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

/// |a - n| / max(|a| + |n|, floor). The floor keeps entries whose true
/// gradient is zero from dividing roundoff by roundoff.
double relative_error(double analytic, double numeric, double floor = 1e-6);

/// Compares backward() with central differences of forward() on every
/// parameter entry, dropout off.
GradCheckResult grad_check(const Seq2SeqModel& model, const std::vector<Example>& batch, double eps = 1e-4);

}  // namespace subchar::nmt
