#pragma once

#include "damcc/autodiff.hpp"

#include <functional>
#include <string>
#include <vector>

namespace damcc {

/// A scalar function of some parameters, rebuilt from scratch on each call.
struct GradCheckProblem {
  std::string name;
  std::vector<ad::Tensor> params;
  std::function<ad::Tensor()> f;
};

/// Every op, a two-level encoder on a 5-node lifted complex, and the
/// teacher-forced decoder losses on a 4-node target.
std::vector<GradCheckProblem> gradcheck_problems(std::uint64_t seed = 0);

struct GradCheckCase {
  std::string name;
  ad::GradCheckResult result;
};

/// grad_check over every problem above.
std::vector<GradCheckCase> run_gradcheck_suite(std::uint64_t seed = 0);

}  // namespace damcc
