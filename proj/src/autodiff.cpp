#include "damcc/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace damcc::ad {

namespace {

thread_local bool g_grad_enabled = true;

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

[[noreturn]] void shape_fail(const char* op, const std::string& detail) {
  throw ShapeError(std::string(op) + ": shape mismatch (" + detail + ")");
}

// The detail string is only built on failure.
#define REQUIRE_SHAPE(ok, op, detail) \
  do {                                \
    if (!(ok)) shape_fail(op, detail); \
  } while (0)

void accumulate(Node& n, const Matrix& g) {
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) n.grad = g;
  else n.grad += g;
}

// n.grad += x * y without a temporary; deferred for leaves.
template <class X, class Y>
void accumulate_product(Node& n, const X& x, const Y& y) {
  if (!n.requires_grad) return;
  if (!n.backward) n.deferred.emplace_back(x, y);
  else if (n.grad.size() == 0) n.grad.noalias() = x * y;
  else n.grad.noalias() += x * y;
}

Tensor make(Matrix value, std::vector<Tensor> parents, std::function<void(Node&)> bw) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (g_grad_enabled) {
    bool any = false;
    for (const auto& p : parents) any = any || p.requires_grad();
    if (any) {
      node->requires_grad = true;
      for (auto& p : parents) node->parents.push_back(p.node());
      node->backward = std::move(bw);
    }
  }
  return Tensor(std::move(node));
}

}  // namespace

Tensor Tensor::constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Tensor(std::move(node));
}

Tensor Tensor::parameter(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Tensor(std::move(node));
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) throw ShapeError("item: tensor is " + shape(value()) + ", not 1x1");
  return value()(0, 0);
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

Tensor matmul(const Tensor& a, const Tensor& b) {
  REQUIRE_SHAPE(a.cols() == b.rows(), "matmul", shape(a.value()) + " * " + shape(b.value()));
  return make(a.value() * b.value(), {a, b}, [](Node& s) {
    const Matrix& A = s.parents[0]->value;
    const Matrix& B = s.parents[1]->value;
    accumulate_product(*s.parents[0], s.grad, B.transpose());
    accumulate_product(*s.parents[1], A.transpose(), s.grad);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.rows() == b.rows() && a.cols() == b.cols())
    return make(a.value() + b.value(), {a, b}, [](Node& s) {
      accumulate(*s.parents[0], s.grad);
      accumulate(*s.parents[1], s.grad);
    });
  REQUIRE_SHAPE(b.rows() == 1 && b.cols() == a.cols(), "add", shape(a.value()) + " + " + shape(b.value()));
  Matrix out = a.value();
  out.rowwise() += b.value().row(0);
  return make(std::move(out), {a, b}, [](Node& s) {
    accumulate(*s.parents[0], s.grad);
    if (s.parents[1]->requires_grad) accumulate(*s.parents[1], s.grad.colwise().sum());
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  REQUIRE_SHAPE(a.rows() == b.rows() && a.cols() == b.cols(), "sub", shape(a.value()) + " - " + shape(b.value()));
  return make(a.value() - b.value(), {a, b}, [](Node& s) {
    accumulate(*s.parents[0], s.grad);
    accumulate(*s.parents[1], -s.grad);
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  REQUIRE_SHAPE(a.rows() == b.rows() && a.cols() == b.cols(), "mul", shape(a.value()) + " .* " + shape(b.value()));
  return make(a.value().cwiseProduct(b.value()), {a, b}, [](Node& s) {
    if (s.parents[0]->requires_grad) accumulate(*s.parents[0], s.grad.cwiseProduct(s.parents[1]->value));
    if (s.parents[1]->requires_grad) accumulate(*s.parents[1], s.grad.cwiseProduct(s.parents[0]->value));
  });
}

Tensor scale(const Tensor& a, double k) {
  return make(a.value() * k, {a}, [k](Node& s) { accumulate(*s.parents[0], s.grad * k); });
}

Tensor add_scalar(const Tensor& a, double k) {
  Matrix out = a.value().array() + k;
  return make(std::move(out), {a}, [](Node& s) { accumulate(*s.parents[0], s.grad); });
}

Tensor transpose(const Tensor& a) {
  return make(a.value().transpose(), {a}, [](Node& s) { accumulate(*s.parents[0], s.grad.transpose()); });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  REQUIRE_SHAPE(!parts.empty(), "concat_cols", "no inputs");
  const Eigen::Index r = parts[0].rows();
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    REQUIRE_SHAPE(p.rows() == r, "concat_cols", shape(parts[0].value()) + " | " + shape(p.value()));
    c += p.cols();
  }
  Matrix out(r, c);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return make(std::move(out), parts, [](Node& s) {
    Eigen::Index at = 0;
    for (auto& p : s.parents) {
      if (p->requires_grad) accumulate(*p, s.grad.middleCols(at, p->value.cols()));
      at += p->value.cols();
    }
  });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  REQUIRE_SHAPE(!parts.empty(), "concat_rows", "no inputs");
  const Eigen::Index c = parts[0].cols();
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    REQUIRE_SHAPE(p.cols() == c, "concat_rows", shape(parts[0].value()) + " / " + shape(p.value()));
    r += p.rows();
  }
  Matrix out(r, c);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return make(std::move(out), parts, [](Node& s) {
    Eigen::Index at = 0;
    for (auto& p : s.parents) {
      if (p->requires_grad) accumulate(*p, s.grad.middleRows(at, p->value.rows()));
      at += p->value.rows();
    }
  });
}

Tensor slice_cols(const Tensor& a, Eigen::Index start, Eigen::Index count) {
  REQUIRE_SHAPE(start >= 0 && count >= 0 && start + count <= a.cols(), "slice_cols",
          shape(a.value()) + " [" + std::to_string(start) + "+" + std::to_string(count) + "]");
  return make(a.value().middleCols(start, count), {a}, [start, count](Node& s) {
    Matrix g = Matrix::Zero(s.parents[0]->value.rows(), s.parents[0]->value.cols());
    g.middleCols(start, count) = s.grad;
    accumulate(*s.parents[0], g);
  });
}

Tensor slice_rows(const Tensor& a, Eigen::Index start, Eigen::Index count) {
  REQUIRE_SHAPE(start >= 0 && count >= 0 && start + count <= a.rows(), "slice_rows",
          shape(a.value()) + " [" + std::to_string(start) + "+" + std::to_string(count) + "]");
  return make(a.value().middleRows(start, count), {a}, [start, count](Node& s) {
    Matrix g = Matrix::Zero(s.parents[0]->value.rows(), s.parents[0]->value.cols());
    g.middleRows(start, count) = s.grad;
    accumulate(*s.parents[0], g);
  });
}

Tensor outer_sum(const Tensor& p, const Tensor& q) {
  REQUIRE_SHAPE(p.cols() == 1 && q.cols() == 1, "outer_sum", shape(p.value()) + " (+) " + shape(q.value()));
  Matrix out(p.rows(), q.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < q.rows(); ++j) out(i, j) = p.value()(i, 0) + q.value()(j, 0);
  return make(std::move(out), {p, q}, [](Node& s) {
    accumulate(*s.parents[0], s.grad.rowwise().sum());
    accumulate(*s.parents[1], s.grad.colwise().sum().transpose());
  });
}

Tensor leaky_relu(const Tensor& a, double slope) {
  Matrix out = a.value().unaryExpr([slope](double x) { return x > 0 ? x : slope * x; });
  return make(std::move(out), {a}, [slope](Node& s) {
    Matrix d = s.parents[0]->value.unaryExpr([slope](double x) { return x > 0 ? 1.0 : slope; });
    accumulate(*s.parents[0], s.grad.cwiseProduct(d));
  });
}

Tensor sigmoid(const Tensor& a) {
  Matrix out = a.value().unaryExpr([](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return make(out, {a}, [out](Node& s) {
    accumulate(*s.parents[0], s.grad.cwiseProduct(out.cwiseProduct((1.0 - out.array()).matrix())));
  });
}

Tensor tanh(const Tensor& a) {
  Matrix out = a.value().array().tanh();
  return make(out, {a}, [out](Node& s) {
    accumulate(*s.parents[0], s.grad.cwiseProduct((1.0 - out.array().square()).matrix()));
  });
}

Tensor masked_row_softmax(const Tensor& a, const Matrix& mask) {
  REQUIRE_SHAPE(mask.rows() == a.rows() && mask.cols() == a.cols(), "masked_row_softmax",
          shape(a.value()) + " mask " + shape(mask));
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (mask(i, j) != 0) mx = std::max(mx, a.value()(i, j));
    if (!std::isfinite(mx)) continue;
    double z = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (mask(i, j) != 0) z += (out(i, j) = std::exp(a.value()(i, j) - mx));
    out.row(i) /= z;
  }
  return make(out, {a}, [out](Node& s) {
    Matrix g = out.cwiseProduct(s.grad);
    Eigen::VectorXd dot = g.rowwise().sum();
    g -= out.cwiseProduct(dot.replicate(1, out.cols()));
    accumulate(*s.parents[0], g);
  });
}

Tensor row_softmax(const Tensor& a) { return masked_row_softmax(a, Matrix::Ones(a.rows(), a.cols())); }

Tensor exp(const Tensor& a) {
  Matrix out = a.value().array().exp();
  return make(out, {a}, [out](Node& s) { accumulate(*s.parents[0], s.grad.cwiseProduct(out)); });
}

Tensor row_logsumexp(const Tensor& a) {
  REQUIRE_SHAPE(a.cols() > 0, "row_logsumexp", "no columns");
  const Matrix& v = a.value();
  const Eigen::VectorXd m = v.rowwise().maxCoeff();
  Matrix soft = (v.colwise() - m).array().exp();
  const Eigen::VectorXd z = soft.rowwise().sum();
  soft.array().colwise() /= z.array();
  Matrix out = m + z.array().log().matrix();
  return make(std::move(out), {a}, [soft](Node& s) {
    accumulate(*s.parents[0], (soft.array().colwise() * s.grad.col(0).array()).matrix());
  });
}

Tensor sum(const Tensor& a) {
  return make(Matrix::Constant(1, 1, a.value().sum()), {a}, [](Node& s) {
    const auto& v = s.parents[0]->value;
    accumulate(*s.parents[0], Matrix::Constant(v.rows(), v.cols(), s.grad(0, 0)));
  });
}

Tensor mean(const Tensor& a) {
  const double n = static_cast<double>(a.value().size());
  REQUIRE_SHAPE(n > 0, "mean", "empty tensor");
  return scale(sum(a), 1.0 / n);
}

Tensor bce(const Tensor& p, const Matrix& target, double clamp) {
  REQUIRE_SHAPE(p.rows() == target.rows() && p.cols() == target.cols(), "bce", shape(p.value()) + " vs " + shape(target));
  const Matrix& v = p.value();
  double total = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double q = std::clamp(v(i), clamp, 1.0 - clamp);
    total -= target(i) * std::log(q) + (1.0 - target(i)) * std::log(1.0 - q);
  }
  return make(Matrix::Constant(1, 1, total), {p}, [target, clamp](Node& s) {
    const Matrix& v = s.parents[0]->value;
    Matrix g(v.rows(), v.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double q = v(i);
      g(i) = (q < clamp || q > 1.0 - clamp) ? 0.0 : (-target(i) / q + (1.0 - target(i)) / (1.0 - q));
    }
    accumulate(*s.parents[0], g * s.grad(0, 0));
  });
}

Tensor bce_with_logits(const Tensor& z, const Matrix& target) {
  REQUIRE_SHAPE(z.rows() == target.rows() && z.cols() == target.cols(), "bce_with_logits",
          shape(z.value()) + " vs " + shape(target));
  const Matrix& v = z.value();
  double total = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    total += std::max(v(i), 0.0) - v(i) * target(i) + std::log1p(std::exp(-std::abs(v(i))));
  return make(Matrix::Constant(1, 1, total), {z}, [target](Node& s) {
    const Matrix& v = s.parents[0]->value;
    Matrix g(v.rows(), v.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double sig = v(i) >= 0 ? 1.0 / (1.0 + std::exp(-v(i))) : std::exp(v(i)) / (1.0 + std::exp(v(i)));
      g(i) = sig - target(i);
    }
    accumulate(*s.parents[0], g * s.grad(0, 0));
  });
}

Tensor cosine_cost(const Tensor& a, const Tensor& b) {
  REQUIRE_SHAPE(a.cols() == b.cols(), "cosine_cost", shape(a.value()) + " vs " + shape(b.value()));
  auto unit = [](const Matrix& m, Eigen::VectorXd& norms) {
    norms = m.rowwise().norm();
    Matrix u = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (norms(i) > 0) u.row(i) /= norms(i);
      else u.row(i).setZero();
    }
    return u;
  };
  Eigen::VectorXd na, nb;
  Matrix ua = unit(a.value(), na), ub = unit(b.value(), nb);
  Matrix sim = ua * ub.transpose();
  Matrix out = (1.0 - sim.array()).matrix();
  return make(std::move(out), {a, b}, [ua, ub, na, nb, sim](Node& s) {
    // d cos_ij / d a_i = (ub_j - cos_ij ua_i) / |a_i|
    const Matrix g = -s.grad;
    if (s.parents[0]->requires_grad) {
      Matrix ga = g * ub;
      for (Eigen::Index i = 0; i < ua.rows(); ++i) {
        if (na(i) == 0) {
          ga.row(i).setZero();
          continue;
        }
        ga.row(i) -= g.row(i).dot(sim.row(i)) * ua.row(i);
        ga.row(i) /= na(i);
      }
      accumulate(*s.parents[0], ga);
    }
    if (s.parents[1]->requires_grad) {
      Matrix gb = g.transpose() * ua;
      for (Eigen::Index j = 0; j < ub.rows(); ++j) {
        if (nb(j) == 0) {
          gb.row(j).setZero();
          continue;
        }
        gb.row(j) -= g.col(j).dot(sim.col(j)) * ub.row(j);
        gb.row(j) /= nb(j);
      }
      accumulate(*s.parents[1], gb);
    }
  });
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.rows() != 1 || loss.cols() != 1)
    throw ShapeError("backward: loss must be a 1x1 tensor");
  if (!loss.requires_grad()) return;

  // Iterative DFS post-order; a node seen again while still open means a cycle.
  std::vector<Node*> order;
  std::unordered_map<Node*, int> state;  // 1 open, 2 done
  std::vector<std::pair<Node*, std::size_t>> stack{{loss.node().get(), 0}};
  state[loss.node().get()] = 1;
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node* p = n->parents[next++].get();
      if (!p->requires_grad) continue;
      auto it = state.find(p);
      if (it == state.end()) {
        state[p] = 1;
        stack.emplace_back(p, 0);
      } else if (it->second == 1) {
        throw std::logic_error("backward: cycle in the computation graph");
      }
    } else {
      state[n] = 2;
      order.push_back(n);
      stack.pop_back();
    }
  }
  for (Node* n : order)
    if (n->backward) n->grad = Matrix::Zero(n->value.rows(), n->value.cols());
  Node* root = loss.node().get();
  if (root->backward) root->grad(0, 0) = 1.0;
  else accumulate(*root, Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backward) (*it)->backward(**it);
  for (Node* n : order) {
    if (n->deferred.empty()) continue;
    Eigen::Index inner = 0;
    for (const auto& [x, _] : n->deferred) inner += x.cols();
    Matrix L(n->value.rows(), inner), R(inner, n->value.cols());
    Eigen::Index at = 0;
    for (const auto& [x, y] : n->deferred) {
      L.middleCols(at, x.cols()) = x;
      R.middleRows(at, x.cols()) = y;
      at += x.cols();
    }
    n->deferred.clear();
    if (n->grad.size() == 0) n->grad.noalias() = L * R;
    else n->grad.noalias() += L * R;
  }
}

GradCheckResult grad_check(const std::function<Tensor()>& f, const std::vector<Tensor>& params,
                           const GradCheckOptions& opt) {
  std::vector<Tensor> ps = params;
  for (auto& p : ps) p.zero_grad();
  backward(f());
  GradCheckResult res;
  Rng rng(opt.seed);
  auto eval = [&] {
    NoGradGuard guard;
    return f().item();
  };
  for (std::size_t k = 0; k < ps.size(); ++k) {
    auto& p = ps[k];
    const auto n = static_cast<std::uint32_t>(p.value().size());
    std::vector<std::uint32_t> coords;
    if (opt.max_coords_per_param == 0 || opt.max_coords_per_param >= n) {
      coords.resize(n);
      for (std::uint32_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      coords = rng.sample_without_replacement(n, static_cast<std::uint32_t>(opt.max_coords_per_param));
    }
    for (auto c : coords) {
      double& x = p.mutable_value()(c);
      const double orig = x;
      x = orig + opt.step;
      const double up = eval();
      x = orig - opt.step;
      const double down = eval();
      x = orig;
      const double numeric = (up - down) / (2 * opt.step);
      const double analytic = p.grad().size() ? p.grad()(c) : 0.0;
      const double err =
          std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), opt.floor});
      ++res.coords_checked;
      if (err > res.max_rel_error || res.worst.empty()) {
        if (err >= res.max_rel_error) {
          res.max_rel_error = err;
          res.worst = "param" + std::to_string(k) + "[" + std::to_string(c % p.rows()) + "," +
                      std::to_string(c / p.rows()) + "]";
        }
      }
    }
  }
  return res;
}

}  // namespace damcc::ad
