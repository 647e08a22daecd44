#include "pgjr/pipeline/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "pgjr/error.hpp"
#include "pgjr/gjr/head.hpp"
#include "pgjr/idfd/losses.hpp"
#include "pgjr/numerics/finite_diff.hpp"
#include "pgjr/numerics/layers.hpp"
#include "pgjr/numerics/rng.hpp"

namespace pgjr {

namespace {

// Inputs closer than this to a ReLU kink are resampled.
constexpr double kKinkMargin = 1e-4;

Vector random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  return Matrix(r, c, random_vector(rng, r * c));
}

Matrix random_unit_rows(Rng& rng, std::size_t r, std::size_t c) {
  return normalize_rows(random_matrix(rng, r, c));
}

double weighted_sum(std::span<const double> y, std::span<const double> c) { return dot(y, c); }

void append(Vector& dst, std::span<const double> src) { dst.insert(dst.end(), src.begin(), src.end()); }

// Analytic and numeric gradients, concatenated over all checked tensors.
struct GradPair {
  Vector analytic;
  Vector numeric;
};

bool near_kink(const Matrix& pre) {
  return std::any_of(pre.values().begin(), pre.values().end(),
                     [](double v) { return std::abs(v) < kKinkMargin; });
}

GradPair check_affine(Rng& rng, double h) {
  AffineParams p(4, 5);
  p.weight = random_matrix(rng, 4, 5);
  p.bias = random_vector(rng, 4);
  Vector x = random_vector(rng, 5);
  const Vector c = random_vector(rng, 4);
  GradPair g;
  const Vector dx = affine_backward(p, x, c);
  append(g.analytic, p.grad_weight.values());
  append(g.analytic, p.grad_bias);
  append(g.analytic, dx);
  auto loss = [&] { return weighted_sum(affine_forward(p, x), c); };
  append(g.numeric, central_difference(loss, p.weight.values(), h));
  append(g.numeric, central_difference(loss, p.bias, h));
  append(g.numeric, central_difference(loss, x, h));
  return g;
}

GradPair check_relu(Rng& rng, double h) {
  Vector x = random_vector(rng, 8);
  for (double& v : x)
    while (std::abs(v) < kKinkMargin) v = rng.uniform(-1.0, 1.0);
  const Vector c = random_vector(rng, 8);
  GradPair g;
  g.analytic = relu_backward(x, c);
  g.numeric = central_difference([&] { return weighted_sum(relu(x), c); }, x, h);
  return g;
}

GradPair check_normalize(Rng& rng, double h) {
  Vector x = random_vector(rng, 8);
  const Vector c = random_vector(rng, 8);
  GradPair g;
  g.analytic = l2_normalize_backward(x, c);
  g.numeric = central_difference([&] { return weighted_sum(l2_normalize(x), c); }, x, h);
  return g;
}

GradPair check_gjr(Rng& rng, double h) {
  const GjrGeometry geo{2, 3, 2};
  GjrParams params(geo);
  Matrix x;
  for (;;) {
    for (auto& r : params.row_regressors) {
      r.weight = random_matrix(rng, geo.width, geo.width);
      r.bias = random_vector(rng, geo.width, -0.5, 0.5);
    }
    x = random_matrix(rng, 1, geo.n_in());
    GjrCache cache;
    gjr_forward(x, params, geo, &cache);
    if (std::none_of(cache.pre_activation.begin(), cache.pre_activation.end(), near_kink)) break;
  }
  const Vector c = random_vector(rng, geo.n_in());
  GradPair g;
  const Vector dx = gjr_backward(x.row(0), params, geo, c);
  for (const auto& r : params.row_regressors) {
    append(g.analytic, r.grad_weight.values());
    append(g.analytic, r.grad_bias);
  }
  append(g.analytic, dx);
  auto loss = [&] { return weighted_sum(gjr_forward(x.row(0), params, geo), c); };
  for (auto& r : params.row_regressors) {
    append(g.numeric, central_difference(loss, r.weight.values(), h));
    append(g.numeric, central_difference(loss, r.bias, h));
  }
  append(g.numeric, central_difference(loss, x.values(), h));
  return g;
}

GradPair check_head(Rng& rng, double h) {
  HeadInit init;
  init.n_in = 12;
  init.n_out = 5;
  init.blocks = 2;
  init.rows = 3;
  Matrix x;
  PgjrHead head;
  for (;;) {
    head = make_head(init, rng, rng);
    for (auto& r : head.gjr.row_regressors) r.bias = random_vector(rng, r.bias.size(), -0.5, 0.5);
    head.projection.bias = random_vector(rng, head.projection.bias.size());
    x = random_matrix(rng, 1, init.n_in);
    HeadCache cache;
    head_forward(head, x, &cache);
    if (std::none_of(cache.gjr.pre_activation.begin(), cache.gjr.pre_activation.end(), near_kink))
      break;
  }
  const Vector c = random_vector(rng, init.n_out);
  GradPair g;
  const Vector dx = pgjr_backward(x.row(0), head, c);
  append(g.analytic, head.projection.grad_weight.values());
  append(g.analytic, head.projection.grad_bias);
  for (const auto& r : head.gjr.row_regressors) {
    append(g.analytic, r.grad_weight.values());
    append(g.analytic, r.grad_bias);
  }
  append(g.analytic, dx);
  auto loss = [&] { return weighted_sum(pgjr_forward(x.row(0), head), c); };
  append(g.numeric, central_difference(loss, head.projection.weight.values(), h));
  append(g.numeric, central_difference(loss, head.projection.bias, h));
  for (auto& r : head.gjr.row_regressors) {
    append(g.numeric, central_difference(loss, r.weight.values(), h));
    append(g.numeric, central_difference(loss, r.bias, h));
  }
  append(g.numeric, central_difference(loss, x.values(), h));
  return g;
}

std::vector<std::size_t> distinct_indices(Rng& rng, std::size_t count, std::size_t n) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = 0; i < count; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(count);
  return all;
}

GradPair check_instance(Rng& rng, double h) {
  const MemoryBank bank = MemoryBank::init(random_matrix(rng, 10, 6));
  Matrix batch = random_unit_rows(rng, 3, 6);
  const auto idx = distinct_indices(rng, 3, 10);
  const double tau = rng.uniform(0.5, 2.0);
  GradPair g;
  append(g.analytic, instance_loss(batch, idx, bank, tau).grad.values());
  g.numeric = central_difference([&] { return instance_loss(batch, idx, bank, tau).loss; },
                                 batch.values(), h);
  return g;
}

GradPair check_decorrelation(Rng& rng, double h) {
  Matrix batch = random_unit_rows(rng, 8, 5);
  const double tau = rng.uniform(0.5, 3.0);
  GradPair g;
  append(g.analytic, decorrelation_loss(batch, tau).grad.values());
  g.numeric = central_difference([&] { return decorrelation_loss(batch, tau).loss; },
                                 batch.values(), h);
  return g;
}

GradPair check_total(Rng& rng, double h) {
  const MemoryBank bank = MemoryBank::init(random_matrix(rng, 10, 5));
  Matrix batch = random_unit_rows(rng, 4, 5);
  const auto idx = distinct_indices(rng, 4, 10);
  const auto reduction = rng.below(2) == 0 ? LossReduction::Sum : LossReduction::Mean;
  GradPair g;
  append(g.analytic, total_loss(batch, idx, bank, 1.0, 2.0, reduction).grad.values());
  g.numeric = central_difference(
      [&] { return total_loss(batch, idx, bank, 1.0, 2.0, reduction).breakdown.total; },
      batch.values(), h);
  return g;
}

using Check = std::function<GradPair(Rng&, double)>;

const std::vector<std::pair<std::string, Check>>& checks() {
  static const std::vector<std::pair<std::string, Check>> all{
      {"affine", check_affine},
      {"relu", check_relu},
      {"l2_normalize", check_normalize},
      {"gjr", check_gjr},
      {"pgjr_head", check_head},
      {"instance_loss", check_instance},
      {"decorrelation_loss", check_decorrelation},
      {"total_loss", check_total},
  };
  return all;
}

}  // namespace

std::vector<std::string> gradcheck_components() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : checks()) names.push_back(name);
  return names;
}

bool GradcheckReport::passed() const {
  return !rows.empty() &&
         std::all_of(rows.begin(), rows.end(), [](const GradcheckRow& r) { return r.passed; });
}

std::string GradcheckReport::table() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %8s %14s  %s\n", "component", "trials", "max_rel_err",
                "status");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-20s %8zu %14.3e  %s\n", r.component.c_str(), r.trials,
                  r.max_rel_error, r.passed ? "PASS" : "FAIL");
    out += line;
  }
  std::snprintf(line, sizeof line, "overall: %s (%.2fs)\n", passed() ? "PASS" : "FAIL", seconds);
  out += line;
  return out;
}

GradcheckReport run_gradcheck(const GradcheckOptions& opts) {
  const auto names = gradcheck_components();
  if (!opts.break_component.empty() &&
      std::find(names.begin(), names.end(), opts.break_component) == names.end())
    throw UsageError("gradcheck: unknown component \"" + opts.break_component + "\"");
  if (opts.trials == 0) throw UsageError("gradcheck: trials must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  GradcheckReport report;
  std::uint64_t stream = 0;
  for (const auto& [name, check] : checks()) {
    Rng rng(opts.seed, RngStream::Gradcheck, stream++);
    GradcheckRow row{name, opts.trials, 0.0, false};
    for (std::size_t t = 0; t < opts.trials; ++t) {
      GradPair g = check(rng, opts.step);
      if (name == opts.break_component)
        for (double& v : g.analytic) v = -v;
      row.max_rel_error = std::max(row.max_rel_error, max_relative_error(g.analytic, g.numeric));
    }
    row.passed = row.max_rel_error <= opts.threshold;
    report.rows.push_back(row);
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace pgjr
