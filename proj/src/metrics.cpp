#include "rhcsf/metrics.hpp"

#include "rhcsf/sampling.hpp"

#include <cmath>
#include <limits>

namespace rhcsf {
namespace {

void check_pair(const Matrix& design, const Matrix& probes) {
  require(design.rows() >= 1, "design must not be empty");
  require(probes.rows() >= 1, "evaluation set must not be empty");
  require(design.cols() == probes.cols(), "design and evaluation set dimensions differ");
}

Eigen::Index cell_count(int dim, int bins) {
  double cells = std::pow(static_cast<double>(bins), dim);
  require(cells <= 1e8, "histogram grid too large");
  return static_cast<Eigen::Index>(cells);
}

Eigen::Index cell_of(const Eigen::Ref<const Eigen::RowVectorXd>& x, const Region& region, int bins) {
  Eigen::Index cell = 0;
  for (Eigen::Index d = x.size() - 1; d >= 0; --d) {
    const double t = (x[d] - region.lower()[d]) / (region.upper()[d] - region.lower()[d]);
    auto b = static_cast<Eigen::Index>(std::floor(t * bins));
    b = std::clamp<Eigen::Index>(b, 0, bins - 1);
    cell = cell * bins + b;
  }
  return cell;
}

double kl_term(double a, double m) { return a > 0.0 ? a * std::log2(a / m) : 0.0; }

}  // namespace

EvaluationSet evaluation_set(const Region& region_of_interest, Eigen::Index n_points) {
  require(n_points >= 1, "evaluation set needs at least one point");
  return {rescale_unit_points(sobol(region_of_interest.dim(), n_points), region_of_interest)};
}

double largest_ball_radius(const Matrix& design, const EvaluationSet& eval_set) {
  const Matrix& e = eval_set.points;
  check_pair(design, e);
  double radius = 0.0;
  for (Eigen::Index j = 0; j < e.rows(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < design.rows(); ++i) best = std::min(best, (design.row(i) - e.row(j)).squaredNorm());
    radius = std::max(radius, best);
  }
  return std::sqrt(radius);
}

std::vector<double> radius_progress(const Matrix& design, const EvaluationSet& eval_set) {
  const Matrix& e = eval_set.points;
  check_pair(design, e);
  Vector nearest = Vector::Constant(e.rows(), std::numeric_limits<double>::infinity());
  std::vector<double> progress;
  progress.reserve(static_cast<std::size_t>(design.rows()));
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    double radius = 0.0;
    for (Eigen::Index j = 0; j < e.rows(); ++j) {
      nearest[j] = std::min(nearest[j], (design.row(i) - e.row(j)).squaredNorm());
      radius = std::max(radius, nearest[j]);
    }
    progress.push_back(std::sqrt(radius));
  }
  return progress;
}

HistogramPair histogram_pair(const Matrix& design, const Region& region, int bins_per_axis) {
  require(design.rows() >= 1, "design must not be empty");
  require(bins_per_axis >= 1, "bins_per_axis must be >= 1");
  require(design.cols() == region.dim(), "design and region dimensions differ");
  const Eigen::Index cells = cell_count(region.dim(), bins_per_axis);
  HistogramPair h{bins_per_axis, Vector::Zero(cells), Vector::Constant(cells, 1.0 / static_cast<double>(cells))};
  for (Eigen::Index i = 0; i < design.rows(); ++i) h.data_mass[cell_of(design.row(i), region, bins_per_axis)] += 1.0;
  h.data_mass /= static_cast<double>(design.rows());
  return h;
}

double jensen_shannon(const Vector& p, const Vector& q) {
  require(p.size() == q.size(), "distributions differ in support size");
  double js = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    js += 0.5 * kl_term(p[i], m) + 0.5 * kl_term(q[i], m);
  }
  return std::clamp(js, 0.0, 1.0);
}

double jsd_to_uniform(const Matrix& design, const Region& region, int bins_per_axis) {
  const HistogramPair h = histogram_pair(design, region, bins_per_axis);
  return jensen_shannon(h.data_mass, h.uniform_mass);
}

std::vector<double> jsd_progress(const Matrix& design, const Region& region, int bins_per_axis) {
  require(design.rows() >= 1, "design must not be empty");
  require(bins_per_axis >= 1, "bins_per_axis must be >= 1");
  require(design.cols() == region.dim(), "design and region dimensions differ");
  const Eigen::Index cells = cell_count(region.dim(), bins_per_axis);
  const Vector uniform = Vector::Constant(cells, 1.0 / static_cast<double>(cells));
  Vector counts = Vector::Zero(cells);
  std::vector<double> progress;
  progress.reserve(static_cast<std::size_t>(design.rows()));
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    counts[cell_of(design.row(i), region, bins_per_axis)] += 1.0;
    progress.push_back(jensen_shannon(counts / static_cast<double>(i + 1), uniform));
  }
  return progress;
}

}  // namespace rhcsf
