#pragma once

// Coordinate-chart metrics: an n x n symmetric matrix of expressions over a
// coordinate box, with every metric derivative up to third order precomputed
// as exact symbolic trees at construction time.  Instances are immutable and
// all point evaluations are pure.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "staticgeo/expr.hpp"
#include "staticgeo/linalg.hpp"

namespace staticgeo {

using Point = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;  // may be +infinity

  bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
  bool unbounded() const { return std::isinf(hi) || std::isinf(lo); }
};

struct BoundaryFace {
  enum class End { Lower, Upper };
  int coordinate = 0;
  End end = End::Lower;

  // Sign of the outward direction along the frozen coordinate.
  double outward_sign() const { return end == End::Upper ? 1.0 : -1.0; }
};

// Everything curvature needs at a single point: the metric, its inverse, and
// coordinate derivatives of the components up to the requested order.
struct MetricJet {
  int n = 0;
  Mat g;
  Mat ginv;
  std::vector<Mat> dg;                             // dg[k](i,j) = d_k g_ij
  std::vector<std::vector<Mat>> ddg;               // ddg[k][l]
  std::vector<std::vector<std::vector<Mat>>> dddg; // dddg[k][l][m]
};

class ChartMetric {
public:
  // `upper_tri` holds rows of the upper triangle: row i has entries
  // g_{i,i}, g_{i,i+1}, ..., g_{i,n-1}.
  ChartMetric(std::vector<std::string> coordinates,
              std::vector<std::vector<Expr>> upper_tri,
              std::vector<Interval> domain,
              std::optional<BoundaryFace> face = std::nullopt)
      : coords_(std::move(coordinates)), domain_(std::move(domain)), face_(face) {
    const int n = static_cast<int>(coords_.size());
    if (n < 2) throw InvalidArgument("chart metric needs dimension >= 2");
    if (static_cast<int>(upper_tri.size()) != n)
      throw InvalidArgument("chart metric: wrong number of component rows");
    if (static_cast<int>(domain_.size()) != n)
      throw InvalidArgument("chart metric: wrong number of domain intervals");
    for (int i = 0; i < n; ++i)
      if (static_cast<int>(upper_tri[static_cast<std::size_t>(i)].size()) != n - i)
        throw InvalidArgument("chart metric: component row " + std::to_string(i) +
                              " must have " + std::to_string(n - i) + " entries");
    if (face_) {
      if (face_->coordinate < 0 || face_->coordinate >= n)
        throw InvalidArgument("boundary face: coordinate index out of range");
      const double v = face_value();
      if (!std::isfinite(v))
        throw InvalidArgument("boundary face: frozen coordinate must be finite");
    }

    comp_.resize(static_cast<std::size_t>(n * (n + 1) / 2));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        comp_[tri(i, j)] = upper_tri[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i)];

    // Exact derivative trees up to third order, stored for sorted
    // multi-indices only (mixed partials commute).
    d1_.resize(comp_.size());
    d2_.resize(comp_.size());
    d3_.resize(comp_.size());
    for (std::size_t t = 0; t < comp_.size(); ++t) {
      d1_[t].resize(static_cast<std::size_t>(n));
      d2_[t].resize(static_cast<std::size_t>(n));
      d3_[t].resize(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) {
        d1_[t][static_cast<std::size_t>(k)] = differentiate(comp_[t], coords_[static_cast<std::size_t>(k)]);
        d2_[t][static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(n - k));
        d3_[t][static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(n - k));
        for (int l = k; l < n; ++l) {
          d2_[t][static_cast<std::size_t>(k)][static_cast<std::size_t>(l - k)] =
              differentiate(d1_[t][static_cast<std::size_t>(k)], coords_[static_cast<std::size_t>(l)]);
          d3_[t][static_cast<std::size_t>(k)][static_cast<std::size_t>(l - k)].resize(static_cast<std::size_t>(n - l));
          for (int m = l; m < n; ++m)
            d3_[t][static_cast<std::size_t>(k)][static_cast<std::size_t>(l - k)][static_cast<std::size_t>(m - l)] =
                differentiate(d2_[t][static_cast<std::size_t>(k)][static_cast<std::size_t>(l - k)],
                              coords_[static_cast<std::size_t>(m)]);
        }
      }
    }
  }

  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<std::string>& coordinates() const { return coords_; }
  const std::vector<Interval>& domain() const { return domain_; }
  const std::optional<BoundaryFace>& face() const { return face_; }

  const Expr& component(int i, int j) const { return comp_[tri(i, j)]; }

  double face_value() const {
    const auto& iv = domain_[static_cast<std::size_t>(face_->coordinate)];
    return face_->end == BoundaryFace::End::Lower ? iv.lo : iv.hi;
  }

  VarEnv env_at(const Point& p) const {
    check_point(p);
    VarEnv env;
    for (int i = 0; i < dim(); ++i) env.bind(coords_[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
    return env;
  }

  // Points exactly on the closed box boundary are allowed.
  void check_point(const Point& p) const {
    if (static_cast<int>(p.size()) != dim())
      throw InvalidArgument("point has wrong dimension");
    for (int i = 0; i < dim(); ++i) {
      const auto& iv = domain_[static_cast<std::size_t>(i)];
      const double slack = 1e-12 * (1.0 + std::abs(p[static_cast<std::size_t>(i)]));
      if (!iv.contains(p[static_cast<std::size_t>(i)], slack))
        throw InvalidArgument("point outside domain in coordinate '" +
                              coords_[static_cast<std::size_t>(i)] + "'");
    }
  }

  Mat value(const Point& p) const {
    VarEnv env = env_at(p);
    Mat g(dim());
    for (int i = 0; i < dim(); ++i)
      for (int j = i; j < dim(); ++j) {
        const double v = evaluate(comp_[tri(i, j)], env);
        g(i, j) = v;
        g(j, i) = v;
      }
    return g;
  }

  // Evaluate metric and derivatives at p.  order in {0,1,2,3}.
  MetricJet jet(const Point& p, int order) const {
    VarEnv env = env_at(p);
    const int n = dim();
    MetricJet jet;
    jet.n = n;
    jet.g = Mat(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = evaluate(comp_[tri(i, j)], env);
        jet.g(i, j) = v;
        jet.g(j, i) = v;
      }
    jet.ginv = spd_inverse(jet.g);
    if (order >= 1) {
      jet.dg.assign(static_cast<std::size_t>(n), Mat(n));
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            const double v = evaluate(d1_[tri(i, j)][static_cast<std::size_t>(k)], env);
            jet.dg[static_cast<std::size_t>(k)](i, j) = v;
            jet.dg[static_cast<std::size_t>(k)](j, i) = v;
          }
    }
    if (order >= 2) {
      jet.ddg.assign(static_cast<std::size_t>(n), std::vector<Mat>(static_cast<std::size_t>(n), Mat(n)));
      for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
          Mat m(n);
          for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
              const double v = evaluate(
                  d2_[tri(i, j)][static_cast<std::size_t>(k)][static_cast<std::size_t>(l - k)], env);
              m(i, j) = v;
              m(j, i) = v;
            }
          jet.ddg[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = m;
          jet.ddg[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = m;
        }
    }
    if (order >= 3) {
      jet.dddg.assign(static_cast<std::size_t>(n),
                      std::vector<std::vector<Mat>>(static_cast<std::size_t>(n),
                                                    std::vector<Mat>(static_cast<std::size_t>(n), Mat(n))));
      for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l)
          for (int q = l; q < n; ++q) {
            Mat m(n);
            for (int i = 0; i < n; ++i)
              for (int j = i; j < n; ++j) {
                const double v = evaluate(d3_[tri(i, j)][static_cast<std::size_t>(k)]
                                             [static_cast<std::size_t>(l - k)][static_cast<std::size_t>(q - l)],
                                          env);
                m(i, j) = v;
                m(j, i) = v;
              }
            // scatter to all orderings of (k, l, q)
            int idx[3] = {k, l, q};
            int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
            for (auto& pm : perms)
              jet.dddg[static_cast<std::size_t>(idx[pm[0]])][static_cast<std::size_t>(idx[pm[1]])]
                      [static_cast<std::size_t>(idx[pm[2]])] = m;
          }
    }
    return jet;
  }

  // Chart obtained by freezing the face coordinate: the induced metric on the
  // boundary face, as its own (n-1)-dimensional chart.
  ChartMetric induced_on_face(const BoundaryFace& face) const {
    const int n = dim();
    const int c = face.coordinate;
    const auto& iv = domain_[static_cast<std::size_t>(c)];
    const double frozen = face.end == BoundaryFace::End::Lower ? iv.lo : iv.hi;
    if (!std::isfinite(frozen))
      throw InvalidArgument("boundary face: frozen coordinate must be finite");

    std::vector<std::string> coords;
    std::vector<Interval> domain;
    for (int i = 0; i < n; ++i) {
      if (i == c) continue;
      coords.push_back(coords_[static_cast<std::size_t>(i)]);
      domain.push_back(domain_[static_cast<std::size_t>(i)]);
    }
    std::vector<std::vector<Expr>> rows;
    for (int i = 0; i < n; ++i) {
      if (i == c) continue;
      std::vector<Expr> row;
      for (int j = i; j < n; ++j) {
        if (j == c) continue;
        row.push_back(substitute(comp_[tri(i, j)], coords_[static_cast<std::size_t>(c)], frozen));
      }
      rows.push_back(std::move(row));
    }
    return ChartMetric(std::move(coords), std::move(rows), std::move(domain));
  }

private:
  std::size_t tri(int i, int j) const {
    if (i > j) std::swap(i, j);
    const int n = dim();
    return static_cast<std::size_t>(i * n - i * (i - 1) / 2 + (j - i));
  }

  std::vector<std::string> coords_;
  std::vector<Interval> domain_;
  std::optional<BoundaryFace> face_;
  std::vector<Expr> comp_;
  std::vector<std::vector<Expr>> d1_;
  std::vector<std::vector<std::vector<Expr>>> d2_;
  std::vector<std::vector<std::vector<std::vector<Expr>>>> d3_;
};

// Helper for building the component triangle from source strings.
inline std::vector<std::vector<Expr>> parse_component_rows(
    const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::vector<Expr>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<Expr> r;
    r.reserve(row.size());
    for (const auto& src : row) r.push_back(parse(src));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace staticgeo
