#include "walkcover/potential.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "walkcover/errors.hpp"
#include "walkcover/walk.hpp"

namespace walkcover {
namespace {

constexpr double kDirectLimit = 64;
constexpr double kResidualTarget = 1e-12;

using SparseMatrix = Eigen::SparseMatrix<double>;

SparseMatrix killed_operator(const std::vector<std::array<std::int32_t, 4>>& nbr) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nbr.size() * 5);
  for (std::size_t i = 0; i < nbr.size(); ++i) {
    const auto row = static_cast<int>(i);
    triplets.emplace_back(row, row, 1.0);
    for (std::int32_t j : nbr[i])
      if (j >= 0) triplets.emplace_back(row, j, -0.25);
  }
  SparseMatrix m(static_cast<Eigen::Index>(nbr.size()), static_cast<Eigen::Index>(nbr.size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

struct DiscOracle::Factor {
  std::vector<std::array<std::int32_t, 4>> nbr;
  SparseMatrix matrix;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  double omega = 1;
};

DiscOracle::DiscOracle(double R, SolverKind kind)
    : radius_(DiscRadius::from_real(R)), kind_(kind), factor_(std::make_unique<Factor>()) {
  if (!(R >= 2)) throw std::invalid_argument("DiscOracle: R must be at least 2");
  if (kind_ == SolverKind::automatic) kind_ = R <= kDirectLimit ? SolverKind::direct : SolverKind::iterative;
  sites_ = disc_sites({0, 0}, radius_);
  extent_ = radius_.extent();
  const auto side = static_cast<std::size_t>(2 * extent_ + 1);
  lookup_.assign(side * side, -1);
  for (std::size_t i = 0; i < sites_.size(); ++i)
    lookup_[static_cast<std::size_t>(sites_[i].y + extent_) * side + static_cast<std::size_t>(sites_[i].x + extent_)] =
        static_cast<std::int32_t>(i);

  auto& f = *factor_;
  f.nbr.resize(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i)
    for (std::size_t d = 0; d < 4; ++d) {
      const auto j = index({sites_[i].x + kMoves[d].x, sites_[i].y + kMoves[d].y});
      f.nbr[i][d] = j ? static_cast<std::int32_t>(*j) : -1;
    }
  f.matrix = killed_operator(f.nbr);
  if (kind_ == SolverKind::direct) {
    f.ldlt.compute(f.matrix);
    if (f.ldlt.info() != Eigen::Success)
      throw SolverError("DiscOracle: factorization failed", std::numeric_limits<double>::infinity());
  } else {
    // Jacobi spectral radius of the killed walk on a disc: 1 - j_{0,1}^2 / (4 R^2).
    const double rho_j = 1 - 5.783185962946784 / (4 * R * R);
    f.omega = 2 / (1 + std::sqrt(1 - rho_j * rho_j));
  }

  std::vector<double> e0(sites_.size(), 0.0);
  e0[*index({0, 0})] = 1;
  to_origin_ = solve(e0);
  exit_ = solve(std::vector<double>(sites_.size(), 1.0));
}

DiscOracle::~DiscOracle() = default;
DiscOracle::DiscOracle(DiscOracle&&) noexcept = default;
DiscOracle& DiscOracle::operator=(DiscOracle&&) noexcept = default;

std::optional<std::size_t> DiscOracle::index(const LatticeSite& s) const {
  if (std::abs(s.x) > extent_ || std::abs(s.y) > extent_) return std::nullopt;
  const auto side = static_cast<std::size_t>(2 * extent_ + 1);
  const std::int32_t i =
      lookup_[static_cast<std::size_t>(s.y + extent_) * side + static_cast<std::size_t>(s.x + extent_)];
  if (i < 0) return std::nullopt;
  return static_cast<std::size_t>(i);
}

std::vector<double> DiscOracle::solve(const std::vector<double>& rhs) const {
  const auto& f = *factor_;
  const auto n = static_cast<Eigen::Index>(rhs.size());
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
  std::vector<double> x(rhs.size(), 0.0);
  Eigen::Map<Eigen::VectorXd> xv(x.data(), n);

  if (kind_ == SolverKind::direct) {
    xv = f.ldlt.solve(b);
    const double r = (b - f.matrix * xv).lpNorm<Eigen::Infinity>();
    if (!(r <= 1e-10 * std::max(1.0, max_abs(rhs))))
      throw SolverError("DiscOracle: residual " + std::to_string(r) + " after direct solve", r);
    return x;
  }
  const std::size_t max_sweeps = 200 + 400 * static_cast<std::size_t>(std::ceil(radius_.value()));
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      double s = rhs[i];
      for (std::int32_t j : f.nbr[i])
        if (j >= 0) s += 0.25 * x[static_cast<std::size_t>(j)];
      x[i] += f.omega * (s - x[i]);
    }
    if (sweep % 16 == 15) {
      const double r = (b - f.matrix * xv).lpNorm<Eigen::Infinity>();
      // Normwise backward error; ||I - P||_inf = 2.
      if (r <= kResidualTarget * (max_abs(rhs) + 2 * max_abs(x))) return x;
    }
  }
  const double r = (b - f.matrix * xv).lpNorm<Eigen::Infinity>();
  throw SolverError("DiscOracle: SOR stopped at residual " + std::to_string(r), r);
}

double DiscOracle::green(const LatticeSite& y, const LatticeSite& u) const {
  const auto iy = index(y);
  const auto iu = index(u);
  if (!iy || !iu) return 0;
  if (u == LatticeSite{0, 0}) return to_origin_[*iy];
  return green_column(u)[*iy];
}

std::vector<double> DiscOracle::green_column(const LatticeSite& u) const {
  const auto iu = index(u);
  if (!iu) return std::vector<double>(sites_.size(), 0.0);
  if (u == LatticeSite{0, 0}) return to_origin_;
  std::vector<double> e(sites_.size(), 0.0);
  e[*iu] = 1;
  return solve(e);
}

double DiscOracle::hit_prob(const LatticeSite& y) const {
  const auto iy = index(y);
  if (!iy) return 0;
  return to_origin_[*iy] / to_origin_[*index({0, 0})];
}

double DiscOracle::expected_exit(const LatticeSite& y) const {
  const auto iy = index(y);
  return iy ? exit_[*iy] : 0;
}

double exact_green(double R, const LatticeSite& y, const LatticeSite& u) {
  return DiscOracle(R).green(y, u);
}

double exact_hit_prob(const LatticeSite& y, double R) {
  const DiscOracle oracle(R);
  if (!oracle.index(y)) throw std::domain_error("exact_hit_prob: y outside D(0, R)");
  return oracle.hit_prob(y);
}

double exact_expected_exit(double r, const LatticeSite& y) {
  const DiscOracle oracle(r);
  if (!oracle.index(y)) throw std::domain_error("exact_expected_exit: y outside D(0, r)");
  return oracle.expected_exit(y);
}

std::vector<double> solve_dirichlet(const std::vector<LatticeSite>& interior,
                                    const std::function<double(const LatticeSite&)>& boundary) {
  std::unordered_map<LatticeSite, std::size_t, SiteHash> idx;
  idx.reserve(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i) idx.emplace(interior[i], i);
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const auto row = static_cast<int>(i);
    triplets.emplace_back(row, row, 1.0);
    for (const auto& mv : kMoves) {
      const LatticeSite z{interior[i].x + mv.x, interior[i].y + mv.y};
      auto it = idx.find(z);
      if (it != idx.end())
        triplets.emplace_back(row, static_cast<int>(it->second), -0.25);
      else
        rhs[row] += 0.25 * boundary(z);
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(interior.size()), static_cast<Eigen::Index>(interior.size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(m);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("solve_dirichlet: factorization failed", std::numeric_limits<double>::infinity());
  const Eigen::VectorXd h = ldlt.solve(rhs);
  const double r = (rhs - m * h).lpNorm<Eigen::Infinity>();
  if (!(r <= 1e-10)) throw SolverError("solve_dirichlet: residual above target", r);
  return {h.data(), h.data() + h.size()};
}

std::vector<double> first_passage_hit_prob(double R) {
  const auto disc = disc_sites({0, 0}, DiscRadius::from_real(R));
  std::vector<LatticeSite> interior;
  for (const auto& s : disc)
    if (!(s == LatticeSite{0, 0})) interior.push_back(s);
  const auto h = solve_dirichlet(interior, [](const LatticeSite& z) { return z == LatticeSite{0, 0} ? 1.0 : 0.0; });
  std::vector<double> out;
  out.reserve(disc.size());
  std::size_t j = 0;
  for (const auto& s : disc) out.push_back(s == LatticeSite{0, 0} ? 1.0 : h[j++]);
  return out;
}

double laplace_visits(double lambda, double G_y0, double G_00) {
  if (!(G_00 > 0) || !(G_y0 >= 0)) throw std::invalid_argument("laplace_visits: need G_00 > 0, G_y0 >= 0");
  if (std::isnan(lambda)) throw std::invalid_argument("laplace_visits: lambda is NaN");
  if (lambda == std::numeric_limits<double>::infinity()) return 1 - G_y0 / G_00;
  const double c = std::expm1(lambda);
  const double den = 1 + c * G_00;
  if (!(den > 0)) throw DivergentTransform("laplace_visits: 1 + (e^lambda - 1) G_00 <= 0");
  return 1 - c * G_y0 / den;
}

double tail_rate(double A, double B) {
  if (!(A > 0) || !(B > 0)) throw std::invalid_argument("tail_rate: A and B must be positive");
  if (B <= A) return 0;
  const double d = std::sqrt(B) - std::sqrt(A);
  return -d * d;
}

double tail_rate_numeric(double A, double B) {
  if (!(A > 0) || !(B > 0)) throw std::invalid_argument("tail_rate_numeric: A and B must be positive");
  const auto f = [A, B](double phi) { return A * phi - B * phi / (1 + phi); };
  // f is convex on phi > -1, so once f stops decreasing the minimum lies to the left.
  double hi = 1;
  while (f(2 * hi) < f(hi)) hi *= 2;
  hi *= 2;
  double lo = 0;
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  // The infimum over phi > 0 is never above the limit f(0+) = 0.
  return std::min({f1, f2, f(0.5 * (lo + hi)), 0.0});
}

Lemma51Bound lemma51_bound(double a, double delta, double beta, double gamma, double alpha, double R) {
  if (!(a > 0) || !(delta >= 0 && delta < 1) || !(beta > 0) || !(gamma > 0) || !(alpha >= 0) || !(R > 1))
    throw std::invalid_argument("lemma51_bound: parameter out of range");
  if (!((1 - delta) * (1 - delta) * a * beta * beta > 2 * alpha))
    throw PreconditionViolated("lemma51_bound: requires (1 - delta)^2 a beta^2 > 2 alpha");
  const double d = (1 - delta) * beta * std::sqrt(a) - std::sqrt(2 * alpha);
  const double exponent = d * d / (gamma * gamma);
  return {exponent, std::pow(R, -exponent)};
}

double approx_hit_center(double dist, double R) {
  if (!(R > 1) || !(dist >= 1) || !(dist <= R))
    throw std::domain_error("approx_hit_center: need 1 <= dist <= R and R > 1");
  return std::log(R / dist) / std::log(R);
}

void write_oracle_csv(std::ostream& os, const DiscOracle& oracle) {
  os << "y_x,y_y,G,hit_prob\n";
  const auto g = oracle.green_column({0, 0});
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < oracle.sites().size(); ++i) {
    const auto& s = oracle.sites()[i];
    os << s.x << ',' << s.y << ',' << g[i] << ',' << oracle.hit_prob(s) << '\n';
  }
  os.precision(old);
}

}  // namespace walkcover
