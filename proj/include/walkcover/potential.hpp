#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "walkcover/lattice.hpp"

namespace walkcover {

enum class SolverKind { automatic, direct, iterative };

// Green function of the simple random walk killed on leaving D(0, R):
//   G_R(v, u) = E^v sum_{i=0}^{tau(R)} 1{S_i = u},
// the inverse of I - P on the sites of D(0, R), where P is the walk's transition matrix
// restricted to the disc. The matrix is symmetric positive definite.
//
// `automatic` factorizes directly (sparse LDL^T) for R <= 64 and iterates (SOR until
// ||b - A x|| <= 1e-12 (||b|| + ||A|| ||x||), max norms) beyond. Immutable after construction.
class DiscOracle {
 public:
  explicit DiscOracle(double R, SolverKind kind = SolverKind::automatic);
  ~DiscOracle();
  DiscOracle(DiscOracle&&) noexcept;
  DiscOracle& operator=(DiscOracle&&) noexcept;

  double radius() const { return radius_.value(); }
  SolverKind solver() const { return kind_; }
  // Sites of D(0, R) in lexicographic order.
  const std::vector<LatticeSite>& sites() const { return sites_; }
  std::optional<std::size_t> index(const LatticeSite& s) const;

  // G_R(y, u); 0 when either site lies outside the disc.
  double green(const LatticeSite& y, const LatticeSite& u) const;
  // G_R(., u) over sites().
  std::vector<double> green_column(const LatticeSite& u) const;
  // P^y(T_0 < tau(R)) = G_R(y, 0) / G_R(0, 0); 0 outside the disc.
  double hit_prob(const LatticeSite& y) const;
  // E^y tau(R); 0 outside the disc.
  double expected_exit(const LatticeSite& y) const;
  const std::vector<double>& expected_exit_all() const { return exit_; }

 private:
  std::vector<double> solve(const std::vector<double>& rhs) const;

  DiscRadius radius_;
  SolverKind kind_;
  std::vector<LatticeSite> sites_;
  std::int32_t extent_;
  std::vector<std::int32_t> lookup_;  // (2e+1)^2 window -> index or -1
  struct Factor;
  std::unique_ptr<Factor> factor_;
  std::vector<double> to_origin_;  // G_R(., 0)
  std::vector<double> exit_;
};

double exact_green(double R, const LatticeSite& y, const LatticeSite& u);
// Throws std::domain_error unless y is in D(0, R).
double exact_hit_prob(const LatticeSite& y, double R);
double exact_expected_exit(double r, const LatticeSite& y);

// Solution of the discrete Dirichlet problem h = P h on `interior`, with h = boundary(z) at
// every neighbour z outside it. Independent of DiscOracle: one sparse solve per call.
std::vector<double> solve_dirichlet(const std::vector<LatticeSite>& interior,
                                    const std::function<double(const LatticeSite&)>& boundary);

// P^y(T_0 < tau(R)) for every site of D(0, R), via the first-passage system on D(0, R) \ {0}.
// Values follow disc_sites order.
std::vector<double> first_passage_hit_prob(double R);

// E^y[exp(-lambda L(0))] = 1 - (e^lambda - 1) G_y0 / (1 + (e^lambda - 1) G_00), where L(0) is
// the number of visits to 0 up to tau(R). lambda = +inf gives P^y(L(0) = 0). Throws
// DivergentTransform when 1 + (e^lambda - 1) G_00 <= 0.
double laplace_visits(double lambda, double G_y0, double G_00);

// inf over phi > 0 of A phi - B phi / (1 + phi): -(sqrt B - sqrt A)^2 when B > A, else 0
// (approached as phi -> 0). Throws std::invalid_argument unless A, B > 0.
double tail_rate(double A, double B);
// The same infimum by golden-section search over phi, not using the closed form.
double tail_rate_numeric(double A, double B);

struct Lemma51Bound {
  double exponent;  // ((1 - delta) beta sqrt(a) - sqrt(2 alpha))^2 / gamma^2
  double bound;     // R^-exponent
};
// Throws PreconditionViolated unless (1 - delta)^2 a beta^2 > 2 alpha.
Lemma51Bound lemma51_bound(double a, double delta, double beta, double gamma, double alpha, double R);

// ln(R / dist) / ln R for 1 <= dist <= R, R > 1.
double approx_hit_center(double dist, double R);

// Rows "y_x,y_y,G,hit_prob" with G = G_R(y, 0), over the disc's sites.
void write_oracle_csv(std::ostream& os, const DiscOracle& oracle);

}  // namespace walkcover
