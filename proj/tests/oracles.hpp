#ifndef COMBOPT_TEST_ORACLES_HPP
#define COMBOPT_TEST_ORACLES_HPP

// Solver-independent oracles used by the tests: a fine-grid coordinate
// search for chain-structured problems (each target irrep row feasible on
// at most two product irreps), refined locally until the step underflows.

#include <cstdint>
#include <random>
#include <vector>

#include "combopt/reduced_program.hpp"

namespace combopt::test {

inline double chain_grid_search(const ReducedProblem& rp) {
  Index na = rp.q.rows(), nk = rp.q.cols();
  struct Row {
    Index first = -1, second = -1;  // feasible K columns (at most two)
  };
  std::vector<Row> rows(static_cast<size_t>(na));
  for (Index ia = 0; ia < na; ++ia)
    for (Index ik = 0; ik < nk; ++ik)
      if (rp.mult(ia, ik) > 0) {
        if (rows[static_cast<size_t>(ia)].first < 0)
          rows[static_cast<size_t>(ia)].first = ik;
        else
          rows[static_cast<size_t>(ia)].second = ik;
      }

  auto assemble = [&](const std::vector<double>& x) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(na, nk);
    for (Index ia = 0; ia < na; ++ia) {
      const Row& r = rows[static_cast<size_t>(ia)];
      if (r.second < 0) {
        p(ia, r.first) = 1.0;
      } else {
        p(ia, r.first) = x[static_cast<size_t>(ia)];
        p(ia, r.second) = 1.0 - x[static_cast<size_t>(ia)];
      }
    }
    return p;
  };

  std::vector<double> x(static_cast<size_t>(na), 0.5);
  double best = phi_value(rp, assemble(x));
  for (double step = 1e-3; step > 1e-9; step *= 0.1) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (Index ia = 0; ia < na; ++ia) {
        if (rows[static_cast<size_t>(ia)].second < 0) continue;
        for (double cand : {x[static_cast<size_t>(ia)] - step,
                            x[static_cast<size_t>(ia)] + step}) {
          if (cand < 0.0 || cand > 1.0) continue;
          double old = x[static_cast<size_t>(ia)];
          x[static_cast<size_t>(ia)] = cand;
          double v = phi_value(rp, assemble(x));
          if (v > best + 1e-15) {
            best = v;
            improved = true;
          } else {
            x[static_cast<size_t>(ia)] = old;
          }
        }
      }
    }
  }
  return best;
}

// Random feasible probability table: positive weights on the feasible
// entries of each row, normalized.
inline Eigen::MatrixXd random_feasible_p(const ReducedProblem& rp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.05, 1.0);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(rp.q.rows(), rp.q.cols());
  for (Index ia = 0; ia < p.rows(); ++ia) {
    double total = 0;
    for (Index ik = 0; ik < p.cols(); ++ik)
      if (rp.mult(ia, ik) > 0) {
        p(ia, ik) = ud(rng);
        total += p(ia, ik);
      }
    for (Index ik = 0; ik < p.cols(); ++ik) p(ia, ik) /= total;
  }
  return p;
}

}  // namespace combopt::test

#endif
