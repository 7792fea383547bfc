#include "combopt/reduced_program.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace combopt {

namespace {

constexpr double kSqrtEps = 1e-14;

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Index ReducedProblem::a_index(const Irrep& a) const {
  for (size_t i = 0; i < a_irreps.size(); ++i)
    if (a_irreps[i] == a) return static_cast<Index>(i);
  throw Error("IrrepMismatch", "irrep " + a.name() + " not among the target blocks");
}

Index ReducedProblem::k_index(const Irrep& k) const {
  for (size_t i = 0; i < k_irreps.size(); ++i)
    if (k_irreps[i] == k) return static_cast<Index>(i);
  throw Error("IrrepMismatch", "irrep " + k.name() + " not among the product blocks");
}

ReducedProblem build_reduced_problem(const TaskRep& t) {
  ReducedProblem rp;
  rp.d0 = t.d0;
  for (const auto& b : t.v_blocks) {
    rp.a_irreps.push_back(b.irrep);
    rp.m_a.push_back(static_cast<int>(b.copies.size()));
    rp.d_a.push_back(b.irrep.dim());
  }
  for (const auto& b : t.k_blocks) {
    rp.k_irreps.push_back(b.K);
    rp.d_k.push_back(b.K.dim());
  }
  Index na = static_cast<Index>(rp.a_irreps.size());
  Index nk = static_cast<Index>(rp.k_irreps.size());
  rp.q = Eigen::MatrixXd::Zero(na, nk);
  rp.h = Eigen::MatrixXd::Zero(na, nk);
  rp.mult = Eigen::MatrixXi::Zero(na, nk);

  // sum_beta m^{a,beta}_K d_beta, counted from the explicit decomposition
  Eigen::MatrixXd wsum = Eigen::MatrixXd::Zero(na, nk);
  for (size_t kb = 0; kb < t.k_blocks.size(); ++kb) {
    for (const auto& e : t.k_blocks[kb].entries) {
      Index ia = rp.a_index(e.a);
      wsum(ia, static_cast<Index>(kb)) += static_cast<double>(e.beta.dim());
      rp.mult(ia, static_cast<Index>(kb)) += 1;
    }
  }
  double d02 = static_cast<double>(rp.d0) * static_cast<double>(rp.d0);
  for (Index ia = 0; ia < na; ++ia)
    for (Index ik = 0; ik < nk; ++ik) {
      if (rp.mult(ia, ik) == 0) continue;
      double ma = rp.m_a[static_cast<size_t>(ia)];
      double da = static_cast<double>(rp.d_a[static_cast<size_t>(ia)]);
      double dk = static_cast<double>(rp.d_k[static_cast<size_t>(ik)]);
      rp.q(ia, ik) = ma * da * wsum(ia, ik) / (dk * d02);
      rp.h(ia, ik) = dk * dk * wsum(ia, ik) / (ma * da);
    }
  return rp;
}

ReducedProblem build_reduced_problem(const std::vector<RepSpec>& input_reps,
                                     const RepSpec& target) {
  if (input_reps.empty()) throw Error("UnsupportedGroup", "need at least one input rep");
  for (const auto& r : input_reps)
    if (r.group != target.group)
      throw Error("IrrepMismatch", "input and target reps are over different groups");

  // strip multiplicities, tensor the inputs into a list of distinct irreps
  std::vector<Irrep> betas;
  for (const auto& [x, m] : input_reps[0].content)
    if (std::find(betas.begin(), betas.end(), x) == betas.end()) betas.push_back(x);
  for (size_t i = 1; i < input_reps.size(); ++i) {
    if (target.group != GroupKind::U1)
      throw Error("UnsupportedGroup", "multiple input uses are only supported for U(1)");
    std::vector<Irrep> next;
    for (const auto& b : betas)
      for (const auto& [x, m] : input_reps[i].content) {
        Irrep s{GroupKind::U1, b.weight + x.weight, 0, SUdTag::Defining, 0};
        if (std::find(next.begin(), next.end(), s) == next.end()) next.push_back(s);
      }
    betas = std::move(next);
  }

  ReducedProblem rp;
  rp.d0 = target.total_dim();
  for (const auto& [a, ma] : target.content) {
    rp.a_irreps.push_back(a);
    rp.m_a.push_back(ma);
    rp.d_a.push_back(a.dim());
  }

  Index na = static_cast<Index>(rp.a_irreps.size());
  std::vector<Eigen::VectorXd> wsum_rows;  // per K, filled as K irreps appear
  std::vector<Eigen::VectorXi> mult_rows;
  for (const auto& beta : betas) {
    ConjugateTensorDecomposition dec = decompose_tensor_with_conjugate(target, beta);
    for (size_t ik = 0; ik < dec.k_irreps.size(); ++ik) {
      auto it = std::find(rp.k_irreps.begin(), rp.k_irreps.end(), dec.k_irreps[ik]);
      Index col;
      if (it == rp.k_irreps.end()) {
        rp.k_irreps.push_back(dec.k_irreps[ik]);
        rp.d_k.push_back(dec.k_irreps[ik].dim());
        wsum_rows.push_back(Eigen::VectorXd::Zero(na));
        mult_rows.push_back(Eigen::VectorXi::Zero(na));
        col = static_cast<Index>(rp.k_irreps.size()) - 1;
      } else {
        col = it - rp.k_irreps.begin();
      }
      for (Index ia = 0; ia < na; ++ia) {
        int m = dec.mult(ia, static_cast<Index>(ik));
        wsum_rows[static_cast<size_t>(col)](ia) += m * static_cast<double>(beta.dim());
        mult_rows[static_cast<size_t>(col)](ia) += m;
      }
    }
  }

  Index nk = static_cast<Index>(rp.k_irreps.size());
  rp.q = Eigen::MatrixXd::Zero(na, nk);
  rp.h = Eigen::MatrixXd::Zero(na, nk);
  rp.mult = Eigen::MatrixXi::Zero(na, nk);
  double d02 = static_cast<double>(rp.d0) * static_cast<double>(rp.d0);
  for (Index ik = 0; ik < nk; ++ik)
    for (Index ia = 0; ia < na; ++ia) {
      rp.mult(ia, ik) = mult_rows[static_cast<size_t>(ik)](ia);
      if (rp.mult(ia, ik) == 0) continue;
      double ma = rp.m_a[static_cast<size_t>(ia)];
      double da = static_cast<double>(rp.d_a[static_cast<size_t>(ia)]);
      double dk = static_cast<double>(rp.d_k[static_cast<size_t>(ik)]);
      rp.q(ia, ik) = ma * da * wsum_rows[static_cast<size_t>(ik)](ia) / (dk * d02);
      rp.h(ia, ik) = dk * dk * wsum_rows[static_cast<size_t>(ik)](ia) / (ma * da);
    }
  return rp;
}

ReducedProblem su2_clone_reduced(int n) {
  if (n < 1) throw Error("BadParameterization", "need at least one clone");
  ReducedProblem rp;
  rp.d0 = Index(1) << n;
  // spins a in U^{(x) n}: a = n/2, n/2-1, ... down to 0 or 1/2
  for (int ta = n % 2; ta <= n; ta += 2) {
    double m = (ta + 1.0) / (0.5 * n + 0.5 * ta + 1.0) * binom(n, (n + ta) / 2);
    rp.a_irreps.push_back(Irrep{GroupKind::SU2, 0, ta});
    rp.m_a.push_back(static_cast<int>(std::lround(m)));
    rp.d_a.push_back(ta + 1);
  }
  for (int tk = (n + 1) % 2; tk <= n + 1; tk += 2) {
    rp.k_irreps.push_back(Irrep{GroupKind::SU2, 0, tk});
    rp.d_k.push_back(tk + 1);
  }
  Index na = static_cast<Index>(rp.a_irreps.size());
  Index nk = static_cast<Index>(rp.k_irreps.size());
  rp.q = Eigen::MatrixXd::Zero(na, nk);
  rp.h = Eigen::MatrixXd::Zero(na, nk);
  rp.mult = Eigen::MatrixXi::Zero(na, nk);
  double fourn = std::pow(4.0, n);
  for (Index ia = 0; ia < na; ++ia) {
    int ta = rp.a_irreps[static_cast<size_t>(ia)].two_j;
    double ma = rp.m_a[static_cast<size_t>(ia)];
    for (Index ik = 0; ik < nk; ++ik) {
      int tk = rp.k_irreps[static_cast<size_t>(ik)].two_j;
      if (std::abs(ta - tk) != 1) continue;
      rp.mult(ia, ik) = static_cast<int>(ma);
      rp.q(ia, ik) = 2.0 * ma * ma * (ta + 1.0) / ((tk + 1.0) * fourn);
      // h^a_K = d_K^2 m^{a,beta}_K d_beta / (m_a d_a) with m^{a,beta}_K = m_a
      rp.h(ia, ik) = (tk + 1.0) * (tk + 1.0) * 2.0 / (ta + 1.0);
    }
  }
  return rp;
}

ReducedProblem phase_clone_reduced(int n) {
  if (n < 1) throw Error("BadParameterization", "need at least one clone");
  ReducedProblem rp;
  rp.d0 = Index(1) << n;
  for (int a = 0; a <= n; ++a) {
    rp.a_irreps.push_back(Irrep{GroupKind::U1, a});
    rp.m_a.push_back(static_cast<int>(std::lround(binom(n, a))));
    rp.d_a.push_back(1);
  }
  for (int k = -1; k <= n; ++k) {
    rp.k_irreps.push_back(Irrep{GroupKind::U1, k});
    rp.d_k.push_back(1);
  }
  Index na = static_cast<Index>(rp.a_irreps.size());
  Index nk = static_cast<Index>(rp.k_irreps.size());
  rp.q = Eigen::MatrixXd::Zero(na, nk);
  rp.h = Eigen::MatrixXd::Zero(na, nk);
  rp.mult = Eigen::MatrixXi::Zero(na, nk);
  double fourn = std::pow(4.0, n);
  for (Index ia = 0; ia < na; ++ia) {
    int a = rp.a_irreps[static_cast<size_t>(ia)].weight;
    double ma = binom(n, a);
    for (Index ik = 0; ik < nk; ++ik) {
      int k = rp.k_irreps[static_cast<size_t>(ik)].weight;
      if (k != a && k != a - 1) continue;
      rp.mult(ia, ik) = static_cast<int>(ma);
      rp.q(ia, ik) = ma * ma / fourn;
      rp.h(ia, ik) = 1.0;  // d_K = d_a = d_beta = 1, m^{a,beta}_K = m_a = m_a d_a
    }
  }
  return rp;
}

double phi_value(const ReducedProblem& rp, const Eigen::MatrixXd& p) {
  double phi = 0.0;
  for (Index ik = 0; ik < rp.q.cols(); ++ik) {
    double s = 0.0;
    for (Index ia = 0; ia < rp.q.rows(); ++ia)
      s += std::sqrt(std::max(0.0, rp.q(ia, ik) * p(ia, ik)));
    phi += s * s;
  }
  return phi;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  Eigen::VectorXd u = v;
  std::sort(u.data(), u.data() + u.size(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (Index i = 0; i < u.size(); ++i) {
    css += u(i);
    double t = (css - 1.0) / (i + 1.0);
    if (u(i) - t > 0) {
      rho = static_cast<int>(i) + 1;
      theta = t;
    }
  }
  (void)rho;
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

namespace {

Eigen::MatrixXd gradient(const ReducedProblem& rp, const Eigen::MatrixXd& p) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p.rows(), p.cols());
  for (Index ik = 0; ik < p.cols(); ++ik) {
    double s = 0.0;
    for (Index ia = 0; ia < p.rows(); ++ia)
      s += std::sqrt(std::max(0.0, rp.q(ia, ik) * p(ia, ik)));
    for (Index ia = 0; ia < p.rows(); ++ia) {
      if (rp.mult(ia, ik) == 0) continue;
      g(ia, ik) = s * std::sqrt(rp.q(ia, ik) / std::max(p(ia, ik), kSqrtEps));
    }
  }
  return g;
}

// Project each row of p + step*g onto its feasible simplex.
Eigen::MatrixXd project_rows(const ReducedProblem& rp, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  for (Index ia = 0; ia < x.rows(); ++ia) {
    std::vector<Index> feas;
    for (Index ik = 0; ik < x.cols(); ++ik)
      if (rp.mult(ia, ik) > 0) feas.push_back(ik);
    Eigen::VectorXd v(static_cast<Index>(feas.size()));
    for (size_t j = 0; j < feas.size(); ++j) v(static_cast<Index>(j)) = x(ia, feas[j]);
    Eigen::VectorXd pr = project_to_simplex(v);
    for (size_t j = 0; j < feas.size(); ++j) out(ia, feas[j]) = pr(static_cast<Index>(j));
  }
  return out;
}

// Sup norm of the gradient projected onto the tangent cone of the
// per-row simplices; zero at a KKT point.
double kkt_residual(const ReducedProblem& rp, const Eigen::MatrixXd& p,
                    const Eigen::MatrixXd& g) {
  double res = 0.0;
  for (Index ia = 0; ia < p.rows(); ++ia) {
    std::vector<Index> feas;
    for (Index ik = 0; ik < p.cols(); ++ik)
      if (rp.mult(ia, ik) > 0) feas.push_back(ik);
    std::vector<bool> clamped(feas.size(), false);
    for (int pass = 0; pass < static_cast<int>(feas.size()) + 1; ++pass) {
      double sum = 0.0;
      int cnt = 0;
      for (size_t j = 0; j < feas.size(); ++j)
        if (!clamped[j]) {
          sum += g(ia, feas[j]);
          ++cnt;
        }
      double lambda = (cnt > 0) ? sum / cnt : 0.0;
      bool changed = false;
      for (size_t j = 0; j < feas.size(); ++j) {
        bool active = p(ia, feas[j]) <= 1e-12;
        if (!clamped[j] && active && g(ia, feas[j]) - lambda < 0) {
          clamped[j] = true;
          changed = true;
        }
      }
      if (!changed) {
        for (size_t j = 0; j < feas.size(); ++j) {
          double d = clamped[j] ? 0.0 : g(ia, feas[j]) - lambda;
          res = std::max(res, std::abs(d));
        }
        break;
      }
    }
  }
  return res;
}

}  // namespace

SolveResult solve_reduced_problem(const ReducedProblem& rp, double tol, int max_iters) {
  Index na = rp.q.rows(), nk = rp.q.cols();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(na, nk);
  for (Index ia = 0; ia < na; ++ia) {
    int cnt = 0;
    for (Index ik = 0; ik < nk; ++ik)
      if (rp.mult(ia, ik) > 0) ++cnt;
    if (cnt == 0) throw Error("InfeasibleP", "target block with no product irrep");
    for (Index ik = 0; ik < nk; ++ik)
      if (rp.mult(ia, ik) > 0) p(ia, ik) = 1.0 / cnt;
  }

  double phi = phi_value(rp, p);
  int it = 0;
  for (; it < max_iters; ++it) {
    Eigen::MatrixXd g = gradient(rp, p);
    if (kkt_residual(rp, p, g) < tol) break;
    double phi_before = phi;
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::MatrixXd cand = project_rows(rp, p + step * g);
      if ((cand - p).cwiseAbs().maxCoeff() == 0.0) break;  // step underflow
      double cphi = phi_value(rp, cand);
      double lin = ((cand - p).array() * g.array()).sum();
      if (cphi >= phi + 1e-4 * lin && cphi >= phi - 1e-15) {
        p = cand;
        phi = cphi;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || phi - phi_before < 1e-12 * (1.0 + std::abs(phi))) {
      // Gradient progress dried up (the sqrt objective has unbounded curvature
      // at the simplex boundary). Switch to the stationarity fixed point
      // p^a_K <- q^a_K s_K^2 / (row sum), which contracts to the optimum of
      // the concave objective and preserves feasibility exactly.
      for (int fp = 0; fp < 20000 && it < max_iters; ++fp, ++it) {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(nk);
        for (Index ik = 0; ik < nk; ++ik)
          for (Index ia = 0; ia < na; ++ia)
            s(ik) += std::sqrt(std::max(0.0, rp.q(ia, ik) * p(ia, ik)));
        double delta = 0.0;
        for (Index ia = 0; ia < na; ++ia) {
          double z = 0.0;
          Eigen::VectorXd row = Eigen::VectorXd::Zero(nk);
          for (Index ik = 0; ik < nk; ++ik)
            if (rp.mult(ia, ik) > 0) {
              row(ik) = rp.q(ia, ik) * s(ik) * s(ik);
              z += row(ik);
            }
          if (z <= 0.0) continue;
          for (Index ik = 0; ik < nk; ++ik) {
            double v = row(ik) / z;
            delta = std::max(delta, std::abs(v - p(ia, ik)));
            p(ia, ik) = v;
          }
        }
        if (delta < 1e-16) break;
      }
      // snap entries that the fixed point is driving to the boundary; this
      // finishes the geometric decay of emptying columns in one step
      for (Index ia = 0; ia < na; ++ia) {
        double z = 0.0;
        for (Index ik = 0; ik < nk; ++ik) {
          if (p(ia, ik) < 1e-13) p(ia, ik) = 0.0;
          z += p(ia, ik);
        }
        if (z > 0.0) p.row(ia) /= z;
      }
      phi = phi_value(rp, p);
      Eigen::MatrixXd gg = gradient(rp, p);
      if (kkt_residual(rp, p, gg) < tol) break;
    }
  }
  Eigen::MatrixXd g = gradient(rp, p);
  double res = kkt_residual(rp, p, g);
  if (res >= tol * std::max(1.0, g.cwiseAbs().maxCoeff()) && res >= tol)
    throw Error("NoConvergence", "solver stalled after " + std::to_string(it) +
                                     " iterations with first-order residual " +
                                     std::to_string(res));
  return SolveResult{p, phi, res, it};
}

double irrep_transform_fidelity(int two_beta, int two_a) {
  return (two_beta + 1.0) / ((two_a + 1.0) * (std::abs(two_a - two_beta) + 1.0));
}

}  // namespace combopt
