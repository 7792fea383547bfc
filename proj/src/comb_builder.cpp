#include "combopt/comb_builder.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

namespace combopt {

namespace {

// Flat view of every multiplicity copy across all K blocks, together with
// the coefficients of the rank-structured ansatz.
struct EntryRef {
  Index kb = 0;       // K-block index
  Index ia = 0;       // row in the reduced tables
  Index beta_id = 0;  // index into the distinct-beta list
  double c = 0;       // psi amplitude sqrt(p d_beta^2 / h)
  double dcoef = 0;   // D-term weight d_K d_beta p / h
  double delta = 0;   // Delta-term weight d_gamma / (cnt d_L k_gamma)
  const Matrix* j = nullptr;
};

struct AnsatzData {
  ReducedProblem prob;
  std::vector<std::vector<EntryRef>> per_block;  // indexed like t.k_blocks
  std::vector<Irrep> betas;
};

AnsatzData ansatz_data(const Eigen::MatrixXd& p, const TaskRep& t) {
  AnsatzData d;
  d.prob = build_reduced_problem(t);
  if (p.rows() != d.prob.q.rows() || p.cols() != d.prob.q.cols())
    throw Error("InfeasibleP", "probability table has the wrong shape");
  if (t.k_blocks.empty()) throw Error("MissingProjector", "task has no product irreps");

  for (const auto& kb : t.k_blocks)
    for (const auto& e : kb.entries)
      if (std::find(d.betas.begin(), d.betas.end(), e.beta) == d.betas.end())
        d.betas.push_back(e.beta);

  // k_gamma: in how many K blocks the resource irrep gamma occurs
  std::vector<int> k_gamma(d.betas.size(), 0);
  // cnt(gamma, L): multiplicity copies with resource irrep gamma inside L
  Eigen::MatrixXi cnt =
      Eigen::MatrixXi::Zero(static_cast<Index>(d.betas.size()),
                            static_cast<Index>(t.k_blocks.size()));
  for (size_t l = 0; l < t.k_blocks.size(); ++l)
    for (const auto& e : t.k_blocks[l].entries) {
      Index bi = std::find(d.betas.begin(), d.betas.end(), e.beta) - d.betas.begin();
      cnt(bi, static_cast<Index>(l)) += 1;
    }
  for (size_t bi = 0; bi < d.betas.size(); ++bi)
    for (size_t l = 0; l < t.k_blocks.size(); ++l)
      if (cnt(static_cast<Index>(bi), static_cast<Index>(l)) > 0) ++k_gamma[bi];

  for (size_t kbi = 0; kbi < t.k_blocks.size(); ++kbi) {
    const auto& kb = t.k_blocks[kbi];
    Index ik = d.prob.k_index(kb.K);
    double dk = static_cast<double>(kb.K.dim());
    std::vector<EntryRef> refs;
    for (const auto& e : kb.entries) {
      EntryRef r;
      r.kb = static_cast<Index>(kbi);
      r.ia = d.prob.a_index(e.a);
      r.beta_id = std::find(d.betas.begin(), d.betas.end(), e.beta) - d.betas.begin();
      double db = static_cast<double>(e.beta.dim());
      double h = d.prob.h(r.ia, ik);
      double pak = p(r.ia, ik);
      r.c = (h > 0) ? std::sqrt(std::max(0.0, pak) * db * db / h) : 0.0;
      r.dcoef = (h > 0) ? dk * db * pak / h : 0.0;
      r.delta = db / (static_cast<double>(cnt(r.beta_id, static_cast<Index>(kbi))) * dk *
                      static_cast<double>(k_gamma[static_cast<size_t>(r.beta_id)]));
      r.j = &e.isometry;
      refs.push_back(r);
    }
    d.per_block.push_back(std::move(refs));
  }
  return d;
}

void check_feasible(const Eigen::MatrixXd& p, const ReducedProblem& prob) {
  for (Index ia = 0; ia < p.rows(); ++ia) {
    double row = 0;
    for (Index ik = 0; ik < p.cols(); ++ik) {
      if (p(ia, ik) < -1e-12) throw Error("InfeasibleP", "negative probability entry");
      if (prob.mult(ia, ik) == 0 && std::abs(p(ia, ik)) > 1e-12)
        throw Error("InfeasibleP", "probability on a forbidden (a, K) pair");
      row += p(ia, ik);
    }
    if (std::abs(row - 1.0) > 1e-9)
      throw Error("InfeasibleP", "probability row does not sum to one");
  }
}

Vector identity_omega(Index d0, Index d1) {
  Vector omega = Vector::Zero(d0 * d1 * d1 * d0);
  for (Index n = 0; n < d0; ++n)
    for (Index m = 0; m < d1; ++m) omega(((n * d1 + m) * d1 + m) * d0 + n) = 1.0;
  return omega;
}

}  // namespace

Matrix theta_matrix(Index d0, Index d1) {
  Matrix th = Matrix::Zero(d1 * d0, d0 * d1);
  for (Index n = 0; n < d0; ++n)
    for (Index m = 0; m < d1; ++m) th(m * d0 + n, n * d1 + m) = 1.0;
  return th;
}

OptimalComb build_optimal_comb(const Eigen::MatrixXd& p, const TaskRep& t) {
  AnsatzData d = ansatz_data(p, t);
  check_feasible(p, d.prob);

  Index d01 = t.d0 * t.d1;
  Matrix th = theta_matrix(t.d0, t.d1);
  // mirrored isometries into H2 (x) H3 carrying the conjugate irrep
  std::vector<std::vector<Matrix>> jt(d.per_block.size());
  for (size_t kb = 0; kb < d.per_block.size(); ++kb)
    for (const auto& e : d.per_block[kb]) jt[kb].push_back(th * e.j->conjugate());

  Matrix r = Matrix::Zero(d01 * d01, d01 * d01);
  for (size_t kb = 0; kb < d.per_block.size(); ++kb) {
    const auto& refs = d.per_block[kb];
    for (size_t s = 0; s < refs.size(); ++s)
      for (size_t u = 0; u < refs.size(); ++u) {
        double w = refs[s].c * refs[u].c;
        if (w == 0.0) continue;
        Matrix a = (*refs[s].j) * refs[u].j->adjoint();
        Matrix b = jt[kb][s] * jt[kb][u].adjoint();
        r += w * Eigen::kroneckerProduct(a, b);
      }
  }
  // correction blocks pairing distinct resource irreps; they carry no
  // fidelity but complete the comb normalization
  for (size_t kb = 0; kb < d.per_block.size(); ++kb)
    for (const auto& et : d.per_block[kb]) {
      if (et.dcoef == 0.0) continue;
      Matrix a = (*et.j) * et.j->adjoint();
      for (size_t lb = 0; lb < d.per_block.size(); ++lb)
        for (size_t s = 0; s < d.per_block[lb].size(); ++s) {
          const auto& es = d.per_block[lb][s];
          if (es.beta_id == et.beta_id) continue;
          r += (et.dcoef * es.delta) *
               Eigen::kroneckerProduct(a, (jt[lb][s] * jt[lb][s].adjoint()).eval());
        }
    }

  std::vector<SubsystemLabel> labels{{"0", t.d0}, {"1", t.d1}, {"2", t.d1}, {"3", t.d0}};
  OptimalComb out;
  out.r = LabeledOperator(labels, std::move(r));
  out.prob = std::move(d.prob);
  out.p = p;
  return out;
}

double fidelity_block_exact(const LabeledOperator& r, const TaskRep& t) {
  std::vector<HaarNode> nodes = task_haar_nodes(t, 16, 1);
  size_t stride = std::max<size_t>(1, nodes.size() / 8);
  std::vector<HaarNode> probe;
  for (size_t i = 0; i < nodes.size(); i += stride) probe.push_back(nodes[i]);
  if (covariance_violation(r, t, probe) > 1e-8)
    throw Error("NotCovariant", "block-exact fidelity needs a covariant comb");
  LabeledOperator p = relabel_and_permute(r, {"0", "1", "2", "3"});
  Vector omega = identity_omega(t.d0, t.d1);
  return (omega.adjoint() * p.matrix() * omega)(0, 0).real() /
         static_cast<double>(t.d0 * t.d0);
}

double fidelity_block_exact(const OptimalComb& c, const TaskRep& t) {
  return fidelity_block_exact(c.r, t);
}

AnsatzResiduals verify_ansatz_normalization(const Eigen::MatrixXd& p, const TaskRep& t) {
  AnsatzData d = ansatz_data(p, t);
  AnsatzResiduals out;
  for (Index ia = 0; ia < p.rows(); ++ia)
    for (Index ik = 0; ik < p.cols(); ++ik)
      if (p(ia, ik) < -1e-12) out.positive = false;

  size_t nb = d.per_block.size();
  // reduced multiplicity-space blocks S^K(gamma) =
  //   sum_L (d_L / d_gamma) Tr_L[ R^{KL} (I (x) P^gamma_L) ]
  std::vector<std::vector<Matrix>> s_of_gamma(nb);
  for (size_t kb = 0; kb < nb; ++kb) {
    const auto& refs = d.per_block[kb];
    Index mk = static_cast<Index>(refs.size());
    for (size_t g = 0; g < d.betas.size(); ++g) {
      Matrix s = Matrix::Zero(mk, mk);
      double dg = static_cast<double>(d.betas[g].dim());
      // diagonal (L = K) psi contribution
      for (Index i = 0; i < mk; ++i)
        for (Index j = 0; j < mk; ++j) {
          if (refs[static_cast<size_t>(i)].beta_id != static_cast<Index>(g) ||
              refs[static_cast<size_t>(j)].beta_id != static_cast<Index>(g))
            continue;
          if (i != j) continue;  // Tr over the L copy keeps matched indices
          double dk = static_cast<double>(t.k_blocks[kb].K.dim());
          s(i, j) += (dk / dg) * refs[static_cast<size_t>(i)].c *
                     refs[static_cast<size_t>(j)].c;
        }
      // psi off-diagonal terms: Tr_L[|psi><psi| (I (x) P^gamma)] couples
      // (i,j) with the same L-side indices, i.e. only the diagonal above.
      // D (x) Delta contribution
      for (Index i = 0; i < mk; ++i) {
        const auto& et = refs[static_cast<size_t>(i)];
        if (et.dcoef == 0.0) continue;
        double acc = 0.0;
        for (size_t lb = 0; lb < nb; ++lb) {
          double dl = static_cast<double>(t.k_blocks[lb].K.dim());
          for (const auto& es : d.per_block[lb]) {
            if (es.beta_id == et.beta_id) continue;
            if (es.beta_id != static_cast<Index>(g)) continue;
            acc += (dl / dg) * et.dcoef * es.delta;
          }
        }
        s(i, i) += acc;
      }
      s_of_gamma[kb].push_back(std::move(s));
    }
  }
  // gamma-independence
  for (size_t kb = 0; kb < nb; ++kb)
    for (size_t g = 1; g < d.betas.size(); ++g)
      out.block_consistency =
          std::max(out.block_consistency,
                   (s_of_gamma[kb][g] - s_of_gamma[kb][0]).cwiseAbs().maxCoeff());

  // per-a unit sum: sum_{K,beta} (d_K / (d_a m_a)) Tr[S^K P^{a,beta}_K] = 1
  for (Index ia = 0; ia < static_cast<Index>(d.prob.a_irreps.size()); ++ia) {
    double total = 0.0;
    double ma = d.prob.m_a[static_cast<size_t>(ia)];
    double da = static_cast<double>(d.prob.d_a[static_cast<size_t>(ia)]);
    for (size_t kb = 0; kb < nb; ++kb) {
      const auto& refs = d.per_block[kb];
      double dk = static_cast<double>(t.k_blocks[kb].K.dim());
      for (size_t i = 0; i < refs.size(); ++i) {
        if (refs[i].ia != ia) continue;
        total += (dk / (da * ma)) * s_of_gamma[kb][0](static_cast<Index>(i),
                                                      static_cast<Index>(i)).real();
      }
    }
    out.unit_sum = std::max(out.unit_sum, std::abs(total - 1.0));
  }
  return out;
}

Matrix fidelity_witness(const TaskRep& t, const std::vector<HaarNode>& nodes) {
  Index dim = t.d0 * t.d1 * t.d1 * t.d0;
  Matrix w = Matrix::Zero(dim, dim);
  for (const auto& n : nodes) {
    Matrix v = t.V(n.g), u = t.U(n.g);
    Vector omega(dim);
    for (Index np = 0; np < t.d0; ++np)
      for (Index mp = 0; mp < t.d1; ++mp)
        for (Index m = 0; m < t.d1; ++m)
          for (Index nn = 0; nn < t.d0; ++nn)
            omega(((np * t.d1 + mp) * t.d1 + m) * t.d0 + nn) =
                std::conj(u(m, mp)) * v(nn, np);
    w += n.w * (omega * omega.adjoint());
  }
  return w;
}

double witness_fidelity(const LabeledOperator& r, const TaskRep& t, const Matrix& witness) {
  LabeledOperator p = relabel_and_permute(r, {"0", "1", "2", "3"});
  return (p.matrix() * witness).trace().real() / static_cast<double>(t.d0 * t.d0);
}

double random_comb_bound_check(const TaskRep& t, const std::vector<HaarNode>& nodes,
                               int n_trials, std::uint64_t seed,
                               const LabeledOperator* include_first) {
  Matrix w = fidelity_witness(t, nodes);
  CombSpec spec{{{"0", t.d0}, {"1", t.d1}, {"2", t.d1}, {"3", t.d0}}};
  double best = include_first ? witness_fidelity(*include_first, t, w) : 0.0;
  for (int i = 0; i < n_trials; ++i) {
    LabeledOperator r = random_deterministic_comb(spec, {t.d0 * t.d1}, seed + static_cast<std::uint64_t>(i));
    best = std::max(best, witness_fidelity(r, t, w));
  }
  return best;
}

}  // namespace combopt
