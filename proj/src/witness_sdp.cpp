#include "entwit/witness_sdp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <set>

namespace entwit {

namespace {

// trace(X * Y) without forming the product.
Complex trace_product(const ComplexMatrix& x, const ComplexMatrix& y) {
  return x.transpose().cwiseProduct(y).sum();
}

double max_abs(const ComplexMatrix& m) {
  double mx = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      mx = std::max(mx, std::abs(m(i, j)));
    }
  }
  return mx;
}

struct SparseEntry {
  int r;
  int c;
  Complex coeff;
};

// Real parameterization of Hermitian Q: diagonal units, then real and
// imaginary off-diagonal units. `e` holds the entries of the basis element,
// `f` those of its partial transpose on A.
struct QBasisElement {
  std::vector<SparseEntry> e;
  std::vector<SparseEntry> f;
};

std::vector<QBasisElement> make_q_basis(const BipartiteDims& dims) {
  const int d = dims.total();
  const int db = dims.d_b;
  auto pt = [db](const SparseEntry& s) {
    const int ra = s.r / db, rb = s.r % db;
    const int ca = s.c / db, cb = s.c % db;
    return SparseEntry{ca * db + rb, ra * db + cb, s.coeff};
  };
  std::vector<QBasisElement> out;
  out.reserve(static_cast<std::size_t>(d) * d);
  for (int u = 0; u < d; ++u) {
    QBasisElement el;
    el.e.push_back({u, u, Complex(1.0, 0.0)});
    el.f.push_back(pt(el.e[0]));
    out.push_back(std::move(el));
  }
  for (int u = 0; u < d; ++u) {
    for (int v = u + 1; v < d; ++v) {
      QBasisElement re;
      re.e.push_back({u, v, Complex(1.0, 0.0)});
      re.e.push_back({v, u, Complex(1.0, 0.0)});
      re.f.push_back(pt(re.e[0]));
      re.f.push_back(pt(re.e[1]));
      out.push_back(std::move(re));

      QBasisElement im;
      im.e.push_back({u, v, Complex(0.0, 1.0)});
      im.e.push_back({v, u, Complex(0.0, -1.0)});
      im.f.push_back(pt(im.e[0]));
      im.f.push_back(pt(im.e[1]));
      out.push_back(std::move(im));
    }
  }
  return out;
}

Complex entries_trace(const ComplexMatrix& m, const std::vector<SparseEntry>& entries) {
  Complex acc(0.0, 0.0);
  for (const SparseEntry& s : entries) acc += s.coeff * m(s.c, s.r);
  return acc;
}

struct Problem {
  BipartiteDims dims;
  int d = 0;
  int n_cells = 0;
  int n_q = 0;
  int n_vars = 0;
  std::vector<ComplexMatrix> g;  // product operators per cell
  std::vector<QBasisElement> qb;
  Eigen::VectorXd objective;     // m for cells, 0 for q
  Eigen::VectorXd trace_row;     // tr(G_k) for cells, 0 for q
};

struct Iterate {
  Eigen::VectorXd y;
  ComplexMatrix w, q, p;
  Eigen::LLT<ComplexMatrix> llt_p, llt_q;
  double barrier = 0.0;
  bool feasible = false;
};

void assemble_wq(const Problem& pr, const Eigen::VectorXd& y, ComplexMatrix& w,
                 ComplexMatrix& q) {
  w = ComplexMatrix::Zero(pr.d, pr.d);
  for (int k = 0; k < pr.n_cells; ++k) {
    if (y(k) != 0.0) w += y(k) * pr.g[static_cast<std::size_t>(k)];
  }
  q = ComplexMatrix::Zero(pr.d, pr.d);
  for (int l = 0; l < pr.n_q; ++l) {
    const double coeff = y(pr.n_cells + l);
    if (coeff == 0.0) continue;
    for (const SparseEntry& s : pr.qb[static_cast<std::size_t>(l)].e) {
      q(s.r, s.c) += coeff * s.coeff;
    }
  }
}

double llt_logdet(const Eigen::LLT<ComplexMatrix>& llt, int d) {
  double acc = 0.0;
  const auto& storage = llt.matrixLLT();
  for (int i = 0; i < d; ++i) acc += std::log(storage(i, i).real());
  return 2.0 * acc;
}

// Rebuilds matrices and factorizations at y; feasible=false when either cone
// block fails to factor.
void evaluate(const Problem& pr, Iterate& it) {
  assemble_wq(pr, it.y, it.w, it.q);
  it.p = it.w - partial_transpose(it.q, pr.dims, Subsystem::A);
  it.llt_p.compute(it.p);
  if (it.llt_p.info() != Eigen::Success) {
    it.feasible = false;
    return;
  }
  it.llt_q.compute(it.q);
  if (it.llt_q.info() != Eigen::Success) {
    it.feasible = false;
    return;
  }
  it.feasible = true;
  it.barrier = -llt_logdet(it.llt_p, pr.d) - llt_logdet(it.llt_q, pr.d);
}

// Largest step keeping M + alpha * dM positive definite, scaled back by the
// boundary fraction. Computed from the minimal eigenvalue of L^-1 dM L^-H.
double cone_step_bound(const Eigen::LLT<ComplexMatrix>& llt, const ComplexMatrix& dm) {
  const ComplexMatrix x = llt.matrixL().solve(dm);
  const ComplexMatrix s = llt.matrixL().solve(x.adjoint().eval()).adjoint();
  const ComplexMatrix sym = 0.5 * (s + s.adjoint().eval());
  const double lambda_min = hermitian_eigenvalues(sym)(0);
  if (lambda_min >= -1e-14) return std::numeric_limits<double>::infinity();
  return -1.0 / lambda_min;
}

}  // namespace

int MeasurementBasis::index_of(const Cell& c) const {
  const auto it = std::lower_bound(cells.begin(), cells.end(), c);
  if (it != cells.end() && *it == c) return static_cast<int>(it - cells.begin());
  return -1;
}

ComplexMatrix MeasurementBasis::product_operator(const Cell& c) const {
  const ComplexMatrix ia = ComplexMatrix::Identity(dims.d_a, dims.d_a);
  const ComplexMatrix ib = ComplexMatrix::Identity(dims.d_b, dims.d_b);
  const ComplexMatrix& ma =
      c.a == 0 ? ia : a_ops[static_cast<std::size_t>(c.a - 1)].matrix();
  const ComplexMatrix& mb =
      c.b == 0 ? ib : b_ops[static_cast<std::size_t>(c.b - 1)].matrix();
  return kron(ma, mb);
}

std::vector<ComplexMatrix> MeasurementBasis::product_operators() const {
  std::vector<ComplexMatrix> out;
  out.reserve(cells.size());
  for (const Cell& c : cells) out.push_back(product_operator(c));
  return out;
}

MeasurementBasis build_product_basis(const BipartiteDims& dims,
                                     std::vector<HermitianOperator> a_ops,
                                     std::vector<HermitianOperator> b_ops,
                                     std::span<const Cell> strategy_cells) {
  for (const HermitianOperator& op : a_ops) {
    if (op.dim() != dims.d_a) {
      throw std::invalid_argument("build_product_basis: A operator dimension mismatch");
    }
  }
  for (const HermitianOperator& op : b_ops) {
    if (op.dim() != dims.d_b) {
      throw std::invalid_argument("build_product_basis: B operator dimension mismatch");
    }
  }
  std::set<Cell> cells;
  cells.insert(Cell{0, 0});  // known for free on any state
  for (const Cell& c : strategy_cells) {
    if (c.a < 0 || c.b < 0 || c.a > static_cast<int>(a_ops.size()) ||
        c.b > static_cast<int>(b_ops.size())) {
      throw std::invalid_argument("build_product_basis: cell index out of range");
    }
    cells.insert(c);
    if (c.a >= 1 && c.b >= 1) {
      cells.insert(Cell{c.a, 0});
      cells.insert(Cell{0, c.b});
    }
  }
  MeasurementBasis basis;
  basis.dims = dims;
  basis.a_ops = std::move(a_ops);
  basis.b_ops = std::move(b_ops);
  basis.cells.assign(cells.begin(), cells.end());
  return basis;
}

ExpectationVector expectation_vector(const DensityMatrix& rho,
                                     const MeasurementBasis& basis) {
  if (rho.dim() != basis.dims.total()) {
    throw std::invalid_argument("expectation_vector: state dimension mismatch");
  }
  ExpectationVector out;
  out.source = ExpectationVector::Source::Exact;
  out.values.reserve(basis.cells.size());
  for (const Cell& c : basis.cells) {
    if (c.a == 0 && c.b == 0) {
      out.values.push_back(1.0);
      continue;
    }
    const ComplexMatrix g = basis.product_operator(c);
    out.values.push_back(trace_product(g, rho.matrix()).real());
  }
  return out;
}

SdpSolution solve_witness_sdp(const MeasurementBasis& basis, const ExpectationVector& m,
                              const SdpConfig& cfg) {
  const int identity_idx = basis.index_of(Cell{0, 0});
  if (identity_idx < 0) {
    throw std::invalid_argument("solve_witness_sdp: basis must contain cell (0,0)");
  }
  if (m.values.size() != basis.cells.size()) {
    throw std::invalid_argument("solve_witness_sdp: expectation vector misaligned");
  }
  if (std::abs(m.values[static_cast<std::size_t>(identity_idx)] - 1.0) > 1e-9) {
    throw std::invalid_argument("solve_witness_sdp: cell (0,0) expectation must be 1");
  }

  Problem pr;
  pr.dims = basis.dims;
  pr.d = basis.dims.total();
  pr.n_cells = basis.n_cells();
  pr.n_q = pr.d * pr.d;
  pr.n_vars = pr.n_cells + pr.n_q;
  pr.g = basis.product_operators();
  pr.qb = make_q_basis(basis.dims);
  pr.objective = Eigen::VectorXd::Zero(pr.n_vars);
  pr.trace_row = Eigen::VectorXd::Zero(pr.n_vars);
  for (int k = 0; k < pr.n_cells; ++k) {
    pr.objective(k) = m.values[static_cast<std::size_t>(k)];
    pr.trace_row(k) = pr.g[static_cast<std::size_t>(k)].trace().real();
  }

  // Strictly feasible start: W = I/d, Q = I/(4d), P = 3/(4d) I.
  Iterate cur;
  cur.y = Eigen::VectorXd::Zero(pr.n_vars);
  cur.y(identity_idx) = 1.0 / pr.d;
  for (int u = 0; u < pr.d; ++u) cur.y(pr.n_cells + u) = 1.0 / (4.0 * pr.d);
  evaluate(pr, cur);

  const double nu = 2.0 * pr.d;
  const double t_cap = nu / cfg.gap_tol;
  double t = std::min(nu, t_cap);
  SdpStatus status = SdpStatus::Optimal;
  int steps = 0;

  Eigen::VectorXd grad(pr.n_vars);
  Eigen::MatrixXd hess(pr.n_vars, pr.n_vars);
  std::vector<ComplexMatrix> t_mats(static_cast<std::size_t>(pr.n_cells));
  Iterate trial;

  bool done = !cur.feasible;
  while (!done) {
    // Center at the current barrier parameter: loosely along the path, tightly
    // at the final stage where the duality gap is reported.
    const bool final_stage = t >= t_cap * (1.0 - 1e-12);
    const double center_tol = final_stage ? cfg.center_tol : 1e-2;
    for (;;) {
      if (steps >= cfg.max_iterations) {
        status = SdpStatus::MaxIterations;
        done = true;
        break;
      }
      const ComplexMatrix p_inv =
          cur.llt_p.solve(ComplexMatrix::Identity(pr.d, pr.d));
      const ComplexMatrix q_inv =
          cur.llt_q.solve(ComplexMatrix::Identity(pr.d, pr.d));

      for (int k = 0; k < pr.n_cells; ++k) {
        const ComplexMatrix& gk = pr.g[static_cast<std::size_t>(k)];
        t_mats[static_cast<std::size_t>(k)] = p_inv * gk * p_inv;
        grad(k) = t * pr.objective(k) - trace_product(p_inv, gk).real();
      }
      for (int l = 0; l < pr.n_q; ++l) {
        const QBasisElement& el = pr.qb[static_cast<std::size_t>(l)];
        grad(pr.n_cells + l) =
            entries_trace(p_inv, el.f).real() - entries_trace(q_inv, el.e).real();
      }

      for (int k = 0; k < pr.n_cells; ++k) {
        const ComplexMatrix& tk = t_mats[static_cast<std::size_t>(k)];
        for (int k2 = 0; k2 <= k; ++k2) {
          const double h = trace_product(tk, pr.g[static_cast<std::size_t>(k2)]).real();
          hess(k, k2) = h;
          hess(k2, k) = h;
        }
        for (int l = 0; l < pr.n_q; ++l) {
          const double h =
              -entries_trace(tk, pr.qb[static_cast<std::size_t>(l)].f).real();
          hess(k, pr.n_cells + l) = h;
          hess(pr.n_cells + l, k) = h;
        }
      }
      for (int l = 0; l < pr.n_q; ++l) {
        const QBasisElement& el = pr.qb[static_cast<std::size_t>(l)];
        for (int l2 = 0; l2 <= l; ++l2) {
          const QBasisElement& el2 = pr.qb[static_cast<std::size_t>(l2)];
          Complex acc(0.0, 0.0);
          for (const SparseEntry& s : el.f) {
            for (const SparseEntry& s2 : el2.f) {
              acc += s.coeff * s2.coeff * p_inv(s.c, s2.r) * p_inv(s2.c, s.r);
            }
          }
          for (const SparseEntry& s : el.e) {
            for (const SparseEntry& s2 : el2.e) {
              acc += s.coeff * s2.coeff * q_inv(s.c, s2.r) * q_inv(s2.c, s.r);
            }
          }
          hess(pr.n_cells + l, pr.n_cells + l2) = acc.real();
          hess(pr.n_cells + l2, pr.n_cells + l) = acc.real();
        }
      }

      // Equality-constrained Newton step via Cholesky, ridge fallback for
      // (near-)dependent product bases.
      Eigen::VectorXd h_g, h_a;
      double ridge = 0.0;
      const double ridge_scale =
          std::max(hess.diagonal().maxCoeff(), 1.0) * 1e-14;
      for (;;) {
        Eigen::MatrixXd reg = hess;
        if (ridge > 0.0) reg.diagonal().array() += ridge;
        Eigen::LLT<Eigen::MatrixXd> hllt(reg);
        if (hllt.info() == Eigen::Success) {
          h_g = hllt.solve(grad);
          h_a = hllt.solve(pr.trace_row);
          break;
        }
        ridge = (ridge == 0.0) ? ridge_scale : ridge * 100.0;
        if (ridge > 1e10 * ridge_scale) {
          status = SdpStatus::InfeasibleNumerics;
          done = true;
          break;
        }
      }
      if (done) break;

      const double denom = pr.trace_row.dot(h_a);
      const double mult = (std::abs(denom) > 0.0) ? pr.trace_row.dot(h_g) / denom : 0.0;
      const Eigen::VectorXd delta = -h_g + mult * h_a;
      const double decrement2 = -grad.dot(delta);
      if (decrement2 * 0.5 <= center_tol) break;

      ComplexMatrix dw, dq;
      assemble_wq(pr, delta, dw, dq);
      const ComplexMatrix dp = dw - partial_transpose(dq, pr.dims, Subsystem::A);
      const double bound =
          std::min(cone_step_bound(cur.llt_p, dp), cone_step_bound(cur.llt_q, dq));
      double alpha = std::min(1.0, cfg.boundary_fraction * bound);

      const double psi_cur = t * pr.objective.dot(cur.y) + cur.barrier;
      const double slope = grad.dot(delta);
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        // Steps below 1e-8 of the Newton direction are lost in the rounding
        // of psi; treat them as a stall instead of spinning.
        if (alpha < 1e-8) break;
        trial.y = cur.y + alpha * delta;
        evaluate(pr, trial);
        if (trial.feasible) {
          const double psi_trial = t * pr.objective.dot(trial.y) + trial.barrier;
          if (psi_trial <= psi_cur + 0.01 * alpha * slope) {
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (std::getenv("ENTWIT_SDP_DEBUG") != nullptr) {
        std::fprintf(stderr,
                     "step=%d t=%.3e dec2=%.3e alpha=%.3e bound=%.3e acc=%d\n",
                     steps, t, decrement2, alpha, bound, accepted ? 1 : 0);
      }
      if (!accepted) {
        // Progress stalled. Near the end of the path a small residual
        // decrement only perturbs the gap bound at the percent level, so a
        // stall there still counts as centered.
        if (decrement2 * 0.5 <= 1e-3) break;
        status = (nu / t <= 10.0 * cfg.gap_tol) ? SdpStatus::MaxIterations
                                                : SdpStatus::InfeasibleNumerics;
        done = true;
        break;
      }
      std::swap(cur, trial);
      ++steps;
    }
    if (done) break;
    if (final_stage) break;
    t = std::min(t * cfg.t_growth, t_cap);
  }

  // Newton steps hold the trace row only to rounding; everything is
  // homogeneous in y, so one exact rescale restores tr(W) = 1.
  const double eq = pr.trace_row.dot(cur.y);
  if (std::abs(eq) > 1e-300) {
    const double rescale = 1.0 / eq;
    cur.y *= rescale;
    cur.w *= rescale;
    cur.q *= rescale;
    cur.p *= rescale;
  }

  return SdpSolution{
      .coefficients =
          std::vector<double>(cur.y.data(), cur.y.data() + pr.n_cells),
      .witness = HermitianOperator(cur.w, pr.dims),
      .p_matrix = HermitianOperator(cur.p, pr.dims),
      .q_matrix = HermitianOperator(cur.q, pr.dims),
      .optimal_value = pr.objective.head(pr.n_cells).dot(cur.y.head(pr.n_cells)),
      .status = cur.feasible ? status : SdpStatus::InfeasibleNumerics,
      .duality_gap = nu / t,
      .newton_steps = steps,
  };
}

bool ResidualReport::all_within_tolerances() const {
  return basis_reconstruction <= kSdpReconstructionTol &&
         decomposition <= kSdpReconstructionTol &&
         p_min_eigenvalue >= -kSdpConeTol && q_min_eigenvalue >= -kSdpConeTol &&
         trace_error <= kSdpTraceTol && objective_mismatch <= 1e-9;
}

ResidualReport verify_solution(const SdpSolution& sol, const MeasurementBasis& basis,
                               const ExpectationVector& m) {
  ResidualReport rep;
  const std::vector<ComplexMatrix> g = basis.product_operators();
  const int d = basis.dims.total();
  ComplexMatrix recon = ComplexMatrix::Zero(d, d);
  double dot = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    recon += sol.coefficients[k] * g[k];
    dot += sol.coefficients[k] * m.values[k];
  }
  rep.basis_reconstruction = max_abs(sol.witness.matrix() - recon);
  const ComplexMatrix pt_q =
      partial_transpose(sol.q_matrix.matrix(), basis.dims, Subsystem::A);
  rep.decomposition = max_abs(sol.witness.matrix() - (sol.p_matrix.matrix() + pt_q));
  rep.p_min_eigenvalue = hermitian_eigenvalues(sol.p_matrix.matrix())(0);
  rep.q_min_eigenvalue = hermitian_eigenvalues(sol.q_matrix.matrix())(0);
  rep.trace_error = std::abs(sol.witness.trace() - 1.0);
  rep.objective_mismatch = std::abs(dot - sol.optimal_value);
  return rep;
}

double detection_threshold(const SdpConfig& cfg, double duality_gap) {
  return std::max(cfg.detection_floor, 10.0 * duality_gap);
}

}  // namespace entwit
