//! A small dense semidefinite-programming solver.
//!
//! Solves problems in the standard block form
//!
//! ```text
//! maximize    <C, X>
//! subject to  <A_k, X> = b_k      k = 1..m
//!             X ⪰ 0
//! ```
//!
//! where `X` is block diagonal with the declared block dimensions (a block of
//! dimension one is a nonnegative scalar, so inequalities enter via slack
//! blocks). The solver is an infeasible-start primal–dual interior-point
//! method with HKM search directions and Mehrotra predictor-corrector steps.
//! A presolve pass drops linearly dependent equality constraints and rejects
//! inconsistent ones.
//!
//! Symmetric data convention: a [`Triplet`] `(block, row, col, value)` with
//! `row <= col` sets both `A[row, col]` and `A[col, row]` to `value`, so an
//! off-diagonal triplet contributes `2·value·X[row, col]` to `<A, X>`.
//!
//! Problems can be dumped to a plain-text form for cross-checking against
//! external solvers; see [`SdpProblem::to_debug_text`] for the format.

use crate::linalg::real;
use crate::{Error, Result};

/// One symmetric entry of a constraint or objective matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triplet {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl Triplet {
    pub fn new(block: usize, row: usize, col: usize, value: f64) -> Self {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        Triplet {
            block,
            row,
            col,
            value,
        }
    }
}

/// A linear equality constraint `<A, X> = rhs`.
#[derive(Debug, Clone)]
pub struct SdpConstraint {
    pub name: String,
    pub terms: Vec<Triplet>,
    pub rhs: f64,
}

/// A block-diagonal semidefinite program; see the module docs for the form.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    /// Objective matrix `C`, to be maximized.
    pub objective: Vec<Triplet>,
    pub constraints: Vec<SdpConstraint>,
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        let check = |t: &Triplet, what: &str| -> Result<()> {
            let dim = *self.block_dims.get(t.block).ok_or_else(|| {
                Error::Domain(format!("{what}: block {} does not exist", t.block))
            })?;
            if t.row > t.col || t.col >= dim {
                return Err(Error::Domain(format!(
                    "{what}: entry ({}, {}) outside block of dim {dim}",
                    t.row, t.col
                )));
            }
            if !t.value.is_finite() {
                return Err(Error::Domain(format!("{what}: non-finite coefficient")));
            }
            Ok(())
        };
        for t in &self.objective {
            check(t, "objective")?;
        }
        for c in &self.constraints {
            if !c.rhs.is_finite() {
                return Err(Error::Domain(format!(
                    "constraint {}: non-finite rhs",
                    c.name
                )));
            }
            for t in &c.terms {
                check(t, &c.name)?;
            }
        }
        Ok(())
    }

    /// Total matrix order across blocks.
    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// Plain-text dump: one `block`/`objective`/`constraint` item per line,
    /// entries as `<block> <row> <col> <value>` with the symmetric-triplet
    /// convention above.
    pub fn to_debug_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "sdp blocks {}", self.block_dims.len()).unwrap();
        for (i, d) in self.block_dims.iter().enumerate() {
            writeln!(out, "block {i} dim {d}").unwrap();
        }
        writeln!(out, "objective maximize").unwrap();
        for t in &self.objective {
            writeln!(out, "  O {} {} {} {:.17e}", t.block, t.row, t.col, t.value).unwrap();
        }
        for (k, c) in self.constraints.iter().enumerate() {
            writeln!(out, "constraint {k} \"{}\" rhs {:.17e}", c.name, c.rhs).unwrap();
            for t in &c.terms {
                writeln!(out, "  A {} {} {} {:.17e}", t.block, t.row, t.col, t.value).unwrap();
            }
        }
        out
    }
}

/// Solver output. `optimum` is the dual objective value, which upper-bounds
/// the true maximum (up to the residual tolerances), making it the safe side
/// for bounding applications; the primal value sits within `gap` of it.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub optimum: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Relative duality gap at termination.
    pub gap: f64,
    pub iterations: usize,
    /// Primal solution, one dense row-major matrix per block.
    pub blocks: Vec<Vec<f64>>,
}

const MAX_ITERATIONS: usize = 200;
const STEP_FRACTION: f64 = 0.98;

/// Solves the SDP to the requested relative duality gap.
///
/// The first attempt keeps the constraints in their sparse form. Should the
/// iteration stall — typically because nearly dependent equality rows blow
/// the dual variables up — the problem is re-solved over the presolve's
/// orthonormalized constraint rows, which is the same affine space with
/// well-scaled duals.
pub fn solve_sdp(problem: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    problem.validate()?;
    let basis = presolve(problem)?;
    let sparse: Vec<RowData> = basis
        .kept
        .iter()
        .map(|&k| RowData {
            matrix: RowMatrix::Sparse(problem.constraints[k].terms.clone()),
            rhs: problem.constraints[k].rhs,
        })
        .collect();
    let mut state = IpmState::new(problem, sparse);
    match state.run(tol) {
        Err(Error::SdpNonConvergence { .. }) => {
            let layout = SvecLayout::new(&problem.block_dims);
            let dense: Vec<RowData> = basis
                .rows
                .iter()
                .map(|(v, rhs)| RowData {
                    matrix: RowMatrix::Dense(layout.unpack_svec(&problem.block_dims, v)),
                    rhs: *rhs,
                })
                .collect();
            let mut state = IpmState::new(problem, dense);
            state.run(tol)
        }
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Presolve: drop dependent equalities, reject inconsistent ones
// ---------------------------------------------------------------------------

/// svec layout: per block, entries (i <= j) with off-diagonals scaled by √2,
/// so matrix inner products become vector dot products.
struct SvecLayout {
    offsets: Vec<usize>,
    dims: Vec<usize>,
    total: usize,
}

impl SvecLayout {
    fn new(dims: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(dims.len());
        let mut total = 0;
        for &d in dims {
            offsets.push(total);
            total += d * (d + 1) / 2;
        }
        SvecLayout {
            offsets,
            dims: dims.to_vec(),
            total,
        }
    }

    fn index(&self, block: usize, row: usize, col: usize) -> usize {
        // (row <= col) position within the upper triangle, row-major.
        let d = self.dims[block];
        self.offsets[block] + row * d - row * (row + 1) / 2 + col
    }

    fn to_svec(&self, terms: &[Triplet]) -> Vec<f64> {
        let mut v = vec![0.0; self.total];
        for t in terms {
            let scale = if t.row == t.col {
                1.0
            } else {
                std::f64::consts::SQRT_2
            };
            v[self.index(t.block, t.row, t.col)] += scale * t.value;
        }
        v
    }

    fn unpack_svec(&self, dims: &[usize], v: &[f64]) -> BlockMat {
        let mut m = BlockMat::zeros(dims);
        for (b, &d) in dims.iter().enumerate() {
            for i in 0..d {
                for j in i..d {
                    let value = v[self.index(b, i, j)];
                    if value == 0.0 {
                        continue;
                    }
                    if i == j {
                        m.blocks[b][i * d + i] = value;
                    } else {
                        let half = value / std::f64::consts::SQRT_2;
                        m.blocks[b][i * d + j] = half;
                        m.blocks[b][j * d + i] = half;
                    }
                }
            }
        }
        m
    }
}

/// Presolve output: indices of independent constraints, plus the
/// orthonormalized (row, rhs) pairs spanning the same affine space.
struct PresolveBasis {
    kept: Vec<usize>,
    rows: Vec<(Vec<f64>, f64)>,
}

fn presolve(problem: &SdpProblem) -> Result<PresolveBasis> {
    let layout = SvecLayout::new(&problem.block_dims);
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut kept = Vec::new();

    for (idx, c) in problem.constraints.iter().enumerate() {
        let mut v = layout.to_svec(&c.terms);
        let mut rhs = c.rhs;
        let original_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // Two passes of modified Gram-Schmidt keep the basis orthonormal to
        // working precision.
        for _ in 0..2 {
            for (u, beta) in &rows {
                let coef: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                if coef != 0.0 {
                    for (a, b) in v.iter_mut().zip(u) {
                        *a -= coef * b;
                    }
                    rhs -= coef * beta;
                }
            }
        }
        let res_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if res_norm <= 1e-10 * (1.0 + original_norm) {
            if rhs.abs() > 1e-8 * (1.0 + c.rhs.abs()) {
                return Err(Error::SdpInfeasible {
                    constraint: c.name.clone(),
                    residual: rhs.abs(),
                });
            }
            continue; // redundant
        }
        for a in v.iter_mut() {
            *a /= res_norm;
        }
        rows.push((v, rhs / res_norm));
        kept.push(idx);
    }
    Ok(PresolveBasis { kept, rows })
}

// ---------------------------------------------------------------------------
// Block matrices
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct BlockMat {
    dims: Vec<usize>,
    blocks: Vec<Vec<f64>>,
}

impl BlockMat {
    fn zeros(dims: &[usize]) -> Self {
        BlockMat {
            dims: dims.to_vec(),
            blocks: dims.iter().map(|&d| vec![0.0; d * d]).collect(),
        }
    }

    fn identity(dims: &[usize], scale: f64) -> Self {
        let mut m = BlockMat::zeros(dims);
        for (b, &d) in dims.iter().enumerate() {
            for i in 0..d {
                m.blocks[b][i * d + i] = scale;
            }
        }
        m
    }

    fn from_triplets(dims: &[usize], terms: &[Triplet]) -> Self {
        let mut m = BlockMat::zeros(dims);
        m.add_triplets(terms, 1.0);
        m
    }

    fn add_triplets(&mut self, terms: &[Triplet], scale: f64) {
        for t in terms {
            let d = self.dims[t.block];
            self.blocks[t.block][t.row * d + t.col] += scale * t.value;
            if t.row != t.col {
                self.blocks[t.block][t.col * d + t.row] += scale * t.value;
            }
        }
    }

    fn axpy(&mut self, alpha: f64, other: &BlockMat) {
        for (mine, theirs) in self.blocks.iter_mut().zip(&other.blocks) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += alpha * b;
            }
        }
    }

    fn scale(&mut self, alpha: f64) {
        for block in self.blocks.iter_mut() {
            for a in block.iter_mut() {
                *a *= alpha;
            }
        }
    }

    fn inner(&self, other: &BlockMat) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| real::dot(a, b))
            .sum()
    }

    fn inner_triplets(&self, terms: &[Triplet]) -> f64 {
        let mut acc = 0.0;
        for t in terms {
            let d = self.dims[t.block];
            let w = self.blocks[t.block][t.row * d + t.col]
                + if t.row != t.col {
                    self.blocks[t.block][t.col * d + t.row]
                } else {
                    0.0
                };
            acc += t.value * w;
        }
        acc
    }

    fn symmetrize(&mut self) {
        for (b, &d) in self.dims.iter().enumerate() {
            real::symmetrize(d, &mut self.blocks[b]);
        }
    }

    fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    /// Per-block `X · other · Y` for dense blocks.
    fn sandwich(&self, mid: &BlockMat, right: &BlockMat) -> BlockMat {
        let mut out = BlockMat::zeros(&self.dims);
        for (b, &d) in self.dims.iter().enumerate() {
            let tmp = real::matmul(d, &mid.blocks[b], &right.blocks[b]);
            out.blocks[b] = real::matmul(d, &self.blocks[b], &tmp);
        }
        out
    }

    /// Inverse of a symmetric positive definite block matrix.
    fn spd_inverse(&self) -> Result<BlockMat> {
        let mut out = BlockMat::zeros(&self.dims);
        for (b, &d) in self.dims.iter().enumerate() {
            let mut l = self.blocks[b].clone();
            real::cholesky(d, &mut l)?;
            let linv = real::invert_lower(d, &l);
            let linv_t = real::transpose(d, &linv);
            out.blocks[b] = real::matmul(d, &linv_t, &linv);
        }
        Ok(out)
    }

    /// Restores strict positive definiteness after roundoff: any block whose
    /// Cholesky fails is shifted by just enough identity to put its smallest
    /// eigenvalue at `floor`.
    fn ensure_pd(&mut self, floor: f64) {
        for (b, &d) in self.dims.iter().enumerate() {
            if d == 1 {
                if self.blocks[b][0] < floor {
                    self.blocks[b][0] = floor;
                }
                continue;
            }
            let mut l = self.blocks[b].clone();
            if real::cholesky(d, &mut l).is_ok() {
                continue;
            }
            let (vals, _) = real::sym_eigen(d, &self.blocks[b]);
            let shift = floor - vals[0];
            for i in 0..d {
                self.blocks[b][i * d + i] += shift;
            }
        }
    }

    /// Largest step `alpha` keeping `self + alpha * delta ⪰ 0`, assuming
    /// `self ≻ 0`. Returns `f64::INFINITY` when unbounded.
    fn max_step(&self, delta: &BlockMat) -> f64 {
        let mut best = f64::INFINITY;
        for (b, &d) in self.dims.iter().enumerate() {
            if d == 1 {
                let x = self.blocks[b][0];
                let dx = delta.blocks[b][0];
                if dx < 0.0 {
                    best = best.min(-x / dx);
                }
                continue;
            }
            let mut l = self.blocks[b].clone();
            if real::cholesky(d, &mut l).is_err() {
                // Numerically on the boundary already; take no step here.
                return 0.0;
            }
            let linv = real::invert_lower(d, &l);
            let linv_t = real::transpose(d, &linv);
            let inner = real::matmul(d, &real::matmul(d, &linv, &delta.blocks[b]), &linv_t);
            let mut sym = inner;
            real::symmetrize(d, &mut sym);
            let (vals, _) = real::sym_eigen(d, &sym);
            let lambda_min = vals[0];
            if lambda_min < 0.0 {
                best = best.min(-1.0 / lambda_min);
            }
        }
        best
    }
}

// ---------------------------------------------------------------------------
// Interior point iteration
// ---------------------------------------------------------------------------

/// One equality row as the interior-point method consumes it.
enum RowMatrix {
    Sparse(Vec<Triplet>),
    Dense(BlockMat),
}

struct RowData {
    matrix: RowMatrix,
    rhs: f64,
}

impl RowData {
    fn add_to(&self, target: &mut BlockMat, scale: f64) {
        match &self.matrix {
            RowMatrix::Sparse(terms) => target.add_triplets(terms, scale),
            RowMatrix::Dense(m) => target.axpy(scale, m),
        }
    }

    fn inner(&self, w: &BlockMat) -> f64 {
        match &self.matrix {
            RowMatrix::Sparse(terms) => w.inner_triplets(terms),
            RowMatrix::Dense(m) => m.inner(w),
        }
    }

    fn as_block_mat(&self, dims: &[usize]) -> BlockMat {
        match &self.matrix {
            RowMatrix::Sparse(terms) => BlockMat::from_triplets(dims, terms),
            RowMatrix::Dense(m) => m.clone(),
        }
    }
}

struct IpmState {
    dims: Vec<usize>,
    /// Minimization objective `C = -C_max`.
    c: BlockMat,
    constraints: Vec<RowData>,
    b: Vec<f64>,
    x: BlockMat,
    y: Vec<f64>,
    z: BlockMat,
    total_dim: f64,
}

impl IpmState {
    fn new(problem: &SdpProblem, constraints: Vec<RowData>) -> Self {
        let dims = problem.block_dims.clone();
        let mut c = BlockMat::from_triplets(&dims, &problem.objective);
        c.scale(-1.0);
        let b: Vec<f64> = constraints.iter().map(|c| c.rhs).collect();

        let b_scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let c_scale = c.max_abs();
        let tau = (10.0_f64).max(2.0 * b_scale).max(2.0 * c_scale);
        let x = BlockMat::identity(&dims, tau);
        let z = BlockMat::identity(&dims, tau);
        let y = vec![0.0; constraints.len()];
        let total_dim = problem.total_dim() as f64;

        IpmState {
            dims,
            c,
            constraints,
            b,
            x,
            y,
            z,
            total_dim,
        }
    }

    fn primal_residuals(&self) -> Vec<f64> {
        self.constraints
            .iter()
            .zip(&self.b)
            .map(|(c, &bk)| bk - c.inner(&self.x))
            .collect()
    }

    fn dual_residual(&self) -> BlockMat {
        // Rd = C - Σ y_k A_k - Z
        let mut rd = self.c.clone();
        for (c, &yk) in self.constraints.iter().zip(&self.y) {
            c.add_to(&mut rd, -yk);
        }
        rd.axpy(-1.0, &self.z);
        rd
    }

    fn run(&mut self, tol: f64) -> Result<SdpSolution> {
        let m = self.constraints.len();
        let feas_tol = tol.min(1e-8);
        let b_scale = 1.0 + self.b.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let c_scale = 1.0 + self.c.max_abs();

        for iter in 0..MAX_ITERATIONS {
            // Roundoff can push an iterate marginally off the cone once the
            // small eigenvalues approach machine precision; nudge it back so
            // factorizations and step lengths stay alive.
            self.x.ensure_pd(1e-13);
            self.z.ensure_pd(1e-13);
            let rp = self.primal_residuals();
            let rd = self.dual_residual();
            let mu = self.x.inner(&self.z) / self.total_dim;

            let pobj = self.c.inner(&self.x);
            let dobj: f64 = self.b.iter().zip(&self.y).map(|(b, y)| b * y).sum();
            let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            let pinf = rp.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())) / b_scale;
            let dinf = rd.max_abs() / c_scale;

            if pinf <= feas_tol && dinf <= feas_tol && gap <= tol {
                return Ok(self.solution(gap, iter));
            }
            if self.y.iter().any(|v| v.abs() > 1e13) || mu.is_nan() {
                return Err(Error::SdpInfeasible {
                    constraint: "positive semidefinite cone".into(),
                    residual: pinf.max(dinf),
                });
            }

            let zinv = self.z.spd_inverse()?;

            // Schur complement M_kl = Tr(A_k X A_l Z^{-1}).
            let mut schur = vec![0.0; m * m];
            let mut w_list: Vec<BlockMat> = Vec::with_capacity(m);
            for c in &self.constraints {
                let a_l = c.as_block_mat(&self.dims);
                w_list.push(self.x.sandwich(&a_l, &zinv));
            }
            for k in 0..m {
                for l in 0..m {
                    schur[k * m + l] = self.constraints[k].inner(&w_list[l]);
                }
            }
            real::symmetrize(m, &mut schur);
            // Tiny ridge keeps the factorization alive when presolve left
            // near-dependent rows.
            let ridge = 1e-13 * (1.0 + schur.iter().step_by(m + 1).fold(0.0_f64, |a, &v| a.max(v)));
            for k in 0..m {
                schur[k * m + k] += ridge;
            }
            let mut schur_chol = schur.clone();
            if real::cholesky(m, &mut schur_chol).is_err() {
                let bump =
                    1e-8 * (1.0 + schur.iter().step_by(m + 1).fold(0.0_f64, |a, &v| a.max(v)));
                schur_chol = schur.clone();
                for k in 0..m {
                    schur_chol[k * m + k] += bump;
                }
                real::cholesky(m, &mut schur_chol)
                    .map_err(|_| Error::Numerical("schur complement lost definiteness".into()))?;
            }

            let x_rd_zinv = self.x.sandwich(&rd, &zinv);
            let solve_direction = |target: &BlockMat| -> (BlockMat, Vec<f64>, BlockMat) {
                // rhs_k = rp_k - <A_k, target - X Rd Z^{-1}>
                let mut fixed = target.clone();
                fixed.axpy(-1.0, &x_rd_zinv);
                let rhs: Vec<f64> = (0..m)
                    .map(|k| rp[k] - self.constraints[k].inner(&fixed))
                    .collect();
                let mut dy = real::backward_solve(
                    m,
                    &schur_chol,
                    &real::forward_solve(m, &schur_chol, &rhs),
                );
                // One round of iterative refinement keeps the direction
                // accurate once the Schur complement turns ill-conditioned
                // near the optimum.
                let mut residual = rhs.clone();
                for k in 0..m {
                    let mut acc = 0.0;
                    for l in 0..m {
                        acc += schur[k * m + l] * dy[l];
                    }
                    residual[k] -= acc;
                }
                let correction = real::backward_solve(
                    m,
                    &schur_chol,
                    &real::forward_solve(m, &schur_chol, &residual),
                );
                for (v, c) in dy.iter_mut().zip(&correction) {
                    *v += c;
                }
                // dZ = Rd - Σ dy_k A_k
                let mut dz = rd.clone();
                for (c, &dyk) in self.constraints.iter().zip(&dy) {
                    c.add_to(&mut dz, -dyk);
                }
                // dX = target - X dZ Z^{-1}, symmetrized
                let mut dx = target.clone();
                dx.axpy(-1.0, &self.x.sandwich(&dz, &zinv));
                dx.symmetrize();
                (dx, dy, dz)
            };

            // Predictor: aim at mu = 0.
            let mut target = self.x.clone();
            target.scale(-1.0);
            let (dx_aff, _, dz_aff) = solve_direction(&target);
            let ap_aff = 1.0_f64.min(STEP_FRACTION * self.x.max_step(&dx_aff));
            let ad_aff = 1.0_f64.min(STEP_FRACTION * self.z.max_step(&dz_aff));

            let mut x_try = self.x.clone();
            x_try.axpy(ap_aff, &dx_aff);
            let mut z_try = self.z.clone();
            z_try.axpy(ad_aff, &dz_aff);
            let mu_aff = x_try.inner(&z_try) / self.total_dim;
            let mut sigma = (mu_aff / mu).powi(3).clamp(1e-10, 1.0);
            // Keep complementarity from racing ahead of feasibility: once mu
            // falls far below the residuals, the Newton directions are too
            // ill-conditioned to repair them, so floor the target at a
            // fraction of the worst residual.
            let residual_scale = rp
                .iter()
                .fold(0.0_f64, |acc, v| acc.max(v.abs()))
                .max(rd.max_abs());
            if mu > 0.0 {
                sigma = sigma.max((0.01 * residual_scale / mu).min(1.0));
            }

            // Corrector: target = sigma mu Z^{-1} - X - dX_aff dZ_aff Z^{-1}.
            let mut target = zinv.clone();
            target.scale(sigma * mu);
            target.axpy(-1.0, &self.x);
            let correction = dx_aff.sandwich(&dz_aff, &zinv);
            target.axpy(-1.0, &correction);
            target.symmetrize();
            let (dx, dy, dz) = solve_direction(&target);

            let ap = 1.0_f64.min(STEP_FRACTION * self.x.max_step(&dx));
            let ad = 1.0_f64.min(STEP_FRACTION * self.z.max_step(&dz));
            self.x.axpy(ap, &dx);
            for (yk, dyk) in self.y.iter_mut().zip(&dy) {
                *yk += ad * dyk;
            }
            self.z.axpy(ad, &dz);
        }

        let dobj: f64 = self.b.iter().zip(&self.y).map(|(b, y)| b * y).sum();
        let pobj = self.c.inner(&self.x);
        Err(Error::SdpNonConvergence {
            iterations: MAX_ITERATIONS,
            best_bound: -dobj,
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        })
    }

    fn solution(&self, gap: f64, iterations: usize) -> SdpSolution {
        let pobj = self.c.inner(&self.x);
        let dobj: f64 = self.b.iter().zip(&self.y).map(|(b, y)| b * y).sum();
        SdpSolution {
            // Signs flip back to the maximization form.
            optimum: -dobj,
            primal_objective: -pobj,
            dual_objective: -dobj,
            gap,
            iterations,
            blocks: self.x.blocks.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_problem() -> SdpProblem {
        SdpProblem {
            block_dims: vec![1],
            objective: vec![Triplet::new(0, 0, 0, 1.0)],
            constraints: vec![SdpConstraint {
                name: "fix".into(),
                terms: vec![Triplet::new(0, 0, 0, 1.0)],
                rhs: 3.0,
            }],
        }
    }

    #[test]
    fn fixed_entry_objective_returns_the_entry() {
        let solution = solve_sdp(&scalar_problem(), 1e-9).unwrap();
        assert!((solution.optimum - 3.0).abs() < 1e-7);
        assert!(solution.gap <= 1e-9);
    }

    #[test]
    fn lp_with_slacks() {
        // max x + y subject to x + s1 = 3, y + s2 = 4.
        let problem = SdpProblem {
            block_dims: vec![1, 1, 1, 1],
            objective: vec![Triplet::new(0, 0, 0, 1.0), Triplet::new(1, 0, 0, 1.0)],
            constraints: vec![
                SdpConstraint {
                    name: "x".into(),
                    terms: vec![Triplet::new(0, 0, 0, 1.0), Triplet::new(2, 0, 0, 1.0)],
                    rhs: 3.0,
                },
                SdpConstraint {
                    name: "y".into(),
                    terms: vec![Triplet::new(1, 0, 0, 1.0), Triplet::new(3, 0, 0, 1.0)],
                    rhs: 4.0,
                },
            ],
        };
        let solution = solve_sdp(&problem, 1e-8).unwrap();
        assert!((solution.optimum - 7.0).abs() < 1e-6);
    }

    #[test]
    fn trace_constrained_spectral_optimum() {
        // max <diag(1,2), X> with Tr X = 1 -> 2.
        let problem = SdpProblem {
            block_dims: vec![2],
            objective: vec![Triplet::new(0, 0, 0, 1.0), Triplet::new(0, 1, 1, 2.0)],
            constraints: vec![SdpConstraint {
                name: "trace".into(),
                terms: vec![Triplet::new(0, 0, 0, 1.0), Triplet::new(0, 1, 1, 1.0)],
                rhs: 1.0,
            }],
        };
        let solution = solve_sdp(&problem, 1e-8).unwrap();
        assert!(
            (solution.optimum - 2.0).abs() < 1e-6,
            "{}",
            solution.optimum
        );
    }

    #[test]
    fn off_diagonal_objective_is_capped_by_psd() {
        // max 2 X01 with X00 = X11 = 1; PSD forces X01 <= 1.
        let problem = SdpProblem {
            block_dims: vec![2],
            objective: vec![Triplet::new(0, 0, 1, 1.0)],
            constraints: vec![
                SdpConstraint {
                    name: "x00".into(),
                    terms: vec![Triplet::new(0, 0, 0, 1.0)],
                    rhs: 1.0,
                },
                SdpConstraint {
                    name: "x11".into(),
                    terms: vec![Triplet::new(0, 1, 1, 1.0)],
                    rhs: 1.0,
                },
            ],
        };
        let solution = solve_sdp(&problem, 1e-8).unwrap();
        assert!((solution.optimum - 2.0).abs() < 1e-6);
        // The primal solution should be close to the all-ones matrix.
        assert!((solution.blocks[0][1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn inconsistent_constraints_are_rejected() {
        let mut problem = scalar_problem();
        problem.constraints.push(SdpConstraint {
            name: "conflict".into(),
            terms: vec![Triplet::new(0, 0, 0, 1.0)],
            rhs: 4.0,
        });
        match solve_sdp(&problem, 1e-8) {
            Err(Error::SdpInfeasible {
                constraint,
                residual,
            }) => {
                assert_eq!(constraint, "conflict");
                assert!(residual > 0.5);
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn redundant_constraints_are_dropped() {
        let mut problem = scalar_problem();
        let dup = problem.constraints[0].clone();
        problem.constraints.push(dup);
        let solution = solve_sdp(&problem, 1e-8).unwrap();
        assert!((solution.optimum - 3.0).abs() < 1e-7);
    }

    #[test]
    fn debug_dump_mentions_every_constraint() {
        let text = scalar_problem().to_debug_text();
        assert!(text.contains("block 0 dim 1"));
        assert!(text.contains("constraint 0 \"fix\""));
        assert!(text.contains("objective maximize"));
    }
}
