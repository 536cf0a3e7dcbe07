//! Small dense linear algebra and least-squares primitives.
//!
//! Systems here are tiny (at most 5×5 for the σ quartic), so everything is
//! plain `Vec<f64>` row-major storage with no external BLAS.

use crate::error::{Error, Result};

/// Condition estimate above which elimination hands over to an orthogonal
/// factorization (and polynomial fits switch to normalized distances).
pub const ILL_CONDITIONED: f64 = 1e12;

/// Square system `A x = b`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystem {
    n: usize,
    matrix: Vec<f64>,
    rhs: Vec<f64>,
}

impl DenseSystem {
    pub fn new(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput(
                "system must have at least one row".into(),
            ));
        }
        if rhs.len() != n {
            return Err(Error::InvalidInput(format!(
                "rhs has {} entries for a {n}x{n} matrix",
                rhs.len()
            )));
        }
        let mut matrix = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            matrix.extend(row);
        }
        if matrix.iter().chain(rhs.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("system entries must be finite".into()));
        }
        Ok(Self { n, matrix, rhs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.n + col]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Same matrix with a different right-hand side.
    pub fn with_rhs(&self, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != self.n || rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "rhs must have {} finite entries",
                self.n
            )));
        }
        Ok(Self {
            n: self.n,
            matrix: self.matrix.clone(),
            rhs,
        })
    }

    /// `A x` for a candidate solution.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .chunks(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Infinity norm of the matrix (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.matrix
            .chunks(self.n)
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Row elimination with partial pivoting.
    Elimination,
    /// Householder QR.
    Orthogonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    /// |pivot| per elimination step, in elimination order.
    pub pivot_magnitudes: Vec<f64>,
    /// 1-norm condition number `‖A‖₁ ‖A⁻¹‖₁`, never below 1.
    pub condition_estimate: f64,
    /// Whether distances were normalized before building the system.
    pub scaled: bool,
    pub method: SolveMethod,
    /// Iterative-refinement corrections applied after the initial solve.
    pub refinement_steps: usize,
}

struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    pivots: Vec<f64>,
}

impl LuFactors {
    fn factor(sys: &DenseSystem) -> Result<Self> {
        let n = sys.n;
        let mut lu = sys.matrix.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            // Largest magnitude wins; strict comparison keeps the lowest row on ties.
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for r in k + 1..n {
                let v = lu[r * n + k].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular { column: k });
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            pivots.push(best);
            let piv = lu[k * n + k];
            for r in k + 1..n {
                let m = lu[r * n + k] / piv;
                lu[r * n + k] = m;
                if m != 0.0 {
                    for c in k + 1..n {
                        lu[r * n + c] -= m * lu[k * n + c];
                    }
                }
            }
        }
        Ok(Self {
            n,
            lu,
            perm,
            pivots,
        })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                x[r] -= self.lu[r * n + c] * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] -= self.lu[r * n + c] * x[c];
            }
            x[r] /= self.lu[r * n + r];
        }
        x
    }

    fn condition_1(&self, sys: &DenseSystem) -> f64 {
        let n = self.n;
        let norm_a = (0..n)
            .map(|c| (0..n).map(|r| sys.get(r, c).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut norm_inv: f64 = 0.0;
        let mut e = vec![0.0; n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[c] = 1.0;
            let col = self.solve(&e);
            norm_inv = norm_inv.max(col.iter().map(|v| v.abs()).sum());
        }
        let k = norm_a * norm_inv;
        if k.is_finite() {
            k.max(1.0)
        } else {
            f64::INFINITY
        }
    }
}

/// Solves a square system by elimination with partial pivoting, switching to
/// Householder QR when the 1-norm condition number exceeds [`ILL_CONDITIONED`].
pub fn solve_dense(sys: &DenseSystem) -> Result<(Vec<f64>, SolveDiagnostics)> {
    let lu = LuFactors::factor(sys)?;
    let condition_estimate = lu.condition_1(sys);
    let (x, method) = if condition_estimate > ILL_CONDITIONED {
        (solve_orthogonal(sys)?, SolveMethod::Orthogonal)
    } else {
        (lu.solve(&sys.rhs), SolveMethod::Elimination)
    };
    Ok((
        x,
        SolveDiagnostics {
            pivot_magnitudes: lu.pivots,
            condition_estimate,
            scaled: false,
            method,
            refinement_steps: 0,
        },
    ))
}

/// Solves a square system through Householder QR regardless of conditioning.
pub fn solve_orthogonal(sys: &DenseSystem) -> Result<Vec<f64>> {
    householder_least_squares(&sys.matrix, sys.n, sys.n, &sys.rhs)
}

/// Least-squares solution of an `m×n` (m ≥ n) row-major system by Householder QR.
pub fn householder_least_squares(a: &[f64], m: usize, n: usize, b: &[f64]) -> Result<Vec<f64>> {
    if m < n || a.len() != m * n || b.len() != m {
        return Err(Error::InvalidInput(format!(
            "least-squares shape mismatch: {m}x{n} matrix with {} entries, rhs {}",
            a.len(),
            b.len()
        )));
    }
    let mut r = a.to_vec();
    let mut qtb = b.to_vec();
    for k in 0..n {
        let norm = (k..m).map(|i| r[i * n + k].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Singular { column: k });
        }
        let alpha = if r[k * n + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[i * n + k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * r[i * n + c]).sum();
            let s = 2.0 * dot / vnorm2;
            for i in k..m {
                r[i * n + c] -= s * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * qtb[i]).sum();
        let s = 2.0 * dot / vnorm2;
        for i in k..m {
            qtb[i] -= s * v[i - k];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let diag = r[row * n + row];
        if diag == 0.0 {
            return Err(Error::Singular { column: row });
        }
        let tail: f64 = (row + 1..n).map(|c| r[row * n + c] * x[c]).sum();
        x[row] = (qtb[row] - tail) / diag;
    }
    Ok(x)
}

/// Straight-line least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 0 when `y` has no variance.
    pub r2: f64,
}

fn check_pairs(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "x has {} values but y has {}",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "regression inputs must be finite".into(),
        ));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn ols_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    check_pairs(x, y)?;
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            what: "points",
            needed: 2,
            got: x.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateAbscissa);
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sst: f64 = y.iter().map(|yi| (yi - my).powi(2)).sum();
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - slope * xi - intercept).powi(2))
        .sum();
    let r2 = if sst == 0.0 { 0.0 } else { 1.0 - sse / sst };
    Ok(LineFit {
        slope,
        intercept,
        r2,
    })
}

/// Pearson correlation; `None` when either column has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    check_pairs(x, y)?;
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            what: "points",
            needed: 2,
            got: x.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)))
}

pub const QUARTIC_TERMS: usize = 5;

/// Minimum number of distinct abscissae for a quartic fit with at least one
/// residual degree of freedom.
pub const QUARTIC_MIN_POINTS: usize = QUARTIC_TERMS + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct QuarticFit {
    /// `[a, b, c, e, f]` for `a d^4 + b d^3 + c d^2 + e d + f`.
    pub coeffs: [f64; 5],
    pub diagnostics: SolveDiagnostics,
}

/// Moment (normal-equations) system for a polynomial of the given degree.
///
/// Row `k` is `Σ d^(2·deg−k−j)` over columns `j`, with right-hand side
/// `Σ y d^(deg−k)`; unknowns are ordered highest power first.
pub fn moment_system(d: &[f64], y: &[f64], degree: usize) -> Result<DenseSystem> {
    check_pairs(d, y)?;
    let terms = degree + 1;
    let mut power_sums = vec![0.0; 2 * degree + 1];
    let mut rhs = vec![0.0; terms];
    for (&di, &yi) in d.iter().zip(y) {
        let mut p = 1.0;
        for (k, s) in power_sums.iter_mut().enumerate() {
            *s += p;
            if k < terms {
                rhs[degree - k] += yi * p;
            }
            p *= di;
        }
    }
    let rows = (0..terms)
        .map(|r| (0..terms).map(|c| power_sums[2 * degree - r - c]).collect())
        .collect();
    DenseSystem::new(rows, rhs)
}

fn distinct_count(d: &[f64]) -> usize {
    let mut v = d.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Least-squares quartic through `(d, y)` by explicitly assembling and solving
/// the 5×5 normal equations from raw powers of `d`.
///
/// Distances are divided by `max |d|` only if the raw moment matrix is too
/// ill-conditioned to trust; the coefficients are mapped back before return
/// and `diagnostics.scaled` records the switch. A few steps of iterative
/// refinement against the raw-distance residual follow either path.
pub fn polyfit_quartic(d: &[f64], y: &[f64]) -> Result<QuarticFit> {
    check_pairs(d, y)?;
    let distinct = distinct_count(d);
    if distinct < QUARTIC_MIN_POINTS {
        return Err(Error::InsufficientData {
            what: "distinct distances",
            needed: QUARTIC_MIN_POINTS,
            got: distinct,
        });
    }
    let raw = moment_system(d, y, 4)?;
    let (x, raw_diag) = solve_dense(&raw)?;
    let (scale, system, mut diagnostics, mut coeffs) =
        if raw_diag.condition_estimate <= ILL_CONDITIONED {
            (1.0, raw, raw_diag, [x[0], x[1], x[2], x[3], x[4]])
        } else {
            let scale = d.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let u: Vec<f64> = d.iter().map(|v| v / scale).collect();
            let scaled = moment_system(&u, y, 4)?;
            let (xs, mut diag) = solve_dense(&scaled)?;
            diag.scaled = true;
            let mut coeffs = [0.0; 5];
            for (i, c) in coeffs.iter_mut().enumerate() {
                *c = xs[i] / scale.powi((4 - i) as i32);
            }
            (scale, scaled, diag, coeffs)
        };

    // Iterative refinement: the stationarity sums are the normal-equation
    // residual b − Mx, accumulated directly from the data.
    let mut worst = max_abs(&stationarity_sums(d, y, &coeffs));
    for _ in 0..MAX_REFINEMENT_STEPS {
        if worst == 0.0 {
            break;
        }
        let g = stationarity_sums(d, y, &coeffs);
        let rhs = (0..5).map(|k| g[k] / scale.powi((4 - k) as i32)).collect();
        let (delta, _) = solve_dense(&system.with_rhs(rhs)?)?;
        let mut candidate = coeffs;
        for (k, c) in candidate.iter_mut().enumerate() {
            *c += delta[k] / scale.powi((4 - k) as i32);
        }
        let next = max_abs(&stationarity_sums(d, y, &candidate));
        if next >= worst {
            break;
        }
        coeffs = candidate;
        worst = next;
        diagnostics.refinement_steps += 1;
    }
    Ok(QuarticFit {
        coeffs,
        diagnostics,
    })
}

const MAX_REFINEMENT_STEPS: usize = 3;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Least-squares quartic computed by Householder QR on the design matrix,
/// never forming the normal equations.
pub fn polyfit_quartic_orthogonal(d: &[f64], y: &[f64]) -> Result<[f64; 5]> {
    check_pairs(d, y)?;
    let distinct = distinct_count(d);
    if distinct < QUARTIC_MIN_POINTS {
        return Err(Error::InsufficientData {
            what: "distinct distances",
            needed: QUARTIC_MIN_POINTS,
            got: distinct,
        });
    }
    let design: Vec<f64> = d
        .iter()
        .flat_map(|&di| [di.powi(4), di.powi(3), di.powi(2), di, 1.0])
        .collect();
    let x = householder_least_squares(&design, d.len(), 5, y)?;
    Ok([x[0], x[1], x[2], x[3], x[4]])
}

/// The five first-order optimality sums `Σ rᵢ dᵢᵏ` for k = 4, 3, 2, 1, 0,
/// with `rᵢ = yᵢ − p(dᵢ)`. All vanish at the least-squares quartic.
pub fn stationarity_sums(d: &[f64], y: &[f64], coeffs: &[f64; 5]) -> [f64; 5] {
    let mut sums = [0.0; 5];
    for (&di, &yi) in d.iter().zip(y) {
        let fitted = coeffs.iter().fold(0.0, |acc, &c| acc * di + c);
        let r = yi - fitted;
        for (k, s) in sums.iter_mut().enumerate() {
            *s += r * di.powi(4 - k as i32);
        }
    }
    sums
}
