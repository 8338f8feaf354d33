//! Dense linear algebra on the active design.
//!
//! The path solver never forms matrices; this module does, deliberately, as
//! an independent route to the same quantities. An incremental Gram-Schmidt
//! QR over the active columns yields the equiangular vector and the test
//! direction for each step, which tests and experiments compare against the
//! closed-form segment arithmetic.

use crate::error::{Error, Result};
use crate::path::reparam::design_column;

const DEGENERATE_DENOM: f64 = 1e-12;

/// Test direction for one step: the residualized, rescaled design column of
/// the entering cut.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionVector {
    /// Dense coefficients; `eta . y` is the knot statistic.
    pub eta: Vec<f64>,
    /// Signed rescaling `sign - h` where `h` is the equiangular load at the
    /// cut. Its magnitude matches the solver's entry denominator.
    pub denominator: f64,
    /// Euclidean norm of `eta`; the statistic's standard deviation is
    /// `sigma * norm`.
    pub norm: f64,
}

/// Incrementally orthogonalized active design.
///
/// Columns are pushed in activation order. Modified Gram-Schmidt with a
/// second reorthogonalization pass keeps `Q` orthonormal to near machine
/// precision for the problem sizes the crate caps dense work at.
#[derive(Debug, Clone)]
pub struct ActiveDesign {
    n: usize,
    cuts: Vec<usize>,
    signs: Vec<f64>,
    q: Vec<Vec<f64>>,
    /// Upper-triangular factor, stored by column; `r[j]` has `j + 1` entries.
    r: Vec<Vec<f64>>,
}

impl ActiveDesign {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 samples, got {n}")));
        }
        Ok(Self { n, cuts: Vec::new(), signs: Vec::new(), q: Vec::new(), r: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    /// Append the column for `cut` with jump sign `sign`.
    pub fn push(&mut self, cut: usize, sign: i8) -> Result<()> {
        if cut == 0 || cut >= self.n {
            return Err(Error::IndexOutOfRange { j: cut, max: self.n - 1 });
        }
        if self.cuts.contains(&cut) {
            return Err(Error::InvalidActiveSet(format!("cut {cut} already active")));
        }
        let mut col = design_column(self.n, cut);
        let orig_norm = norm(&col);
        let mut coeffs = vec![0.0; self.q.len()];
        for _pass in 0..2 {
            for (i, qi) in self.q.iter().enumerate() {
                let c = dot(qi, &col);
                coeffs[i] += c;
                for (v, &qv) in col.iter_mut().zip(qi) {
                    *v -= c * qv;
                }
            }
        }
        let nrm = norm(&col);
        if nrm <= 1e-10 * orig_norm {
            return Err(Error::SingularDesign(format!(
                "column for cut {cut} is numerically dependent on the active set"
            )));
        }
        for v in &mut col {
            *v /= nrm;
        }
        coeffs.push(nrm);
        self.q.push(col);
        self.r.push(coeffs);
        self.cuts.push(cut);
        self.signs.push(f64::from(sign));
        Ok(())
    }

    /// Project `x` onto the orthogonal complement of the active columns.
    pub fn project_out(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut out = x.to_vec();
        for _pass in 0..2 {
            for qi in &self.q {
                let c = dot(qi, &out);
                for (v, &qv) in out.iter_mut().zip(qi) {
                    *v -= c * qv;
                }
            }
        }
        out
    }

    /// Equiangular vector `X_A G^{-1} s_A`, the direction the fit moves in as
    /// the penalty decreases on a fixed active set.
    pub fn equiangular(&self) -> Vec<f64> {
        // X_A = Q R  =>  X_A G^{-1} s = Q R^{-T} s
        let k = self.len();
        let mut w = self.signs.clone();
        // forward-substitute R^T w' = s (R^T is lower triangular with
        // R^T[i][j] = r[i][j] for j <= i)
        for i in 0..k {
            let mut acc = w[i];
            for j in 0..i {
                acc -= self.r[i][j] * w[j];
            }
            w[i] = acc / self.r[i][i];
        }
        let mut v = vec![0.0; self.n];
        for (qi, &wi) in self.q.iter().zip(&w) {
            for (out, &qv) in v.iter_mut().zip(qi) {
                *out += wi * qv;
            }
        }
        v
    }

    /// Test direction for `cut` entering with `sign` on top of the current
    /// active set: `(I - P_A) x_cut / (sign - h)`.
    pub fn direction(&self, cut: usize, sign: i8) -> Result<DirectionVector> {
        if cut == 0 || cut >= self.n {
            return Err(Error::IndexOutOfRange { j: cut, max: self.n - 1 });
        }
        if self.cuts.contains(&cut) {
            return Err(Error::InvalidActiveSet(format!("cut {cut} is already active")));
        }
        let xj = design_column(self.n, cut);
        let w = self.project_out(&xj);
        let h = if self.is_empty() { 0.0 } else { dot(&xj, &self.equiangular()) };
        let denominator = f64::from(sign) - h;
        if denominator.abs() <= DEGENERATE_DENOM {
            return Err(Error::DegenerateDirection { j: cut, denom: denominator });
        }
        let eta: Vec<f64> = w.iter().map(|v| v / denominator).collect();
        let nrm = norm(&eta);
        Ok(DirectionVector { eta, denominator, norm: nrm })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    crate::stats::compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
