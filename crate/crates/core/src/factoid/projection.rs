use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::axpy;
use crate::model::Predicate;

/// `phi(v) = W v + b` mapping an input space of `cols` dimensions into the
/// `rows`-dimensional user space, with the Frobenius norm of `W` capped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionParams {
    pub predicate: Predicate,
    rows: usize,
    cols: usize,
    /// Row-major `rows x cols`.
    w: Vec<f64>,
    b: Vec<f64>,
    norm_cap: f64,
}

impl ProjectionParams {
    /// Identity padded or truncated to `rows x cols`, scaled to Frobenius
    /// norm `min(cap, sqrt(min(rows, cols)))`, with zero offset.
    pub fn identity(predicate: Predicate, rows: usize, cols: usize, norm_cap: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Config("projection dimensions must be positive".into()));
        }
        if !(norm_cap > 0.0) {
            return Err(Error::Config("projection norm cap must be positive".into()));
        }
        let mut w = vec![0.0; rows * cols];
        for d in 0..rows.min(cols) {
            w[d * cols + d] = 1.0;
        }
        let mut p = ProjectionParams {
            predicate,
            rows,
            cols,
            w,
            b: vec![0.0; rows],
            norm_cap,
        };
        p.enforce_cap();
        Ok(p)
    }

    pub fn from_parts(
        predicate: Predicate,
        rows: usize,
        cols: usize,
        w: Vec<f64>,
        b: Vec<f64>,
        norm_cap: f64,
    ) -> Result<Self> {
        if w.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: w.len(),
            });
        }
        if b.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: b.len(),
            });
        }
        let mut p = ProjectionParams {
            predicate,
            rows,
            cols,
            w,
            b,
            norm_cap,
        };
        p.enforce_cap();
        Ok(p)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn offset(&self) -> &[f64] {
        &self.b
    }

    pub fn norm_cap(&self) -> f64 {
        self.norm_cap
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.w.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = vec![0.0; self.rows];
        self.project_into(v, &mut out);
        Ok(out)
    }

    /// `out = W v + b`; lengths are the caller's responsibility.
    #[inline]
    pub fn project_into(&self, v: &[f64], out: &mut [f64]) {
        for ((o, row), bias) in out.iter_mut().zip(self.w.chunks_exact(self.cols)).zip(&self.b) {
            *o = crate::linalg::dot(row, v) + bias;
        }
    }

    /// `out = W^T g`
    #[inline]
    pub fn transpose_mul_into(&self, g: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (row, &gr) in self.w.chunks_exact(self.cols).zip(g) {
            axpy(gr, row, out);
        }
    }

    /// Rescales `W` onto the norm ball when it lies outside.
    pub fn enforce_cap(&mut self) {
        let norm = self.frobenius_norm();
        if norm > self.norm_cap {
            let scale = self.norm_cap / norm;
            self.w.iter_mut().for_each(|x| *x *= scale);
        }
    }

    /// Gradient-ascent step with the batch-mean gradient, then the norm cap.
    pub fn apply_gradient(&mut self, grad: &ProjectionGrad, lr: f64) {
        if grad.count == 0 {
            return;
        }
        let step = lr / grad.count as f64;
        axpy(step, &grad.w, &mut self.w);
        axpy(step, &grad.b, &mut self.b);
        self.enforce_cap();
    }
}

/// Accumulated `d f / d W` and `d f / d b` over a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionGrad {
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub count: usize,
}

impl ProjectionGrad {
    pub fn zeros_like(p: &ProjectionParams) -> Self {
        ProjectionGrad {
            w: vec![0.0; p.w.len()],
            b: vec![0.0; p.b.len()],
            count: 0,
        }
    }

    pub fn clear(&mut self) {
        self.w.iter_mut().for_each(|x| *x = 0.0);
        self.b.iter_mut().for_each(|x| *x = 0.0);
        self.count = 0;
    }

    /// Adds `phi_grad (x) input` to `w` and `phi_grad` to `b`.
    #[inline]
    pub fn accumulate(&mut self, phi_grad: &[f64], input: &[f64]) {
        let cols = input.len();
        for (row, &g) in self.w.chunks_exact_mut(cols).zip(phi_grad) {
            axpy(g, input, row);
        }
        axpy(1.0, phi_grad, &mut self.b);
        self.count += 1;
    }
}
