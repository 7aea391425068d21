//! Per-factoid negative-sampling objective and its SGD step.
//!
//! For a factoid with subject `u_i`, input vector `x` (an object embedding
//! or the followee's user embedding) and negatives `u_1..u_K`:
//!
//! ```text
//! f = ln s(v_i . phi(x)) + sum_k ln s(-v_k . phi(x)),   phi(x) = W x + b
//! df/dv_i = s(-v_i . phi) phi
//! df/dv_k = -s(v_k . phi) phi
//! df/dphi = s(-v_i . phi) v_i - sum_k s(v_k . phi) v_k
//! df/dx   = W^T df/dphi,   df/dW = df/dphi x^T,   df/db = df/dphi
//! ```

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, log_sigmoid, sigmoid};
use crate::model::NodeId;

use super::projection::{ProjectionGrad, ProjectionParams};

/// Objective of one factoid given its negatives' vectors.
pub fn score_user_object(
    subject: &[f64],
    params: &ProjectionParams,
    input: &[f64],
    negatives: &[&[f64]],
) -> Result<f64> {
    let phi = params.project(input)?;
    let check = |v: &[f64]| {
        if v.len() == phi.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: phi.len(),
                found: v.len(),
            })
        }
    };
    check(subject)?;
    let mut f = log_sigmoid(dot(subject, &phi));
    for neg in negatives {
        check(neg)?;
        f += log_sigmoid(-dot(neg, &phi));
    }
    Ok(f)
}

/// Reusable buffers holding the objective and gradient pieces of one factoid.
#[derive(Clone, Debug)]
pub struct FactoidGradient {
    pub objective: f64,
    pub phi: Vec<f64>,
    /// `s(-v_i . phi)`; the subject's gradient is this times `phi`.
    pub subject_coef: f64,
    /// `-s(v_k . phi)`; negative `k`'s gradient is this times `phi`.
    pub negative_coefs: Vec<f64>,
    pub phi_grad: Vec<f64>,
    /// `W^T df/dphi`, filled only when requested.
    pub input_grad: Vec<f64>,
}

impl FactoidGradient {
    pub fn new(params: &ProjectionParams) -> Self {
        FactoidGradient {
            objective: 0.0,
            phi: vec![0.0; params.rows()],
            subject_coef: 0.0,
            negative_coefs: Vec::new(),
            phi_grad: vec![0.0; params.rows()],
            input_grad: vec![0.0; params.cols()],
        }
    }

    fn fit(&mut self, params: &ProjectionParams) {
        self.phi.resize(params.rows(), 0.0);
        self.phi_grad.resize(params.rows(), 0.0);
        self.input_grad.resize(params.cols(), 0.0);
    }

    /// Evaluates the objective and all gradient pieces at the current values.
    pub fn compute(
        &mut self,
        users: &EmbeddingTable,
        subject: NodeId,
        negatives: &[NodeId],
        input: &[f64],
        params: &ProjectionParams,
        with_input_grad: bool,
    ) -> Result<()> {
        if input.len() != params.cols() {
            return Err(Error::DimensionMismatch {
                expected: params.cols(),
                found: input.len(),
            });
        }
        if users.dim() != params.rows() {
            return Err(Error::DimensionMismatch {
                expected: params.rows(),
                found: users.dim(),
            });
        }
        self.fit(params);
        params.project_into(input, &mut self.phi);

        let vi = users.row(subject.0);
        let si = dot(vi, &self.phi);
        self.objective = log_sigmoid(si);
        self.subject_coef = sigmoid(-si);
        self.phi_grad.iter_mut().zip(vi).for_each(|(g, v)| *g = self.subject_coef * v);

        self.negative_coefs.clear();
        for &k in negatives {
            let vk = users.row(k.0);
            let sk = dot(vk, &self.phi);
            self.objective += log_sigmoid(-sk);
            let c = -sigmoid(sk);
            self.negative_coefs.push(c);
            axpy(c, vk, &mut self.phi_grad);
        }
        if with_input_grad {
            params.transpose_mul_into(&self.phi_grad, &mut self.input_grad);
        }
        if !self.objective.is_finite() || self.phi_grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Divergence {
                stage: "train".into(),
                detail: format!("non-finite objective {} for {:?}", self.objective, params.predicate),
            });
        }
        Ok(())
    }

    fn apply_user_rows(&self, users: &mut EmbeddingTable, subject: NodeId, negatives: &[NodeId], lr: f64) {
        axpy(lr * self.subject_coef, &self.phi, users.row_mut(subject.0));
        for (&k, &c) in negatives.iter().zip(&self.negative_coefs) {
            axpy(lr * c, &self.phi, users.row_mut(k.0));
        }
    }
}

fn check_rows(users: &EmbeddingTable, rows: &[NodeId]) -> Result<()> {
    if rows.iter().all(|r| users.row(r.0).iter().all(|x| x.is_finite())) {
        Ok(())
    } else {
        Err(Error::Divergence {
            stage: "train".into(),
            detail: "non-finite user embedding after update".into(),
        })
    }
}

/// Gradient-ascent step on a user-object factoid. Object embeddings are
/// frozen; when `acc` is given the projection gradient is accumulated into
/// it. Returns the factoid objective before the update.
#[allow(clippy::too_many_arguments)]
pub fn sgd_step_user_object(
    users: &mut EmbeddingTable,
    subject: NodeId,
    object: &[f64],
    negatives: &[NodeId],
    params: &ProjectionParams,
    lr: f64,
    grad: &mut FactoidGradient,
    acc: Option<&mut ProjectionGrad>,
) -> Result<f64> {
    grad.compute(users, subject, negatives, object, params, false)?;
    if let Some(acc) = acc {
        acc.accumulate(&grad.phi_grad, object);
    }
    grad.apply_user_rows(users, subject, negatives, lr);
    check_rows(users, &[subject])?;
    Ok(grad.objective)
}

/// Gradient-ascent step on a follow factoid `subject -> followee`. The
/// followee's embedding is the projection input; with `update_followee` it
/// also receives its chain-rule gradient through `W`.
#[allow(clippy::too_many_arguments)]
pub fn sgd_step_user_user(
    users: &mut EmbeddingTable,
    subject: NodeId,
    followee: NodeId,
    negatives: &[NodeId],
    params: &ProjectionParams,
    lr: f64,
    grad: &mut FactoidGradient,
    acc: Option<&mut ProjectionGrad>,
    update_followee: bool,
) -> Result<f64> {
    grad.compute(users, subject, negatives, users.row(followee.0), params, update_followee)?;
    if let Some(acc) = acc {
        acc.accumulate(&grad.phi_grad, users.row(followee.0));
    }
    grad.apply_user_rows(users, subject, negatives, lr);
    if update_followee {
        axpy(lr, &grad.input_grad, users.row_mut(followee.0));
    }
    check_rows(users, &[subject, followee])?;
    Ok(grad.objective)
}
