//! Two-component beta mixture: `(1-θ₁) Beta(θ₂, θ₃) + θ₁ Beta(θ₃, θ₂)`.
//!
//! Observations above a threshold `τ` are assigned to the second component;
//! the heterogeneity of the resulting expected assignment is compared against
//! the distance-based indices computed from the exact expected distances
//! between the components.

use crate::classic::{
    functional_hill, leinster_cobbold, neqrqe, rescale_distance, similarity_from_distance,
    DistanceMatrix,
};
use crate::renyi::renyi_heterogeneity;
use crate::special::{
    beta_pdf, gen_reg_inc_beta, hyp3f2_unit_scaled, ln_beta, ln_gamma_unchecked, BetaShape,
};
use crate::{Distribution, HetError, Order, Result};

/// Below this gap the two components count as identical when placing `τ`.
const IDENTICAL_SHAPE_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaMixtureParams {
    theta1: f64,
    theta2: f64,
    theta3: f64,
}

impl BetaMixtureParams {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Result<Self> {
        if !(theta1 > 0.0 && theta1 < 1.0) {
            return Err(HetError::Domain {
                name: "theta1",
                value: theta1,
                domain: "(0, 1)",
            });
        }
        // shape validation
        BetaShape::new(theta2, theta3)?;
        Ok(Self {
            theta1,
            theta2,
            theta3,
        })
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn theta3(&self) -> f64 {
        self.theta3
    }

    /// `Beta(θ₂, θ₃)` and `Beta(θ₃, θ₂)`.
    pub fn shapes(&self) -> (BetaShape, BetaShape) {
        let first = BetaShape::new(self.theta2, self.theta3).expect("validated shape");
        (first, first.swapped())
    }

    /// Component prior `(1 - θ₁, θ₁)`.
    pub fn prior(&self) -> Distribution {
        Distribution::new(vec![1.0 - self.theta1, self.theta1]).expect("valid prior")
    }

    /// The same mixture with component labels exchanged.
    pub fn relabeled(&self) -> Self {
        Self {
            theta1: 1.0 - self.theta1,
            theta2: self.theta3,
            theta3: self.theta2,
        }
    }
}

pub fn bmm_marginal_pdf(x: f64, theta: &BetaMixtureParams) -> Result<f64> {
    let (a, b) = theta.shapes();
    Ok((1.0 - theta.theta1) * beta_pdf(x, a)? + theta.theta1 * beta_pdf(x, b)?)
}

/// Decision threshold where both component posteriors are equal. With
/// identical components it degenerates to `0` (everything to the second
/// component) if `θ₁ > 1/2` and `1` otherwise.
pub fn optimal_threshold(theta: &BetaMixtureParams) -> f64 {
    let gap = theta.theta2 - theta.theta3;
    if gap.abs() < IDENTICAL_SHAPE_GAP {
        return if theta.theta1 > 0.5 { 0.0 } else { 1.0 };
    }
    // τ = 1 / (1 + exp(e)) with e = ln((1-θ₁)/θ₁) / (θ₂ - θ₃)
    let e = ((1.0 - theta.theta1) / theta.theta1).ln() / gap;
    if e > 0.0 {
        let t = (-e).exp();
        t / (1.0 + t)
    } else {
        1.0 / (1.0 + e.exp())
    }
}

/// Expected assignment `(f̄(z=1), f̄(z=2))` when everything above `tau` goes to
/// the second component.
pub fn assignment_mass(theta: &BetaMixtureParams, tau: f64) -> Result<Distribution> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(HetError::Domain {
            name: "tau",
            value: tau,
            domain: "[0, 1]",
        });
    }
    let (a, b) = theta.shapes();
    let upper = (1.0 - theta.theta1) * gen_reg_inc_beta(tau, 1.0, a)?
        + theta.theta1 * gen_reg_inc_beta(tau, 1.0, b)?;
    let upper = upper.clamp(0.0, 1.0);
    Distribution::new(vec![1.0 - upper, upper])
}

/// Between-observation heterogeneity of the thresholded assignment. Each
/// observation is assigned with certainty, so this equals the pooled value.
pub fn bmm_between_rrh(theta: &BetaMixtureParams, tau: f64, q: Order) -> Result<f64> {
    Ok(renyi_heterogeneity(&assignment_mass(theta, tau)?, q))
}

/// Absolute error tolerated in [`beta_abs_distance`].
const DISTANCE_TOL: f64 = 1e-10;

/// `E|X - Y|` for independent `X ~ Beta(a)`, `Y ~ Beta(b)`.
///
/// Large shapes with non-integer `b.1` make the underlying series cancel
/// catastrophically; when the error bound exceeds 1e-10 the result is a
/// `Cancellation` error instead of a number.
pub fn beta_abs_distance(a: BetaShape, b: BetaShape) -> Result<f64> {
    let (a1, b1) = (a.alpha(), a.beta());
    let (a2, b2) = (b.alpha(), b.beta());
    let ln_eta = 2f64.ln()
        + ln_gamma_unchecked(a1)
        + ln_gamma_unchecked(b2)
        + ln_gamma_unchecked(a1 + a2 + 1.0)
        - ln_beta(a1, b1)
        - ln_beta(a2, b2);
    let top = a1 + a2 + b2 + 1.0;
    let phi_a = hyp3f2_unit_scaled([a1, a1 + a2 + 1.0, 1.0 - b1], [a1 + 1.0, top])?;
    let phi_b = hyp3f2_unit_scaled([a1 + 1.0, a1 + a2 + 1.0, 1.0 - b1], [a1 + 2.0, top])?;
    let (ta, tb) = (phi_a.times_exp(ln_eta), a1 * phi_b.times_exp(ln_eta));
    let shift = a.mean() - b.mean();
    let d = shift + ta - tb;
    let err = phi_a.err_times_exp(ln_eta)
        + a1 * phi_b.err_times_exp(ln_eta)
        + 4.0 * f64::EPSILON * ta.abs().max(tb.abs());
    // |E(X - Y)| <= E|X - Y| <= sqrt(E(X - Y)^2)
    let upper = (variance(a) + variance(b) + shift * shift).sqrt();
    let slack = 1e-12;
    if !(d.is_finite() && err <= DISTANCE_TOL)
        || d < shift.abs() - slack
        || d > upper + slack
    {
        return Err(HetError::Cancellation(format!(
            "E|X - Y| evaluated to {d:e} for shapes ({a1}, {b1}) and ({a2}, {b2})"
        )));
    }
    Ok(d.clamp(shift.abs(), upper))
}

fn variance(s: BetaShape) -> f64 {
    let (a, b) = (s.alpha(), s.beta());
    a * b / ((a + b) * (a + b) * (a + b + 1.0))
}

/// `2 × 2` matrix of expected distances between the two components, with
/// `E|X - X'| > 0` on the diagonal.
pub fn expected_distance_matrix(theta: &BetaMixtureParams) -> Result<DistanceMatrix> {
    let (a, b) = theta.shapes();
    let off = 0.5 * (beta_abs_distance(a, b)? + beta_abs_distance(b, a)?);
    DistanceMatrix::expected(vec![
        vec![beta_abs_distance(a, a)?, off],
        vec![off, beta_abs_distance(b, b)?],
    ])
}

/// Heterogeneity indices of one mixture, side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub theta: BetaMixtureParams,
    pub q: Order,
    pub u: f64,
    /// Between-observation heterogeneity at the optimal threshold.
    pub rrh: f64,
    pub fhn: f64,
    /// Only at `q = 2`, and absent when the distance matrix is constant.
    pub neqrqe: Option<f64>,
    pub lci: f64,
}

pub fn bmm_index_comparison(theta: &BetaMixtureParams, q: Order, u: f64) -> Result<ComparisonRow> {
    let p = theta.prior();
    let d = expected_distance_matrix(theta)?;
    let rrh = bmm_between_rrh(theta, optimal_threshold(theta), q)?;
    let fhn = functional_hill(&d, &p, q)?;
    let neqrqe = if q.value() == 2.0 {
        match rescale_distance(&d) {
            Ok(r) => Some(neqrqe(&r, &p)?),
            Err(HetError::DegenerateDistance) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let lci = leinster_cobbold(&similarity_from_distance(&d, u)?, &p, q)?;
    Ok(ComparisonRow {
        theta: *theta,
        q,
        u,
        rrh,
        fhn,
        neqrqe,
        lci,
    })
}
