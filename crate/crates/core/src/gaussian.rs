//! Rényi heterogeneity of Gaussian latent representations: the closed form for
//! one Gaussian, the within-observation heterogeneity of an ensemble, the
//! moment-matched pool and a brute-force model-average integral for small
//! dimensions.

use crate::decomposition::validate_weights;
use crate::linalg::{cholesky, forward_substitute, ln_det_from_factor, PIVOT_FLOOR};
use crate::renyi::log_sum_exp;
use crate::{HetError, Order, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-12;
const LN_2PI: f64 = 1.837_877_066_409_345_3;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Diagonal(Vec<f64>),
    /// Row-major matrix and its Cholesky factor.
    Full { n: usize, data: Vec<f64>, factor: Vec<f64> },
}

/// A symmetric positive-definite covariance matrix, optionally stored as its
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    repr: Repr,
    ln_det: f64,
}

impl Covariance {
    pub fn diagonal(variances: Vec<f64>) -> Result<Self> {
        if variances.is_empty() {
            return Err(HetError::InvalidParameter("empty covariance".into()));
        }
        if let Some((row, &v)) = variances
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= PIVOT_FLOOR && v.is_finite()))
        {
            return Err(HetError::NotPositiveDefinite { row, pivot: v });
        }
        let ln_det = variances.iter().map(|v| v.ln()).sum();
        Ok(Self {
            repr: Repr::Diagonal(variances),
            ln_det,
        })
    }

    /// Diagonal covariance `diag(exp(s))` from log-variances.
    pub fn from_log_variances(s: &[f64]) -> Result<Self> {
        Self::diagonal(s.iter().map(|x| x.exp()).collect())
    }

    pub fn full(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(HetError::InvalidParameter("empty covariance".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(HetError::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| !x.is_finite()) {
            return Err(HetError::InvalidParameter(
                "covariance entries must be finite".into(),
            ));
        }
        for i in 0..n {
            for j in i + 1..n {
                if (data[i * n + j] - data[j * n + i]).abs() > SYMMETRY_TOLERANCE {
                    return Err(HetError::InvalidParameter(format!(
                        "covariance not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Self::from_symmetric(n, data)
            .map_err(|(row, pivot)| HetError::NotPositiveDefinite { row, pivot })
    }

    fn from_symmetric(n: usize, data: Vec<f64>) -> std::result::Result<Self, (usize, f64)> {
        let factor = cholesky(&data, n)?;
        let ln_det = ln_det_from_factor(&factor, n);
        Ok(Self {
            repr: Repr::Full { n, data, factor },
            ln_det,
        })
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Diagonal(v) => v.len(),
            Repr::Full { n, .. } => *n,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.repr, Repr::Diagonal(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Diagonal(v) => {
                if i == j {
                    v[i]
                } else {
                    0.0
                }
            }
            Repr::Full { n, data, .. } => data[i * n + j],
        }
    }

    /// Natural log of the determinant.
    pub fn ln_det(&self) -> f64 {
        self.ln_det
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Squared Mahalanobis norm `xᵀ Σ⁻¹ x`.
    fn mahalanobis2(&self, x: &mut [f64]) -> f64 {
        match &self.repr {
            Repr::Diagonal(v) => x.iter().zip(v).map(|(a, s)| a * a / s).sum(),
            Repr::Full { n, factor, .. } => {
                forward_substitute(factor, *n, x);
                x.iter().map(|a| a * a).sum()
            }
        }
    }
}

/// One Gaussian `N(μ, Σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    mean: Vec<f64>,
    cov: Covariance,
}

impl GaussianComponent {
    pub fn new(mean: Vec<f64>, cov: Covariance) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(HetError::DimensionMismatch {
                expected: cov.dim(),
                found: mean.len(),
            });
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(HetError::InvalidParameter("mean must be finite".into()));
        }
        Ok(Self { mean, cov })
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &Covariance {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn ln_pdf(&self, z: &[f64]) -> f64 {
        let mut x: Vec<f64> = z.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        let m2 = self.cov.mahalanobis2(&mut x);
        -0.5 * (self.dim() as f64 * LN_2PI + self.cov.ln_det + m2)
    }
}

/// Weighted set of Gaussians sharing a dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianEnsemble {
    components: Vec<GaussianComponent>,
    weights: Vec<f64>,
}

impl GaussianEnsemble {
    pub fn new(components: Vec<GaussianComponent>, weights: Vec<f64>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| HetError::InvalidParameter("empty ensemble".into()))?;
        let n = first.dim();
        if let Some(c) = components.iter().find(|c| c.dim() != n) {
            return Err(HetError::DimensionMismatch {
                expected: n,
                found: c.dim(),
            });
        }
        validate_weights(&weights, components.len())?;
        Ok(Self {
            components,
            weights,
        })
    }

    pub fn with_uniform_weights(components: Vec<GaussianComponent>) -> Result<Self> {
        let n = components.len();
        Self::new(components, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    fn weighted(&self) -> impl Iterator<Item = (&GaussianComponent, f64)> + Clone {
        self.components.iter().zip(self.weights.iter().copied())
    }
}

fn reject_zero(q: Order) -> Result<()> {
    if q == Order::Zero {
        return Err(HetError::UndefinedOrder(
            "0 (Gaussian support is unbounded)".into(),
        ));
    }
    Ok(())
}

/// `ln Π_q` of a Gaussian with covariance `cov`.
pub fn ln_gaussian_renyi(cov: &Covariance, q: Order) -> Result<f64> {
    reject_zero(q)?;
    let n = cov.dim() as f64;
    let order_term = match q {
        Order::One => n / 2.0,
        Order::Infinity => 0.0,
        _ => {
            let qv = q.value();
            n * qv.ln() / (2.0 * (qv - 1.0))
        }
    };
    Ok(n / 2.0 * LN_2PI + 0.5 * cov.ln_det + order_term)
}

/// Effective volume of a Gaussian: `(2π)^{n/2} q^{n/(2(q-1))} |Σ|^{1/2}`,
/// with `e^{n/2}` replacing the `q` factor at `q = 1` and `1` at `q = ∞`.
pub fn gaussian_renyi(cov: &Covariance, q: Order) -> Result<f64> {
    ln_gaussian_renyi(cov, q).map(f64::exp)
}

/// `ln` of [`gaussian_within`]; `-∞` at `q = ∞`.
pub fn ln_gaussian_within(e: &GaussianEnsemble, q: Order) -> Result<f64> {
    reject_zero(q)?;
    let n = e.dim() as f64;
    match q {
        Order::Infinity => Ok(f64::NEG_INFINITY),
        Order::One => {
            let mean_ln_det: f64 = e
                .weighted()
                .filter(|&(_, w)| w > 0.0)
                .map(|(c, w)| w * c.cov.ln_det)
                .sum();
            Ok(0.5 * (n + n * LN_2PI + mean_ln_det))
        }
        _ => {
            let qv = q.value();
            let live = e.weighted().filter(|&(_, w)| w > 0.0);
            let ln_norm = log_sum_exp(live.clone().map(move |(_, w)| qv * w.ln()));
            let ln_mix = log_sum_exp(
                live.map(move |(c, w)| qv * w.ln() + 0.5 * (1.0 - qv) * c.cov.ln_det),
            ) - ln_norm;
            Ok(n / 2.0 * LN_2PI + (ln_mix - n / 2.0 * qv.ln()) / (1.0 - qv))
        }
    }
}

/// Within-observation heterogeneity of a Gaussian ensemble. Zero at `q = ∞`.
pub fn gaussian_within(e: &GaussianEnsemble, q: Order) -> Result<f64> {
    ln_gaussian_within(e, q).map(f64::exp)
}

/// Moment-matched Gaussian of the mixture `Σ w_i N(μ_i, Σ_i)`.
pub fn gaussian_pool(e: &GaussianEnsemble) -> Result<GaussianComponent> {
    let n = e.dim();
    let mut mean = vec![0.0; n];
    for (c, w) in e.weighted() {
        for (acc, m) in mean.iter_mut().zip(&c.mean) {
            *acc += w * m;
        }
    }
    let mut data = vec![0.0; n * n];
    let mut delta = vec![0.0; n];
    for (c, w) in e.weighted().filter(|&(_, w)| w > 0.0) {
        for (d, (m, mu)) in delta.iter_mut().zip(c.mean.iter().zip(&mean)) {
            *d = m - mu;
        }
        for i in 0..n {
            for j in i..n {
                data[i * n + j] += w * (c.cov.get(i, j) + delta[i] * delta[j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            data[i * n + j] = data[j * n + i];
        }
    }
    let cov = Covariance::from_symmetric(n, data)
        .map_err(|(row, pivot)| HetError::DegeneratePool { row, pivot })?;
    Ok(GaussianComponent { mean, cov })
}

/// Effective number of distinct observations: pooled over within.
pub fn gaussian_between(e: &GaussianEnsemble, q: Order) -> Result<f64> {
    if matches!(q, Order::Zero | Order::Infinity) {
        return Err(HetError::UndefinedOrder(format!(
            "{q} (between-observation ratio needs 0 < q < inf)"
        )));
    }
    let pool = gaussian_pool(e)?;
    Ok((ln_gaussian_renyi(&pool.cov, q)? - ln_gaussian_within(e, q)?).exp())
}

/// Tensor-product trapezoid grid for [`model_average_pooled_numeric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points_per_axis: usize,
    /// Half-width of each axis in pooled standard deviations.
    pub half_width_sd: f64,
}

impl GridSpec {
    pub fn for_dim(n: usize) -> Self {
        let points_per_axis = match n {
            1 => 4001,
            2 => 401,
            _ => 81,
        };
        Self {
            points_per_axis,
            half_width_sd: 8.0,
        }
    }
}

/// Budget of component density evaluations for [`model_average_pooled_numeric`].
pub const MAX_GRID_EVALUATIONS: f64 = 2e9;

/// Lower bound on the standard deviation along any direction:
/// `λ_min >= det / trace^(n-1)`.
fn min_sd_bound(cov: &Covariance) -> f64 {
    let n = cov.dim();
    if n == 1 {
        return cov.get(0, 0).sqrt();
    }
    let trace: f64 = (0..n).map(|k| cov.get(k, k)).sum();
    (cov.ln_det() - (n - 1) as f64 * trace.ln()).exp().sqrt()
}

/// Heterogeneity of the mixture density `Σ w_i N(μ_i, Σ_i)` itself, by
/// quadrature on a grid centred on the pooled mean.
///
/// The grid is refined past `grid.points_per_axis` when its spacing would
/// exceed the narrowest component's standard deviation. If the refined grid
/// costs more than [`MAX_GRID_EVALUATIONS`] density evaluations the result is
/// a `GridResolution` error.
pub fn model_average_pooled_numeric(
    e: &GaussianEnsemble,
    q: Order,
    grid: GridSpec,
) -> Result<f64> {
    reject_zero(q)?;
    let n = e.dim();
    if n > 3 {
        return Err(HetError::UnsupportedDimension(n));
    }
    if grid.points_per_axis < 3 || !(grid.half_width_sd > 0.0) {
        return Err(HetError::InvalidParameter(
            "grid needs at least 3 points per axis and a positive width".into(),
        ));
    }
    let pool = gaussian_pool(e)?;
    let live: Vec<(&GaussianComponent, f64)> = e.weighted().filter(|&(_, w)| w > 0.0).collect();
    let halves: Vec<f64> = (0..n)
        .map(|k| grid.half_width_sd * pool.cov.get(k, k).sqrt())
        .collect();
    // refine until the spacing is below the narrowest component's spread
    let narrowest = live
        .iter()
        .map(|(c, _)| min_sd_bound(&c.cov))
        .fold(f64::INFINITY, f64::min);
    let widest = halves.iter().cloned().fold(0.0, f64::max);
    let needed = (2.0 * widest / narrowest).ceil() + 1.0;
    let m = if needed > grid.points_per_axis as f64 {
        let evaluations = needed.powi(n as i32) * live.len() as f64;
        if evaluations > MAX_GRID_EVALUATIONS {
            return Err(HetError::GridResolution {
                needed: evaluations,
                limit: MAX_GRID_EVALUATIONS,
            });
        }
        needed as usize
    } else {
        grid.points_per_axis
    };
    let axes: Vec<(f64, f64)> = (0..n)
        .map(|k| (pool.mean[k] - halves[k], 2.0 * halves[k] / (m - 1) as f64))
        .collect();
    let cell: f64 = axes.iter().map(|&(_, h)| h).product();

    let mut z = vec![0.0; n];
    let mut index = vec![0usize; n];
    let mut power_sum = 0.0;
    let mut entropy = 0.0;
    let mut peak = 0.0f64;
    for _ in 0..m.pow(n as u32) {
        for k in 0..n {
            z[k] = axes[k].0 + axes[k].1 * index[k] as f64;
        }
        let trap: f64 = index
            .iter()
            .map(|&i| if i == 0 || i == m - 1 { 0.5 } else { 1.0 })
            .product();
        let f: f64 = live.iter().map(|(c, w)| w * c.ln_pdf(&z).exp()).sum();
        if f > 0.0 {
            match q {
                Order::One => entropy -= trap * f * f.ln(),
                Order::Infinity => peak = peak.max(f),
                _ => power_sum += trap * f.powf(q.value()),
            }
        }
        for k in 0..n {
            index[k] += 1;
            if index[k] < m {
                break;
            }
            index[k] = 0;
        }
    }
    Ok(match q {
        Order::One => (entropy * cell).exp(),
        Order::Infinity => 1.0 / peak,
        _ => (power_sum * cell).powf(1.0 / (1.0 - q.value())),
    })
}
