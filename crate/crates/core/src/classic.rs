//! Distance-aware diversity indices: Rao's quadratic entropy and its numbers
//! equivalent, functional Hill numbers and the Leinster–Cobbold index, plus
//! metric predicates and the parametric three-state system used to compare
//! them.

use crate::renyi::log_sum_exp;
use crate::{Distribution, HetError, Order, Result};

/// Default slack for the metric and ultrametric predicates.
pub const METRIC_TOLERANCE: f64 = 1e-9;
const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// `neqrqe` refuses quadratic entropies this close to one.
const SINGULARITY_MARGIN: f64 = 1e-12;

/// Square matrix of pairwise dissimilarities.
///
/// [`DistanceMatrix::new`] enforces a zero diagonal. Expected-distance
/// matrices between distributions have `E|X - X'| > 0` on the diagonal and are
/// built with [`DistanceMatrix::expected`] instead.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

fn square(rows: Vec<Vec<f64>>) -> Result<(usize, Vec<f64>)> {
    let n = rows.len();
    if n == 0 {
        return Err(HetError::InvalidParameter("empty matrix".into()));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(HetError::DimensionMismatch {
            expected: n,
            found: r.len(),
        });
    }
    Ok((n, rows.into_iter().flatten().collect()))
}

impl DistanceMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = Self::expected(rows)?;
        if let Some(i) = (0..d.n).find(|&i| d.get(i, i) != 0.0) {
            return Err(HetError::InvalidParameter(format!(
                "distance diagonal entry {i} is {} (must be 0)",
                d.get(i, i)
            )));
        }
        Ok(d)
    }

    /// Symmetric, non-negative, but the diagonal may be positive.
    pub fn expected(rows: Vec<Vec<f64>>) -> Result<Self> {
        let (n, data) = square(rows)?;
        if data.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(HetError::InvalidParameter(
                "distances must be finite and non-negative".into(),
            ));
        }
        let d = Self { n, data };
        for i in 0..n {
            for j in i + 1..n {
                if (d.get(i, j) - d.get(j, i)).abs() > SYMMETRY_TOLERANCE {
                    return Err(HetError::InvalidParameter(format!(
                        "distance matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(d)
    }

    /// The discrete metric `1 1ᵀ - I`.
    pub fn categorical(n: usize) -> Self {
        let data = (0..n * n)
            .map(|k| if k / n == k % n { 0.0 } else { 1.0 })
            .collect();
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 0.0)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }
}

/// Square matrix of pairwise affinities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SimilarityMatrix {
    /// Entries in `[0, 1]` with a unit diagonal.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let (n, data) = square(rows)?;
        if data.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(HetError::InvalidParameter(
                "similarities must lie in [0, 1]".into(),
            ));
        }
        let s = Self { n, data };
        if let Some(i) = (0..n).find(|&i| s.get(i, i) != 1.0) {
            return Err(HetError::InvalidParameter(format!(
                "similarity diagonal entry {i} is {} (must be 1)",
                s.get(i, i)
            )));
        }
        Ok(s)
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n * n)
            .map(|k| if k / n == k % n { 1.0 } else { 0.0 })
            .collect();
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

fn check_dims(n: usize, p: &Distribution) -> Result<()> {
    if n != p.len() {
        return Err(HetError::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    Ok(())
}

/// Generalized Rao quadratic entropy `Σ_ij D_ij (p_i p_j)^q`; `q = 1` is the
/// classical index. Pairs with `p_i p_j = 0` contribute nothing.
pub fn rqe(d: &DistanceMatrix, p: &Distribution, q: Order) -> Result<f64> {
    check_dims(d.n, p)?;
    let probs = p.probs();
    let qv = q.value();
    let mut total = 0.0;
    for (i, &pi) in probs.iter().enumerate() {
        for (j, &pj) in probs.iter().enumerate() {
            let pp = pi * pj;
            if pp > 0.0 {
                total += d.get(i, j) * if qv == 1.0 { pp } else { pp.powf(qv) };
            }
        }
    }
    Ok(total)
}

/// Affine rescaling `(D - min) / (max - min)` onto `[0, 1]`. The minimum runs
/// over the full matrix, diagonal included.
pub fn rescale_distance(d: &DistanceMatrix) -> Result<DistanceMatrix> {
    let min = d.data.iter().copied().fold(f64::INFINITY, f64::min);
    let max = d.data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max <= min {
        return Err(HetError::DegenerateDistance);
    }
    let span = max - min;
    Ok(DistanceMatrix {
        n: d.n,
        data: d.data.iter().map(|x| (x - min) / span).collect(),
    })
}

/// Numbers-equivalent quadratic entropy `1 / (1 - Q₁)` on a distance matrix
/// already rescaled to `[0, 1]`.
pub fn neqrqe(d: &DistanceMatrix, p: &Distribution) -> Result<f64> {
    if d.data.iter().any(|x| *x > 1.0) {
        return Err(HetError::InvalidParameter(
            "distances must be rescaled to [0, 1] first".into(),
        ));
    }
    let q1 = rqe(d, p, Order::One)?;
    if q1 >= 1.0 - SINGULARITY_MARGIN {
        return Err(HetError::Singularity { q1 });
    }
    Ok(1.0 / (1.0 - q1))
}

/// Functional Hill number `(Q_q / Q₁)^{1/(2(1-q))}`.
///
/// At `q = 1` this is `exp(-Σ D_ij p_i p_j ln(p_i p_j) / (2 Q₁))`; at `q = ∞`
/// it is `1 / sqrt(max p_i p_j)` over pairs at positive distance.
pub fn functional_hill(d: &DistanceMatrix, p: &Distribution, q: Order) -> Result<f64> {
    let q1 = rqe(d, p, Order::One)?;
    if q1 <= 0.0 {
        return Err(HetError::UndefinedIndex(
            "functional Hill numbers need positive quadratic entropy".into(),
        ));
    }
    let probs = p.probs();
    let pairs = || {
        (0..d.n).flat_map(move |i| (0..d.n).map(move |j| (d.get(i, j), probs[i] * probs[j])))
    };
    match q {
        Order::One => {
            let s: f64 = pairs()
                .filter(|&(dij, pp)| dij > 0.0 && pp > 0.0)
                .map(|(dij, pp)| dij * pp * pp.ln())
                .sum();
            Ok((-s / (2.0 * q1)).exp())
        }
        Order::Infinity => {
            let m = pairs()
                .filter(|&(dij, _)| dij > 0.0)
                .map(|(_, pp)| pp)
                .fold(0.0, f64::max);
            Ok(1.0 / m.sqrt())
        }
        _ => {
            let qv = q.value();
            let ln_qq = log_sum_exp(
                pairs()
                    .filter(|&(dij, pp)| dij > 0.0 && pp > 0.0)
                    .map(move |(dij, pp)| dij.ln() + qv * pp.ln()),
            );
            Ok(((ln_qq - q1.ln()) / (2.0 * (1.0 - qv))).exp())
        }
    }
}

/// `S_ij = exp(-u D_ij)`; `u = 0` gives all ones, `u → ∞` the identity.
pub fn similarity_from_distance(d: &DistanceMatrix, u: f64) -> Result<SimilarityMatrix> {
    if u.is_nan() || u < 0.0 {
        return Err(HetError::InvalidParameter(format!(
            "similarity scale u must be non-negative, got {u}"
        )));
    }
    let data = d
        .data
        .iter()
        .map(|&x| if x == 0.0 { 1.0 } else { (-u * x).exp() })
        .collect();
    Ok(SimilarityMatrix { n: d.n, data })
}

/// Leinster–Cobbold similarity-sensitive diversity of order `q`.
pub fn leinster_cobbold(s: &SimilarityMatrix, p: &Distribution, q: Order) -> Result<f64> {
    check_dims(s.n, p)?;
    let probs = p.probs();
    // (p_i, (S p)_i) over the support of p
    let support: Vec<(f64, f64)> = probs
        .iter()
        .enumerate()
        .filter(|(_, &pi)| pi > 0.0)
        .map(|(i, &pi)| {
            let sp: f64 = (0..s.n).map(|j| s.get(i, j) * probs[j]).sum();
            (pi, sp)
        })
        .collect();
    let value = match q {
        Order::One => (-support.iter().map(|(pi, sp)| pi * sp.ln()).sum::<f64>()).exp(),
        Order::Infinity => 1.0 / support.iter().map(|&(_, sp)| sp).fold(0.0, f64::max),
        _ => {
            let qv = q.value();
            let ln_sum = log_sum_exp(
                support
                    .iter()
                    .map(move |(pi, sp)| pi.ln() + (qv - 1.0) * sp.ln()),
            );
            (ln_sum / (1.0 - qv)).exp()
        }
    };
    Ok(value)
}

/// Metric check with slack `tol`: zero diagonal, distinct states strictly
/// apart, symmetry and every triangle inequality.
pub fn is_metric(d: &DistanceMatrix, tol: f64) -> bool {
    let n = d.n;
    for i in 0..n {
        if d.get(i, i).abs() > tol {
            return false;
        }
        for j in 0..n {
            if i != j && (d.get(i, j) <= tol || (d.get(i, j) - d.get(j, i)).abs() > tol) {
                return false;
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if d.get(x, z) > d.get(x, y) + d.get(y, z) + tol {
                    return false;
                }
            }
        }
    }
    true
}

/// Metric plus the strong triangle inequality `d(x,z) <= max(d(x,y), d(y,z))`.
pub fn is_ultrametric(d: &DistanceMatrix, tol: f64) -> bool {
    if !is_metric(d, tol) {
        return false;
    }
    let n = d.n;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if d.get(x, z) > d.get(x, y).max(d.get(y, z)) + tol {
                    return false;
                }
            }
        }
    }
    true
}

/// Parameters of the three-state triangle system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleSystemParams {
    pub kappa: f64,
    pub h: f64,
    pub b: f64,
}

impl TriangleSystemParams {
    /// `kappa = f64::INFINITY` selects the fully skewed limit.
    pub fn new(kappa: f64, h: f64, b: f64) -> Result<Self> {
        check_kappa(kappa)?;
        check_positive("h", h)?;
        check_positive("b", b)?;
        Ok(Self { kappa, h, b })
    }

    pub fn probs(&self) -> Distribution {
        three_state_probs(self.kappa).expect("validated kappa")
    }

    pub fn distance(&self) -> DistanceMatrix {
        three_state_distance(self.h, self.b).expect("validated h, b")
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_nan() || kappa < 0.0 {
        return Err(HetError::InvalidParameter(format!(
            "kappa must be non-negative, got {kappa}"
        )));
    }
    Ok(())
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(HetError::Domain {
            name,
            value: v,
            domain: "(0, inf)",
        });
    }
    Ok(())
}

/// Skewed three-state distribution: even at `κ = 1`, all mass on the first
/// state at `κ = 0` and on the last at `κ = ∞`.
pub fn three_state_probs(kappa: f64) -> Result<Distribution> {
    check_kappa(kappa)?;
    let probs = if kappa == 0.0 {
        vec![1.0, 0.0, 0.0]
    } else if kappa == 1.0 {
        vec![1.0 / 3.0; 3]
    } else if kappa.is_infinite() {
        vec![0.0, 0.0, 1.0]
    } else {
        let r = kappa.sqrt();
        let z = 1.0 + r + kappa;
        vec![1.0 / z, r / z, kappa / z]
    };
    Distribution::new(probs)
}

/// Distances of a triangle with base `b` between states 1 and 2 and apex
/// (state 3) at height `h`.
pub fn three_state_distance(h: f64, b: f64) -> Result<DistanceMatrix> {
    check_positive("h", h)?;
    check_positive("b", b)?;
    let side = (b * b / 4.0 + h * h).sqrt();
    Ok(DistanceMatrix {
        n: 3,
        data: vec![0.0, b, side, b, 0.0, side, side, side, 0.0],
    })
}
