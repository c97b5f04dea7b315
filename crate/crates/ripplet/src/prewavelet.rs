//! Minimally supported prewavelets of the nonstationary family.
//!
//! The prewavelet at level `m` is assembled from the level-`(m+1)` ripplet
//! with coefficients `d_α = (-1)^α g_{α-1}`, where `g` is the cross-scale
//! Gramian `g_α = ∫ φ^{(n,m)} φ^{(n,m+1)}(· + 2^{-(m+1)} α)`. The Gramian
//! is computed without any function evaluation by an iterative product of
//! cross-level transfer matrices seeded with the exact stationary
//! (B-spline) cross-Gramian.

use crate::error::{Error, Result};
use crate::laurent::CoeffSeq;
use crate::masks::{fundamental_mask, nonstationary_mask, MaskParams};
use crate::refinable::{cardinal_bspline, cascade_evaluate, CascadeConfig, SampledFunction};
use nalgebra::{DMatrix, DVector};

/// Cross-scale Gramian vector in coefficient-sequence role.
pub type GramianVector = CoeffSeq;
/// Prewavelet mask in coefficient-sequence role.
pub type PrewaveletMask = CoeffSeq;

/// Default iteration budget for [`prewavelet_gramian`]. The nonstationary
/// masks approach the fundamental mask only polynomially in the level, so
/// the budget is generous.
pub const DEFAULT_GRAMIAN_ITERATIONS: usize = 64;
/// Default stop tolerance for successive Gramian iterates.
pub const DEFAULT_GRAMIAN_TOL: f64 = 1e-12;

/// Support `[lo, hi]` of the level-`m` cross-scale Gramian.
pub fn gramian_support(n: u32, m: u32) -> (i64, i64) {
    let n = n as i64;
    if m == 0 {
        (-n - 1, n)
    } else {
        (-2 * n - 1, n)
    }
}

/// Support `[lo, hi]` of the level-`m` prewavelet mask.
pub fn prewavelet_mask_support(n: u32, m: u32) -> (i64, i64) {
    let (glo, ghi) = gramian_support(n, m);
    (glo + 1, ghi + 1)
}

/// Cross-Gramian of adjacent-scale B-splines,
/// `g_α = ∫ B^{(n,0)}(x) B^{(n,1)}(x + 2^{-1} α) dx`, evaluated exactly
/// through the two-scale refinement of `B^{(n,0)}` and the identity
/// `∫ N_n(u) N_n(u+t) du = N_{2n+1}(n+1-t)`.
pub fn stationary_cross_gramian(n: u32) -> GramianVector {
    let a = fundamental_mask(n);
    let ni = n as i64;
    let (lo, hi) = (-2 * ni - 1, ni);
    let values = (lo..=hi)
        .map(|alpha| {
            a.iter()
                .map(|(beta, v)| {
                    v * 2.0 * cardinal_bspline(2 * n + 1, (ni + 1 - alpha - beta) as f64)
                })
                .sum()
        })
        .collect();
    CoeffSeq::new(lo, values)
}

/// Cross-level mask `c_α = Σ_β a^{(n,m)}_β a^{(n,m+1)}_{α+2β}`.
///
/// Supported on `[-2, n+1]` for `m = 0` and `[-2(n+1), n+1]` for `m > 0`;
/// its full sum is 1.
pub fn cross_level_mask(n: u32, m: u32, mu: f64) -> Result<CoeffSeq> {
    let a = nonstationary_mask(&MaskParams::new(n, m, mu)?);
    let a_next = nonstationary_mask(&MaskParams::new(n, m + 1, mu)?);
    let ni = n as i64;
    let lo = -2 * (ni + 1);
    let values = (lo..=ni + 1)
        .map(|alpha| {
            a.iter()
                .map(|(beta, v)| v * a_next.coeff(alpha + 2 * beta))
                .sum()
        })
        .collect();
    Ok(CoeffSeq::new(lo, values))
}

/// Transfer matrix with entry `(α, β) = c^{(n,m)}_{2α-β}` mapping a
/// level-`(m+1)` Gramian (indexed by `col_support`) to the level-`m`
/// Gramian (indexed by `row_support`).
///
/// The supports must be exactly the theoretical Gramian supports of the
/// two levels.
pub fn transfer_matrix(
    n: u32,
    m: u32,
    mu: f64,
    row_support: (i64, i64),
    col_support: (i64, i64),
) -> Result<DMatrix<f64>> {
    if row_support != gramian_support(n, m) {
        return Err(Error::Dimension(format!(
            "row support {row_support:?} differs from the level-{m} Gramian support {:?}",
            gramian_support(n, m)
        )));
    }
    if col_support != gramian_support(n, m + 1) {
        return Err(Error::Dimension(format!(
            "column support {col_support:?} differs from the level-{} Gramian support {:?}",
            m + 1,
            gramian_support(n, m + 1)
        )));
    }
    let c = cross_level_mask(n, m, mu)?;
    let rows = (row_support.1 - row_support.0 + 1) as usize;
    let cols = (col_support.1 - col_support.0 + 1) as usize;
    Ok(DMatrix::from_fn(rows, cols, |r, cidx| {
        let alpha = row_support.0 + r as i64;
        let beta = col_support.0 + cidx as i64;
        c.coeff(2 * alpha - beta)
    }))
}

/// Transfer matrix over the default (theoretical) supports.
pub fn gramian_transfer_matrix(n: u32, m: u32, mu: f64) -> Result<DMatrix<f64>> {
    transfer_matrix(n, m, mu, gramian_support(n, m), gramian_support(n, m + 1))
}

/// Cross-scale Gramian at level `m` by the transfer-matrix iteration.
///
/// Depth-`k` iterate: restrict the stationary seed to the level-`(m+k)`
/// support, then apply the doubled transfer matrices of levels
/// `m+k-1, …, m` in that order (the factor 2 per application compensates
/// the dyadic growth of the raw Gramians along the level ladder, and the
/// final `2^m` restores the raw scale of level `m`). Returns the first
/// iterate whose sup-distance to its predecessor is below `tol`.
pub fn prewavelet_gramian(
    n: u32,
    m: u32,
    mu: f64,
    max_iterations: usize,
    tol: f64,
) -> Result<GramianVector> {
    if max_iterations == 0 {
        return Err(Error::InvalidParameter(
            "need at least one iteration".into(),
        ));
    }
    let seed = stationary_cross_gramian(n);
    // doubled transfer matrices, extended lazily as the iterate deepens
    let mut doubled: Vec<DMatrix<f64>> = Vec::new();
    let (row_lo, row_hi) = gramian_support(n, m);
    let out_dim = (row_hi - row_lo + 1) as usize;
    let mut previous: Option<DVector<f64>> = None;
    let mut residual = f64::INFINITY;
    for k in 1..=max_iterations {
        while doubled.len() < k {
            let level = m + doubled.len() as u32;
            doubled.push(gramian_transfer_matrix(n, level, mu)?.scale(2.0));
        }
        let (slo, shi) = gramian_support(n, m + k as u32);
        let mut v = DVector::from_fn((shi - slo + 1) as usize, |i, _| seed.coeff(slo + i as i64));
        for level_idx in (0..k).rev() {
            v = &doubled[level_idx] * v;
        }
        debug_assert_eq!(v.len(), out_dim);
        if let Some(prev) = &previous {
            residual = (&v - prev).amax();
            if residual < tol {
                let scale = 2f64.powi(m as i32);
                let values = v.iter().map(|x| x * scale).collect();
                return Ok(CoeffSeq::new(row_lo, values));
            }
        }
        previous = Some(v);
    }
    Err(Error::IterationLimit {
        iterations: max_iterations,
        residual,
    })
}

/// [`prewavelet_gramian`] with the default budget and tolerance.
pub fn prewavelet_gramian_default(n: u32, m: u32, mu: f64) -> Result<GramianVector> {
    prewavelet_gramian(n, m, mu, DEFAULT_GRAMIAN_ITERATIONS, DEFAULT_GRAMIAN_TOL)
}

/// Prewavelet mask `d_α = (-1)^α g_{α-1}` from a Gramian vector.
pub fn prewavelet_mask(g: &GramianVector) -> PrewaveletMask {
    let Some((lo, hi)) = g.support() else {
        return CoeffSeq::zero();
    };
    let values = (lo + 1..=hi + 1)
        .map(|alpha| {
            let sign = if alpha.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            sign * g.coeff(alpha - 1)
        })
        .collect();
    CoeffSeq::new(lo + 1, values)
}

/// Orthogonality defect `max_β | Σ_α d_α g_{2β-α} |` between a prewavelet
/// mask and the Gramian of its level.
pub fn orthogonality_residual(d: &PrewaveletMask, g: &GramianVector) -> f64 {
    let (Some((dlo, dhi)), Some((glo, ghi))) = (d.support(), g.support()) else {
        return 0.0;
    };
    // 2β - α ranges over supp g for α in supp d
    let beta_lo = (glo + dlo).div_euclid(2);
    let beta_hi = (ghi + dhi + 1).div_euclid(2);
    let mut worst = 0.0f64;
    for beta in beta_lo..=beta_hi {
        let s: f64 = d
            .iter()
            .map(|(alpha, dv)| dv * g.coeff(2 * beta - alpha))
            .sum();
        worst = worst.max(s.abs());
    }
    worst
}

/// Assembles the level-`m` prewavelet
/// `ψ = Σ_α d_α φ^{(n,m+1)}(· - 2^{-(m+1)} α)` from cascade samples.
pub fn sample_prewavelet(
    n: u32,
    m: u32,
    mu: f64,
    cfg: &CascadeConfig,
    resolution: u32,
) -> Result<SampledFunction> {
    let g = prewavelet_gramian_default(n, m, mu)?;
    let d = prewavelet_mask(&g);
    let phi_next = cascade_evaluate(&MaskParams::new(n, m + 1, mu)?, cfg, resolution)?;
    crate::refinable::shifted_combination(&d, &phi_next, m + 1)
}

/// Absolute moments `|∫ x^d ψ(x) dx|` for `d = 0..=max_degree` by
/// trapezoid quadrature.
pub fn vanishing_moments_residual(psi: &SampledFunction, max_degree: u32) -> Vec<f64> {
    (0..=max_degree).map(|d| psi.moment(d).abs()).collect()
}
