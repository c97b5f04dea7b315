//! Dual scaling masks, wavelet filter pairs and their reconstruction
//! identities.
//!
//! The dual of a symmetric mask `a` with support `[0, L]` is pinned by
//! three ingredients: the two-channel biorthogonality equations
//! `Σ_j a_j ã_{j+Δ+2k} = δ_k / 2` (with `Δ` the offset between the two
//! symmetry centers), the symmetry `ã_α = ã_{L-α}`, and divisibility of
//! the dual symbol by the largest even power of `(1+z)` that squares the
//! system. Solving in the quotient parametrization
//! `Ã(z) = (1+z)^{2X} B(z)` keeps the linear system small and well
//! conditioned.
//!
//! For the filter bank the dual is recentered onto the symmetry center of
//! `a`; the highpass pair is `q_α = (-1)^α ã_{1-α}`,
//! `q̃_α = (-1)^α a_{1-α}` and the gains `(analysis, synthesis) = (1, 2)`
//! give an exact zero-delay reconstruction (pinned by the two-tap case).

use crate::error::{Error, Result};
use crate::laurent::{CoeffSeq, LaurentPoly};
use crate::masks::{binomial, level_scale_factor, Mask};
use nalgebra::{DMatrix, DVector};

/// Residual bound below which a candidate dual is accepted.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Solves for the dual mask of `a` supported on `[0, support_len]`.
///
/// With `symmetric` set (the standard construction) the solver requires a
/// symmetric `a`, eliminates the mirror half of the unknowns, and squares
/// the remaining freedom with `(1+z)^{2X}` divisibility. Without it the
/// minimum-norm solution of the bare biorthogonality equations is
/// returned. Either way the full reconstruction identity of the
/// recentered pair is verified to [`IDENTITY_TOL`].
pub fn bezout_solve(a: &Mask, support_len: usize, symmetric: bool) -> Result<CoeffSeq> {
    let big_l = support_len as i64;
    let Some((sa, ea)) = a.support() else {
        return Err(Error::InvalidParameter(
            "cannot dualize the zero mask".into(),
        ));
    };
    if (big_l - sa - ea).rem_euclid(2) != 0 {
        return Err(Error::InvalidParameter(format!(
            "support length {support_len} misaligns the symmetry centers of the pair"
        )));
    }
    let delta = (big_l - sa - ea) / 2;
    // distinct downsampled biorthogonality equations (k and -k coincide for
    // symmetric data)
    let k_hi = (big_l - sa - delta).div_euclid(2);

    let dual = if symmetric {
        if !a.is_symmetric() {
            return Err(Error::InvalidParameter(
                "symmetric dual requested for an asymmetric mask".into(),
            ));
        }
        let unknowns = (big_l + 2) / 2; // ceil((L+1)/2)
        let equations = k_hi + 1;
        let extra = unknowns - equations;
        if extra < 0 {
            return Err(Error::Dimension(format!(
                "support length {support_len} is too short for the mask"
            )));
        }
        solve_symmetric_quotient(a, big_l, delta, k_hi, extra as usize)?
    } else {
        solve_min_norm(a, big_l, delta)?
    };

    // verify the recentered reconstruction identity
    let recentered = recenter_dual(a, &dual)?;
    let residual = lowpass_identity_residual(a, &recentered);
    if residual > IDENTITY_TOL {
        return Err(Error::NoSolution { residual });
    }
    Ok(dual)
}

/// Symmetric dual via `Ã(z) = (1+z)^{2X} B(z)` with symmetric `B`.
fn solve_symmetric_quotient(
    a: &Mask,
    big_l: i64,
    delta: i64,
    k_hi: i64,
    extra: usize,
) -> Result<CoeffSeq> {
    let two_x = 2 * extra as i64;
    let w = big_l - two_x; // quotient degree
    let b_unknowns = ((w + 2) / 2) as usize;
    let rows = (k_hi + 1) as usize;
    if b_unknowns != rows {
        return Err(Error::Dimension(format!(
            "quotient system is {rows}x{b_unknowns}; support length and mask are incompatible"
        )));
    }
    let binom: Vec<f64> = (0..=two_x).map(|i| binomial(two_x, i)).collect();
    let mut mat = DMatrix::zeros(rows, b_unknowns);
    let mut rhs = DVector::zeros(rows);
    for (r, k) in (0..=k_hi).enumerate() {
        let d = delta + 2 * k;
        for (j, aj) in a.iter() {
            let t = j + d; // absolute dual index hit by this equation term
            if t < 0 || t > big_l {
                continue;
            }
            for (i, &bi) in binom.iter().enumerate() {
                let b_idx = t - i as i64;
                if (0..=w).contains(&b_idx) {
                    let col = b_idx.min(w - b_idx) as usize;
                    mat[(r, col)] += aj * bi;
                }
            }
        }
        rhs[r] = if k == 0 { 0.5 } else { 0.0 };
    }
    let lu = mat.lu();
    let b_half = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("reduced dual system".into()))?;
    let b_full: Vec<f64> = (0..=w).map(|i| b_half[i.min(w - i) as usize]).collect();
    // dual = (1+z)^{2X} * B, re-symmetrized to kill convolution rounding
    let quotient = LaurentPoly::new(0, b_full);
    let lift = LaurentPoly::new(0, binom);
    let product = CoeffSeq::from(lift.mul(&quotient));
    let mut values: Vec<f64> = (0..=big_l).map(|i| product.coeff(i)).collect();
    let len = values.len();
    for i in 0..len / 2 {
        let avg = 0.5 * (values[i] + values[len - 1 - i]);
        values[i] = avg;
        values[len - 1 - i] = avg;
    }
    Ok(CoeffSeq::new(0, values))
}

/// Minimum-norm solution of the bare biorthogonality equations.
fn solve_min_norm(a: &Mask, big_l: i64, delta: i64) -> Result<CoeffSeq> {
    let (sa, ea) = a.support().unwrap();
    let k_lo = (-ea - delta + 1).div_euclid(2);
    let k_hi = (big_l - sa - delta).div_euclid(2);
    let rows = (k_hi - k_lo + 1) as usize;
    let cols = (big_l + 1) as usize;
    let mut mat = DMatrix::zeros(rows, cols);
    let mut rhs = DVector::zeros(rows);
    for (r, k) in (k_lo..=k_hi).enumerate() {
        let d = delta + 2 * k;
        for (j, aj) in a.iter() {
            let t = j + d;
            if (0..=big_l).contains(&t) {
                mat[(r, t as usize)] += aj;
            }
        }
        rhs[r] = if k == 0 { 0.5 } else { 0.0 };
    }
    let svd = mat.svd(true, true);
    let max_sv = svd.singular_values.max();
    let sol = svd
        .solve(&rhs, 1e-12 * max_sv.max(1.0))
        .map_err(|e| Error::Singular(e.to_string()))?;
    Ok(CoeffSeq::new(0, sol.iter().copied().collect()))
}

/// Closed-form dual of the order-3 family for `m ≥ 1`, supported on
/// `[0, 14]` and symmetric about 7, with `h = 3 + m^{-μ}`.
pub fn closed_form_dual_n3(m: u32, mu: f64) -> Result<CoeffSeq> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "closed form applies to levels m >= 1".into(),
        ));
    }
    let h = 3.0 + level_scale_factor(m, mu).log2();
    let p2 = |e: f64| e.exp2();
    let denom = p2(h) - 4.0;
    let e8 = |e: f64| p2(3.0 * e);
    let e4 = |e: f64| p2(2.0 * e);
    let mut v = [0.0f64; 15];
    v[0] = e8(-3.0 - h) / denom * (128.0 + p2(6.0 + h) + 5.0 * e4(1.0 + h) + 5.0 * e8(h));
    v[1] = -e4(-5.0 - h) / denom * (128.0 + p2(6.0 + h) + 5.0 * e4(1.0 + h) + 5.0 * e8(h));
    v[2] = -e8(-3.0 - h) / denom
        * (640.0 + 7.0 * p2(6.0 + h) + 33.0 * e4(1.0 + h) + 29.0 * e8(h) - 5.0 * p2(4.0 * h));
    v[3] = p2(-9.0 - 2.0 * h) / denom
        * (128.0 + 3.0 * p2(6.0 + h) + 17.0 * e4(1.0 + h) + 17.0 * e8(h));
    v[4] = e8(-3.0 - h) / denom
        * (1152.0 + 15.0 * p2(6.0 + h) + 133.0 * e4(1.0 + h) + 89.0 * e8(h) - 39.0 * p2(4.0 * h));
    v[5] = e4(-5.0 - h) / denom * (128.0 + p2(6.0 + h) - 123.0 * e4(1.0 + h) - 123.0 * e8(h));
    v[6] = -e8(-3.0 - h) / denom
        * (640.0 + 9.0 * p2(6.0 + h) - 81.0 * p2(1.0 + 4.0 * h)
            + 105.0 * e4(1.0 + h)
            + 577.0 * e8(h));
    v[7] = -e4(-4.0 - h) / denom * (128.0 + 3.0 * p2(6.0 + h) + 81.0 * e4(1.0 + h) - 175.0 * e8(h));
    for i in 8..15 {
        v[i] = v[14 - i];
    }
    Ok(CoeffSeq::new(0, v.to_vec()))
}

/// Shifts a solver dual so that its symmetry center coincides with the
/// center of `a`; this is the alignment under which the reconstruction
/// identities are zero-delay.
pub fn recenter_dual(a: &Mask, dual: &CoeffSeq) -> Result<CoeffSeq> {
    let (Some((sa, ea)), Some((sd, ed))) = (a.support(), dual.support()) else {
        return Err(Error::InvalidParameter("empty mask or dual".into()));
    };
    let twice_shift = (sa + ea) - (sd + ed);
    if twice_shift.rem_euclid(2) != 0 {
        return Err(Error::InvalidParameter(
            "mask and dual centers differ by a half-integer".into(),
        ));
    }
    Ok(dual.translated(twice_shift / 2))
}

/// Sign, shift and gain bookkeeping for the highpass construction and the
/// transform normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletConvention {
    /// Gain applied by one analysis step.
    pub analysis_gain: f64,
    /// Gain applied by one synthesis step.
    pub synthesis_gain: f64,
    /// Index shift `σ` in `q_α = s · (-1)^α ã_{1-α+σ}`.
    pub highpass_shift: i64,
    /// Sign `s` of the highpass filter.
    pub highpass_sign: f64,
    /// Sign `s̃` of the dual highpass filter.
    pub dual_highpass_sign: f64,
}

impl Default for WaveletConvention {
    /// The unique member (up to a joint sign flip of both highpass
    /// filters) of the sign/shift family with exact zero-delay
    /// reconstruction.
    fn default() -> Self {
        WaveletConvention {
            analysis_gain: 1.0,
            synthesis_gain: 2.0,
            highpass_shift: 0,
            highpass_sign: 1.0,
            dual_highpass_sign: 1.0,
        }
    }
}

/// Highpass pair from a lowpass pair:
/// `q_α = s (-1)^α ã_{1-α+σ}` and `q̃_α = s̃ (-1)^α a_{1-α+σ}`.
pub fn wavelet_filters(
    a: &Mask,
    a_dual: &CoeffSeq,
    convention: &WaveletConvention,
) -> (CoeffSeq, CoeffSeq) {
    let flip = |src: &CoeffSeq, sign: f64| -> CoeffSeq {
        let Some((lo, hi)) = src.support() else {
            return CoeffSeq::zero();
        };
        // 1 - α + σ ∈ [lo, hi]  ⇔  α ∈ [1 + σ - hi, 1 + σ - lo]
        let out_lo = 1 + convention.highpass_shift - hi;
        let values = (out_lo..=1 + convention.highpass_shift - lo)
            .map(|alpha| {
                let s = if alpha.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                sign * s * src.coeff(1 - alpha + convention.highpass_shift)
            })
            .collect();
        CoeffSeq::new(out_lo, values)
    };
    (
        flip(a_dual, convention.highpass_sign),
        flip(a, convention.dual_highpass_sign),
    )
}

/// The four filters of one level together with their convention.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterQuartet {
    pub a: Mask,
    pub a_dual: CoeffSeq,
    pub q: CoeffSeq,
    pub q_dual: CoeffSeq,
    pub level: u32,
    pub convention: WaveletConvention,
}

impl FilterQuartet {
    /// Builds the quartet for one level from a lowpass pair. The dual is
    /// recentered onto the center of `a` and the reconstruction identity
    /// is verified to [`IDENTITY_TOL`].
    pub fn new(a: Mask, dual: CoeffSeq, level: u32, convention: WaveletConvention) -> Result<Self> {
        let a_dual = recenter_dual(&a, &dual)?;
        let residual = lowpass_identity_residual(&a, &a_dual);
        if residual > IDENTITY_TOL {
            return Err(Error::NoSolution { residual });
        }
        let (q, q_dual) = wavelet_filters(&a, &a_dual, &convention);
        Ok(FilterQuartet {
            a,
            a_dual,
            q,
            q_dual,
            level,
            convention,
        })
    }

    /// Maximum coefficient residual over the four two-channel identities:
    /// the lowpass and highpass identities against 1 and the two cross
    /// terms against 0.
    pub fn pr_identity_residual(&self) -> f64 {
        let a = LaurentPoly::from(self.a.clone());
        let ad = LaurentPoly::from(self.a_dual.clone());
        let q = LaurentPoly::from(self.q.clone());
        let qd = LaurentPoly::from(self.q_dual.clone());
        let pair = |p: &LaurentPoly, r: &LaurentPoly| -> LaurentPoly {
            let direct = p.mul(&r.subst_recip());
            let alt = p.subst_neg().mul(&r.subst_recip().subst_neg());
            direct.add(&alt)
        };
        let one = LaurentPoly::one();
        let residuals = [
            pair(&a, &ad).sub(&one),
            pair(&q, &qd).sub(&one),
            pair(&a, &qd),
            pair(&q, &ad),
        ];
        residuals
            .iter()
            .map(|r| r.coeffs().max_abs())
            .fold(0.0, f64::max)
    }
}

/// Coefficient residual of the lowpass identity
/// `A(z) Ã(z⁻¹) + A(-z) Ã(-z⁻¹) = 1` for an aligned pair.
pub fn lowpass_identity_residual(a: &Mask, a_dual: &CoeffSeq) -> f64 {
    let ap = LaurentPoly::from(a.clone());
    let dp = LaurentPoly::from(a_dual.clone());
    let direct = ap.mul(&dp.subst_recip());
    let alt = ap.subst_neg().mul(&dp.subst_recip().subst_neg());
    direct.add(&alt).sub(&LaurentPoly::one()).coeffs().max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masks::{fundamental_mask, nonstationary_mask, MaskParams};

    const MU: f64 = 1.1;

    fn mask3(m: u32) -> Mask {
        nonstationary_mask(&MaskParams::new(3, m, MU).unwrap())
    }

    #[test]
    fn haar_dual() {
        let a = CoeffSeq::new(0, vec![0.5, 0.5]);
        let dual = bezout_solve(&a, 1, true).unwrap();
        assert_eq!(dual.values(), &[0.5, 0.5]);
        // {1/2, -1/2} violates the identity
        let bad = CoeffSeq::new(0, vec![0.5, -0.5]);
        assert!(lowpass_identity_residual(&a, &bad) > 0.4);
    }

    #[test]
    fn solver_reproduces_closed_form() {
        for m in 1..=8u32 {
            let sol = bezout_solve(&mask3(m), 14, true).unwrap();
            let cf = closed_form_dual_n3(m, MU).unwrap();
            assert!(sol.max_abs_diff(&cf) < 1e-9, "m={m}");
        }
    }

    #[test]
    fn closed_form_reference_values() {
        let d1 = closed_form_dual_n3(1, MU).unwrap();
        assert!((d1.coeff(0) - 26752.0 / 25165824.0).abs() < 1e-12);
        assert!((d1.coeff(0) - 0.0011).abs() < 5e-5);
        assert!((d1.coeff(7) - 0.8019).abs() < 5e-5);
        let d2 = closed_form_dual_n3(2, MU).unwrap();
        assert!((d2.coeff(1) - (-0.0114)).abs() < 5e-5);
        assert!(closed_form_dual_n3(0, MU).is_err());
    }

    #[test]
    fn solver_dual_shape() {
        let dual = bezout_solve(&mask3(1), 14, true).unwrap();
        assert_eq!(dual.support(), Some((0, 14)));
        for alpha in 0..=14i64 {
            assert_eq!(
                dual.coeff(alpha),
                dual.coeff(14 - alpha),
                "symmetry at {alpha}"
            );
        }
        assert!((dual.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solver_rejects_bad_supports() {
        // odd support length misaligns the centers of a [0,4] mask
        assert!(bezout_solve(&mask3(1), 13, true).is_err());
        // a single tap cannot satisfy the two distinct equations
        assert!(bezout_solve(&mask3(1), 0, true).is_err());
    }

    #[test]
    fn short_dual_exists() {
        // the shortest even support admits a valid three-tap dual
        let a = mask3(1);
        let dual = bezout_solve(&a, 2, true).unwrap();
        let recentered = recenter_dual(&a, &dual).unwrap();
        assert!(lowpass_identity_residual(&a, &recentered) < 1e-12);
    }

    #[test]
    fn duals_converge_to_fundamental_dual() {
        // entrywise monotone approach; the rate is only polynomial in the
        // level (tension 1.1), so the bound after 12 levels is modest
        let stationary = bezout_solve(&fundamental_mask(3), 14, true).unwrap();
        let mut first = 0.0;
        let mut last = f64::INFINITY;
        for m in 1..=12u32 {
            let d = bezout_solve(&mask3(m), 14, true).unwrap();
            let dist = d.max_abs_diff(&stationary);
            assert!(dist < last, "m={m}: {dist} !< {last}");
            if m == 1 {
                first = dist;
            }
            last = dist;
        }
        assert!(last < first / 5.0, "decay too slow: {first} -> {last}");
    }

    #[test]
    fn quartet_haar_roundtrip_filters() {
        let a = CoeffSeq::new(0, vec![0.5, 0.5]);
        let dual = bezout_solve(&a, 1, true).unwrap();
        let quartet = FilterQuartet::new(a, dual, 0, WaveletConvention::default()).unwrap();
        assert_eq!(quartet.q.coeff(0), 0.5);
        assert_eq!(quartet.q.coeff(1), -0.5);
        assert_eq!(quartet.q, quartet.q_dual);
        assert!(quartet.pr_identity_residual() < 1e-15);
    }

    #[test]
    fn quartet_identities_level_one() {
        let a = mask3(1);
        let dual = bezout_solve(&a, 14, true).unwrap();
        let quartet = FilterQuartet::new(a, dual, 1, WaveletConvention::default()).unwrap();
        assert!(quartet.pr_identity_residual() < 1e-10);
        // alternating sum of the dual vanishes, so the highpass sums to zero
        assert!(quartet.q.sum().abs() < 1e-12);
    }

    #[test]
    fn corrupted_dual_breaks_identity() {
        let a = mask3(1);
        let dual = bezout_solve(&a, 14, true).unwrap();
        let mut values = dual.values().to_vec();
        values[7] += 1e-3;
        let corrupted = CoeffSeq::new(0, values);
        let recentered = recenter_dual(&a, &corrupted).unwrap();
        assert!(lowpass_identity_residual(&a, &recentered) > 1e-4);
        assert!(FilterQuartet::new(a, corrupted, 1, WaveletConvention::default()).is_err());
    }

    #[test]
    fn shifted_highpass_fails_reconstruction() {
        // σ = ±1 breaks the zero-delay identities
        let a = CoeffSeq::new(0, vec![0.5, 0.5]);
        let dual = bezout_solve(&a, 1, true).unwrap();
        for shift in [-1i64, 1] {
            let convention = WaveletConvention {
                highpass_shift: shift,
                ..Default::default()
            };
            let quartet = FilterQuartet::new(a.clone(), dual.clone(), 0, convention).unwrap();
            assert!(quartet.pr_identity_residual() > 0.4, "shift {shift}");
        }
        // a single flipped sign breaks them too
        let convention = WaveletConvention {
            highpass_sign: -1.0,
            ..Default::default()
        };
        let quartet = FilterQuartet::new(a, dual, 0, convention).unwrap();
        assert!(quartet.pr_identity_residual() > 0.4);
    }

    #[test]
    fn min_norm_solver_satisfies_identity() {
        let a = mask3(1);
        let dual = bezout_solve(&a, 14, false).unwrap();
        let recentered = recenter_dual(&a, &dual).unwrap();
        assert!(lowpass_identity_residual(&a, &recentered) < 1e-10);
    }
}
