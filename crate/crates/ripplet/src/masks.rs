//! Scaling masks of the nonstationary ripplet family.
//!
//! The family is indexed by a support parameter `n ≥ 2`, a dyadic level
//! `m ≥ 0` and a tension parameter `μ > 1`. Level 0 always carries the
//! two-tap averaging mask; levels `m ≥ 1` blend a binomial row with a
//! shortened row weighted by `4·(2^{m^{-μ}} - 1)`, so the sequence tends
//! to the binomial (B-spline) fundamental mask as `m → ∞`, the faster the
//! larger `μ`.

use crate::error::{Error, Result};
use crate::laurent::{CoeffSeq, LaurentPoly};
use nalgebra::{DMatrix, DVector};

/// Parameters selecting one mask of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskParams {
    pub n: u32,
    pub m: u32,
    pub mu: f64,
}

impl MaskParams {
    /// Validates `n ≥ 2` and `mu > 1` (strict).
    pub fn new(n: u32, m: u32, mu: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        if !mu.is_finite() || mu <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "mu must be finite and > 1, got {mu}"
            )));
        }
        Ok(MaskParams { n, m, mu })
    }

    /// Same family, different level.
    pub fn at_level(&self, m: u32) -> MaskParams {
        MaskParams { m, ..*self }
    }
}

/// A scaling or filter mask is just a coefficient sequence in mask role.
pub type Mask = CoeffSeq;

/// `2^{m^{-μ}}`, computed as `exp2(exp(-μ ln m))` so every mask entry
/// shares a single rounding site. Only meaningful for `m ≥ 1`.
pub fn level_scale_factor(m: u32, mu: f64) -> f64 {
    debug_assert!(m >= 1);
    (-mu * (m as f64).ln()).exp().exp2()
}

/// Integer Pascal-recurrence binomial, converted to float once; zero
/// outside `0 ≤ k ≤ n`.
pub fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || k > n || n < 0 {
        return 0.0;
    }
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[k as usize] as f64
}

/// The level-`m` scaling mask.
///
/// Level 0 is `{1/2, 1/2}` on `[0, 1]`; for `m ≥ 1` the entries are
/// `2^{-(n+1+m^{-μ})} [ C(n+1, α) + 4 (2^{m^{-μ}} - 1) C(n-1, α-1) ]`
/// on `[0, n+1]`.
pub fn nonstationary_mask(p: &MaskParams) -> Mask {
    mask_of_order(p.n, p.m, p.mu)
}

/// Mask formula without the `n ≥ 2` parameter gate. The differentiation
/// rule compares against the order-`(n-r)` generator, which reaches down
/// to order 1; the formula itself is well defined there (the shortened
/// binomial row degenerates to a single entry).
pub(crate) fn mask_of_order(n: u32, m: u32, mu: f64) -> Mask {
    debug_assert!(n >= 1);
    if m == 0 {
        return CoeffSeq::new(0, vec![0.5, 0.5]);
    }
    let n = n as i64;
    let scale = level_scale_factor(m, mu);
    let norm = 1.0 / (2f64.powi(n as i32 + 1) * scale);
    let bump = 4.0 * (scale - 1.0);
    let values = (0..=n + 1)
        .map(|alpha| norm * (binomial(n + 1, alpha) + bump * binomial(n - 1, alpha - 1)))
        .collect();
    CoeffSeq::new(0, values)
}

/// The fundamental (stationary-limit) mask: the binomial row
/// `C(n+1, α) / 2^{n+1}` on `[0, n+1]`, i.e. the degree-`n` B-spline mask.
pub fn fundamental_mask(n: u32) -> Mask {
    let n = n as i64;
    let norm = 0.5f64.powi(n as i32 + 1);
    let values = (0..=n + 1)
        .map(|alpha| norm * binomial(n + 1, alpha))
        .collect();
    CoeffSeq::new(0, values)
}

/// Reinterprets a mask as its symbol `A(z) = Σ a_α z^α`.
pub fn mask_symbol(mask: &Mask) -> LaurentPoly {
    LaurentPoly::from(mask.clone())
}

/// Autocorrelation `ǎ_α = Σ_β a_β a_{β-α}`; support is symmetric about 0.
pub fn autocorrelation(mask: &Mask) -> CoeffSeq {
    let Some((lo, hi)) = mask.support() else {
        return CoeffSeq::zero();
    };
    let width = hi - lo;
    let values = (-width..=width)
        .map(|alpha| {
            mask.iter()
                .map(|(beta, v)| v * mask.coeff(beta - alpha))
                .sum()
        })
        .collect();
    CoeffSeq::new(-width, values)
}

/// Transition matrix of the mask over the index window `[lo, hi]`:
/// entry `(α, β) = 2 ǎ_{2α-β}`.
///
/// The window must cover the autocorrelation support.
pub fn transition_matrix(mask: &Mask, lo: i64, hi: i64) -> Result<DMatrix<f64>> {
    let acorr = autocorrelation(mask);
    if let Some((alo, ahi)) = acorr.support() {
        if lo > alo || hi < ahi {
            return Err(Error::Dimension(format!(
                "index range [{lo}, {hi}] does not cover the autocorrelation support [{alo}, {ahi}]"
            )));
        }
    }
    let dim = (hi - lo + 1) as usize;
    Ok(DMatrix::from_fn(dim, dim, |r, c| {
        let alpha = lo + r as i64;
        let beta = lo + c as i64;
        2.0 * acorr.coeff(2 * alpha - beta)
    }))
}

/// Transition matrix over the full autocorrelation support.
pub fn transition_matrix_default(mask: &Mask) -> DMatrix<f64> {
    let acorr = autocorrelation(mask);
    let (lo, hi) = acorr.support().unwrap_or((0, 0));
    transition_matrix(mask, lo, hi).expect("full support always covers itself")
}

/// Dominant eigenpair by power iteration from the all-ones vector.
/// The eigenvector is normalized to unit max entry.
pub fn dominant_eigenpair(mat: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let dim = mat.nrows();
    let mut v = DVector::from_element(dim, 1.0);
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w = mat * &v;
        let norm = w.amax();
        if norm == 0.0 {
            return (0.0, w);
        }
        v = w / norm;
        lambda = norm;
    }
    // one Rayleigh refinement
    let mv = mat * &v;
    let denom = v.dot(&v);
    if denom > 0.0 {
        lambda = v.dot(&mv) / denom;
    }
    (lambda, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MU: f64 = 1.1;

    #[test]
    fn params_domain() {
        assert!(MaskParams::new(1, 0, 1.1).is_err());
        assert!(MaskParams::new(3, 0, 1.0).is_err());
        assert!(MaskParams::new(3, 0, 0.5).is_err());
        assert!(MaskParams::new(2, 0, 1.000001).is_ok());
    }

    #[test]
    fn level_one_mask_values() {
        // m = 1 has m^{-μ} = 1, so the entries are exact dyadics.
        let p = MaskParams::new(3, 1, MU).unwrap();
        let a = nonstationary_mask(&p);
        assert_eq!(a.values(), &[0.03125, 0.25, 0.4375, 0.25, 0.03125]);
        assert_eq!(a.support(), Some((0, 4)));
    }

    #[test]
    fn level_two_leading_entry() {
        let p = MaskParams::new(3, 2, MU).unwrap();
        let a = nonstationary_mask(&p);
        assert!((a.coeff(0) - 0.0452).abs() < 5e-5);
    }

    #[test]
    fn level_zero_mask() {
        let p = MaskParams::new(3, 0, MU).unwrap();
        let a = nonstationary_mask(&p);
        assert_eq!(a.values(), &[0.5, 0.5]);
        assert_eq!(a.support(), Some((0, 1)));
    }

    #[test]
    fn masks_sum_to_one_and_are_bell_shaped() {
        for n in 2..=5u32 {
            for m in 0..=10u32 {
                for &mu in &[1.05, 1.1, 2.0] {
                    let a = nonstationary_mask(&MaskParams::new(n, m, mu).unwrap());
                    assert!((a.sum() - 1.0).abs() < 1e-14, "n={n} m={m} mu={mu}");
                    if m > 0 {
                        assert_eq!(a.support(), Some((0, n as i64 + 1)));
                        // central symmetry, exact as computed
                        for alpha in 0..=(n as i64 + 1) {
                            assert_eq!(a.coeff(alpha), a.coeff(n as i64 + 1 - alpha));
                        }
                        // strictly increasing up to the middle
                        for alpha in 0..((n as i64 + 1) / 2) {
                            assert!(a.coeff(alpha) < a.coeff(alpha + 1), "n={n} m={m}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fundamental_mask_rows() {
        let a = fundamental_mask(3);
        let expected: Vec<f64> = [1.0, 4.0, 6.0, 4.0, 1.0].iter().map(|v| v / 16.0).collect();
        assert_eq!(a.values(), expected.as_slice());
        let a2 = fundamental_mask(2);
        let expected2: Vec<f64> = [1.0, 3.0, 3.0, 1.0].iter().map(|v| v / 8.0).collect();
        assert_eq!(a2.values(), expected2.as_slice());
        assert!((a.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symbol_factorization() {
        // A^{(n,m)} = (1+z)/2 · A^{(n-1,m)} for m > 0
        let half = LaurentPoly::new(0, vec![0.5, 0.5]);
        for n in 3..=5u32 {
            for m in 1..=6u32 {
                let big = mask_symbol(&nonstationary_mask(&MaskParams::new(n, m, MU).unwrap()));
                let small =
                    mask_symbol(&nonstationary_mask(&MaskParams::new(n - 1, m, MU).unwrap()));
                let prod = half.mul(&small);
                assert!(
                    prod.coeffs().max_abs_diff(big.coeffs()) < 1e-14,
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn symbol_of_level_zero_and_fundamental() {
        let p = MaskParams::new(3, 0, MU).unwrap();
        let sym = mask_symbol(&nonstationary_mask(&p));
        assert_eq!(sym.coeffs().values(), &[0.5, 0.5]);

        let half = LaurentPoly::new(0, vec![0.5, 0.5]);
        let pow4 = half.mul(&half).mul(&half).mul(&half);
        let fsym = mask_symbol(&fundamental_mask(3));
        assert!(fsym.coeffs().max_abs_diff(pow4.coeffs()) < 1e-16);

        assert!(mask_symbol(&CoeffSeq::zero()).is_zero());
    }

    #[test]
    fn symbol_vanishes_at_pi() {
        let p = MaskParams::new(3, 1, MU).unwrap();
        let sym = mask_symbol(&nonstationary_mask(&p));
        assert!(sym.eval_unit_circle(0.0).re - 1.0 < 1e-14);
        assert!(sym.eval_unit_circle(std::f64::consts::PI).norm() < 1e-15);
    }

    #[test]
    fn symbol_zeros_have_negative_real_part_n3() {
        // A^{(3,m)} = c (1+z)² (z² + 2(2^{1+ε}-1) z + 1): the quadratic factor
        // has negative-real-part roots iff its linear coefficient is positive,
        // which holds for every level since 2^{1+ε} > 2.
        for m in 1..=12u32 {
            let eps = (m as f64).powf(-MU);
            let lin = 2.0 * (2f64.powf(1.0 + eps) - 1.0);
            assert!(lin > 0.0);
            // roots: (-lin ± sqrt(lin²-4))/2, product 1 — both negative real part
            let disc = lin * lin - 4.0;
            if disc >= 0.0 {
                let r1 = (-lin + disc.sqrt()) / 2.0;
                let r2 = (-lin - disc.sqrt()) / 2.0;
                assert!(r1 < 0.0 && r2 < 0.0);
            }
        }
    }

    #[test]
    fn masks_converge_to_fundamental() {
        let f = fundamental_mask(3);
        let mut last = f64::INFINITY;
        let mut partial = 0.0;
        let mut partials = Vec::new();
        for m in 1..=40u32 {
            let a = nonstationary_mask(&MaskParams::new(3, m, MU).unwrap());
            let dist = a.max_abs_diff(&f);
            assert!(dist < last, "distance must strictly decrease at m={m}");
            last = dist;
            partial += dist;
            partials.push(partial);
        }
        assert!(last < 2e-2);
        // sublinear growth of the partial sums: increments shrink
        let inc_head = partials[1] - partials[0];
        let inc_tail = partials[39] - partials[38];
        assert!(inc_tail < inc_head / 4.0);
    }

    #[test]
    fn autocorrelation_cases() {
        let haar = CoeffSeq::new(0, vec![0.5, 0.5]);
        let ac = autocorrelation(&haar);
        assert_eq!(ac.support(), Some((-1, 1)));
        assert_eq!(ac.values(), &[0.25, 0.5, 0.25]);

        let a = nonstationary_mask(&MaskParams::new(3, 2, MU).unwrap());
        let ac = autocorrelation(&a);
        let sq_sum: f64 = a.values().iter().map(|v| v * v).sum();
        assert!((ac.coeff(0) - sq_sum).abs() < 1e-16);
        for (idx, v) in ac.iter() {
            assert!((v - ac.coeff(-idx)).abs() < 1e-16);
        }
    }

    #[test]
    fn transition_matrix_haar_row() {
        let haar = CoeffSeq::new(0, vec![0.5, 0.5]);
        let t = transition_matrix(&haar, -1, 1).unwrap();
        // row α = 0 over β ∈ [-1, 1] is 2·ǎ_{-β}
        assert_eq!(t[(1, 0)], 0.5);
        assert_eq!(t[(1, 1)], 1.0);
        assert_eq!(t[(1, 2)], 0.5);
        assert!(transition_matrix(&haar, 0, 1).is_err());
    }

    #[test]
    fn transition_matrix_spectral_properties() {
        let f = fundamental_mask(3);
        let t = transition_matrix_default(&f);
        let (lambda, v) = dominant_eigenpair(&t);
        assert!((lambda - 1.0).abs() < 1e-10);
        // the eigenvector for eigenvalue 1 is positive strictly inside its
        // support window (the window endpoints carry exact zeros)
        assert!(v.iter().all(|&x| x >= 0.0));
        for i in 1..v.len() - 1 {
            assert!(v[i] > 0.0, "interior entry {i}");
        }
    }
}
