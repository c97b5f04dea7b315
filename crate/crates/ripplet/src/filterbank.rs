//! Multilevel analysis and synthesis of finite discrete signals.
//!
//! Signals are compactly supported on the integers with zero extension;
//! index ranges grow freely from level to level, which keeps the round
//! trip exact with no boundary treatment. The step from level `m+1` down
//! to `m` uses the quartet of level `m`.

use crate::biorthogonal::{bezout_solve, FilterQuartet, WaveletConvention};
use crate::error::{Error, Result};
use crate::laurent::CoeffSeq;
use crate::masks::{fundamental_mask, nonstationary_mask, MaskParams};

/// A finite signal with an explicit start index.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub start: i64,
    pub samples: Vec<f64>,
}

impl Signal {
    pub fn new(start: i64, samples: Vec<f64>) -> Self {
        Signal { start, samples }
    }

    pub fn zeros(start: i64, len: usize) -> Self {
        Signal {
            start,
            samples: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample at an absolute index, zero outside the stored range.
    pub fn value(&self, idx: i64) -> f64 {
        let rel = idx - self.start;
        if rel < 0 || rel >= self.samples.len() as i64 {
            0.0
        } else {
            self.samples[rel as usize]
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }

    /// Copy with exact-zero ends removed; indices of the surviving samples
    /// are preserved.
    pub fn trimmed(&self) -> Signal {
        let first = self.samples.iter().position(|&v| v != 0.0);
        let last = self.samples.iter().rposition(|&v| v != 0.0);
        match (first, last) {
            (Some(f), Some(l)) => Signal::new(self.start + f as i64, self.samples[f..=l].to_vec()),
            _ => Signal::new(self.start, Vec::new()),
        }
    }

    /// Largest absolute difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        let lo = self.start.min(other.start);
        let hi =
            (self.start + self.samples.len() as i64).max(other.start + other.samples.len() as i64);
        (lo..hi).fold(0.0f64, |acc, i| {
            acc.max((self.value(i) - other.value(i)).abs())
        })
    }
}

/// Which mask sequence drives the filter bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// Level-dependent masks of the ripplet family.
    Nonstationary,
    /// The fundamental (B-spline) mask at every level.
    Stationary,
}

/// Provider of per-level filter quartets for one `(n, μ)` family.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterFamily {
    pub n: u32,
    pub mu: f64,
    pub kind: FamilyKind,
    pub convention: WaveletConvention,
    /// Support length of the dual mask solved at levels `m ≥ 1`
    /// (level 0 of the nonstationary family always uses the two-tap dual).
    pub dual_support_len: usize,
}

impl FilterFamily {
    /// Nonstationary family with the default dual support (`[0, 14]`).
    pub fn nonstationary(n: u32, mu: f64) -> Result<Self> {
        MaskParams::new(n, 0, mu)?;
        Ok(FilterFamily {
            n,
            mu,
            kind: FamilyKind::Nonstationary,
            convention: WaveletConvention::default(),
            dual_support_len: 14,
        })
    }

    /// Stationary family built on the fundamental mask of order `n`.
    pub fn stationary(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        Ok(FilterFamily {
            n,
            mu: f64::INFINITY,
            kind: FamilyKind::Stationary,
            convention: WaveletConvention::default(),
            dual_support_len: 14,
        })
    }

    /// Lowpass mask at one level.
    pub fn mask(&self, m: u32) -> CoeffSeq {
        match self.kind {
            FamilyKind::Nonstationary => nonstationary_mask(&MaskParams {
                n: self.n,
                m,
                mu: self.mu,
            }),
            FamilyKind::Stationary => fundamental_mask(self.n),
        }
    }

    /// Filter quartet at one level.
    pub fn quartet(&self, m: u32) -> Result<FilterQuartet> {
        let a = self.mask(m);
        let len = match (self.kind, m) {
            (FamilyKind::Nonstationary, 0) => 1,
            _ => self.dual_support_len,
        };
        let dual = bezout_solve(&a, len, true)?;
        FilterQuartet::new(a, dual, m, self.convention)
    }
}

/// One analysis step: lowpass and highpass branches, downsampled by two.
///
/// `λ_α = c_a Σ_β ã_{β-2α} x_β` and `ζ_α = c_a Σ_β q̃_{β-2α} x_β`, with
/// output ranges covering every index where a nonzero result can occur.
pub fn analyze_level(x: &Signal, quartet: &FilterQuartet) -> (Signal, Signal) {
    let gain = quartet.convention.analysis_gain;
    (
        downsampled_correlation(x, &quartet.a_dual, gain),
        downsampled_correlation(x, &quartet.q_dual, gain),
    )
}

fn downsampled_correlation(x: &Signal, filter: &CoeffSeq, gain: f64) -> Signal {
    if x.is_empty() || filter.is_zero() {
        return Signal::new(0, Vec::new());
    }
    let (flo, fhi) = filter.support().unwrap();
    let x_hi = x.start + x.len() as i64 - 1;
    // β - 2α ∈ [flo, fhi] for some β in the signal range
    let lo = div_ceil(x.start - fhi, 2);
    let hi = div_floor(x_hi - flo, 2);
    if lo > hi {
        return Signal::new(0, Vec::new());
    }
    let samples = (lo..=hi)
        .map(|alpha| {
            gain * filter
                .iter()
                .map(|(j, f)| f * x.value(j + 2 * alpha))
                .sum::<f64>()
        })
        .collect();
    Signal::new(lo, samples)
}

/// One synthesis step: `x_α = c_s (Σ_β a_{α-2β} λ_β + Σ_β q_{α-2β} ζ_β)`.
pub fn synthesize_level(approx: &Signal, detail: &Signal, quartet: &FilterQuartet) -> Signal {
    let gain = quartet.convention.synthesis_gain;
    let up_a = upsampled_convolution(approx, &quartet.a);
    let up_q = upsampled_convolution(detail, &quartet.q);
    let mut out = add_signals(&up_a, &up_q);
    for v in &mut out.samples {
        *v *= gain;
    }
    out
}

fn upsampled_convolution(c: &Signal, filter: &CoeffSeq) -> Signal {
    if c.is_empty() || filter.is_zero() {
        return Signal::new(0, Vec::new());
    }
    let (flo, fhi) = filter.support().unwrap();
    let lo = flo + 2 * c.start;
    let hi = fhi + 2 * (c.start + c.len() as i64 - 1);
    let mut samples = vec![0.0; (hi - lo + 1) as usize];
    for (b, &cv) in c.samples.iter().enumerate() {
        if cv == 0.0 {
            continue;
        }
        let beta = c.start + b as i64;
        for (j, f) in filter.iter() {
            samples[(j + 2 * beta - lo) as usize] += f * cv;
        }
    }
    Signal::new(lo, samples)
}

fn add_signals(a: &Signal, b: &Signal) -> Signal {
    if a.is_empty() {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    let lo = a.start.min(b.start);
    let hi = (a.start + a.len() as i64).max(b.start + b.len() as i64);
    let samples = (lo..hi).map(|i| a.value(i) + b.value(i)).collect();
    Signal::new(lo, samples)
}

fn div_ceil(a: i64, b: i64) -> i64 {
    (a + b - 1).div_euclid(b)
}

fn div_floor(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

/// One detail band with its level tag.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailBand {
    pub level: u32,
    pub signal: Signal,
}

/// Approximation at the coarsest level plus the detail ladder, with the
/// filter family that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub base_level: u32,
    pub top_level: u32,
    pub approx: Signal,
    pub details: Vec<DetailBand>,
    pub family: FilterFamily,
}

impl Decomposition {
    pub fn level_count(&self) -> u32 {
        self.top_level - self.base_level
    }

    /// Number of coefficients with `|c| > tau` across the approximation and
    /// all detail bands.
    pub fn count_above(&self, tau: f64) -> usize {
        let count = |s: &Signal| s.samples.iter().filter(|v| v.abs() > tau).count();
        count(&self.approx) + self.details.iter().map(|d| count(&d.signal)).sum::<usize>()
    }
}

/// Full analysis from level `top_level` down to `base_level`.
///
/// The input is taken as the coefficient sequence of level `top_level`;
/// the step onto level `m` uses the quartet of level `m`, so the details
/// come out tagged `base_level..top_level`.
pub fn analyze(
    x: &Signal,
    base_level: u32,
    top_level: u32,
    family: &FilterFamily,
) -> Result<Decomposition> {
    if top_level <= base_level {
        return Err(Error::InvalidParameter(format!(
            "need top_level > base_level, got {top_level} <= {base_level}"
        )));
    }
    let mut approx = x.clone();
    let mut details = Vec::new();
    for m in (base_level..top_level).rev() {
        let quartet = family.quartet(m)?;
        let (next, detail) = analyze_level(&approx, &quartet);
        details.push(DetailBand {
            level: m,
            signal: detail,
        });
        approx = next;
    }
    details.reverse();
    Ok(Decomposition {
        base_level,
        top_level,
        approx,
        details,
        family: family.clone(),
    })
}

/// Inverse of [`analyze`], exact up to filter rounding.
pub fn synthesize(decomposition: &Decomposition) -> Result<Signal> {
    let mut approx = decomposition.approx.clone();
    for band in &decomposition.details {
        let quartet = decomposition.family.quartet(band.level)?;
        approx = synthesize_level(&approx, &band.signal, &quartet);
    }
    Ok(approx)
}

/// The bundled spike test signal: a unit impulse with two `±0.3` side
/// samples at the center of a length-64 zero background.
pub fn reference_spike() -> Signal {
    let mut samples = vec![0.0; 64];
    samples[30] = 0.3;
    samples[31] = 1.0;
    samples[32] = -0.3;
    Signal::new(0, samples)
}

/// Outcome of the spike compression comparison.
#[derive(Debug, Clone)]
pub struct SpikeReport {
    pub nonzero_nonstationary: usize,
    pub nonzero_stationary: usize,
    pub nonstationary: Decomposition,
    pub stationary: Decomposition,
}

/// Decomposes `spike` over both the nonstationary `(n=3, μ)` family and
/// the stationary fundamental family and counts coefficients above `tau`.
pub fn spike_experiment(spike: &Signal, levels: u32, mu: f64, tau: f64) -> Result<SpikeReport> {
    let ns_family = FilterFamily::nonstationary(3, mu)?;
    let st_family = FilterFamily::stationary(3)?;
    let nonstationary = analyze(spike, 0, levels, &ns_family)?;
    let stationary = analyze(spike, 0, levels, &st_family)?;
    Ok(SpikeReport {
        nonzero_nonstationary: nonstationary.count_above(tau),
        nonzero_stationary: stationary.count_above(tau),
        nonstationary,
        stationary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn haar_quartet() -> FilterQuartet {
        FilterFamily::nonstationary(3, 1.1)
            .unwrap()
            .quartet(0)
            .unwrap()
    }

    #[test]
    fn haar_level_cases() {
        let q = haar_quartet();
        let constant = Signal::new(0, vec![1.0, 1.0]);
        let (lam, zet) = analyze_level(&constant, &q);
        assert_eq!(lam.trimmed().samples, vec![1.0]);
        assert!(zet.max_abs() < 1e-15);

        let alternating = Signal::new(0, vec![1.0, -1.0]);
        let (lam, zet) = analyze_level(&alternating, &q);
        assert!(lam.max_abs() < 1e-15);
        assert_eq!(zet.trimmed().samples.len(), 1);
        assert_eq!(zet.max_abs(), 1.0);
    }

    #[test]
    fn haar_roundtrip_short() {
        let q = haar_quartet();
        let x = Signal::new(0, vec![1.0, 2.0, 3.0, 4.0]);
        let (lam, zet) = analyze_level(&x, &q);
        let back = synthesize_level(&lam, &zet, &q);
        assert!(back.max_abs_diff(&x) < 1e-15);
    }

    #[test]
    fn zero_in_zero_out() {
        let q = haar_quartet();
        let lam = Signal::zeros(0, 4);
        let zet = Signal::zeros(0, 4);
        assert!(synthesize_level(&lam, &zet, &q).max_abs() == 0.0);
    }

    #[test]
    fn analysis_output_ranges() {
        // output supports follow the convolution index arithmetic exactly
        let family = FilterFamily::nonstationary(3, 1.1).unwrap();
        let q = family.quartet(2).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        let x = Signal::new(5, (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let (lam, _) = analyze_level(&x, &q);
        let (flo, fhi) = q.a_dual.support().unwrap();
        let expected_lo = ((x.start - fhi) as f64 / 2.0).ceil() as i64;
        let expected_hi = ((x.start + x.len() as i64 - 1 - flo) as f64 / 2.0).floor() as i64;
        assert_eq!(lam.start, expected_lo);
        assert_eq!(lam.start + lam.len() as i64 - 1, expected_hi);
    }

    #[test]
    fn single_level_roundtrip_random() {
        let family = FilterFamily::nonstationary(3, 1.1).unwrap();
        let q = family.quartet(1).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let x = Signal::new(0, (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let (lam, zet) = analyze_level(&x, &q);
        let back = synthesize_level(&lam, &zet, &q);
        assert!(back.max_abs_diff(&x) < 1e-10);
    }

    #[test]
    fn multilevel_structure_and_annihilation() {
        let family = FilterFamily::nonstationary(3, 1.1).unwrap();
        let x = Signal::new(0, vec![1.0; 256]);
        let d = analyze(&x, 0, 3, &family).unwrap();
        assert_eq!(d.details.len(), 3);
        assert_eq!(d.level_count(), 3);
        // constants die in every detail band away from the zero-extension
        // boundary ramps (the highpass sums to zero)
        for band in &d.details {
            let s = &band.signal;
            let margin = 14;
            assert!(s.len() as i64 > 2 * margin, "level {}", band.level);
            for i in s.start + margin..s.start + s.len() as i64 - margin {
                assert!(s.value(i).abs() < 1e-12, "level {} idx {i}", band.level);
            }
        }
    }

    #[test]
    fn ramp_details_vanish_in_the_interior() {
        let family = FilterFamily::nonstationary(3, 1.1).unwrap();
        let x = Signal::new(0, (0..256).map(|i| i as f64).collect());
        let d = analyze(&x, 1, 3, &family).unwrap();
        for band in &d.details {
            let s = &band.signal;
            let margin = 16;
            for i in s.start + margin..s.start + s.len() as i64 - margin {
                assert!(s.value(i).abs() < 1e-10, "level {} idx {i}", band.level);
            }
        }
    }

    #[test]
    fn multilevel_roundtrip_families() {
        let mut rng = StdRng::seed_from_u64(17);
        let families = [
            FilterFamily::nonstationary(3, 1.1).unwrap(),
            FilterFamily::nonstationary(3, 2.0).unwrap(),
            FilterFamily::stationary(3).unwrap(),
        ];
        for family in &families {
            for levels in 1..=4u32 {
                let len = 16 << (levels - 1).min(3);
                let x = Signal::new(0, (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect());
                let d = analyze(&x, 0, levels, family).unwrap();
                let back = synthesize(&d).unwrap();
                let err = back.max_abs_diff(&x);
                assert!(err < 1e-10 * x.max_abs(), "levels={levels}: {err}");
            }
        }
    }

    #[test]
    fn impulse_roundtrip_and_energy() {
        let family = FilterFamily::nonstationary(3, 1.1).unwrap();
        let x = Signal::new(7, vec![1.0]);
        let d = analyze(&x, 0, 3, &family).unwrap();
        let back = synthesize(&d).unwrap();
        assert!(back.max_abs_diff(&x) < 1e-10);
        assert!((back.trimmed().energy() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn linearity_of_analysis() {
        let family = FilterFamily::nonstationary(3, 1.1).unwrap();
        let mut rng = StdRng::seed_from_u64(23);
        let x = Signal::new(0, (0..48).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let y = Signal::new(0, (0..48).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let sum = add_signals(&x, &y);
        let dx = analyze(&x, 0, 2, &family).unwrap();
        let dy = analyze(&y, 0, 2, &family).unwrap();
        let ds = analyze(&sum, 0, 2, &family).unwrap();
        assert!(ds.approx.max_abs_diff(&add_signals(&dx.approx, &dy.approx)) < 1e-12);
        for i in 0..2 {
            let combined = add_signals(&dx.details[i].signal, &dy.details[i].signal);
            assert!(ds.details[i].signal.max_abs_diff(&combined) < 1e-12);
        }
    }

    #[test]
    fn empty_signal_decomposes_to_nothing() {
        let family = FilterFamily::nonstationary(3, 1.1).unwrap();
        let d = analyze(&Signal::new(0, Vec::new()), 0, 3, &family).unwrap();
        assert!(d.approx.is_empty());
        assert!(d.details.iter().all(|b| b.signal.is_empty()));
        assert_eq!(d.count_above(0.0), 0);
    }

    #[test]
    fn spike_compression_property() {
        let report = spike_experiment(&reference_spike(), 3, 1.1, 1e-8).unwrap();
        assert!(report.nonzero_nonstationary <= report.nonzero_stationary);
        assert!(report.nonzero_nonstationary > 0);
        // a threshold above everything counts nothing
        let all = spike_experiment(&reference_spike(), 3, 1.1, 1e9).unwrap();
        assert_eq!(all.nonzero_nonstationary, 0);
        assert_eq!(all.nonzero_stationary, 0);
    }

    #[test]
    fn compression_count_monotone_in_threshold() {
        let report = spike_experiment(&reference_spike(), 3, 1.1, 0.0).unwrap();
        let d = &report.nonstationary;
        let mut last = usize::MAX;
        for tau in [1e-12, 1e-8, 1e-4, 1e-2, 1.0] {
            let c = d.count_above(tau);
            assert!(c <= last);
            last = c;
        }
    }
}
