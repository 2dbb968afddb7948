//! Closed-form Laguerre-Gaussian spectra of (displaced) Gaussian beams
//! behind a spiral phase plate.
//!
//! All decompositions are taken in the waist plane z = 0 against the
//! normalized LG basis of a fixed waist w₀; propagation is then a pure
//! per-mode phase (see [`crate::paraxial`]). Coefficients follow from the
//! generalized Fourier integrals; the quadrature in [`crate::oracle`] is
//! the normative definition every closed form here must reproduce.
//!
//! On-axis Gaussian through a charge-q plate:
//!
//! ```text
//! C_pl = C_ql · (|l|/2) Γ(|l|/2 + p) / √(p! (p+|l|)!)        (l ≠ 0)
//! C_p0 = C_q0 · δ_{p0}
//! ```
//!
//! with the azimuthal factor C_ql = e^{i(q-l)π} sin((q-l)π)/((q-l)π).
//! Displaced Gaussian (displacement r₀, azimuth φ₀):
//!
//! ```text
//! c_pl = e^{-r₀²/(2w₀²)} (r₀²/(2w₀²))^{p+|l|/2} (-1)^p e^{-ilφ₀} / √(p!(p+|l|)!),
//! ```
//!
//! a two-mode coherent state in disguise. The plate couples modes through
//!
//! ```text
//! C_plhk = C_{q+l,k} √(p!h!/((p+|l|)!(h+|k|)!)) I_{p,h}(l,k)
//! ```
//!
//! with the kernel from [`crate::specfun::coupling_kernel`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::paraxial::{ModeIndex, SppSpec};
use crate::specfun::{bessel_i, coupling_kernel, ln_factorial, ln_gamma, sinc_phase};
use crate::Complex;

/// Cutoffs for building truncated decompositions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Largest radial index kept.
    pub p_max: u32,
    /// Largest |azimuthal index| kept.
    pub l_max: u32,
    /// Entries with |amplitude| below this are not stored.
    pub series_tol: f64,
    /// Harmonic cutoff used when a plate expansion is involved.
    pub k_max: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            p_max: 40,
            l_max: 40,
            series_tol: 1e-12,
            k_max: 40,
        }
    }
}

/// Sparse LG spectrum at z = 0 for a fixed basis waist.
///
/// `captured_power` records Σ|C|² of the stored entries; the deficit from
/// unity is the truncation loss the caller should watch. For a plate
/// spectrum the azimuthal tail falls off only like 1/(q−l)² and the radial
/// tail like 1/p, so percent-level deficits at the default cutoffs are
/// expected physics, not a bug.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    entries: BTreeMap<ModeIndex, Complex>,
    pub w0: f64,
    /// Plate charge that produced this table; 0 when no plate was involved.
    pub q: f64,
    pub truncation: TruncationPolicy,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    w0: f64,
    q: f64,
    entries: Vec<TableEntry>,
    captured_power: f64,
    truncation: TruncationPolicy,
}

#[derive(Serialize, Deserialize)]
struct TableEntry {
    p: u32,
    l: i32,
    re: f64,
    im: f64,
}

impl SpectralDecomposition {
    pub fn empty(w0: f64) -> Self {
        assert!(w0 > 0.0, "waist must be positive");
        Self {
            entries: BTreeMap::new(),
            w0,
            q: 0.0,
            truncation: TruncationPolicy::default(),
        }
    }

    pub fn amplitude(&self, idx: ModeIndex) -> Complex {
        self.entries
            .get(&idx)
            .copied()
            .unwrap_or(Complex::new(0.0, 0.0))
    }

    pub fn accumulate(&mut self, idx: ModeIndex, amp: Complex) {
        if amp.norm_sqr() == 0.0 {
            return;
        }
        *self.entries.entry(idx).or_insert(Complex::new(0.0, 0.0)) += amp;
    }

    pub fn insert(&mut self, idx: ModeIndex, amp: Complex) {
        self.entries.insert(idx, amp);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeIndex, &Complex)> {
        self.entries.iter()
    }

    /// Σ|C|² over the stored entries.
    pub fn captured_power(&self) -> f64 {
        self.entries.values().map(|c| c.norm_sqr()).sum()
    }

    /// Rotate the azimuthal origin: C_pl ← C_pl e^{-ilδ}.
    ///
    /// This is the exact covariance of the basis under rotation by δ.
    pub fn rotate(&mut self, delta: f64) {
        for (idx, amp) in self.entries.iter_mut() {
            *amp *= Complex::from_polar(1.0, -(idx.l as f64) * delta);
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        let entries = self
            .entries
            .iter()
            .map(|(idx, c)| TableEntry {
                p: idx.p,
                l: idx.l,
                re: c.re,
                im: c.im,
            })
            .collect();
        Ok(serde_json::to_string_pretty(&TableJson {
            w0: self.w0,
            q: self.q,
            entries,
            captured_power: self.captured_power(),
            truncation: self.truncation,
        })?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: TableJson = serde_json::from_str(text)?;
        let mut out = SpectralDecomposition::empty(raw.w0);
        out.q = raw.q;
        out.truncation = raw.truncation;
        for e in raw.entries {
            out.insert(ModeIndex::new(e.p, e.l), Complex::new(e.re, e.im));
        }
        Ok(out)
    }

    /// CSV mirror of the JSON table, columns p, l, re, im.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("p,l,re,im\n");
        for (idx, c) in self.entries.iter() {
            out.push_str(&format!("{},{},{},{}\n", idx.p, idx.l, c.re, c.im));
        }
        out
    }
}

/// Radial part of the plate coefficient: (|l|/2) Γ(|l|/2 + p) / √(p!(p+|l|)!)
/// for l ≠ 0, δ_{p0} for l = 0.
fn plate_radial_coeff(p: u32, l: i32) -> f64 {
    let al = l.unsigned_abs();
    if al == 0 {
        return if p == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * al as f64;
    (half.ln() + ln_gamma(half + p as f64)
        - 0.5 * (ln_factorial(p) + ln_factorial(p + al)))
    .exp()
}

/// LG spectrum of the on-axis unit Gaussian transmitted by the plate.
///
/// An integer charge produces exact zeros off the l = q column; the
/// dislocation azimuth enters as the exact phase e^{i(q-l)θ₀}.
pub fn gaussian_spp_coeffs(plate: &SppSpec, w0: f64, trunc: &TruncationPolicy) -> SpectralDecomposition {
    let mut out = SpectralDecomposition::empty(w0);
    out.q = plate.q;
    out.truncation = *trunc;
    let l_span = trunc.l_max as i32;
    for l in -l_span..=l_span {
        let azim = sinc_phase(plate.q, l as f64)
            * Complex::from_polar(1.0, (plate.q - l as f64) * plate.dislocation_angle);
        if azim.norm_sqr() == 0.0 {
            continue;
        }
        for p in 0..=trunc.p_max {
            let c = azim * plate_radial_coeff(p, l);
            if c.norm() >= trunc.series_tol {
                out.insert(ModeIndex::new(p, l), c);
            }
        }
    }
    out
}

/// LG spectrum of a Gaussian displaced to (r₀, φ₀), no plate.
pub fn displaced_gaussian_coeffs(
    r0: f64,
    phi0: f64,
    w0: f64,
    trunc: &TruncationPolicy,
) -> SpectralDecomposition {
    assert!(r0 >= 0.0, "displacement must be nonnegative");
    let mut out = SpectralDecomposition::empty(w0);
    out.truncation = *trunc;
    if r0 == 0.0 {
        out.insert(ModeIndex::new(0, 0), Complex::new(1.0, 0.0));
        return out;
    }
    let t = 0.5 * (r0 / w0).powi(2); // r0²/(2w0²)
    let l_span = trunc.l_max as i32;
    for l in -l_span..=l_span {
        let al = l.unsigned_abs();
        let phase = Complex::from_polar(1.0, -(l as f64) * phi0);
        for p in 0..=trunc.p_max {
            let ln_mag = -t + (p as f64 + 0.5 * al as f64) * t.ln()
                - 0.5 * (ln_factorial(p) + ln_factorial(p + al));
            let mag = ln_mag.exp();
            if mag < trunc.series_tol {
                continue;
            }
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            out.insert(ModeIndex::new(p, l), phase * (sign * mag));
        }
    }
    out
}

/// Azimuthal harmonics of the displaced Gaussian at fixed radius r:
///
/// ```text
/// h_l(r) = √(2/(πw₀²)) e^{-(r²+r₀²)/w₀²} I_l(2rr₀/w₀²) e^{-ilφ₀},
/// ```
///
/// returned for l = -l_max..=l_max in order. Summing h_l e^{ilφ}
/// reconstructs the displaced Gaussian pointwise.
pub fn bessel_azimuthal_spectrum(
    r: f64,
    r0: f64,
    phi0: f64,
    w0: f64,
    l_max: u32,
) -> Vec<Complex> {
    assert!(r >= 0.0 && r0 >= 0.0);
    let norm = (2.0 / (std::f64::consts::PI * w0 * w0)).sqrt();
    let envelope = (-(r * r + r0 * r0) / (w0 * w0)).exp();
    let x = 2.0 * r * r0 / (w0 * w0);
    let span = l_max as i32;
    (-span..=span)
        .map(|l| {
            Complex::from_polar(1.0, -(l as f64) * phi0) * (norm * envelope * bessel_i(l, x))
        })
        .collect()
}

/// Mode-to-mode coupling amplitude of the plate,
/// C_plhk = ⟨u_hk, e^{iqφ} u_pl⟩.
pub fn spp_coupling_coeff(plate: &SppSpec, from: ModeIndex, to: ModeIndex) -> Complex {
    let azim = sinc_phase(plate.q + from.l as f64, to.l as f64)
        * Complex::from_polar(
            1.0,
            (plate.q + from.l as f64 - to.l as f64) * plate.dislocation_angle,
        );
    if azim.norm_sqr() == 0.0 {
        return Complex::new(0.0, 0.0);
    }
    let norm = (0.5
        * (ln_factorial(from.p) + ln_factorial(to.p)
            - ln_factorial(from.p + from.l.unsigned_abs())
            - ln_factorial(to.p + to.l.unsigned_abs())))
    .exp();
    azim * norm * coupling_kernel(from.p, to.p, from.l, to.l)
}

/// Displaced Gaussian through the plate: D_hk = Σ_{p,l} c_pl C_plhk over the
/// truncated input set, evaluated independently per output index.
pub fn displaced_spp_coeffs(
    plate: &SppSpec,
    r0: f64,
    phi0: f64,
    w0: f64,
    trunc: &TruncationPolicy,
) -> SpectralDecomposition {
    let input = displaced_gaussian_coeffs(r0, phi0, w0, trunc);
    let inputs: Vec<(ModeIndex, Complex)> = input.iter().map(|(i, c)| (*i, *c)).collect();

    let l_span = trunc.l_max as i32;
    let targets: Vec<ModeIndex> = (0..=trunc.p_max)
        .flat_map(|h| (-l_span..=l_span).map(move |k| ModeIndex::new(h, k)))
        .collect();

    let computed: Vec<(ModeIndex, Complex)> = targets
        .par_iter()
        .map(|&to| {
            let mut acc = Complex::new(0.0, 0.0);
            for &(from, c) in &inputs {
                let w = spp_coupling_coeff(plate, from, to);
                if w.norm_sqr() > 0.0 {
                    acc += c * w;
                }
            }
            (to, acc)
        })
        .collect();

    let mut out = SpectralDecomposition::empty(w0);
    out.q = plate.q;
    out.truncation = *trunc;
    for (idx, c) in computed {
        if c.norm() >= trunc.series_tol {
            out.insert(idx, c);
        }
    }
    out
}
