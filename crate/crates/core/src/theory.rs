//! Graph-side moments of the sample counters and the resulting RSE and
//! relative bias of Ĉ, evaluated from exact structural counts.
//!
//! Each moment is reported both in its full form and in the small-`p` form
//! used by the RSE and bias expressions. The small-`p` forms of `var(Λ_g)`
//! and `cov(Δ_g, Λ_g)` drop whole terms, whose magnitudes are reported
//! separately so poor approximations are visible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::RseEstimate;
use crate::nes::validate_p;
use crate::oracle::ExactStats;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub exact: f64,
    pub approx: f64,
    /// Terms present in `exact` that `approx` omits entirely (as opposed to
    /// `1 - p ≈ 1` simplifications).
    pub dropped: f64,
}

/// `var(Δ_g) = ⅓(Δ(p² − ⅓p⁴) + 8Φ(⅖p³ − ⅓p⁴))`, approximated by
/// `Δp²/3 + (16/15)Φp³`.
pub fn var_delta_g(s: &ExactStats, p: f64) -> Moment {
    let (d, phi) = (s.delta as f64, s.phi as f64);
    let (p2, p3, p4) = (p * p, p * p * p, p * p * p * p);
    Moment {
        exact: (d * (p2 - p4 / 3.0) + 8.0 * phi * (0.4 * p3 - p4 / 3.0)) / 3.0,
        approx: d * p2 / 3.0 + 16.0 / 15.0 * phi * p3,
        dropped: 0.0,
    }
}

/// `var(Λ_g) = Λ(p − p²) + ⅔Ψ(p − p²)`, approximated by `⅔Ψp`.
pub fn var_lambda_g(s: &ExactStats, p: f64) -> Moment {
    let (l, psi) = (s.lambda as f64, s.psi as f64);
    let q = p - p * p;
    Moment {
        exact: l * q + 2.0 / 3.0 * psi * q,
        approx: 2.0 / 3.0 * psi * p,
        dropped: l * q,
    }
}

/// `cov(Δ_g, Λ_g) = 2Δ(p² − p³) + (5/12)Ω′(p² − p³)`, approximated by
/// `(5/12)Ω′p²`.
pub fn cov_delta_lambda(s: &ExactStats, p: f64) -> Moment {
    let (d, om) = (s.delta as f64, s.omega_prime as f64);
    let q = p * p - p * p * p;
    Moment {
        exact: 2.0 * d * q + 5.0 / 12.0 * om * q,
        approx: 5.0 / 12.0 * om * p * p,
        dropped: 2.0 * d * q,
    }
}

fn require_structure(s: &ExactStats) -> Result<()> {
    if s.delta == 0 || s.lambda == 0 {
        return Err(Error::InvalidSpec(
            "RSE and bias of Ĉ need Δ > 0 and Λ > 0".into(),
        ));
    }
    Ok(())
}

/// Squared relative error of Ĉ from the small-`p` moments:
/// `3/(Δp²) + 48Φp³/(5Δ²p⁴) + 2Ψp/(3Λ²p²) − 5Ω′p²/(2ΔΛp³)`.
pub fn rse_theory_bracket(s: &ExactStats, p: f64) -> Result<f64> {
    require_structure(s)?;
    validate_p(p)?;
    let (d, l) = (s.delta as f64, s.lambda as f64);
    let (phi, psi, om) = (s.phi as f64, s.psi as f64, s.omega_prime as f64);
    let (p2, p3, p4) = (p * p, p * p * p, p * p * p * p);
    Ok(
        3.0 / (d * p2) + 48.0 * phi * p3 / (5.0 * d * d * p4) + 2.0 * psi * p / (3.0 * l * l * p2)
            - 5.0 * om * p2 / (2.0 * d * l * p3),
    )
}

/// RSE of Ĉ predicted from the graph; a negative bracket falls back to
/// `sqrt(3/(Δp²))` and is flagged.
pub fn rse_theory(s: &ExactStats, p: f64) -> Result<RseEstimate> {
    let bracket = rse_theory_bracket(s, p)?;
    if bracket >= 0.0 {
        Ok(RseEstimate {
            value: bracket.sqrt(),
            fallback: false,
        })
    } else {
        Ok(RseEstimate {
            value: (3.0 / (s.delta as f64 * p * p)).sqrt(),
            fallback: true,
        })
    }
}

/// `RB ≈ (1/p)(2Ψ/(3Λ²) − 5Ω′/(4ΔΛ))`.
pub fn rb_theory(s: &ExactStats, p: f64) -> Result<f64> {
    require_structure(s)?;
    validate_p(p)?;
    let (d, l) = (s.delta as f64, s.lambda as f64);
    let (psi, om) = (s.psi as f64, s.omega_prime as f64);
    Ok((2.0 * psi / (3.0 * l * l) - 5.0 * om / (4.0 * d * l)) / p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub p: f64,
    pub var_delta_g: f64,
    pub var_lambda_g: f64,
    pub cov_dl: f64,
    pub var_delta_g_approx: f64,
    pub var_lambda_g_approx: f64,
    pub cov_dl_approx: f64,
    pub var_lambda_g_dropped: f64,
    pub cov_dl_dropped: f64,
    pub rse_theory: f64,
    pub rse_fallback: bool,
    pub rb_theory: f64,
}

impl TheoryReport {
    pub const CSV_HEADER: [&'static str; 12] = [
        "p",
        "var_delta_g",
        "var_lambda_g",
        "cov_dl",
        "var_delta_g_approx",
        "var_lambda_g_approx",
        "cov_dl_approx",
        "var_lambda_g_dropped",
        "cov_dl_dropped",
        "rse_theory",
        "rse_fallback",
        "rb_theory",
    ];

    pub fn csv_record(&self) -> [String; 12] {
        [
            self.p.to_string(),
            self.var_delta_g.to_string(),
            self.var_lambda_g.to_string(),
            self.cov_dl.to_string(),
            self.var_delta_g_approx.to_string(),
            self.var_lambda_g_approx.to_string(),
            self.cov_dl_approx.to_string(),
            self.var_lambda_g_dropped.to_string(),
            self.cov_dl_dropped.to_string(),
            self.rse_theory.to_string(),
            self.rse_fallback.to_string(),
            self.rb_theory.to_string(),
        ]
    }
}

pub fn theory_report(s: &ExactStats, p: f64) -> Result<TheoryReport> {
    let (vd, vl, cv) = (
        var_delta_g(s, p),
        var_lambda_g(s, p),
        cov_delta_lambda(s, p),
    );
    let rse = rse_theory(s, p)?;
    Ok(TheoryReport {
        p,
        var_delta_g: vd.exact,
        var_lambda_g: vl.exact,
        cov_dl: cv.exact,
        var_delta_g_approx: vd.approx,
        var_lambda_g_approx: vl.approx,
        cov_dl_approx: cv.approx,
        var_lambda_g_dropped: vl.dropped,
        cov_dl_dropped: cv.dropped,
        rse_theory: rse.value,
        rse_fallback: rse.fallback,
        rb_theory: rb_theory(s, p)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::rse_bracket;
    use crate::nes::NesCounters;
    use proptest::prelude::*;

    fn stats(delta: u64, lambda: u64, phi: u64, psi: u64, omega_prime: u64) -> ExactStats {
        ExactStats {
            n: 0,
            m: 0,
            delta,
            lambda,
            c: delta as f64 / lambda as f64,
            phi,
            psi,
            omega: 2 * omega_prime + 4 * delta,
            omega_prime,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn moment_boundary_values() {
        let s = stats(9, 20, 0, 7, 5);
        assert!(rel(var_delta_g(&s, 1.0).exact, 2.0 * 9.0 / 9.0) < 1e-12);
        assert_eq!(var_delta_g(&s, 0.0).exact, 0.0);
        assert_eq!(var_lambda_g(&s, 1.0).exact, 0.0);
        assert_eq!(cov_delta_lambda(&s, 1.0).exact, 0.0);
        let free = stats(0, 20, 0, 7, 0);
        assert!(rel(var_lambda_g(&stats(9, 20, 0, 0, 5), 0.3).exact, 20.0 * 0.21) < 1e-12);
        for p in [0.01, 0.3, 0.9] {
            assert_eq!(cov_delta_lambda(&free, p).exact, 0.0);
        }
    }

    #[test]
    fn rse_without_dependencies() {
        let s = stats(300, 1000, 0, 0, 0);
        for p in [0.05, 0.2, 0.7] {
            let r = rse_theory(&s, p).unwrap();
            assert!(!r.fallback);
            assert!(rel(r.value, (3.0 / (300.0 * p * p)).sqrt()) < 1e-12);
        }
    }

    #[test]
    fn rb_without_dependencies_is_zero() {
        assert_eq!(rb_theory(&stats(300, 1000, 4, 0, 0), 0.2).unwrap(), 0.0);
    }

    #[test]
    fn undefined_structure_is_rejected() {
        assert!(rse_theory(&stats(0, 10, 0, 0, 0), 0.2).is_err());
        assert!(rb_theory(&stats(3, 0, 0, 0, 0), 0.2).is_err());
        assert!(rse_theory(&stats(3, 10, 0, 0, 0), 0.0).is_err());
    }

    #[test]
    fn negative_bracket_falls_back() {
        // Ω′ term dominates
        let s = stats(3, 3, 0, 0, 1_000_000);
        let r = rse_theory(&s, 0.5).unwrap();
        assert!(r.fallback);
        assert!(rel(r.value, (3.0f64 / (3.0 * 0.25)).sqrt()) < 1e-12);
    }

    #[test]
    fn small_p_approximations() {
        // Table-1-like magnitudes (CA-GrQc row)
        let s = stats(100_000, 200_000, 2_000_000, 10_000_000, 9_000_000);
        for p in [1e-3, 5e-3, 1e-2] {
            let vd = var_delta_g(&s, p);
            assert!(rel(vd.approx, vd.exact) < 0.05);
            let vl = var_lambda_g(&s, p);
            assert!((vl.exact - vl.approx).abs() <= vl.dropped + 2.0 / 3.0 * s.psi as f64 * p * p);
            let cv = cov_delta_lambda(&s, p);
            assert!(
                (cv.exact - cv.approx).abs()
                    <= cv.dropped + 5.0 / 12.0 * s.omega_prime as f64 * p.powi(3)
            );
        }
    }

    proptest! {
        #[test]
        fn rb_scales_inverse_in_p(
            d in 1u64..1_000_000, l in 1u64..1_000_000, psi in 0u64..1_000_000_000,
            om in 0u64..1_000_000_000, p in 0.001f64..0.9,
        ) {
            let s = stats(d, l, 0, psi, om);
            let a = rb_theory(&s, p).unwrap() * p;
            let b = rb_theory(&s, p / 2.0).unwrap() * (p / 2.0);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }

        #[test]
        fn variances_nonnegative(
            d in 0u64..1_000_000, l in 0u64..1_000_000, phi in 0u64..1_000_000,
            psi in 0u64..1_000_000, om in 0u64..1_000_000, p in 0.0f64..=1.0,
        ) {
            let s = stats(d, l, phi, psi, om);
            prop_assert!(var_delta_g(&s, p).exact >= 0.0);
            prop_assert!(var_lambda_g(&s, p).exact >= 0.0);
            prop_assert!(cov_delta_lambda(&s, p).exact >= 0.0);
        }

        /// Replacing graph counts by their sample-based estimates turns the
        /// graph-side bracket into the sample-side one term by term.
        #[test]
        fn graph_bracket_matches_sample_bracket(
            dg in 1u64..100_000, lg in 1u64..100_000, phig in 0u64..100_000,
            psig in 0u64..100_000, omg in 0u64..100_000, p in 0.001f64..0.99,
        ) {
            let c = NesCounters { delta_g: dg, lambda_g: lg, phi_g: phig, psi_g: psig, omega_prime_g: omg };
            let sample = rse_bracket(&c).unwrap();
            let p2 = p * p;
            let (d, l) = (3.0 * dg as f64 / p2, lg as f64 / p);
            let (phi, psi, om) = (15.0 / 8.0 * phig as f64 / (p2 * p), 3.0 * psig as f64 / p, 12.0 / 5.0 * omg as f64 / p2);
            let graph = 3.0 / (d * p2) + 48.0 * phi * p2 * p / (5.0 * d * d * p2 * p2)
                + 2.0 * psi * p / (3.0 * l * l * p2) - 5.0 * om * p2 / (2.0 * d * l * p2 * p);
            let scale = 1.0 / dg as f64 + 2.0 * phig as f64 / (dg as f64).powi(2)
                + 2.0 * psig as f64 / (lg as f64).powi(2) + 2.0 * omg as f64 / (dg as f64 * lg as f64);
            prop_assert!((graph - sample).abs() <= 1e-12 * scale);
        }
    }
}
