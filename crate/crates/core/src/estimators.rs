//! Sample-side estimates computed from the end-of-stream counters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nes::{NesCounters, NesSummary};

/// Unbiased estimate of the closed-wedge count, `3 Δ_g / p²`.
pub fn estimate_delta(c: &NesCounters, p: f64) -> f64 {
    3.0 * c.delta_g as f64 / (p * p)
}

/// Unbiased estimate of the wedge count, `Λ_g / p`.
pub fn estimate_lambda(c: &NesCounters, p: f64) -> f64 {
    c.lambda_g as f64 / p
}

/// Ratio estimate `3 Δ_g / (p Λ_g)` of the clustering coefficient. Biased;
/// see [`bias_corrected_c`].
pub fn estimate_c(c: &NesCounters, p: f64) -> Result<f64> {
    if c.lambda_g == 0 {
        return Err(Error::SampleTooSmall("no wedges identified"));
    }
    Ok(3.0 * c.delta_g as f64 / (p * c.lambda_g as f64))
}

/// Squared relative error estimated from the sample:
/// `1/Δ_g + 2Φ_g/Δ_g² + 2Ψ_g/Λ_g² − 2Ω′_g/(Δ_g Λ_g)`.
pub fn rse_bracket(c: &NesCounters) -> Result<f64> {
    if c.delta_g == 0 {
        return Err(Error::SampleTooSmall("no closed wedges identified"));
    }
    if c.lambda_g == 0 {
        return Err(Error::SampleTooSmall("no wedges identified"));
    }
    let (d, l) = (c.delta_g as f64, c.lambda_g as f64);
    Ok(
        1.0 / d + 2.0 * c.phi_g as f64 / (d * d) + 2.0 * c.psi_g as f64 / (l * l)
            - 2.0 * c.omega_prime_g as f64 / (d * l),
    )
}

/// RSE value plus whether the full bracket was negative and the simple
/// estimate was substituted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RseEstimate {
    pub value: f64,
    pub fallback: bool,
}

pub fn estimate_rse_full(c: &NesCounters) -> Result<RseEstimate> {
    let bracket = rse_bracket(c)?;
    if bracket >= 0.0 {
        Ok(RseEstimate {
            value: bracket.sqrt(),
            fallback: false,
        })
    } else {
        Ok(RseEstimate {
            value: estimate_rse_simple(c)?,
            fallback: true,
        })
    }
}

/// `Δ_g^{-1/2}`.
pub fn estimate_rse_simple(c: &NesCounters) -> Result<f64> {
    if c.delta_g == 0 {
        return Err(Error::SampleTooSmall("no closed wedges identified"));
    }
    Ok((1.0 / c.delta_g as f64).sqrt())
}

/// `2Ψ_g/Λ_g² − Ω′_g/(Δ_g Λ_g)`.
pub fn estimate_rb(c: &NesCounters) -> Result<f64> {
    if c.delta_g == 0 || c.lambda_g == 0 {
        return Err(Error::SampleTooSmall(
            "relative bias needs Δ_g > 0 and Λ_g > 0",
        ));
    }
    let (d, l) = (c.delta_g as f64, c.lambda_g as f64);
    // common denominator keeps the sign exact when the two terms cancel
    Ok((2.0 * c.psi_g as f64 * d - c.omega_prime_g as f64 * l) / (d * l * l))
}

/// `Ĉ / (1 + R̂B)`.
pub fn bias_corrected_c(c: &NesCounters, p: f64) -> Result<f64> {
    let raw = estimate_c(c, p)?;
    let rb = estimate_rb(c)?;
    if 1.0 + rb <= 0.0 {
        return Err(Error::CorrectionOverflow(1.0 + rb));
    }
    Ok(raw / (1.0 + rb))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateFlags {
    /// The full RSE bracket was negative; `rse_full` holds the simple value.
    pub rse_fallback: bool,
    /// R̂B was undefined or `1 + R̂B <= 0`; `c_hat_plus` holds the raw Ĉ.
    pub correction_skipped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub c_hat: f64,
    pub c_hat_plus: f64,
    pub delta_hat: f64,
    pub lambda_hat: f64,
    /// `None` without auxiliary counters or when Δ_g = 0.
    pub rse_full: Option<f64>,
    /// `None` when Δ_g = 0.
    pub rse_simple: Option<f64>,
    /// `None` without auxiliary counters or when Δ_g = 0.
    pub rb_hat: Option<f64>,
    pub flags: EstimateFlags,
    pub p: f64,
    pub seed: u64,
    pub counters: NesCounters,
    pub sampled_edges: usize,
}

impl EstimateReport {
    pub const CSV_HEADER: [&'static str; 9] = [
        "p",
        "seed",
        "c_hat",
        "c_hat_plus",
        "delta_hat",
        "lambda_hat",
        "rse_full",
        "rse_simple",
        "rb_hat",
    ];

    pub fn csv_record(&self) -> [String; 9] {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        [
            self.p.to_string(),
            self.seed.to_string(),
            self.c_hat.to_string(),
            self.c_hat_plus.to_string(),
            self.delta_hat.to_string(),
            self.lambda_hat.to_string(),
            opt(self.rse_full),
            opt(self.rse_simple),
            opt(self.rb_hat),
        ]
    }
}

/// Every estimate available from one run. Fails only when Λ_g = 0.
pub fn estimate_report(s: &NesSummary) -> Result<EstimateReport> {
    let c = &s.counters;
    let c_hat = estimate_c(c, s.p)?;
    let mut flags = EstimateFlags::default();
    let rse_simple = estimate_rse_simple(c).ok();
    let (rse_full, rb_hat) = if s.track_aux {
        let full = estimate_rse_full(c).ok();
        flags.rse_fallback = full.is_some_and(|r| r.fallback);
        (full.map(|r| r.value), estimate_rb(c).ok())
    } else {
        (None, None)
    };
    let c_hat_plus = match rb_hat {
        Some(rb) if 1.0 + rb > 0.0 => c_hat / (1.0 + rb),
        _ => {
            flags.correction_skipped = true;
            c_hat
        }
    };
    Ok(EstimateReport {
        c_hat,
        c_hat_plus,
        delta_hat: estimate_delta(c, s.p),
        lambda_hat: estimate_lambda(c, s.p),
        rse_full,
        rse_simple,
        rb_hat,
        flags,
        p: s.p,
        seed: s.seed,
        counters: *c,
        sampled_edges: s.sampled_edges,
    })
}
