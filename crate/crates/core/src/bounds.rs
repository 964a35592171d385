//! Closed-form and optimized bounds on the connective constants of H(d,k).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tessellation::TessellationParams;
use crate::transfer::{perron_root, system_for};

/// Edge Cheeger constant `(d-2) sqrt(1 - 4/((d-2)(k-2)))`.
pub fn cheeger(p: TessellationParams) -> f64 {
    let (d, k) = (p.d() as f64, p.k() as f64);
    (d - 2.0) * (1.0 - 4.0 / ((d - 2.0) * (k - 2.0))).sqrt()
}

/// Upper bound on the spectral radius from `h^2 + R^2 <= d^2`.
pub fn spectral_radius_upper(p: TessellationParams) -> f64 {
    let d = p.d() as f64;
    let h = cheeger(p);
    (d * d - h * h).sqrt()
}

/// `(R + sqrt(R^2 - 4(d-1))) / 2`, increasing in `R`.
pub fn non_reversing_growth(d: u32, r: f64) -> Result<f64> {
    let disc = r * r - 4.0 * (d as f64 - 1.0);
    if disc < 0.0 {
        return Err(Error::InvalidBranch(disc));
    }
    Ok(0.5 * (r + disc.sqrt()))
}

/// Upper bound on the non-reversing connective constant.
pub fn mu_p2_upper(p: TessellationParams) -> Result<f64> {
    non_reversing_growth(p.d(), spectral_radius_upper(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedBound {
    pub value: f64,
    pub p_star: f64,
}

fn mixed_exponent(p: TessellationParams) -> f64 {
    let (d, k) = (p.d() as f64, p.k() as f64);
    ((k - 2.0) * (d - 2.0) - 3.0) / (k - 2.0)
}

/// `((1-p)^{1/(k-2)} p (1 - (1-p)^r))^{-1}` on `(0, 1)`.
pub fn mixed_objective(params: TessellationParams, p: f64) -> f64 {
    (-log_inverse_objective(params, p, mixed_exponent(params))).exp()
}

fn log_inverse_objective(params: TessellationParams, p: f64, r: f64) -> f64 {
    let k = params.k() as f64;
    let q = 1.0 - p;
    q.ln() / (k - 2.0) + p.ln() + (-q.powf(r)).ln_1p()
}

const SCAN_POINTS: usize = 10_000;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes the mixed-percolation objective: a uniform scan seeds a
/// bracket around the best grid point, then golden-section search narrows
/// it to 1e-12.
pub fn mu_p_upper_mixed(params: TessellationParams) -> MixedBound {
    let r = mixed_exponent(params);
    let g = |p: f64| log_inverse_objective(params, p, r);
    let step = 1.0 / SCAN_POINTS as f64;
    let best = (1..SCAN_POINTS)
        .map(|i| (i, g(i as f64 * step)))
        .fold((1, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let (mut a, mut b) = ((best.0 - 1) as f64 * step, (best.0 + 1) as f64 * step);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut g1, mut g2) = (g(x1), g(x2));
    while b - a > 1e-12 {
        if g1 >= g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - INV_PHI * (b - a);
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + INV_PHI * (b - a);
            g2 = g(x2);
        }
    }
    let p_star = 0.5 * (a + b);
    MixedBound {
        value: (-g(p_star)).exp(),
        p_star,
    }
}

/// `N_k = (k-4) / (k-5)^{(k-5)/(k-4)}`, the degree-3 bound (`k >= 6`).
pub fn mu_p_upper_deg3(k: u32) -> Result<f64> {
    if k < 6 {
        return Err(Error::Deg3Undefined(k));
    }
    let k = k as f64;
    Ok((k - 4.0) / (k - 5.0).powf((k - 5.0) / (k - 4.0)))
}

/// `(k-1)/(k-2)`.
pub fn mu_p_lower(params: TessellationParams) -> f64 {
    let k = params.k() as f64;
    (k - 1.0) / (k - 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedRule {
    /// `sqrt((d-2)(d-3))` for k = 3.
    Triangles,
    /// `((d-1)(d-2)^2)^{1/3}` for k = 4.
    Squares,
    /// `((d-1)^{k-4}(d-2))^{1/(k-3)}` for k > 5, d > 3.
    LargeFaces,
    /// `2^{(k-5)/(k-4)}` for d = 3.
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedBound {
    pub value: f64,
    pub rule: ClosedRule,
}

/// The closed-form lower bound on the walk connective constant, when one
/// applies. There is none for k = 5 with d > 3.
pub fn mu_w_lower_closed(params: TessellationParams) -> Option<ClosedBound> {
    let (d, k) = (params.d() as f64, params.k());
    let kf = k as f64;
    let (value, rule) = match (params.d(), k) {
        (_, 3) => (((d - 2.0) * (d - 3.0)).sqrt(), ClosedRule::Triangles),
        (_, 4) => (
            ((d - 1.0) * (d - 2.0) * (d - 2.0)).cbrt(),
            ClosedRule::Squares,
        ),
        (3, _) => (2f64.powf((kf - 5.0) / (kf - 4.0)), ClosedRule::Cubic),
        (_, 5) => return None,
        _ => (
            ((d - 1.0).powf(kf - 4.0) * (d - 2.0)).powf(1.0 / (kf - 3.0)),
            ClosedRule::LargeFaces,
        ),
    };
    Some(ClosedBound { value, rule })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenBound {
    pub value: f64,
    pub system: String,
}

/// Dominant eigenvalue of the recurrence system attached to H(d,k).
pub fn mu_w_lower_eigen(params: TessellationParams) -> Result<Option<EigenBound>> {
    let Some(system) = system_for(params.d(), params.k()) else {
        return Ok(None);
    };
    let root = perron_root(&system)?;
    Ok(Some(EigenBound {
        value: root.lambda,
        system: system.name,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    /// Best upper bound on the polygon constant is below the best lower
    /// bound on the walk constant.
    pub mu_p_lt_mu_w: bool,
    /// The non-reversing bound is below the best walk lower bound.
    pub exponent_condition: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub d: u32,
    pub k: u32,
    pub h: f64,
    #[serde(rename = "R_upper")]
    pub r_upper: f64,
    pub mu_p2_upper: Option<f64>,
    pub mu_p_upper_mixed: MixedBound,
    pub mu_p_upper_deg3: Option<f64>,
    pub mu_p_lower: f64,
    pub mu_w_lower_closed: Option<f64>,
    pub mu_w_lower_closed_rule: Option<ClosedRule>,
    pub mu_w_lower_eigen: Option<f64>,
    pub mu_w_lower_eigen_system: Option<String>,
    pub mu_w_upper: f64,
    pub verdicts: Verdicts,
}

impl BoundsReport {
    /// Smallest available upper bound on the polygon constant.
    pub fn best_mu_p_upper(&self) -> f64 {
        self.mu_p_upper_deg3
            .map_or(self.mu_p_upper_mixed.value, |n| {
                n.min(self.mu_p_upper_mixed.value)
            })
    }

    /// Largest available lower bound on the walk constant.
    pub fn best_mu_w_lower(&self) -> Option<f64> {
        match (self.mu_w_lower_closed, self.mu_w_lower_eigen) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
}

pub fn bounds_report(params: TessellationParams) -> Result<BoundsReport> {
    let closed = mu_w_lower_closed(params);
    let eigen = mu_w_lower_eigen(params)?;
    let p2 = match mu_p2_upper(params) {
        Ok(v) => Some(v),
        Err(Error::InvalidBranch(_)) => None,
        Err(e) => return Err(e),
    };
    let mut report = BoundsReport {
        d: params.d(),
        k: params.k(),
        h: cheeger(params),
        r_upper: spectral_radius_upper(params),
        mu_p2_upper: p2,
        mu_p_upper_mixed: mu_p_upper_mixed(params),
        mu_p_upper_deg3: if params.d() == 3 {
            mu_p_upper_deg3(params.k()).ok()
        } else {
            None
        },
        mu_p_lower: mu_p_lower(params),
        mu_w_lower_closed: closed.map(|c| c.value),
        mu_w_lower_closed_rule: closed.map(|c| c.rule),
        mu_w_lower_eigen: eigen.as_ref().map(|e| e.value),
        mu_w_lower_eigen_system: eigen.map(|e| e.system),
        mu_w_upper: params.d() as f64 - 1.0,
        verdicts: Verdicts {
            mu_p_lt_mu_w: false,
            exponent_condition: false,
        },
    };
    let lower = report.best_mu_w_lower();
    report.verdicts = Verdicts {
        mu_p_lt_mu_w: lower.is_some_and(|l| report.best_mu_p_upper() < l),
        exponent_condition: match (report.mu_p2_upper, lower) {
            (Some(u), Some(l)) => u < l,
            _ => false,
        },
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: u32, k: u32) -> TessellationParams {
        TessellationParams::new(d, k).unwrap()
    }

    #[test]
    fn cheeger_values() {
        assert!((cheeger(p(7, 3)) - 5f64.sqrt()).abs() < 1e-12);
        assert!((cheeger(p(3, 7)) - 0.2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn non_reversing_values() {
        let v = mu_p2_upper(p(7, 3)).unwrap();
        assert!((v - (44f64.sqrt() + 20f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((mu_p2_upper(p(3, 7)).unwrap() - 1.93045329291909).abs() < 1e-12);
        assert!(matches!(
            non_reversing_growth(7, 3.0),
            Err(Error::InvalidBranch(_))
        ));
    }

    #[test]
    fn mixed_bound_for_h45_sits_at_six_sevenths() {
        let m = mu_p_upper_mixed(p(4, 5));
        assert!((m.p_star - 6.0 / 7.0).abs() < 1e-9);
        assert!((m.value - 2.60371188766242).abs() < 1e-10);
    }

    #[test]
    fn degree_three_bound() {
        assert_eq!(mu_p_upper_deg3(6).unwrap(), 2.0);
        assert!(matches!(mu_p_upper_deg3(5), Err(Error::Deg3Undefined(5))));
    }

    #[test]
    fn closed_rules() {
        assert_eq!(
            mu_w_lower_closed(p(8, 3)).unwrap().rule,
            ClosedRule::Triangles
        );
        assert_eq!(
            mu_w_lower_closed(p(5, 4)).unwrap().rule,
            ClosedRule::Squares
        );
        assert_eq!(mu_w_lower_closed(p(3, 11)).unwrap().rule, ClosedRule::Cubic);
        assert_eq!(
            mu_w_lower_closed(p(4, 6)).unwrap().rule,
            ClosedRule::LargeFaces
        );
        assert!(mu_w_lower_closed(p(4, 5)).is_none());
    }
}
