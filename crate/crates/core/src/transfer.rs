//! Layered-walk recurrence systems `x_n = M x_{n-1}` and their dominant
//! eigenvalues, which are lower bounds for the connective constant.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceSystem {
    pub name: String,
    /// Row `i` gives `x_n[i]` as a combination of `x_{n-1}`.
    pub matrix: Vec<Vec<u64>>,
    /// `x_1`.
    pub initial: Vec<u64>,
}

impl RecurrenceSystem {
    pub fn dimension(&self) -> usize {
        self.matrix.len()
    }

    fn from_rows(name: &str, rows: &[&[usize]], initial: &[u64]) -> Self {
        let n = rows.len();
        let mut matrix = vec![vec![0u64; n]; n];
        for (i, deps) in rows.iter().enumerate() {
            for &j in *deps {
                matrix[i][j] += 1;
            }
        }
        RecurrenceSystem {
            name: name.to_string(),
            matrix,
            initial: initial.to_vec(),
        }
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["h73", "h45", "h37", "h38"];

/// The four explicit systems by name, or `param(d)` for `d >= 7`.
pub fn builtin_system(name: &str) -> Result<RecurrenceSystem> {
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    const E: usize = 4;
    const F: usize = 5;
    const G: usize = 6;
    const H: usize = 7;
    const I: usize = 8;
    const J: usize = 9;
    match name {
        "h73" => param_system(7).map(|mut s| {
            s.name = name.into();
            s
        }),
        "h45" => Ok(RecurrenceSystem::from_rows(
            name,
            &[&[A, C, C], &[A, C], &[A, A, B]],
            &[1, 1, 2],
        )),
        "h37" => Ok(RecurrenceSystem::from_rows(
            name,
            &[
                &[C, F],
                &[C],
                &[A, D],
                &[A, E],
                &[F],
                &[A, G],
                &[A, H],
                &[A, B],
            ],
            &[2, 1, 2, 2, 1, 2, 2, 2],
        )),
        "h38" => Ok(RecurrenceSystem::from_rows(
            name,
            &[
                &[C, G],
                &[C],
                &[A, D],
                &[A, E],
                &[A, F],
                &[G],
                &[A, H],
                &[A, I],
                &[A, J],
                &[A, B],
            ],
            &[2, 1, 2, 2, 2, 1, 2, 2, 2, 2],
        )),
        other => {
            let d = other
                .strip_prefix("param(")
                .and_then(|s| s.strip_suffix(')'))
                .and_then(|s| s.trim().parse::<u32>().ok())
                .ok_or_else(|| Error::UnknownSystem(other.to_string()))?;
            param_system(d)
        }
    }
}

/// The degree-`d` family generalizing the H(7,3) system (`d >= 7`).
pub fn param_system(d: u32) -> Result<RecurrenceSystem> {
    if d < 7 {
        return Err(Error::ParamTooSmall(d));
    }
    let d = u64::from(d);
    Ok(RecurrenceSystem {
        name: format!("param({d})"),
        matrix: vec![
            vec![2, d - 6, 0, 2],
            vec![2, d - 5, 2, 0],
            vec![2, d - 6, 0, 1],
            vec![2, d - 5, 1, 0],
        ],
        initial: vec![d - 4, d - 3, d - 4, d - 3],
    })
}

/// The recurrence system whose eigenvalue bounds the connective constant
/// of H(d,k) from below, if one is available.
pub fn system_for(d: u32, k: u32) -> Option<RecurrenceSystem> {
    match (d, k) {
        (7, 3) => builtin_system("h73").ok(),
        (4, 5) => builtin_system("h45").ok(),
        (3, 7) => builtin_system("h37").ok(),
        (3, 8) => builtin_system("h38").ok(),
        // Walks of the degree-d triangulation inject into H(d,k) for k > 3.
        (d, _) if d >= 7 => param_system(d).ok(),
        _ => None,
    }
}

/// Whether some power of the matrix is entrywise positive, using the
/// Wielandt bound `(n-1)^2 + 1` on the exponent.
pub fn is_primitive(matrix: &[Vec<u64>]) -> bool {
    let n = matrix.len();
    let pattern: Vec<Vec<bool>> = matrix
        .iter()
        .map(|row| row.iter().map(|&x| x > 0).collect())
        .collect();
    let mut power = pattern.clone();
    for _ in 0..(n - 1) * (n - 1) {
        if power.iter().all(|row| row.iter().all(|&x| x)) {
            return true;
        }
        power = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).any(|t| power[i][t] && pattern[t][j]))
                    .collect()
            })
            .collect();
    }
    power.iter().all(|row| row.iter().all(|&x| x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronResult {
    pub lambda: f64,
    /// `max |M v - lambda v|` with `max v = 1`.
    pub residual: f64,
    pub iterations: usize,
    pub vector: Vec<f64>,
}

const MAX_ITERATIONS: usize = 1_000_000;

/// Power iteration. Stops when the Collatz-Wielandt bracket
/// `min (Mv)_i / v_i <= lambda <= max (Mv)_i / v_i` is tighter than 1e-13.
pub fn perron_root(system: &RecurrenceSystem) -> Result<PerronResult> {
    let m = &system.matrix;
    if !is_primitive(m) {
        return Err(Error::NotPrimitive);
    }
    let n = m.len();
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| (0..n).map(|j| m[i][j] as f64 * v[j]).sum())
            .collect()
    };
    let mut v = vec![1.0; n];
    let mut lambda = 0.0;
    for it in 1..=MAX_ITERATIONS {
        let w = apply(&v);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let q = w[i] / v[i];
            lo = lo.min(q);
            hi = hi.max(q);
        }
        let top = w.iter().cloned().fold(0.0, f64::max);
        v = w.iter().map(|x| x / top).collect();
        lambda = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * hi {
            let mv = apply(&v);
            let residual = (0..n)
                .map(|i| (mv[i] - lambda * v[i]).abs())
                .fold(0.0, f64::max);
            return Ok(PerronResult {
                lambda,
                residual,
                iterations: it,
                vector: v,
            });
        }
    }
    let mv = apply(&v);
    let residual = (0..n)
        .map(|i| (mv[i] - lambda * v[i]).abs())
        .fold(0.0, f64::max);
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

/// Characteristic polynomial `det(xI - M)` by Faddeev-LeVerrier, exact.
/// Coefficients from the leading one down: `[1, c_{n-1}, ..., c_0]`.
pub fn characteristic_polynomial(matrix: &[Vec<u64>]) -> Vec<i128> {
    let n = matrix.len();
    let a: Vec<Vec<i128>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mul = |x: &Vec<Vec<i128>>, y: &Vec<Vec<i128>>| -> Vec<Vec<i128>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|t| x[i][t] * y[t][j]).sum())
                    .collect()
            })
            .collect()
    };
    let mut coeffs = vec![1i128];
    let mut mk = vec![vec![0i128; n]; n];
    for k in 1..=n {
        let c_prev = *coeffs.last().unwrap();
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += c_prev;
        }
        // mk now holds M_k = A M_{k-1} + c_{n-k+1} I.
        let am = mul(&a, &mk);
        let trace: i128 = (0..n).map(|i| am[i][i]).sum();
        debug_assert_eq!(trace % k as i128, 0);
        coeffs.push(-trace / k as i128);
        mk = am;
    }
    coeffs
}

fn horner(coeffs: &[i128], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c as f64)
}

/// Largest real root of the characteristic polynomial, found by scanning
/// down from the Cauchy bound and bisecting the first sign change.
pub fn perron_root_poly(system: &RecurrenceSystem) -> Result<f64> {
    let coeffs = characteristic_polynomial(&system.matrix);
    let bound = 1.0
        + coeffs[1..]
            .iter()
            .map(|c| c.abs() as f64)
            .fold(0.0, f64::max);
    let steps = 100_000;
    let h = bound / steps as f64;
    let mut hi = bound;
    for s in (0..steps).rev() {
        let lo = s as f64 * h;
        if horner(&coeffs, lo) <= 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if horner(&coeffs, mid) <= 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        hi = lo;
    }
    Err(Error::NoConvergence {
        iterations: steps,
        residual: f64::NAN,
    })
}

/// `x_1 .. x_n` exactly.
pub fn iterate_sequences(system: &RecurrenceSystem, n: usize) -> Vec<Vec<BigUint>> {
    let mut out: Vec<Vec<BigUint>> = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(system.initial.iter().map(|&x| BigUint::from(x)).collect());
    for _ in 1..n {
        let prev = out.last().unwrap();
        let next = system
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(prev)
                    .filter(|(&c, _)| c > 0)
                    .map(|(&c, x)| x * c)
                    .sum()
            })
            .collect();
        out.push(next);
    }
    out
}

/// First index (1-based) at which each of the H(7,3) comparison
/// inequalities fails, if any.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct H73Inequalities {
    pub a_le_b: Option<usize>,
    pub c_le_d: Option<usize>,
    pub d_le_b: Option<usize>,
    pub b_le_2c: Option<usize>,
}

impl H73Inequalities {
    pub fn all_hold(&self) -> bool {
        self.a_le_b.is_none()
            && self.c_le_d.is_none()
            && self.d_le_b.is_none()
            && self.b_le_2c.is_none()
    }
}

pub fn check_h73_inequalities(sequence: &[Vec<BigUint>]) -> H73Inequalities {
    let mut out = H73Inequalities::default();
    let two = BigUint::from(2u8);
    for (i, x) in sequence.iter().enumerate() {
        let (a, b, c, d) = (&x[0], &x[1], &x[2], &x[3]);
        let n = i + 1;
        let mark = |slot: &mut Option<usize>, ok: bool| {
            if !ok && slot.is_none() {
                *slot = Some(n);
            }
        };
        mark(&mut out.a_le_b, a <= b);
        mark(&mut out.c_le_d, c <= d);
        mark(&mut out.d_le_b, d <= b);
        mark(&mut out.b_le_2c, b <= &(&two * c));
    }
    out
}

/// One row of the sign check bracketing the dominant root of
/// `g_d(x) = x^4 + (3-d)x^3 + (9-2d)x^2 + (3-d)x - 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub d: u64,
    /// Sign of `g_d(d - 1 - 7/d)`.
    pub sign_lower: i8,
    /// `g_d(d - 1)`.
    pub g_upper: i128,
    /// `g_d(d-1) = 6d^2 - 10d + 2`.
    pub identity_ok: bool,
    /// `d^4 g_d(d-1-7/d)` matches the printed expansion.
    pub expansion_ok: bool,
    pub bracket_ok: bool,
}

/// `g_d` at `p/q`, scaled by `q^4`, exactly.
fn g_scaled(d: i128, p: i128, q: i128) -> i128 {
    let c = [1, 3 - d, 9 - 2 * d, 3 - d, -2];
    (0..5u32)
        .map(|i| c[i as usize] * p.pow(4 - i) * q.pow(i))
        .sum()
}

pub fn asymptotic_row(d: u64) -> AsymptoticRow {
    let di = d as i128;
    // d - 1 - 7/d = (d^2 - d - 7)/d
    let lower = g_scaled(di, di * di - di - 7, di);
    let upper = g_scaled(di, di - 1, 1);
    let expansion = -di.pow(6) - 3 * di.pow(5) + 65 * di.pow(4) - 28 * di.pow(3) - 735 * di * di
        + 343 * di
        + 2401;
    AsymptoticRow {
        d,
        sign_lower: lower.signum() as i8,
        g_upper: upper,
        identity_ok: upper == 6 * di * di - 10 * di + 2,
        expansion_ok: lower == expansion,
        bracket_ok: lower < 0 && upper > 0,
    }
}

/// Rows for every `d` in `start..=end`; `start` must be at least 7.
pub fn asymptotic_check(start: u64, end: u64) -> Result<Vec<AsymptoticRow>> {
    if start < 7 {
        return Err(Error::ParamTooSmall(start as u32));
    }
    Ok((start..=end).map(asymptotic_row).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h73_matrix_and_start() {
        let s = builtin_system("h73").unwrap();
        assert_eq!(
            s.matrix,
            vec![
                vec![2, 1, 0, 2],
                vec![2, 2, 2, 0],
                vec![2, 1, 0, 1],
                vec![2, 2, 1, 0]
            ]
        );
        assert_eq!(s.initial, vec![3, 4, 3, 4]);
        assert_eq!(param_system(7).unwrap().matrix, s.matrix);
    }

    #[test]
    fn h45_matrix() {
        let s = builtin_system("h45").unwrap();
        assert_eq!(s.matrix, vec![vec![1, 0, 2], vec![1, 0, 1], vec![2, 1, 0]]);
        assert_eq!(s.initial, vec![1, 1, 2]);
    }

    #[test]
    fn names_are_checked() {
        assert!(matches!(
            builtin_system("h99"),
            Err(Error::UnknownSystem(_))
        ));
        assert!(matches!(
            builtin_system("param(6)"),
            Err(Error::ParamTooSmall(6))
        ));
        assert_eq!(builtin_system("param(9)").unwrap().matrix[1][1], 4);
    }

    #[test]
    fn characteristic_polynomials() {
        let h45 = builtin_system("h45").unwrap();
        assert_eq!(characteristic_polynomial(&h45.matrix), vec![1, -1, -5, -1]);
        let h73 = builtin_system("h73").unwrap();
        assert_eq!(
            characteristic_polynomial(&h73.matrix),
            vec![1, -4, -5, -4, -2]
        );
    }

    #[test]
    fn second_term_of_h73() {
        let seq = iterate_sequences(&builtin_system("h73").unwrap(), 2);
        assert_eq!(seq[1][0], BigUint::from(18u8));
    }

    #[test]
    fn scaled_polynomial_matches_direct_evaluation() {
        for d in [7i128, 8, 13] {
            let x = 2.5f64;
            let df = d as f64;
            let direct =
                x.powi(4) + (3.0 - df) * x.powi(3) + (9.0 - 2.0 * df) * x * x + (3.0 - df) * x
                    - 2.0;
            assert!((g_scaled(d, 5, 2) as f64 / 16.0 - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&[vec![0, 1], vec![1, 1]]));
        assert!(!is_primitive(&[vec![0, 1], vec![1, 0]]));
        assert!(matches!(
            perron_root(&RecurrenceSystem {
                name: "swap".into(),
                matrix: vec![vec![0, 1], vec![1, 0]],
                initial: vec![1, 1],
            }),
            Err(Error::NotPrimitive)
        ));
    }
}
