//! Leading singular exponent of a biharmonic eigenfunction at a corner.
//!
//! Let `p` be the root with smallest positive real part of
//!
//! ```text
//! p + 1 + sin((p + 1) θ) / sin θ = 0.
//! ```
//!
//! Near a corner of interior angle `θ` the eigenfunction behaves like
//! `Re(c r^{p+2})`, so along the bisector it decays with the power
//! `α = Re(p) + 2`. For `θ` below the critical angle the root is complex with
//! `β = Im(p) > 0`, and the eigenfunction changes sign infinitely often:
//! consecutive zeros along the bisector approach the ratio `e^{π/β}` and
//! consecutive extremal values the ratio `e^{απ/β}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots with `|Im p|` below this are treated as real.
pub const REAL_ROOT_THRESHOLD: f64 = 1e-8;

const START_THETA: f64 = 10.0 * PI / 180.0;
const START_GUESS: Complex64 = Complex64::new(25.0, 13.0);
const STEP: f64 = PI / 180.0;
const MIN_STEP: f64 = 0.1 * PI / 180.0;
const NEWTON_MAX_ITER: usize = 80;
const RESIDUAL_TOL: f64 = 1e-10;

// Real-axis scan used once the branch has become real.
const REAL_SCAN_STEP: f64 = 1e-4;
const REAL_SCAN_MAX: f64 = 60.0;
// A refined local minimum of the real restriction at or below this counts as
// a (double) root.
const DOUBLE_ROOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerExponent {
    /// Interior angle in radians.
    pub theta: f64,
    /// Radial power of the eigenfunction, `Re(p) + 2`.
    pub alpha: f64,
    /// Imaginary part, non-negative by convention; exactly zero for real roots.
    pub beta: f64,
    /// `e^{π/β}`, absent when `β = 0`.
    pub zero_ratio: Option<f64>,
    /// `e^{απ/β}`, absent when `β = 0`.
    pub extremum_value_ratio: Option<f64>,
}

impl CornerExponent {
    fn from_root(theta: f64, p: Complex64) -> Self {
        let beta = p.im.abs();
        let alpha = p.re + 2.0;
        if beta < REAL_ROOT_THRESHOLD {
            CornerExponent {
                theta,
                alpha,
                beta: 0.0,
                zero_ratio: None,
                extremum_value_ratio: None,
            }
        } else {
            CornerExponent {
                theta,
                alpha,
                beta,
                zero_ratio: Some((PI / beta).exp()),
                extremum_value_ratio: Some((alpha * PI / beta).exp()),
            }
        }
    }

    /// The root of the exponent equation.
    pub fn p(&self) -> Complex64 {
        Complex64::new(self.alpha - 2.0, self.beta)
    }

    pub fn is_oscillatory(&self) -> bool {
        self.beta > 0.0
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta.to_degrees()
    }

    /// `|p + 1 + sin((p+1)θ)/sin θ|` at the stored root.
    pub fn residual(&self) -> f64 {
        residual(self.p(), self.theta).norm()
    }
}

/// Left-hand side of the exponent equation.
pub fn residual(p: Complex64, theta: f64) -> Complex64 {
    let q = p + 1.0;
    q + (q * theta).sin() / theta.sin()
}

fn derivative(p: Complex64, theta: f64) -> Complex64 {
    1.0 + theta * ((p + 1.0) * theta).cos() / theta.sin()
}

/// Plain complex Newton iteration from `guess`. Returns `None` when the
/// iteration diverges or does not reach the residual tolerance.
pub fn newton_root(theta: f64, guess: Complex64) -> Option<Complex64> {
    let mut p = guess;
    for _ in 0..NEWTON_MAX_ITER {
        let d = derivative(p, theta);
        if d.norm() == 0.0 {
            return None;
        }
        let step = residual(p, theta) / d;
        p -= step;
        if !(p.re.is_finite() && p.im.is_finite()) {
            return None;
        }
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + p.norm()) {
            break;
        }
    }
    (residual(p, theta).norm() < RESIDUAL_TOL).then_some(p)
}

fn check_angle(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 && theta < PI && theta.sin() > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("theta = {theta} is outside (0, pi)")))
    }
}

/// Smallest positive real root of the exponent equation, by a fine scan for the
/// first sign change followed by bisection. Just above the critical angle the
/// two real roots can be closer than the scan step; a grid minimum that touches
/// zero after golden-section refinement is treated the same way.
fn smallest_real_root(theta: f64) -> Result<f64> {
    let f = |x: f64| residual(Complex64::new(x, 0.0), theta).re;
    let steps = (REAL_SCAN_MAX / REAL_SCAN_STEP) as usize;
    let (mut prev, mut lo) = (f64::INFINITY, 0.0);
    let mut f_lo = f(lo);
    for k in 1..=steps {
        let hi = k as f64 * REAL_SCAN_STEP;
        let f_hi = f(hi);
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_lo.signum() != f_hi.signum() {
            return Ok(bisect_root(&f, lo, hi));
        }
        if f_lo > 0.0 && f_lo <= prev && f_lo <= f_hi {
            let (x, fx) = golden_min(&f, lo - REAL_SCAN_STEP, hi);
            if fx <= DOUBLE_ROOT_TOL {
                return Ok(if fx < 0.0 { bisect_root(&f, lo - REAL_SCAN_STEP, x) } else { x });
            }
        }
        prev = f_lo;
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::NonConvergence(format!(
        "no real root in (0, {REAL_SCAN_MAX}] at theta = {theta}"
    )))
}

fn bisect_root(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Follows the smallest-real-part branch from 10° to `theta` in steps of 1°,
/// halving the step (down to 0.1°) whenever Newton fails or jumps branch.
pub fn solve_exponent(theta: f64) -> Result<CornerExponent> {
    check_angle(theta)?;
    let mut p = newton_root(START_THETA, START_GUESS).ok_or_else(|| {
        Error::NonConvergence("Newton failed at the 10 degree starting point".into())
    })?;
    let mut current = START_THETA;
    let upward = theta >= current;
    let mut step = STEP;

    while current != theta {
        let next = if upward {
            (current + step).min(theta)
        } else {
            (current - step).max(theta)
        };
        // roots of sin((p+1)θ) are spaced 2π/θ apart; stay well inside that
        let jump_limit = 0.25 * PI / next;
        let accepted = newton_root(next, p)
            .map(|q| if q.im < 0.0 { q.conj() } else { q })
            .filter(|q| q.re > 0.0 && (q - p).norm() < jump_limit);
        match accepted {
            Some(q) => {
                current = next;
                p = q;
                step = (2.0 * step).min(STEP);
                if upward && p.im < REAL_ROOT_THRESHOLD {
                    // the conjugate pair has merged onto the real axis
                    let root = smallest_real_root(theta)?;
                    return Ok(CornerExponent::from_root(theta, Complex64::new(root, 0.0)));
                }
            }
            None if step > MIN_STEP * (1.0 + 1e-9) => {
                step = (0.5 * step).max(MIN_STEP);
            }
            None if upward => {
                // past the critical angle the complex branch no longer exists
                let root = smallest_real_root(theta)?;
                return Ok(CornerExponent::from_root(theta, Complex64::new(root, 0.0)));
            }
            None => {
                return Err(Error::NonConvergence(format!(
                    "continuation stalled at theta = {current} on the way to {theta}"
                )))
            }
        }
    }
    Ok(CornerExponent::from_root(theta, p))
}

/// `(e^{π/β}, e^{απ/β})`.
pub fn ratios(exp: &CornerExponent) -> Result<(f64, f64)> {
    if exp.beta <= 0.0 {
        return Err(Error::NoOscillation);
    }
    Ok((
        (PI / exp.beta).exp(),
        (exp.alpha * PI / exp.beta).exp(),
    ))
}

/// Angle above which the exponent becomes real, bisected on `[140°, 150°]`
/// until the bracket is narrower than `tol`.
pub fn critical_angle(tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut lo = 140f64.to_radians();
    let mut hi = 150f64.to_radians();
    if !solve_exponent(lo)?.is_oscillatory() || solve_exponent(hi)?.is_oscillatory() {
        return Err(Error::NonConvergence(
            "bracket [140, 150] degrees does not straddle the critical angle".into(),
        ));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if solve_exponent(mid)?.is_oscillatory() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn exponent_table(thetas: &[f64]) -> Result<Vec<CornerExponent>> {
    thetas.iter().map(|&t| solve_exponent(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn right_angle_matches_reference() {
        let e = solve_exponent(deg(90.0)).unwrap();
        assert!((e.alpha - 3.739593).abs() < 1e-6, "{e:?}");
        assert!(e.residual() < 1e-12);
        assert!((e.beta - 1.119024).abs() < 1e-6, "{e:?}");
        let (z, t) = ratios(&e).unwrap();
        assert!((z - 16.56743).abs() < 1e-4);
        assert!((t / 36267.559 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn thirty_degrees() {
        let e = solve_exponent(deg(30.0)).unwrap();
        assert!((e.alpha - 9.062965).abs() < 1e-6);
        assert!((e.beta - 4.202867).abs() < 1e-6);
    }

    #[test]
    fn sixty_degree_residual() {
        let e = solve_exponent(deg(60.0)).unwrap();
        assert!(e.residual() < 1e-10);
    }

    #[test]
    fn ratios_at_140() {
        let e = solve_exponent(deg(140.0)).unwrap();
        let (z, t) = ratios(&e).unwrap();
        assert!((z / 163533.23 - 1.0).abs() < 1e-6, "{z}");
        assert!((t / 0.5472e15 - 1.0).abs() < 1e-3, "{t}");
    }

    #[test]
    fn beta_pi_gives_e() {
        let e = CornerExponent::from_root(1.0, Complex64::new(0.0, PI));
        let (z, _) = ratios(&e).unwrap();
        assert_eq!(z, std::f64::consts::E);
    }

    #[test]
    fn real_root_has_no_ratios() {
        let e = solve_exponent(deg(160.0)).unwrap();
        assert_eq!(e.beta, 0.0);
        assert!(matches!(ratios(&e), Err(Error::NoOscillation)));
    }

    #[test]
    fn rejects_bad_angles() {
        for t in [0.0, -1.0, PI, 4.0, f64::NAN] {
            assert!(matches!(solve_exponent(t), Err(Error::Domain(_))));
        }
        assert!(critical_angle(0.0).is_err());
    }

    #[test]
    fn small_angles_continue_downward() {
        let e = solve_exponent(deg(5.0)).unwrap();
        assert!(e.residual() < 1e-10);
        assert!(e.alpha > 25.141144 && e.beta > 12.864086);
    }

    #[test]
    fn table_edge_cases() {
        assert!(exponent_table(&[]).unwrap().is_empty());
        let t = exponent_table(&[deg(90.0), deg(90.0)]).unwrap();
        assert_eq!(t[0], t[1]);
    }
}
