use std::f64::consts::PI;

use biharm::corner::newton_root;
use biharm::{critical_angle, exponent_table, solve_exponent};
use num_complex::Complex64;

fn f(p: f64, theta: f64) -> f64 {
    p + 1.0 + ((p + 1.0) * theta).sin() / theta.sin()
}

fn fc(p: Complex64, theta: f64) -> Complex64 {
    p + 1.0 + ((p + 1.0) * theta).sin() / theta.sin()
}

// (theta, alpha, beta, e^{π/β}) from the published exponent table
const TABLE: [(f64, f64, f64, f64); 14] = [
    (10.0, 25.141144, 12.864086, 1.27662),
    (20.0, 13.079480, 6.384388, 1.63571),
    (30.0, 9.062965, 4.202867, 2.11169),
    (40.0, 7.057831, 3.095366, 2.75918),
    (50.0, 5.857356, 2.416840, 3.66884),
    (60.0, 5.059329, 1.952050, 4.99972),
    (70.0, 4.491404, 1.608491, 7.05073),
    (80.0, 4.067435, 1.339586, 10.43532),
    (90.0, 3.739593, 1.119024, 16.56743),
    (100.0, 3.479215, 0.930373, 29.27404),
    (110.0, 3.268096, 0.762118, 61.69387),
    (120.0, 3.094139, 0.604585, 180.5992),
    (130.0, 2.949023, 0.446356, 1139.464),
    (140.0, 2.826869, 0.261695, 163533.23),
];

#[test]
fn published_table_to_six_decimals() {
    let thetas: Vec<f64> = TABLE.iter().map(|r| r.0.to_radians()).collect();
    for (e, &(deg, alpha, beta, q)) in exponent_table(&thetas).unwrap().iter().zip(&TABLE) {
        assert!((e.alpha - alpha).abs() < 1e-5, "{deg}: alpha {}", e.alpha);
        assert!((e.beta - beta).abs() < 1e-5, "{deg}: beta {}", e.beta);
        let z = e.zero_ratio.unwrap();
        assert!((z - q).abs() / q < 5e-6, "{deg}: zero ratio {z}");
        assert!(e.residual() < 1e-10);
    }
}

/// Angle at which the first positive local minimum of the real restriction
/// touches zero, i.e. where a double real root appears.
fn double_root_angle() -> f64 {
    let min_f = |theta: f64| {
        let grid: Vec<f64> = (1..4000).map(|k| k as f64 * 1e-3).collect();
        let k = (0..grid.len()).min_by(|&a, &b| f(grid[a], theta).total_cmp(&f(grid[b], theta))).unwrap();
        let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let (c, d) = (b - g * (b - a), a + g * (b - a));
            if f(c, theta) < f(d, theta) {
                b = d;
            } else {
                a = c;
            }
        }
        f(0.5 * (a + b), theta)
    };
    let (mut lo, mut hi) = (140f64.to_radians(), 150f64.to_radians());
    assert!(min_f(lo) > 0.0 && min_f(hi) < 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if min_f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn critical_angle_matches_double_root_oracle() {
    let oracle = double_root_angle();
    let theta_c = critical_angle(1e-4 * PI).unwrap();
    assert!((theta_c - oracle).abs() <= 1e-4 * PI, "{} vs {}", theta_c / PI, oracle / PI);
    assert!((theta_c / PI - 0.8128).abs() <= 1e-3, "{}", theta_c / PI);
    let fine = critical_angle(1e-9).unwrap();
    assert!((fine - oracle).abs() < 1e-7, "{} vs {}", fine / PI, oracle / PI);
    assert!(solve_exponent(theta_c - 0.01 * PI).unwrap().beta > 0.0);
    assert_eq!(solve_exponent(theta_c + 0.01 * PI).unwrap().beta, 0.0);
}

#[test]
fn critical_angle_is_stable_under_tolerance_halving() {
    let a = critical_angle(1e-4 * PI).unwrap();
    let b = critical_angle(0.5e-4 * PI).unwrap();
    assert!((a - b).abs() < 1e-3 * PI);
}

#[test]
fn real_root_at_160_degrees_matches_bisection_oracle() {
    let theta = 160f64.to_radians();
    let step = 1e-3;
    let mut a = step;
    while f(a, theta).signum() == f(a + step, theta).signum() {
        a += step;
        assert!(a < 20.0, "no sign change");
    }
    let mut b = a + step;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m, theta).signum() == f(a, theta).signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let e = solve_exponent(theta).unwrap();
    assert_eq!(e.beta, 0.0);
    assert!(e.zero_ratio.is_none());
    assert!((e.p().re - 0.5 * (a + b)).abs() < 1e-9, "{} vs {}", e.p().re, a);
}

/// Newton from every point of a grid over `0 < Re p < 30`, `0 <= Im p < 15`;
/// no converged root has a smaller positive real part than the returned one.
#[test]
fn branch_audit_by_grid_scan() {
    for deg in [30.0, 90.0, 140.0] {
        let theta = f64::to_radians(deg);
        let ours = solve_exponent(theta).unwrap().p();
        let mut best: Option<Complex64> = None;
        for i in 1..60 {
            for j in 0..30 {
                let mut p = Complex64::new(0.5 * i as f64, 0.5 * j as f64);
                for _ in 0..60 {
                    let d = 1.0 + theta * ((p + 1.0) * theta).cos() / theta.sin();
                    p -= fc(p, theta) / d;
                }
                if !(fc(p, theta).norm() < 1e-10) || p.re <= 1e-6 || !p.re.is_finite() {
                    continue;
                }
                let p = if p.im < 0.0 { p.conj() } else { p };
                if best.map_or(true, |b| p.re < b.re - 1e-9) {
                    best = Some(p);
                }
            }
        }
        let best = best.unwrap();
        assert!((best - ours).norm() < 1e-8, "{deg}: scan {best}, continuation {ours}");
    }
}

#[test]
fn continuation_does_not_jump_branches() {
    for k in 0..=130 {
        let theta = (10.0 + k as f64).to_radians();
        let p = solve_exponent(theta).unwrap().p();
        let next = theta + 0.1f64.to_radians();
        let q = newton_root(next, p).unwrap();
        assert!((q - p).norm() < 0.5);
        let direct = solve_exponent(next).unwrap().p();
        assert!((q - direct).norm() < 1e-8, "{} deg", theta.to_degrees());
    }
}

#[test]
fn monotone_in_angle() {
    let grid: Vec<f64> = (1..=146).map(|d| f64::to_radians(d as f64)).collect();
    let table = exponent_table(&grid).unwrap();
    assert!(table.iter().all(|e| e.alpha > 0.0 && e.beta > 0.0));
    assert!(table.windows(2).all(|w| w[1].beta < w[0].beta));
    assert!(table.windows(2).all(|w| w[1].zero_ratio.unwrap() > w[0].zero_ratio.unwrap()));
    for e in &table {
        assert_eq!(e.zero_ratio.unwrap(), (PI / e.beta).exp());
        assert!(e.residual() < 1e-10);
    }
}
