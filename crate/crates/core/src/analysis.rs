//! Sign changes along a corner bisector and mirror parity of eigenfunctions.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::assembly::assemble_system;
use crate::corner::CornerExponent;
use crate::error::{Error, Result};
use crate::mesh::{dumbbell_mesh, DumbbellSpec, Mesh};
use crate::solver::{factorize, lowest_eigenpairs, rotate_pair, EigenPair, SolverConfig};
use crate::space::{barycentric, build_space, FunctionSpace};

/// Values (after normalisation to `max |u| = 1`) below this are round-off.
pub const NOISE_FLOOR: f64 = 50.0 * f64::EPSILON;

/// Samples per decade never drop below this.
pub const MIN_SAMPLES_PER_DECADE: usize = 40;

const BARY_TOL: f64 = 1e-12;
const BUCKETS_PER_DECADE: f64 = 8.0;
const SMALLEST_BUCKET_RADIUS: f64 = 1e-14;
const REFINE_REL_TOL: f64 = 1e-12;

/// Finds the triangle containing a point. Triangles are bucketed by the range
/// of their distance from a centre point on a logarithmic scale; misses fall
/// back to a scan of every triangle.
pub struct PointLocator<'a> {
    mesh: &'a Mesh,
    centre: [f64; 2],
    buckets: Vec<Vec<usize>>,
}

fn bucket_of(r: f64) -> usize {
    if r <= SMALLEST_BUCKET_RADIUS {
        0
    } else {
        1 + ((r / SMALLEST_BUCKET_RADIUS).log10() * BUCKETS_PER_DECADE) as usize
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

impl<'a> PointLocator<'a> {
    pub fn new(mesh: &'a Mesh, centre: [f64; 2]) -> Self {
        let mut buckets: Vec<Vec<usize>> = Vec::new();
        for t in 0..mesh.n_triangles() {
            let p = mesh.triangle_points(t);
            let l = barycentric(p, centre);
            let inside = l.iter().all(|&x| x >= -BARY_TOL);
            let near = if inside {
                0.0
            } else {
                (0..3).map(|k| segment_distance(centre, p[k], p[(k + 1) % 3])).fold(f64::MAX, f64::min)
            };
            let far = p.iter().map(|q| (q[0] - centre[0]).hypot(q[1] - centre[1])).fold(0.0, f64::max);
            let (lo, hi) = (bucket_of(near), bucket_of(far));
            if buckets.len() <= hi {
                buckets.resize(hi + 1, Vec::new());
            }
            for b in &mut buckets[lo..=hi] {
                b.push(t);
            }
        }
        PointLocator { mesh, centre, buckets }
    }

    fn score(&self, t: usize, x: [f64; 2]) -> (f64, [f64; 3]) {
        let l = barycentric(self.mesh.triangle_points(t), x);
        (l[0].min(l[1]).min(l[2]), l)
    }

    /// Containing triangle and barycentric coordinates of `x`.
    pub fn locate(&self, x: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let r = (x[0] - self.centre[0]).hypot(x[1] - self.centre[1]);
        if let Some(cands) = self.buckets.get(bucket_of(r)) {
            if let Some(hit) = self.best(cands.iter().copied(), x) {
                return Some(hit);
            }
        }
        self.best(0..self.mesh.n_triangles(), x)
    }

    fn best(&self, cands: impl Iterator<Item = usize>, x: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(f64, usize, [f64; 3])> = None;
        for t in cands {
            let (s, l) = self.score(t, x);
            if s >= 0.0 {
                return Some((t, l));
            }
            if best.is_none_or(|b| s > b.0) {
                best = Some((s, t, l));
            }
        }
        best.filter(|b| b.0 >= -BARY_TOL).map(|b| (b.1, b.2))
    }
}

/// Brute-force location over all triangles, for cross-checking.
pub fn locate_exhaustive(mesh: &Mesh, x: [f64; 2]) -> Option<(usize, [f64; 3])> {
    (0..mesh.n_triangles())
        .map(|t| (t, barycentric(mesh.triangle_points(t), x)))
        .max_by(|a, b| {
            let sa = a.1[0].min(a.1[1]).min(a.1[2]);
            let sb = b.1[0].min(b.1[1]).min(b.1[2]);
            sa.total_cmp(&sb)
        })
        .filter(|(_, l)| l.iter().all(|&v| v >= -BARY_TOL))
}

/// Evaluates a finite element field along the ray from the mesh corner.
pub struct Ray<'a> {
    space: &'a FunctionSpace,
    coeffs: Vec<f64>,
    corner: [f64; 2],
    direction: [f64; 2],
    locator: PointLocator<'a>,
}

impl<'a> Ray<'a> {
    /// `coeffs` is over all dofs in ordered numbering and is divided by
    /// `scale` once.
    pub fn new(space: &'a FunctionSpace, coeffs: &[f64], scale: f64) -> Result<Self> {
        let mesh = space.mesh();
        let corner = mesh
            .corner
            .ok_or_else(|| Error::InvalidSpec("mesh has no corner metadata".into()))?;
        let c = mesh.vertices[corner.vertex];
        Ok(Ray {
            space,
            coeffs: coeffs.iter().map(|x| x / scale).collect(),
            corner: c,
            direction: corner.bisector,
            locator: PointLocator::new(mesh, c),
        })
    }

    pub fn point(&self, r: f64) -> [f64; 2] {
        [self.corner[0] + r * self.direction[0], self.corner[1] + r * self.direction[1]]
    }

    pub fn sample(&self, r: f64) -> Result<(usize, f64)> {
        let (t, l) = self.locator.locate(self.point(r)).ok_or(Error::PointLocation { radius: r })?;
        Ok((t, self.space.eval(&self.coeffs, t, l)))
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        self.sample(r).map(|s| s.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectorProfile {
    /// Strictly decreasing geometric radii.
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Triangle used for each sample.
    pub element_trace: Vec<usize>,
    /// Signed dof value the field was divided by.
    pub scale: f64,
}

/// Normalisation making the largest dof coefficient `+1`.
pub fn max_normalisation(coeffs: &[f64]) -> f64 {
    coeffs.iter().copied().fold(0.0, |m: f64, x| if x.abs() > m.abs() { x } else { m })
}

/// Samples per decade for an expected zero ratio: enough for ten samples
/// between consecutive zeros, and never fewer than [`MIN_SAMPLES_PER_DECADE`].
pub fn samples_per_decade(zero_ratio: Option<f64>) -> usize {
    match zero_ratio {
        Some(q) if q > 1.0 => MIN_SAMPLES_PER_DECADE.max((10.0 / q.log10()).ceil() as usize),
        _ => MIN_SAMPLES_PER_DECADE,
    }
}

/// Samples the eigenfunction at `n_samples` geometric radii from `r_max` down
/// to `r_min` along the corner bisector.
pub fn evaluate_on_bisector(
    pair: &EigenPair,
    space: &FunctionSpace,
    n_samples: usize,
    r_min: f64,
    r_max: f64,
) -> Result<BisectorProfile> {
    if !(r_min > 0.0 && r_max > r_min) || n_samples < 2 {
        return Err(Error::InvalidSpec(format!(
            "need 0 < r_min < r_max and at least 2 samples, got [{r_min}, {r_max}] with {n_samples}"
        )));
    }
    let coeffs = space.extend_interior(&pair.u);
    profile_of(space, &coeffs, n_samples, r_min, r_max)
}

/// [`evaluate_on_bisector`] for an arbitrary field over all ordered dofs.
pub fn profile_of(
    space: &FunctionSpace,
    coeffs: &[f64],
    n_samples: usize,
    r_min: f64,
    r_max: f64,
) -> Result<BisectorProfile> {
    let scale = max_normalisation(coeffs);
    if scale == 0.0 {
        return Err(Error::InvalidSpec("field is identically zero".into()));
    }
    let ray = Ray::new(space, coeffs, scale)?;
    let q = (r_min / r_max).powf(1.0 / (n_samples - 1) as f64);
    let mut radii = Vec::with_capacity(n_samples);
    let mut values = Vec::with_capacity(n_samples);
    let mut element_trace = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let r = if k + 1 == n_samples { r_min } else { r_max * q.powi(k as i32) };
        let (t, v) = ray.sample(r)?;
        radii.push(r);
        values.push(v);
        element_trace.push(t);
    }
    Ok(BisectorProfile { radii, values, element_trace, scale })
}

/// Maximal runs of samples sharing a sign, as `(first, last, amplitude)`.
fn lobes(values: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out: Vec<(usize, usize, f64)> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(last) if (values[last.0] >= 0.0) == (v >= 0.0) => {
                last.1 = k;
                last.2 = last.2.max(v.abs());
            }
            _ => out.push((k, k, v.abs())),
        }
    }
    out
}

/// Sign changes between samples `k` and `k + 1`, dropping those where the
/// lobes on both sides stay below the noise floor.
fn significant_flips(profile: &BisectorProfile) -> Vec<usize> {
    lobes(&profile.values)
        .windows(2)
        .filter(|w| w[0].2.max(w[1].2) >= NOISE_FLOOR)
        .map(|w| w[0].1)
        .collect()
}

fn bisect_zero(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    while hi - lo > REFINE_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Zeros `s_1 > s_2 > ...` along the bisector of the field in `pair`.
pub fn find_zeros(profile: &BisectorProfile, space: &FunctionSpace, pair: &EigenPair) -> Result<Vec<f64>> {
    let coeffs = space.extend_interior(&pair.u);
    zeros_of(profile, space, &coeffs)
}

/// [`find_zeros`] for an arbitrary field over all ordered dofs.
pub fn zeros_of(profile: &BisectorProfile, space: &FunctionSpace, coeffs: &[f64]) -> Result<Vec<f64>> {
    let ray = Ray::new(space, coeffs, profile.scale)?;
    significant_flips(profile)
        .into_iter()
        .map(|k| bisect_zero(|r| ray.value(r), profile.radii[k + 1], profile.radii[k]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub r: f64,
    /// Signed value, in units of the profile normalisation.
    pub t: f64,
}

fn golden_max(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > REFINE_REL_TOL * b {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
        if c <= a || d >= b {
            break;
        }
    }
    let r = 0.5 * (a + b);
    Ok((r, f(r)?))
}

/// One extremum inside each lobe beyond a reported zero: `r_n` lies between
/// `s_{n+1}` and `s_n`. The innermost lobe runs to the next sign change of the
/// samples, significant or not. Reporting stops at the first lobe whose
/// samples all stay below the noise floor.
pub fn find_extrema(
    profile: &BisectorProfile,
    space: &FunctionSpace,
    pair: &EigenPair,
) -> Result<Vec<Extremum>> {
    let coeffs = space.extend_interior(&pair.u);
    extrema_of(profile, space, &coeffs)
}

/// [`find_extrema`] for an arbitrary field over all ordered dofs.
pub fn extrema_of(profile: &BisectorProfile, space: &FunctionSpace, coeffs: &[f64]) -> Result<Vec<Extremum>> {
    let ray = Ray::new(space, coeffs, profile.scale)?;
    let flips = significant_flips(profile);
    let v = &profile.values;
    let mut out = Vec::with_capacity(flips.len());
    for (n, &k) in flips.iter().enumerate() {
        // samples of the lobe inside this zero
        let first = k + 1;
        let last = match flips.get(n + 1) {
            Some(&next) => next,
            None => {
                let mut end = first;
                while end + 1 < v.len() && (v[end + 1] >= 0.0) == (v[first] >= 0.0) {
                    end += 1;
                }
                end
            }
        };
        let peak = (first..=last).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
        if v[peak].abs() < NOISE_FLOOR {
            break;
        }
        let lo = profile.radii[(peak + 1).min(v.len() - 1)];
        let hi = profile.radii[peak.saturating_sub(1)];
        let sign = v[peak].signum();
        let (r, _) = golden_max(|r| ray.value(r).map(|x| sign * x), lo, hi)?;
        out.push(Extremum { r, t: ray.value(r)? });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillationReport {
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    /// `s_n / s_{n+1}`.
    pub s_ratios: Vec<f64>,
    /// `r_n / r_{n+1}`.
    pub r_ratios: Vec<f64>,
    /// `|t_n / t_{n+1}|`.
    pub t_ratios: Vec<f64>,
    pub predicted: CornerExponent,
}

fn consecutive(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| (w[0] / w[1]).abs()).collect()
}

/// Checks interlacing `s_{n+1} < r_n < s_n` and alternating extremum signs,
/// then forms all consecutive ratios.
pub fn oscillation_report(
    zeros: &[f64],
    extrema: &[Extremum],
    exponent: CornerExponent,
) -> Result<OscillationReport> {
    if zeros.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSpec("zeros are not strictly decreasing".into()));
    }
    if extrema.len() > zeros.len() {
        return Err(Error::InvalidSpec("more extrema than zeros".into()));
    }
    for (n, e) in extrema.iter().enumerate() {
        let inner = zeros.get(n + 1).copied().unwrap_or(0.0);
        if !(e.r < zeros[n] && e.r > inner) {
            return Err(Error::InvalidSpec(format!("extremum {} at r = {} is not between its zeros", n + 1, e.r)));
        }
    }
    if extrema.windows(2).any(|w| w[0].t.signum() == w[1].t.signum()) {
        return Err(Error::InvalidSpec("extremum signs do not alternate".into()));
    }
    let r: Vec<f64> = extrema.iter().map(|e| e.r).collect();
    let t: Vec<f64> = extrema.iter().map(|e| e.t).collect();
    Ok(OscillationReport {
        s_ratios: consecutive(zeros),
        r_ratios: consecutive(&r),
        t_ratios: consecutive(&t),
        s: zeros.to_vec(),
        r,
        t,
        predicted: exponent,
    })
}

/// Bisector profile, zeros, extrema and ratios in one call, sampled from
/// `r_min` to `r_max` at the density given by [`samples_per_decade`].
pub fn analyse_corner(
    pair: &EigenPair,
    space: &FunctionSpace,
    exponent: CornerExponent,
    r_min: f64,
    r_max: f64,
) -> Result<(BisectorProfile, OscillationReport)> {
    let per_decade = samples_per_decade(exponent.zero_ratio);
    let n = ((r_max / r_min).log10() * per_decade as f64).ceil() as usize + 1;
    let profile = evaluate_on_bisector(pair, space, n, r_min, r_max)?;
    let zeros = find_zeros(&profile, space, pair)?;
    let extrema = find_extrema(&profile, space, pair)?;
    let report = oscillation_report(&zeros, &extrema, exponent)?;
    Ok((profile, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    Even,
    Odd,
    Indeterminate,
}

impl ParityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ParityClass::Even => "even",
            ParityClass::Odd => "odd",
            ParityClass::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for ParityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scores at or above this leave the class indeterminate.
pub const PARITY_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parity {
    pub class: ParityClass,
    /// `‖u∘m - u‖ / ‖u‖`.
    pub even_score: f64,
    /// `‖u∘m + u‖ / ‖u‖`.
    pub odd_score: f64,
}

impl Parity {
    /// Score of the assigned class, or the smaller one if indeterminate.
    pub fn score(&self) -> f64 {
        match self.class {
            ParityClass::Even => self.even_score,
            ParityClass::Odd => self.odd_score,
            ParityClass::Indeterminate => self.even_score.min(self.odd_score),
        }
    }
}

const MIRROR_GRID: f64 = 1e8;
const MIRROR_TOL: f64 = 1e-9;

/// Permutation of ordered dofs under `x -> -x`.
pub fn mirror_map(space: &FunctionSpace) -> Result<Vec<usize>> {
    let n = space.n_dofs();
    let key = |p: [f64; 2]| ((p[0] * MIRROR_GRID).round() as i64, (p[1] * MIRROR_GRID).round() as i64);
    let mut index: HashMap<(i64, i64), Vec<usize>> = HashMap::with_capacity(n);
    for k in 0..n {
        index.entry(key(space.ordered_coords(k))).or_default().push(k);
    }
    let mut map = vec![usize::MAX; n];
    for (k, slot) in map.iter_mut().enumerate() {
        let p = space.ordered_coords(k);
        let q = [-p[0], p[1]];
        let (kx, ky) = key(q);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = index.get(&(kx + dx, ky + dy)) {
                    for &j in list {
                        let c = space.ordered_coords(j);
                        if (c[0] - q[0]).abs() <= MIRROR_TOL && (c[1] - q[1]).abs() <= MIRROR_TOL {
                            found = Some(j);
                            break 'search;
                        }
                    }
                }
            }
        }
        let j = found.ok_or_else(|| {
            Error::AsymmetricMesh(format!("no mirror dof for ({}, {})", p[0], p[1]))
        })?;
        if (k < space.n_i) != (j < space.n_i) {
            return Err(Error::AsymmetricMesh(format!(
                "dof at ({}, {}) and its mirror differ in boundary status",
                p[0], p[1]
            )));
        }
        *slot = j;
    }
    Ok(map)
}

/// Parity of a field given over all ordered dofs.
pub fn parity_of(coeffs: &[f64], mirror: &[usize]) -> Parity {
    let norm = coeffs.iter().map(|x| x * x).sum::<f64>().sqrt();
    let score = |sign: f64| {
        let d: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, &x)| (coeffs[mirror[k]] - sign * x).powi(2))
            .sum();
        if norm > 0.0 {
            d.sqrt() / norm
        } else {
            f64::INFINITY
        }
    };
    let (even_score, odd_score) = (score(1.0), score(-1.0));
    let class = if even_score < PARITY_THRESHOLD {
        ParityClass::Even
    } else if odd_score < PARITY_THRESHOLD {
        ParityClass::Odd
    } else {
        ParityClass::Indeterminate
    };
    Parity { class, even_score, odd_score }
}

pub fn parity(pair: &EigenPair, space: &FunctionSpace) -> Result<Parity> {
    let mirror = mirror_map(space)?;
    Ok(parity_of(&space.extend_interior(&pair.u), &mirror))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityRow {
    pub c: f64,
    pub lambda_even: f64,
    pub lambda_odd: f64,
    /// `λ_even / λ_odd`.
    pub ratio: f64,
    pub n_dofs: usize,
    pub even: Parity,
    pub odd: Parity,
}

impl ParityRow {
    /// Parity of the eigenfunction belonging to the smaller eigenvalue.
    pub fn smallest_class(&self) -> ParityClass {
        if self.lambda_even <= self.lambda_odd {
            self.even.class
        } else {
            self.odd.class
        }
    }

    pub fn unambiguous(&self) -> bool {
        self.even.class == ParityClass::Even && self.odd.class == ParityClass::Odd
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParitySweep {
    pub rows: Vec<ParityRow>,
    /// Indices `k` such that rows `k` and `k + 1` lie on opposite sides of
    /// ratio 1.
    pub crossings: Vec<usize>,
}

/// The two smallest eigenpairs of the dumbbell for one `c`, labelled by
/// parity. If the classification is not one even and one odd function, the
/// pair with the smaller even score is taken as the even one.
pub fn parity_row(spec: DumbbellSpec, config: &SolverConfig) -> Result<ParityRow> {
    let space = build_space(std::sync::Arc::new(dumbbell_mesh(spec)?))?;
    let system = assemble_system(&space)?;
    let factorization = factorize(&system)?;
    let mirror = mirror_map(&space)?;
    let mut pairs = lowest_eigenpairs(&system, &factorization, config, 2)?;
    let classify = |pairs: &[EigenPair]| -> Vec<Parity> {
        pairs.iter().map(|q| parity_of(&space.extend_interior(&q.u), &mirror)).collect()
    };
    let mut p = classify(&pairs);
    if !matches!((p[0].class, p[1].class), (ParityClass::Even, ParityClass::Odd) | (ParityClass::Odd, ParityClass::Even)) {
        // nearly degenerate pair: turn the basis so it diagonalises the mirror
        let b_op = config.problem.rhs(&system);
        let reflect = |u: &[f64]| -> Vec<f64> { (0..u.len()).map(|k| u[mirror[k]]).collect() };
        let bu: Vec<Vec<f64>> = pairs.iter().map(|q| b_op.mul_vec(&q.u)).collect();
        let ru: Vec<Vec<f64>> = pairs.iter().map(|q| reflect(&q.u)).collect();
        let d = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        let (p00, p11) = (d(&bu[0], &ru[0]), d(&bu[1], &ru[1]));
        let p01 = 0.5 * (d(&bu[0], &ru[1]) + d(&bu[1], &ru[0]));
        let angle = 0.5 * (2.0 * p01).atan2(p00 - p11);
        let [a, b] = rotate_pair(&system, config.problem, &pairs[0], &pairs[1], angle);
        pairs = vec![a, b];
        p = classify(&pairs);
    }
    let (e, o) = match (p[0].class, p[1].class) {
        (ParityClass::Even, ParityClass::Odd) => (0, 1),
        (ParityClass::Odd, ParityClass::Even) => (1, 0),
        _ if p[0].even_score <= p[1].even_score => (0, 1),
        _ => (1, 0),
    };
    Ok(ParityRow {
        c: spec.c,
        lambda_even: pairs[e].lambda,
        lambda_odd: pairs[o].lambda,
        ratio: pairs[e].lambda / pairs[o].lambda,
        n_dofs: space.n_dofs(),
        even: p[e],
        odd: p[o],
    })
}

/// [`parity_row`] for every `c`, in parallel, with crossings of ratio 1
/// flagged between neighbouring rows.
pub fn parity_sweep(
    c_values: &[f64],
    grid: impl Fn(f64) -> (usize, usize) + Sync,
    config: &SolverConfig,
) -> Result<ParitySweep> {
    if let Some(&c) = c_values.iter().find(|&&c| !(c > 0.0)) {
        return Err(Error::InvalidSpec(format!("c must be positive, got {c}")));
    }
    let rows: Vec<ParityRow> = c_values
        .par_iter()
        .map(|&c| {
            let (nx, ny) = grid(c);
            parity_row(DumbbellSpec { c, nx, ny }, config)
        })
        .collect::<Result<_>>()?;
    let crossings = rows
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0].ratio - 1.0).signum() != (w[1].ratio - 1.0).signum())
        .map(|(k, _)| k)
        .collect();
    Ok(ParitySweep { rows, crossings })
}
