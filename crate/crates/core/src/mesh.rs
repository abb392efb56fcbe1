//! Triangulations of the unit square, circular sectors, dumbbells and disks.
//!
//! Corner-graded meshes are stacks of "rings" around the corner: a uniform core
//! of radius `rho1` followed by rings whose radii grow geometrically by `1 + h1`,
//! so that the element size is about `r * h1` at distance `r` from the corner.
//! Consecutive rings are stitched together by a zipper triangulation, which
//! keeps the mesh conforming when ring vertex counts differ.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Default upper bound on the number of vertices a generator may produce.
pub const DEFAULT_VERTEX_CAP: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Dirichlet,
    ArcDirichlet,
}

impl BoundaryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Dirichlet => "dirichlet",
            BoundaryTag::ArcDirichlet => "arc_dirichlet",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(BoundaryTag::Dirichlet),
            "arc_dirichlet" => Ok(BoundaryTag::ArcDirichlet),
            other => Err(Error::Parse(format!("unknown boundary tag '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
}

/// Distinguished corner vertex and the unit vector bisecting its angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub vertex: usize,
    pub bisector: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorVariant {
    /// Arc replaced by chords; the polygon lies inside the sector.
    Inner,
    /// Arc replaced by tangent segments; the polygon contains the sector.
    Outer,
}

impl SectorVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            SectorVariant::Inner => "inner",
            SectorVariant::Outer => "outer",
        }
    }
}

impl std::str::FromStr for SectorVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inner" => Ok(SectorVariant::Inner),
            "outer" => Ok(SectorVariant::Outer),
            other => Err(Error::Parse(format!("unknown sector variant '{other}'"))),
        }
    }
}

/// Unit-radius sector spanning polar angles `[0, theta]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSpec {
    pub theta: f64,
    pub h1: f64,
    pub rho1: f64,
    pub variant: SectorVariant,
}

impl SectorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < PI) {
            return Err(Error::InvalidSpec(format!("theta = {} not in (0, pi)", self.theta)));
        }
        check_grading(self.h1, self.rho1, 1.0)
    }
}

/// Region `|y| <= c + x^2 - x^4` meshed on an `nx` by `ny` mapped grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DumbbellSpec {
    pub c: f64,
    pub nx: usize,
    pub ny: usize,
}

impl DumbbellSpec {
    /// Positive root of `c + x^2 - x^4 = 0`.
    pub fn x_max(&self) -> f64 {
        (0.5 * (1.0 + (1.0 + 4.0 * self.c).sqrt())).sqrt()
    }

    pub fn half_width(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.c + x2 - x2 * x2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainMeta {
    Square { h1: f64, rho1: f64 },
    Sector(SectorSpec),
    Dumbbell(DumbbellSpec),
    Disk { rings: usize },
    Imported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub corner: Option<Corner>,
    pub meta: DomainMeta,
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn triangle_diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }

    pub fn triangle_centroid(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.triangle_points(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    /// Unique undirected edges, in order of first appearance, with the number
    /// of triangles sharing each.
    pub fn edges(&self) -> (Vec<[usize; 2]>, HashMap<(usize, usize), usize>) {
        let mut index = HashMap::with_capacity(3 * self.triangles.len() / 2 + 16);
        let mut list = Vec::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let key = edge_key(tri[k], tri[(k + 1) % 3]);
                index.entry(key).or_insert_with(|| {
                    list.push([key.0, key.1]);
                    list.len() - 1
                });
            }
        }
        (list, index)
    }

    /// Checks positivity, conformity and closed tagged boundary loops.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            let area = self.triangle_area(t);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!("triangle {t} has area {area:e}")));
            }
        }
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                *count.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        if let Some((e, c)) = count.iter().find(|(_, &c)| c > 2) {
            return Err(Error::InvalidMesh(format!("edge {e:?} shared by {c} triangles")));
        }
        let mut tagged = HashMap::new();
        for be in &self.boundary_edges {
            let key = edge_key(be.vertices[0], be.vertices[1]);
            if tagged.insert(key, be.tag).is_some() {
                return Err(Error::InvalidMesh(format!("boundary edge {key:?} listed twice")));
            }
            if count.get(&key) != Some(&1) {
                return Err(Error::InvalidMesh(format!(
                    "boundary edge {key:?} is not on the boundary of the triangulation"
                )));
            }
        }
        let n_open = count.values().filter(|&&c| c == 1).count();
        if n_open != tagged.len() {
            return Err(Error::InvalidMesh(format!(
                "{n_open} boundary edges in the triangulation but {} tagged",
                tagged.len()
            )));
        }
        let mut degree: HashMap<usize, usize> = HashMap::new();
        for key in tagged.keys() {
            *degree.entry(key.0).or_default() += 1;
            *degree.entry(key.1).or_default() += 1;
        }
        if let Some((v, d)) = degree.iter().find(|(_, &d)| d != 2) {
            return Err(Error::InvalidMesh(format!(
                "boundary vertex {v} has boundary degree {d}; loops are not closed"
            )));
        }
        Ok(())
    }

    /// Triangles violating `diameter <= 3 h1 max(r, rho1)`, with `r` the centroid
    /// distance from the corner.
    pub fn grading_violations(&self, h1: f64, rho1: f64) -> Vec<usize> {
        let Some(corner) = self.corner else {
            return Vec::new();
        };
        let c = self.vertices[corner.vertex];
        (0..self.n_triangles())
            .filter(|&t| {
                let r = dist(self.triangle_centroid(t), c);
                self.triangle_diameter(t) > 3.0 * h1 * r.max(rho1)
            })
            .collect()
    }

    /// Writes the plain text format: `nv nt nb`, then vertices, triangles and
    /// tagged boundary edges, one per line.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "{} {} {}",
            self.vertices.len(),
            self.triangles.len(),
            self.boundary_edges.len()
        )?;
        for v in &self.vertices {
            writeln!(w, "{:.17e} {:.17e}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        for e in &self.boundary_edges {
            writeln!(w, "{} {} {}", e.vertices[0], e.vertices[1], e.tag.as_str())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("mesh text is ASCII")
    }

    /// Reads the text format. Corner and domain metadata are not part of the
    /// format; the result carries `DomainMeta::Imported`.
    pub fn read_text<R: BufRead>(r: R) -> Result<Mesh> {
        let mut lines = r.lines();
        let mut next_line = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("unexpected end of file reading {what}")))?
                .map_err(Error::from)
        };
        let header = next_line("header")?;
        let counts: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad header '{header}'"))))
            .collect::<Result<_>>()?;
        let [nv, nt, nb] = counts[..] else {
            return Err(Error::Parse(format!("header needs 3 counts, got '{header}'")));
        };
        fn fields<const N: usize>(line: &str) -> Result<[&str; N]> {
            let parts: Vec<&str> = line.split_whitespace().collect();
            parts
                .try_into()
                .map_err(|_| Error::Parse(format!("expected {N} fields in '{line}'")))
        }
        fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))
        }
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let line = next_line("vertex")?;
            let [x, y] = fields::<2>(&line)?;
            vertices.push([num(x)?, num(y)?]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let line = next_line("triangle")?;
            let [a, b, c] = fields::<3>(&line)?;
            triangles.push([num(a)?, num(b)?, num(c)?]);
        }
        let mut boundary_edges = Vec::with_capacity(nb);
        for _ in 0..nb {
            let line = next_line("boundary edge")?;
            let [a, b, tag] = fields::<3>(&line)?;
            boundary_edges.push(BoundaryEdge {
                vertices: [num(a)?, num(b)?],
                tag: BoundaryTag::parse(tag)?,
            });
        }
        Ok(Mesh {
            vertices,
            triangles,
            boundary_edges,
            corner: None,
            meta: DomainMeta::Imported,
        })
    }

    /// Short human readable summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{} vertices, {} triangles, {} boundary edges",
            self.vertices.len(),
            self.triangles.len(),
            self.boundary_edges.len()
        );
        s
    }
}

fn check_grading(h1: f64, rho1: f64, rho_max: f64) -> Result<()> {
    if !(h1 > 0.0 && h1 < 1.0) {
        return Err(Error::InvalidSpec(format!("h1 = {h1} not in (0, 1)")));
    }
    if !(rho1 > 0.0 && rho1 < rho_max) {
        return Err(Error::InvalidSpec(format!("rho1 = {rho1} not in (0, {rho_max})")));
    }
    Ok(())
}

/// Ring of vertices parameterised by `t` in `[0, 1]`.
type Ring = Vec<(f64, usize)>;

#[derive(Default)]
struct Builder {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<BoundaryEdge>,
}

impl Builder {
    fn vertex(&mut self, p: [f64; 2]) -> usize {
        self.vertices.push(p);
        self.vertices.len() - 1
    }

    fn triangle(&mut self, a: usize, b: usize, c: usize) {
        let area = signed_area(self.vertices[a], self.vertices[b], self.vertices[c]);
        if area >= 0.0 {
            self.triangles.push([a, b, c]);
        } else {
            self.triangles.push([a, c, b]);
        }
    }

    fn boundary(&mut self, a: usize, b: usize, tag: BoundaryTag) {
        self.boundary.push(BoundaryEdge { vertices: [a, b], tag });
    }

    /// Triangulates the strip between an inner and an outer ring. At each step
    /// the ring whose next vertex has the smaller parameter advances; ties pick
    /// the shorter diagonal.
    fn zipper(&mut self, inner: &Ring, outer: &Ring) {
        if inner.len() == 1 {
            let c = inner[0].1;
            for w in outer.windows(2) {
                self.triangle(c, w[0].1, w[1].1);
            }
            return;
        }
        let (mut i, mut j) = (0, 0);
        let (m, n) = (inner.len() - 1, outer.len() - 1);
        while i < m || j < n {
            let advance_outer = if i == m {
                true
            } else if j == n {
                false
            } else {
                let (ti, tj) = (inner[i + 1].0, outer[j + 1].0);
                if (ti - tj).abs() <= 1e-12 {
                    let d_outer = dist(self.vertices[inner[i].1], self.vertices[outer[j + 1].1]);
                    let d_inner = dist(self.vertices[inner[i + 1].1], self.vertices[outer[j].1]);
                    d_outer <= d_inner
                } else {
                    tj < ti
                }
            };
            if advance_outer {
                self.triangle(inner[i].1, outer[j].1, outer[j + 1].1);
                j += 1;
            } else {
                self.triangle(inner[i].1, outer[j].1, inner[i + 1].1);
                i += 1;
            }
        }
    }

    fn finish(self, corner: Option<Corner>, meta: DomainMeta) -> Mesh {
        Mesh {
            vertices: self.vertices,
            triangles: self.triangles,
            boundary_edges: self.boundary,
            corner,
            meta,
        }
    }
}

/// Radii and per-ring vertex counts of a corner-graded ring stack: a uniform
/// core of radius `rho1` followed by geometric rings up to `1`.
struct RingPlan {
    radii: Vec<f64>,
    counts: Vec<usize>,
}

impl RingPlan {
    /// `n_outer` divisions on every graded ring; core rings are sized so that
    /// their segments stay near `rho1 * h1`. Counts are rounded up to a
    /// multiple of `multiple`.
    fn new(h1: f64, rho1: f64, n_outer: usize, multiple: usize) -> RingPlan {
        let round_up = |n: usize| n.max(1).div_ceil(multiple) * multiple;
        let core = (1.0 / h1).ceil() as usize;
        let mut radii = Vec::new();
        let mut counts = Vec::new();
        for j in 1..=core {
            radii.push(rho1 * j as f64 / core as f64);
            counts.push(round_up((n_outer as f64 * j as f64 / core as f64).ceil() as usize));
        }
        *counts.last_mut().unwrap() = n_outer;
        let graded = ((1.0 / rho1).ln() / (1.0 + h1).ln()).ceil().max(1.0) as usize;
        let q = (1.0 / rho1).powf(1.0 / graded as f64);
        for k in 1..=graded {
            radii.push(if k == graded { 1.0 } else { rho1 * q.powi(k as i32) });
            counts.push(n_outer);
        }
        RingPlan { radii, counts }
    }

    fn vertex_count(&self) -> usize {
        1 + self.counts.iter().map(|c| c + 1).sum::<usize>()
    }
}

fn check_cap(projected: usize, cap: usize) -> Result<()> {
    if projected > cap {
        Err(Error::MeshTooLarge { projected, cap })
    } else {
        Ok(())
    }
}

/// Builds the ring stack; `point(radius, t, is_last)` places vertices. Returns
/// the builder, the corner vertex and the outermost ring.
fn ring_stack(
    plan: &RingPlan,
    point: impl Fn(f64, f64, bool) -> [f64; 2],
) -> (Builder, usize, Vec<Ring>) {
    let mut b = Builder::default();
    let corner = b.vertex([0.0, 0.0]);
    let mut rings: Vec<Ring> = vec![vec![(0.0, corner), (1.0, corner)]];
    let last = plan.radii.len() - 1;
    for (k, (&r, &n)) in plan.radii.iter().zip(&plan.counts).enumerate() {
        let ring: Ring = (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                (t, b.vertex(point(r, t, k == last)))
            })
            .collect();
        rings.push(ring);
    }
    let fan = vec![(0.0, corner)];
    b.zipper(&fan, &rings[1]);
    for k in 1..rings.len() - 1 {
        b.zipper(&rings[k], &rings[k + 1]);
    }
    (b, corner, rings)
}

pub fn sector_mesh(spec: SectorSpec) -> Result<Mesh> {
    sector_mesh_with_cap(spec, DEFAULT_VERTEX_CAP)
}

/// Polar-graded mesh of the unit sector of angle `theta`, with the arc replaced
/// by an inscribed (`Inner`) or circumscribed (`Outer`) polygon.
pub fn sector_mesh_with_cap(spec: SectorSpec, cap: usize) -> Result<Mesh> {
    spec.validate()?;
    let n_outer = (spec.theta / spec.h1).ceil() as usize;
    let plan = RingPlan::new(spec.h1, spec.rho1, n_outer, 1);
    check_cap(plan.vertex_count(), cap)?;
    let theta = spec.theta;
    let arc_radius = match spec.variant {
        SectorVariant::Inner => 1.0,
        SectorVariant::Outer => 1.0 / (0.5 * theta / n_outer as f64).cos(),
    };
    let (mut b, corner, rings) = ring_stack(&plan, |r, t, last| {
        let r = if last { arc_radius } else { r };
        let phi = t * theta;
        [r * phi.cos(), r * phi.sin()]
    });
    // boundary: ray at angle 0 outward, arc, ray at angle theta inward
    for k in 0..rings.len() - 1 {
        let (a, c) = (rings[k][0].1, rings[k + 1][0].1);
        b.boundary(a, c, BoundaryTag::Dirichlet);
    }
    let outer = rings.last().unwrap();
    for w in outer.windows(2) {
        b.boundary(w[0].1, w[1].1, BoundaryTag::ArcDirichlet);
    }
    for k in (0..rings.len() - 1).rev() {
        let (a, c) = (rings[k + 1].last().unwrap().1, rings[k].last().unwrap().1);
        b.boundary(a, c, BoundaryTag::Dirichlet);
    }
    let bisector = [(0.5 * theta).cos(), (0.5 * theta).sin()];
    Ok(b.finish(Some(Corner { vertex: corner, bisector }), DomainMeta::Sector(spec)))
}

pub fn square_mesh(h1: f64, rho1: f64) -> Result<Mesh> {
    square_mesh_with_cap(h1, rho1, DEFAULT_VERTEX_CAP)
}

/// Unit square graded toward `(0, 0)`. Rings are the similar curves
/// `max(x, y) = rho`, parameterised by arc length, so the outermost ring is the
/// right and top sides of the square.
pub fn square_mesh_with_cap(h1: f64, rho1: f64, cap: usize) -> Result<Mesh> {
    check_grading(h1, rho1, 0.5)?;
    let n_outer = 2 * (1.0 / h1).ceil() as usize;
    let plan = RingPlan::new(h1, rho1, n_outer, 2);
    check_cap(plan.vertex_count(), cap)?;
    let (mut b, corner, rings) = ring_stack(&plan, |r, t, _| {
        if t <= 0.5 {
            [r, 2.0 * t * r]
        } else {
            [2.0 * (1.0 - t) * r, r]
        }
    });
    for k in 0..rings.len() - 1 {
        b.boundary(rings[k][0].1, rings[k + 1][0].1, BoundaryTag::Dirichlet);
    }
    let outer = rings.last().unwrap();
    for w in outer.windows(2) {
        b.boundary(w[0].1, w[1].1, BoundaryTag::Dirichlet);
    }
    for k in (0..rings.len() - 1).rev() {
        let (a, c) = (rings[k + 1].last().unwrap().1, rings[k].last().unwrap().1);
        b.boundary(a, c, BoundaryTag::Dirichlet);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(b.finish(
        Some(Corner { vertex: corner, bisector: [s, s] }),
        DomainMeta::Square { h1, rho1 },
    ))
}

/// Unit disk with `rings` uniform concentric rings, ring `j` carrying `6 j`
/// vertices on the circle of radius `j / rings`.
pub fn disk_mesh(rings: usize) -> Result<Mesh> {
    if rings == 0 {
        return Err(Error::InvalidSpec("disk needs at least one ring".into()));
    }
    let mut b = Builder::default();
    let center = b.vertex([0.0, 0.0]);
    let mut prev: Ring = vec![(0.0, center)];
    for j in 1..=rings {
        let n = 6 * j;
        let r = j as f64 / rings as f64;
        let mut ring: Ring = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let phi = 2.0 * PI * t;
                (t, b.vertex([r * phi.cos(), r * phi.sin()]))
            })
            .collect();
        ring.push((1.0, ring[0].1));
        b.zipper(&prev, &ring);
        prev = ring;
    }
    for w in prev.windows(2) {
        b.boundary(w[0].1, w[1].1, BoundaryTag::ArcDirichlet);
    }
    Ok(b.finish(None, DomainMeta::Disk { rings }))
}

/// Mapped structured mesh of the dumbbell: `x` uniform on `[-x_max, x_max]`,
/// `y` scaled by the local half width. The end columns collapse onto the tips
/// `(±x_max, 0)` and are fanned from there. Quadrilaterals are split along the
/// diagonal pointing away from the origin, so the mesh is exactly symmetric
/// under both reflections.
pub fn dumbbell_mesh(spec: DumbbellSpec) -> Result<Mesh> {
    if !(spec.c > 0.0) || !spec.c.is_finite() {
        return Err(Error::DegenerateDomain(format!("neck parameter c = {} must be positive", spec.c)));
    }
    let DumbbellSpec { nx, ny, .. } = spec;
    if nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0 {
        return Err(Error::InvalidSpec(format!(
            "nx = {nx}, ny = {ny}: both must be even and at least 4"
        )));
    }
    check_cap((nx - 1) * (ny + 1) + 2, DEFAULT_VERTEX_CAP)?;
    let x_max = spec.x_max();
    let xs: Vec<f64> = (0..=nx)
        .map(|i| x_max * ((2 * i as i64 - nx as i64) as f64 / nx as f64))
        .collect();
    let mut b = Builder::default();
    let left = b.vertex([-x_max, 0.0]);
    let mut grid = vec![vec![usize::MAX; ny + 1]; nx + 1];
    for i in 1..nx {
        let f = spec.half_width(xs[i]);
        for j in 0..=ny {
            let s = (2 * j as i64 - ny as i64) as f64 / ny as f64;
            grid[i][j] = b.vertex([xs[i], f * s]);
        }
    }
    let right = b.vertex([x_max, 0.0]);
    grid[0] = vec![left; ny + 1];
    grid[nx] = vec![right; ny + 1];

    for i in 0..nx {
        let sx = (2 * i + 1) as i64 - nx as i64;
        for j in 0..ny {
            if i == 0 {
                b.triangle(left, grid[1][j], grid[1][j + 1]);
            } else if i == nx - 1 {
                b.triangle(grid[i][j], right, grid[i][j + 1]);
            } else {
                let sy = (2 * j + 1) as i64 - ny as i64;
                let (p00, p10, p01, p11) = (grid[i][j], grid[i + 1][j], grid[i][j + 1], grid[i + 1][j + 1]);
                if sx * sy > 0 {
                    b.triangle(p00, p10, p11);
                    b.triangle(p00, p11, p01);
                } else {
                    b.triangle(p00, p10, p01);
                    b.triangle(p10, p11, p01);
                }
            }
        }
    }
    for i in 0..nx {
        b.boundary(grid[i][0], grid[i + 1][0], BoundaryTag::Dirichlet);
    }
    for i in (0..nx).rev() {
        b.boundary(grid[i + 1][ny], grid[i][ny], BoundaryTag::Dirichlet);
    }
    Ok(b.finish(None, DomainMeta::Dumbbell(spec)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sector(theta_deg: f64, h1: f64, rho1: f64, variant: SectorVariant) -> Mesh {
        sector_mesh(SectorSpec { theta: theta_deg.to_radians(), h1, rho1, variant }).unwrap()
    }

    #[test]
    fn inner_sector_inside_unit_quarter_disk() {
        let m = sector(90.0, 0.1, 1e-4, SectorVariant::Inner);
        m.validate().unwrap();
        for v in &m.vertices {
            assert!(v[0] >= -1e-15 && v[1] >= -1e-15);
            assert!(v[0] * v[0] + v[1] * v[1] <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn outer_area_exceeds_sector_exceeds_inner() {
        for theta in [30.0, 90.0, 140.0] {
            let inner = sector(theta, 0.2, 1e-3, SectorVariant::Inner);
            let outer = sector(theta, 0.2, 1e-3, SectorVariant::Outer);
            let exact = 0.5 * f64::to_radians(theta);
            assert!(outer.area() >= exact && exact >= inner.area(), "theta {theta}");
        }
    }

    #[test]
    fn square_is_valid_and_graded() {
        let m = square_mesh(0.1, 1e-7).unwrap();
        m.validate().unwrap();
        assert!((m.area() - 1.0).abs() < 1e-12);
        assert!(m.grading_violations(0.1, 1e-7).is_empty());
        let smallest = (0..m.n_triangles()).map(|t| m.triangle_diameter(t)).fold(f64::MAX, f64::min);
        assert!((0.3e-8..=3e-8).contains(&smallest), "{smallest:e}");
    }

    #[test]
    fn dumbbell_tip_and_symmetry() {
        let spec = DumbbellSpec { c: 1.0, nx: 8, ny: 4 };
        let golden = 0.5 * (1.0 + 5f64.sqrt());
        assert!((spec.x_max() - golden.sqrt()).abs() < 1e-15);
        let m = dumbbell_mesh(spec).unwrap();
        m.validate().unwrap();
        let set: std::collections::HashSet<(u64, u64)> =
            m.vertices.iter().map(|v| (v[0].to_bits(), v[1].to_bits())).collect();
        for v in &m.vertices {
            assert!(set.contains(&((-v[0]).to_bits(), v[1].to_bits())) || v[0] == 0.0);
        }
    }

    #[test]
    fn dumbbell_rejects_bad_specs() {
        assert!(matches!(
            dumbbell_mesh(DumbbellSpec { c: 0.0, nx: 8, ny: 4 }),
            Err(Error::DegenerateDomain(_))
        ));
        assert!(dumbbell_mesh(DumbbellSpec { c: 1.0, nx: 7, ny: 4 }).is_err());
        assert!(dumbbell_mesh(DumbbellSpec { c: 1.0, nx: 8, ny: 2 }).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let spec = SectorSpec { theta: 1.0, h1: 0.01, rho1: 1e-9, variant: SectorVariant::Inner };
        assert!(matches!(sector_mesh_with_cap(spec, 1000), Err(Error::MeshTooLarge { .. })));
    }

    #[test]
    fn invalid_sector_specs() {
        for (theta, h1, rho1) in [(0.0, 0.1, 0.1), (1.0, 0.0, 0.1), (1.0, 0.1, 1.0), (PI, 0.1, 0.1)] {
            let spec = SectorSpec { theta, h1, rho1, variant: SectorVariant::Inner };
            assert!(matches!(sector_mesh(spec), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn disk_is_valid() {
        let m = disk_mesh(6).unwrap();
        m.validate().unwrap();
        assert!(m.area() < PI && m.area() > 3.0);
    }

    #[test]
    fn text_round_trip() {
        let m = sector(60.0, 0.3, 1e-2, SectorVariant::Outer);
        let back = Mesh::read_text(m.to_text().as_bytes()).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.triangles, m.triangles);
        assert_eq!(back.boundary_edges, m.boundary_edges);
    }

    #[test]
    fn truncated_text_is_an_error() {
        assert!(Mesh::read_text("3 1 3\n0 0\n".as_bytes()).is_err());
        assert!(Mesh::read_text("x\n".as_bytes()).is_err());
    }
}
