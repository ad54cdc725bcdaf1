//! Ray discretizations of convex domains.
//!
//! A convex domain is sampled along rays emanating from a fixed boundary
//! point: a finite direction set with solid-angle weights, and per-ray radial
//! nodes from 0 to the exact exit length d(e). Geometry is restricted to
//! shapes with analytic d(e) so no geometric error term enters the operator
//! tests. Directions with d(e) = 0 (pointing out of the domain) are omitted;
//! the solid-angle weights sum to the measure of the active direction set.

use crate::error::{Error, Result};
use crate::scalar::{cfinite, cnorm, Cx, Scalar};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::sync::Arc;

/// Supported domain shapes, all star-shaped from the base point with
/// closed-form ray exit lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    /// Interval (0, length) with the base point at 0.
    Interval { length: f64 },
    /// Disk of given radius with the base point on the boundary.
    Ball2 { radius: f64 },
    /// Axis-aligned rectangle with the base point at the corner (0, 0).
    Box2 { width: f64, height: f64 },
    /// Ball of given radius with the base point on the boundary.
    Ball3 { radius: f64 },
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Interval { .. } => 1,
            Shape::Ball2 { .. } | Shape::Box2 { .. } => 2,
            Shape::Ball3 { .. } => 3,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Shape::Interval { length } => *length,
            Shape::Ball2 { radius } => 2.0 * radius,
            Shape::Box2 { width, height } => (width * width + height * height).sqrt(),
            Shape::Ball3 { radius } => 2.0 * radius,
        }
    }

    /// Measure of the active direction set {e : d(e) > 0} on the unit sphere.
    pub fn active_measure(&self) -> f64 {
        match self {
            Shape::Interval { .. } => 1.0,
            Shape::Ball2 { .. } => std::f64::consts::PI,
            Shape::Box2 { .. } => std::f64::consts::FRAC_PI_2,
            Shape::Ball3 { .. } => 2.0 * std::f64::consts::PI,
        }
    }

    /// Point membership test (closed domain), with the base point at the
    /// origin of the coordinates used by [`RayMesh`].
    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = 1e-12 * self.diameter().max(1.0);
        match self {
            Shape::Interval { length } => x[0] >= -tol && x[0] <= length + tol,
            Shape::Ball2 { radius } => {
                let dx = x[0] - radius;
                (dx * dx + x[1] * x[1]).sqrt() <= radius + tol
            }
            Shape::Box2 { width, height } => {
                x[0] >= -tol && x[0] <= width + tol && x[1] >= -tol && x[1] <= height + tol
            }
            Shape::Ball3 { radius } => {
                let dx = x[0] - radius;
                (dx * dx + x[1] * x[1] + x[2] * x[2]).sqrt() <= radius + tol
            }
        }
    }
}

/// One ray: unit direction, solid-angle weight, exit length and the radial
/// quadrature along it.
#[derive(Debug, Clone)]
pub struct Ray<T: Scalar> {
    pub e: Vec<T>,
    pub chi: T,
    pub length: T,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

/// Discretization of a convex domain along rays from a boundary point.
#[derive(Debug, Clone)]
pub struct RayMesh<T: Scalar> {
    pub dim: usize,
    pub shape: Shape,
    pub diam: T,
    pub rays: Vec<Ray<T>>,
    /// Set when every ray was verified to exit the domain exactly once.
    pub convexity_certified: bool,
}

fn unit2<T: Scalar>(phi: f64) -> Vec<T> {
    vec![T::c(phi.cos()), T::c(phi.sin())]
}

impl<T: Scalar> RayMesh<T> {
    /// Build a mesh with `k_dirs` directions (ignored for the interval) and
    /// `m_radial + 1` uniformly spaced radial nodes per ray.
    pub fn build(shape: Shape, k_dirs: usize, m_radial: usize) -> Result<Arc<Self>> {
        if m_radial < 1 {
            return Err(Error::Argument("need at least two radial nodes".into()));
        }
        if shape.dim() > 1 && k_dirs < 1 {
            return Err(Error::Argument("need at least one direction".into()));
        }
        let mut rays: Vec<Ray<T>> = Vec::new();
        match shape {
            Shape::Interval { length } => {
                if length <= 0.0 {
                    return Err(Error::Domain("interval length must be positive".into()));
                }
                rays.push(Self::make_ray(vec![T::one()], T::one(), T::c(length), m_radial));
            }
            Shape::Ball2 { radius } => {
                if radius <= 0.0 {
                    return Err(Error::Domain("radius must be positive".into()));
                }
                // Gauss directions on the open half-circle about the inward
                // normal; endpoints (tangential, d -> 0) are never sampled.
                let (x, w) = crate::quad::gauss_legendre::<f64>(k_dirs);
                for (xi, wi) in x.iter().zip(&w) {
                    let phi = std::f64::consts::FRAC_PI_2 * xi;
                    let d = 2.0 * radius * phi.cos();
                    rays.push(Self::make_ray(
                        unit2(phi),
                        T::c(wi * std::f64::consts::FRAC_PI_2),
                        T::c(d),
                        m_radial,
                    ));
                }
            }
            Shape::Box2 { width, height } => {
                if width <= 0.0 || height <= 0.0 {
                    return Err(Error::Domain("box sides must be positive".into()));
                }
                let (x, w) = crate::quad::gauss_legendre::<f64>(k_dirs);
                for (xi, wi) in x.iter().zip(&w) {
                    let phi = std::f64::consts::FRAC_PI_4 * (xi + 1.0);
                    let d = (width / phi.cos()).min(height / phi.sin());
                    rays.push(Self::make_ray(
                        unit2(phi),
                        T::c(wi * std::f64::consts::FRAC_PI_4),
                        T::c(d),
                        m_radial,
                    ));
                }
            }
            Shape::Ball3 { radius } => {
                if radius <= 0.0 {
                    return Err(Error::Domain("radius must be positive".into()));
                }
                // product rule: Gauss in cos(theta) on (0, 1), equispaced
                // azimuth; dχ = sinθ dθ dψ becomes du dψ with u = cosθ
                let k_pol = (k_dirs as f64).sqrt().ceil() as usize;
                let k_az = k_pol.max(2);
                let (x, w) = crate::quad::gauss_legendre::<f64>(k_pol);
                for (xi, wi) in x.iter().zip(&w) {
                    let u = 0.5 * (xi + 1.0); // cos(theta) in (0, 1)
                    let sin_t = (1.0 - u * u).sqrt();
                    let d = 2.0 * radius * u;
                    for j in 0..k_az {
                        let psi = 2.0 * std::f64::consts::PI * j as f64 / k_az as f64;
                        let e = vec![T::c(u), T::c(sin_t * psi.cos()), T::c(sin_t * psi.sin())];
                        let chi = wi * 0.5 * 2.0 * std::f64::consts::PI / k_az as f64;
                        rays.push(Self::make_ray(e, T::c(chi), T::c(d), m_radial));
                    }
                }
            }
        }
        let mesh = Self {
            dim: shape.dim(),
            shape,
            diam: T::c(shape.diameter()),
            rays,
            convexity_certified: false,
        };
        mesh.validate()?;
        let mut mesh = mesh;
        mesh.certify_convexity()?;
        Ok(Arc::new(mesh))
    }

    fn make_ray(e: Vec<T>, chi: T, length: T, m_radial: usize) -> Ray<T> {
        let h = length / T::usz(m_radial);
        let nodes: Vec<T> = (0..=m_radial).map(|i| h * T::usz(i)).collect();
        let mut weights = vec![h; m_radial + 1];
        weights[0] = h * T::c(0.5);
        weights[m_radial] = h * T::c(0.5);
        Ray { e, chi, length, nodes, weights }
    }

    fn validate(&self) -> Result<()> {
        let mut chi_sum = T::zero();
        for ray in &self.rays {
            if ray.e.len() != self.dim {
                return Err(Error::Argument("direction dimension mismatch".into()));
            }
            let norm: T = ray.e.iter().map(|&c| c * c).sum::<T>().sqrt();
            if (norm - T::one()).abs() > T::c(1e-12) {
                return Err(Error::Argument("direction is not a unit vector".into()));
            }
            if ray.length <= T::zero() || ray.length > self.diam * (T::one() + T::c(1e-12)) {
                return Err(Error::Domain("ray length outside (0, diam]".into()));
            }
            if ray.chi <= T::zero() {
                return Err(Error::Argument("solid-angle weight must be positive".into()));
            }
            if ray.nodes.windows(2).any(|w| w[1] <= w[0]) || ray.nodes[0] < T::zero() {
                return Err(Error::Argument("radial nodes must increase from 0".into()));
            }
            chi_sum += ray.chi;
        }
        let target = T::c(self.shape.active_measure());
        if (chi_sum - target).abs() > T::c(1e-8) {
            return Err(Error::Argument(format!(
                "solid-angle weights sum {:?}, expected {:?}",
                chi_sum, target
            )));
        }
        Ok(())
    }

    /// Verify that every ray exits the domain exactly once: interior samples
    /// of (0, d(e)) lie inside, samples beyond d(e) lie outside.
    fn certify_convexity(&mut self) -> Result<()> {
        for ray in &self.rays {
            let d = ray.length.f64();
            let e: Vec<f64> = ray.e.iter().map(|c| c.f64()).collect();
            for frac in [0.25, 0.5, 0.75, 0.999] {
                let x: Vec<f64> = e.iter().map(|c| c * d * frac).collect();
                if !self.shape.contains(&x) {
                    return Err(Error::Domain("ray leaves the domain before d(e)".into()));
                }
            }
            for frac in [1.001, 1.5, 3.0] {
                let x: Vec<f64> = e.iter().map(|c| c * d * frac).collect();
                if self.shape.contains(&x) {
                    return Err(Error::Domain("ray re-enters the domain past d(e)".into()));
                }
            }
        }
        self.convexity_certified = true;
        Ok(())
    }

    /// Cartesian coordinates of node `i` on ray `k` (base point at origin).
    pub fn point(&self, k: usize, i: usize) -> Vec<T> {
        let r = self.rays[k].nodes[i];
        self.rays[k].e.iter().map(|&c| c * r).collect()
    }

    /// Effective integration measure of node (k, i): χ_k w_{ki} r^{n-1}.
    pub fn node_measure(&self, k: usize, i: usize) -> T {
        let ray = &self.rays[k];
        ray.chi * ray.weights[i] * ray.nodes[i].powi((self.dim - 1) as i32)
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        let doc = MeshDoc {
            dim: self.dim,
            shape: self.shape,
            diam: self.diam.f64(),
            convexity_certified: self.convexity_certified,
            rays: self
                .rays
                .iter()
                .map(|r| RayDoc {
                    e: r.e.iter().map(|c| c.f64()).collect(),
                    chi: r.chi.f64(),
                    length: r.length.f64(),
                    nodes: r.nodes.iter().map(|c| c.f64()).collect(),
                    weights: r.weights.iter().map(|c| c.f64()).collect(),
                })
                .collect(),
        };
        serde_json::to_writer_pretty(w, &doc)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Arc<Self>> {
        let doc: MeshDoc = serde_json::from_reader(r)?;
        let mesh = Self {
            dim: doc.dim,
            shape: doc.shape,
            diam: T::c(doc.diam),
            convexity_certified: false,
            rays: doc
                .rays
                .into_iter()
                .map(|r| Ray {
                    e: r.e.into_iter().map(T::c).collect(),
                    chi: T::c(r.chi),
                    length: T::c(r.length),
                    nodes: r.nodes.into_iter().map(T::c).collect(),
                    weights: r.weights.into_iter().map(T::c).collect(),
                })
                .collect(),
        };
        mesh.validate()?;
        let mut mesh = mesh;
        mesh.certify_convexity()?;
        Ok(Arc::new(mesh))
    }
}

#[derive(Serialize, Deserialize)]
struct MeshDoc {
    dim: usize,
    shape: Shape,
    diam: f64,
    convexity_certified: bool,
    rays: Vec<RayDoc>,
}

#[derive(Serialize, Deserialize)]
struct RayDoc {
    e: Vec<f64>,
    chi: f64,
    length: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Complex samples of a function on a [`RayMesh`], one value vector per ray.
#[derive(Debug, Clone)]
pub struct RayFn<T: Scalar> {
    pub mesh: Arc<RayMesh<T>>,
    pub values: Vec<Vec<Cx<T>>>,
}

impl<T: Scalar> RayFn<T> {
    pub fn new(mesh: Arc<RayMesh<T>>, values: Vec<Vec<Cx<T>>>) -> Result<Self> {
        if values.len() != mesh.rays.len()
            || values
                .iter()
                .zip(&mesh.rays)
                .any(|(v, r)| v.len() != r.nodes.len())
        {
            return Err(Error::Argument("value layout differs from mesh".into()));
        }
        Ok(Self { mesh, values })
    }

    /// Sample a function of the Cartesian point.
    pub fn from_point_fn(mesh: &Arc<RayMesh<T>>, mut f: impl FnMut(&[T]) -> Cx<T>) -> Self {
        let values = (0..mesh.rays.len())
            .map(|k| {
                (0..mesh.rays[k].nodes.len())
                    .map(|i| f(&mesh.point(k, i)))
                    .collect()
            })
            .collect();
        Self { mesh: mesh.clone(), values }
    }

    pub fn from_radial_fn(mesh: &Arc<RayMesh<T>>, mut f: impl FnMut(T) -> Cx<T>) -> Self {
        let values = mesh
            .rays
            .iter()
            .map(|ray| ray.nodes.iter().map(|&r| f(r)).collect())
            .collect();
        Self { mesh: mesh.clone(), values }
    }

    pub fn constant(mesh: &Arc<RayMesh<T>>, c: Cx<T>) -> Self {
        let values = mesh
            .rays
            .iter()
            .map(|ray| vec![c; ray.nodes.len()])
            .collect();
        Self { mesh: mesh.clone(), values }
    }

    /// Discrete L_p norm with the domain measure dχ r^{n-1} dr; non-finite
    /// node values are excluded (single nodes are null sets).
    pub fn lp_norm(&self, p: T) -> T {
        let mut acc = T::zero();
        for (k, vals) in self.values.iter().enumerate() {
            for (i, v) in vals.iter().enumerate() {
                if cfinite(*v) {
                    acc += self.mesh.node_measure(k, i) * cnorm(*v).powf(p);
                }
            }
        }
        acc.powf(T::one() / p)
    }

    pub fn l2_norm(&self) -> T {
        self.lp_norm(T::c(2.0))
    }

    pub fn lp_distance(&self, other: &Self, p: T) -> T {
        let mut acc = T::zero();
        for (k, (vals, ovals)) in self.values.iter().zip(&other.values).enumerate() {
            for (i, (v, u)) in vals.iter().zip(ovals).enumerate() {
                if cfinite(*v) && cfinite(*u) {
                    acc += self.mesh.node_measure(k, i) * cnorm(*v - *u).powf(p);
                }
            }
        }
        acc.powf(T::one() / p)
    }

    /// Weighted L_2 inner product ⟨f, g⟩_ρ = ∫ f ḡ ρ dχ r^{n-1} dr with a
    /// real non-negative weight (pass `None` for ρ ≡ 1). Non-finite nodes on
    /// either side are excluded.
    pub fn inner_product(&self, other: &Self, rho: Option<&Self>) -> Cx<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (k, (vals, ovals)) in self.values.iter().zip(&other.values).enumerate() {
            for (i, (v, u)) in vals.iter().zip(ovals).enumerate() {
                if cfinite(*v) && cfinite(*u) {
                    let w = match rho {
                        Some(r) => self.mesh.node_measure(k, i) * r.values[k][i].re,
                        None => self.mesh.node_measure(k, i),
                    };
                    acc += *v * u.conj() * w;
                }
            }
        }
        acc
    }

    pub fn map(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self
                .values
                .iter()
                .map(|vals| vals.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    pub fn scale_by(&self, rho: &Self) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self
                .values
                .iter()
                .zip(&rho.values)
                .map(|(vals, rv)| vals.iter().zip(rv).map(|(&v, &r)| v * r).collect())
                .collect(),
        }
    }

    /// CSV with columns `dir,node,re,im` keyed by (direction, node) indices.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["dir", "node", "re", "im"])?;
        for (k, vals) in self.values.iter().enumerate() {
            for (i, v) in vals.iter().enumerate() {
                wtr.write_record(&[
                    k.to_string(),
                    i.to_string(),
                    format!("{:.17e}", v.re.f64()),
                    format!("{:.17e}", v.im.f64()),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(mesh: Arc<RayMesh<T>>, r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut values: Vec<Vec<Cx<T>>> = mesh
            .rays
            .iter()
            .map(|ray| vec![Complex::new(T::zero(), T::zero()); ray.nodes.len()])
            .collect();
        for rec in rdr.records() {
            let rec = rec?;
            let k: usize = rec[0].parse().map_err(|_| Error::Argument("bad dir index".into()))?;
            let i: usize = rec[1].parse().map_err(|_| Error::Argument("bad node index".into()))?;
            let re: f64 = rec[2].parse().map_err(|_| Error::Argument("bad re".into()))?;
            let im: f64 = rec[3].parse().map_err(|_| Error::Argument("bad im".into()))?;
            if k >= values.len() || i >= values[k].len() {
                return Err(Error::Argument("csv index outside mesh".into()));
            }
            values[k][i] = Complex::new(T::c(re), T::c(im));
        }
        Self::new(mesh, values)
    }
}
