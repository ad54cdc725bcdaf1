//! Interval discretizations and sampled functions.

use crate::error::{Error, Result};
use crate::scalar::{cfinite, cnorm, Cx, Scalar};
use num_complex::Complex;
use std::io::{Read, Write};
use std::sync::Arc;

/// A 1D quadrature grid on [a, b] with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalGrid<T: Scalar> {
    pub a: T,
    pub b: T,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> IntervalGrid<T> {
    /// Uniform grid with `m + 1` nodes and trapezoid weights.
    pub fn uniform(a: T, b: T, m: usize) -> Result<Arc<Self>> {
        if m == 0 {
            return Err(Error::Argument("grid needs at least two nodes".into()));
        }
        let h = (b - a) / T::usz(m);
        let nodes: Vec<T> = (0..=m).map(|i| a + h * T::usz(i)).collect();
        let mut weights = vec![h; m + 1];
        weights[0] = h * T::c(0.5);
        weights[m] = h * T::c(0.5);
        Self::from_parts(a, b, nodes, weights)
    }

    /// Build from explicit nodes with trapezoid weights.
    pub fn from_nodes(a: T, b: T, nodes: Vec<T>) -> Result<Arc<Self>> {
        let m = nodes.len();
        if m < 2 {
            return Err(Error::Argument("grid needs at least two nodes".into()));
        }
        let mut weights = vec![T::zero(); m];
        for i in 0..m - 1 {
            let half = (nodes[i + 1] - nodes[i]) * T::c(0.5);
            weights[i] += half;
            weights[i + 1] += half;
        }
        Self::from_parts(a, b, nodes, weights)
    }

    pub fn from_parts(a: T, b: T, nodes: Vec<T>, weights: Vec<T>) -> Result<Arc<Self>> {
        if nodes.len() != weights.len() || nodes.len() < 2 {
            return Err(Error::Argument("node/weight length mismatch".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|&w| w <= T::zero()) {
            return Err(Error::Argument("weights must be positive".into()));
        }
        let total: T = weights.iter().copied().sum();
        let span = b - a;
        if ((total - span) / span).abs() > T::c(1e-12) {
            return Err(Error::Argument(format!(
                "weights sum {:?} differs from span {:?}",
                total, span
            )));
        }
        Ok(Arc::new(Self { a, b, nodes, weights }))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Spacing of a uniform grid; errors if spacing varies.
    pub fn uniform_spacing(&self) -> Result<T> {
        let h = self.nodes[1] - self.nodes[0];
        for w in self.nodes.windows(2) {
            if ((w[1] - w[0] - h) / h).abs() > T::c(1e-10) {
                return Err(Error::Argument("grid spacing is not uniform".into()));
            }
        }
        Ok(h)
    }
}

/// Complex samples of a function on an [`IntervalGrid`], with zero extension
/// outside [a, b].
#[derive(Debug, Clone)]
pub struct GridFn<T: Scalar> {
    pub grid: Arc<IntervalGrid<T>>,
    pub values: Vec<Cx<T>>,
}

impl<T: Scalar> GridFn<T> {
    pub fn new(grid: Arc<IntervalGrid<T>>, values: Vec<Cx<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Argument("value count differs from node count".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &Arc<IntervalGrid<T>>, f: impl Fn(T) -> Cx<T>) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn from_real_fn(grid: &Arc<IntervalGrid<T>>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn constant(grid: &Arc<IntervalGrid<T>>, c: Cx<T>) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    /// Piecewise-linear evaluation with zero extension outside [a, b].
    pub fn eval(&self, x: T) -> Cx<T> {
        let g = &self.grid;
        if x < g.a || x > g.b {
            return Complex::new(T::zero(), T::zero());
        }
        let n = g.nodes.len();
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if g.nodes[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = (x - g.nodes[lo]) / (g.nodes[hi] - g.nodes[lo]);
        let t = Complex::new(t, T::zero());
        self.values[lo] * (Complex::new(T::one(), T::zero()) - t) + self.values[hi] * t
    }

    /// Discrete L_p norm via the grid weights. Nodes carrying non-finite
    /// values are excluded (a single node is a null set in L_p).
    pub fn lp_norm(&self, p: T) -> T {
        let mut acc = T::zero();
        for (v, &w) in self.values.iter().zip(&self.grid.weights) {
            if cfinite(*v) {
                acc += w * cnorm(*v).powf(p);
            }
        }
        acc.powf(T::one() / p)
    }

    pub fn l2_norm(&self) -> T {
        self.lp_norm(T::c(2.0))
    }

    /// L_p distance to another function on the same grid.
    pub fn lp_distance(&self, other: &Self, p: T) -> T {
        let mut acc = T::zero();
        for ((v, u), &w) in self.values.iter().zip(&other.values).zip(&self.grid.weights) {
            if cfinite(*v) && cfinite(*u) {
                acc += w * cnorm(*v - *u).powf(p);
            }
        }
        acc.powf(T::one() / p)
    }

    pub fn map(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise product with a real-valued weight sampled on the same grid.
    pub fn scale_by(&self, rho: &Self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&rho.values)
                .map(|(&v, &r)| v * r)
                .collect(),
        }
    }

    /// Serialize as CSV with columns `node,re,im`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["node", "re", "im"])?;
        for (x, v) in self.grid.nodes.iter().zip(&self.values) {
            wtr.write_record(&[
                format!("{:.17e}", x.f64()),
                format!("{:.17e}", v.re.f64()),
                format!("{:.17e}", v.im.f64()),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Read a CSV produced by [`GridFn::write_csv`]; trapezoid weights are
    /// reconstructed from the nodes.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let x: f64 = rec[0].parse().map_err(|_| Error::Argument("bad node".into()))?;
            let re: f64 = rec[1].parse().map_err(|_| Error::Argument("bad re".into()))?;
            let im: f64 = rec[2].parse().map_err(|_| Error::Argument("bad im".into()))?;
            nodes.push(T::c(x));
            values.push(Complex::new(T::c(re), T::c(im)));
        }
        if nodes.len() < 2 {
            return Err(Error::Argument("csv holds fewer than two nodes".into()));
        }
        let a = nodes[0];
        let b = nodes[nodes.len() - 1];
        let grid = IntervalGrid::from_nodes(a, b, nodes)?;
        GridFn::new(grid, values)
    }
}
