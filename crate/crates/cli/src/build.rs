//! Constructors turning config specs into core objects.

use crate::config::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs::File;
use std::io::BufReader;
use workbench_core::grid::{GridFn, IntervalGrid};
use workbench_core::linalg::{OpMatrix, Provenance};
use workbench_core::opcalc::{shift_generator, PowerSign, ShiftDir};

pub type C64 = Complex<f64>;

pub fn eval_fn(spec: &FnSpec, a: f64, b: f64, x: f64) -> f64 {
    match spec {
        FnSpec::Bump => {
            let half = (b - a) / 2.0;
            let peak = (half * half).powi(3);
            ((x - a) * (b - x)).powi(3) / peak
        }
        FnSpec::Gauss { center, width } => (-((x - center) / width).powi(2)).exp(),
        FnSpec::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c),
        FnSpec::Constant { value } => *value,
    }
}

pub fn eval_coeff(spec: &CoeffSpec, x: &[f64]) -> f64 {
    match spec {
        CoeffSpec::Constant { value } => *value,
        CoeffSpec::Affine { value, slope, axis } => value + slope * x[*axis],
        CoeffSpec::Sine { base, amp, freq, axis } => base + amp * (freq * x[*axis]).sin(),
    }
}

pub fn grid_fn(grid: &GridSpec, spec: &FnSpec) -> Result<GridFn<f64>, workbench_core::Error> {
    let g = IntervalGrid::uniform(grid.a, grid.b, grid.m)?;
    Ok(GridFn::from_real_fn(&g, |x| eval_fn(spec, grid.a, grid.b, x)))
}

pub fn build_matrix(spec: &MatrixSpec, default_seed: u64) -> Result<OpMatrix<f64>, String> {
    match spec {
        MatrixSpec::File { path } => {
            let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
            OpMatrix::read_bin(BufReader::new(f), Provenance::General).map_err(|e| e.to_string())
        }
        MatrixSpec::RandomHpd { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(default_seed));
            let b = DMatrix::<C64>::from_fn(*n, *n, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let mat = &b * b.adjoint() + DMatrix::<C64>::identity(*n, *n) * C64::new(0.5, 0.0);
            OpMatrix::new(mat, vec![1.0; *n], Provenance::General).map_err(|e| e.to_string())
        }
        MatrixSpec::Shift { a, b, m, dir } => {
            let g = IntervalGrid::uniform(*a, *b, *m).map_err(|e| e.to_string())?;
            let d = match dir {
                ShiftDirSpec::Positive => ShiftDir::Positive,
                ShiftDirSpec::Negative => ShiftDir::Negative,
            };
            shift_generator(&g, d).map_err(|e| e.to_string())
        }
        MatrixSpec::Diag { values } => {
            let n = values.len();
            let diag = DVector::from_iterator(n, values.iter().map(|v| C64::new(v[0], v[1])));
            OpMatrix::new(DMatrix::from_diagonal(&diag), vec![1.0; n], Provenance::General)
                .map_err(|e| e.to_string())
        }
    }
}

pub fn build_init(spec: &InitSpec, n: usize, seed: u64) -> Result<DVector<C64>, String> {
    match spec {
        InitSpec::Ones => Ok(DVector::from_element(n, C64::new(1.0, 0.0))),
        InitSpec::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(DVector::from_fn(n, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }))
        }
        InitSpec::Values { values } => {
            if values.len() != n {
                return Err(format!("initial vector has {} entries, matrix is {n}", values.len()));
            }
            Ok(DVector::from_iterator(n, values.iter().map(|v| C64::new(v[0], v[1]))))
        }
    }
}

pub fn build_times(spec: &TimesSpec) -> Result<Vec<f64>, String> {
    match spec {
        TimesSpec::Uniform { t_max, steps } => {
            if *steps == 0 || !(*t_max > 0.0) {
                return Err("time grid needs steps > 0 and t_max > 0".into());
            }
            Ok((0..=*steps).map(|i| i as f64 * t_max / *steps as f64).collect())
        }
        TimesSpec::List { list } => Ok(list.clone()),
    }
}

pub fn power_sign(spec: PowerSignSpec) -> PowerSign {
    match spec {
        PowerSignSpec::Positive => PowerSign::Positive,
        PowerSignSpec::Negative => PowerSign::Negative,
    }
}

