//! JSON experiment configuration: one tagged document per run, validated at
//! load (paths exist, tolerances positive).

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExperimentConfig {
    Apply(ApplyConfig),
    Power(PowerConfig),
    Transform(TransformConfig),
    Assemble(AssembleConfig),
    Solve(SolveConfig),
    Audit(AuditConfig),
    Study(StudyConfig),
}

impl ExperimentConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Apply(_) => "apply",
            Self::Power(_) => "power",
            Self::Transform(_) => "transform",
            Self::Assemble(_) => "assemble",
            Self::Solve(_) => "solve",
            Self::Audit(_) => "audit",
            Self::Study(_) => "study",
        }
    }

    pub fn out_dir(&self) -> Option<&PathBuf> {
        match self {
            Self::Apply(c) => c.common.out.as_ref(),
            Self::Power(c) => c.common.out.as_ref(),
            Self::Transform(c) => c.common.out.as_ref(),
            Self::Assemble(c) => c.common.out.as_ref(),
            Self::Solve(c) => c.common.out.as_ref(),
            Self::Audit(c) => c.common.out.as_ref(),
            Self::Study(c) => c.common.out.as_ref(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Apply(c) => c.common.seed,
            Self::Power(c) => c.common.seed,
            Self::Transform(c) => c.common.seed,
            Self::Assemble(c) => c.common.seed,
            Self::Solve(c) => c.common.seed,
            Self::Audit(c) => c.common.seed,
            Self::Study(c) => c.common.seed,
        }
    }

    /// Invariants checked once at load: referenced files exist, tolerances
    /// are positive and finite.
    pub fn validate(&self, base: &Path) -> Result<(), String> {
        let mut paths: Vec<&PathBuf> = Vec::new();
        let mut tols: Vec<f64> = Vec::new();
        match self {
            Self::Apply(c) => {
                if let Some(p) = &c.input_csv {
                    paths.push(p);
                }
                tols.push(c.tol);
            }
            Self::Power(c) => {
                c.matrix.collect_paths(&mut paths);
            }
            Self::Transform(c) => {
                c.j.collect_paths(&mut paths);
                c.g.collect_paths(&mut paths);
                c.f.collect_paths(&mut paths);
            }
            Self::Assemble(c) => {
                if let Some(p) = &c.perturbation {
                    tols.push(p.tol);
                }
            }
            Self::Solve(c) => {
                c.w.collect_paths(&mut paths);
                tols.push(c.tol);
                tols.push(c.jordan_tol);
            }
            Self::Audit(c) => {
                if let Some(m) = c.matrix.as_ref() {
                    m.collect_paths(&mut paths);
                }
                tols.push(c.tol);
            }
            Self::Study(c) => {
                tols.push(c.min_order);
            }
        }
        for p in paths {
            let resolved = if p.is_absolute() { p.clone() } else { base.join(p) };
            if !resolved.exists() {
                return Err(format!("referenced path does not exist: {}", resolved.display()));
            }
        }
        for t in tols {
            if !(t.is_finite() && t > 0.0) {
                return Err(format!("tolerances must be positive and finite, got {t}"));
            }
        }
        Ok(())
    }
}

/// Fields shared by every experiment document.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct Common {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn default_tol() -> f64 {
    1e-8
}

fn default_solver_tol() -> f64 {
    1e-12
}

fn default_jordan_tol() -> f64 {
    1e-8
}

fn default_min_order() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub m: usize,
}

/// Named closed-form test functions of one real variable.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum FnSpec {
    /// ((x-a)(b-x))^3 rescaled so the maximum is 1.
    Bump,
    Gauss { center: f64, width: f64 },
    Poly { coeffs: Vec<f64> },
    Constant { value: f64 },
}

/// Coefficient field a(x) on an n-dimensional node.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CoeffSpec {
    Constant { value: f64 },
    /// value + slope * x[axis]
    Affine { value: f64, slope: f64, axis: usize },
    /// base + amp * sin(freq * x[axis])
    Sine { base: f64, amp: f64, freq: f64, axis: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum MatrixSpec {
    File { path: PathBuf },
    /// Random Hermitian positive definite, B B^H + 0.5 I.
    RandomHpd { n: usize, seed: Option<u64> },
    /// Shift-semigroup generator on a uniform grid.
    Shift { a: f64, b: f64, m: usize, dir: ShiftDirSpec },
    Diag { values: Vec<[f64; 2]> },
}

impl MatrixSpec {
    fn collect_paths<'a>(&'a self, out: &mut Vec<&'a PathBuf>) {
        if let MatrixSpec::File { path } = self {
            out.push(path);
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftDirSpec {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApplyOp {
    RlLeft,
    RlRight,
    MarchaudLeft,
    MarchaudRight,
    Composition,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ApplyConfig {
    #[serde(flatten)]
    pub common: Common,
    pub op: ApplyOp,
    pub alpha: f64,
    pub grid: Option<GridSpec>,
    pub function: Option<FnSpec>,
    pub input_csv: Option<PathBuf>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Composition only: integral order σ, derivative order γ and weight ρ.
    pub sigma: Option<f64>,
    pub gamma_ord: Option<f64>,
    pub rho: Option<FnSpec>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerSignSpec {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PowerConfig {
    #[serde(flatten)]
    pub common: Common,
    pub matrix: MatrixSpec,
    pub alpha: f64,
    pub sign: PowerSignSpec,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TransformConfig {
    #[serde(flatten)]
    pub common: Common,
    pub j: MatrixSpec,
    pub g: MatrixSpec,
    pub f: MatrixSpec,
    pub alpha: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DomainSpec {
    Interval { d: f64, m: usize },
    Box { w: f64, h: f64, mx: usize, my: usize },
}

#[derive(Debug, Clone, Deserialize)]
pub struct PerturbationSpec {
    pub rho: CoeffSpec,
    pub sigma: f64,
    pub gamma_ord: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AssembleConfig {
    #[serde(flatten)]
    pub common: Common,
    pub domain: DomainSpec,
    pub coeffs: Vec<CoeffSpec>,
    pub perturbation: Option<PerturbationSpec>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GrowthSpec {
    pub theta0: f64,
    pub h_theta0: f64,
    pub rho: f64,
    pub zeta: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PhiSpec {
    /// Lowest power; coefficients follow in order up to l + len - 1.
    pub l: i64,
    pub coeffs: Vec<[f64; 2]>,
    pub theta: f64,
    pub growth: Option<GrowthSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum InitSpec {
    Ones,
    Random,
    Values { values: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TimesSpec {
    Uniform { t_max: f64, steps: usize },
    List { list: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
pub struct SolveConfig {
    #[serde(flatten)]
    pub common: Common,
    pub w: MatrixSpec,
    pub phi: PhiSpec,
    pub alpha: f64,
    pub f: InitSpec,
    pub times: TimesSpec,
    #[serde(default = "default_solver_tol")]
    pub tol: f64,
    #[serde(default = "default_jordan_tol")]
    pub jordan_tol: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum AuditName {
    KernelNormalization,
    Contraction,
    MAccretive,
    NumericalRange,
    NegPowerBound,
    AccretivityLowerBound,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AuditConfig {
    #[serde(flatten)]
    pub common: Common,
    pub name: AuditName,
    #[serde(default = "default_tol")]
    pub tol: f64,
    pub matrix: Option<MatrixSpec>,
    /// kernel-normalization: orders to audit.
    pub alphas: Option<Vec<f64>>,
    /// contraction: audited times; m-accretive: shift grid.
    pub times: Option<Vec<f64>>,
    pub lambdas: Option<Vec<f64>>,
    /// neg-power-bound / accretivity-lower-bound order.
    pub alpha: Option<f64>,
    /// accretivity-lower-bound mesh size.
    pub mesh_m: Option<usize>,
    pub dim: Option<usize>,
    pub slack: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum StudyName {
    GeneratorBridge,
    EllipticOrder,
    Representation,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StudyConfig {
    #[serde(flatten)]
    pub common: Common,
    pub name: StudyName,
    pub alpha: Option<f64>,
    /// generator-bridge / elliptic-order sweep sizes.
    pub ms: Option<Vec<usize>>,
    /// representation sweep: ε = 2^{-k}.
    pub ks: Option<Vec<u32>>,
    pub grid: Option<GridSpec>,
    pub function: Option<FnSpec>,
    pub coeffs: Option<Vec<CoeffSpec>>,
    #[serde(default = "default_min_order")]
    pub min_order: f64,
}
