use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::family::{f_lhs_unchecked, family_cfs_check, ExcludedPairParams, FamilyParams};
use crate::SCHEMA;

/// Slack allowed above f = 1 before a grid point counts as a violation.
const VIOLATION_TOL: f64 = 1e-9;

/// Tensor grid over (x, r, b₁, c₁). x runs linearly over [offset, 1 − offset];
/// b₁ and c₁ run over the same fractions of their upper bounds; r is
/// log-spaced over [r_min, r_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub x_points: usize,
    pub r_points: usize,
    pub b1_points: usize,
    pub c1_points: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub offset: f64,
    /// θ values used to rebuild states for the cross-check.
    pub thetas: Vec<f64>,
    /// Cross-check every `check_stride`-th grid point against the CFS value of
    /// the explicitly constructed states.
    pub check_stride: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_points: 50,
            r_points: 50,
            b1_points: 50,
            c1_points: 50,
            r_min: 1e-2,
            r_max: 1e2,
            offset: 1e-3,
            thetas: vec![0.0, TAU / 3.0, 2.0 * TAU / 3.0],
            check_stride: 997,
        }
    }
}

impl GridSpec {
    /// Uniform grid with `n` points along every axis.
    pub fn with_points(n: usize) -> Self {
        Self {
            x_points: n,
            r_points: n,
            b1_points: n,
            c1_points: n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [self.x_points, self.r_points, self.b1_points, self.c1_points];
        if counts.contains(&0) || self.check_stride == 0 {
            return Err(invalid(
                "grid point counts and check_stride must be positive",
            ));
        }
        if !(self.offset > 0.0 && self.offset < 0.5) {
            return Err(invalid("offset must lie in (0, 0.5)"));
        }
        if !(self.r_min > 0.0 && self.r_max >= self.r_min && self.r_max.is_finite()) {
            return Err(invalid("need 0 < r_min <= r_max < inf"));
        }
        if self.thetas.is_empty() || self.thetas.iter().any(|t| !(0.0..TAU).contains(t)) {
            return Err(invalid("thetas must be nonempty and lie in [0, 2pi)"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x_points * self.r_points * self.b1_points * self.c1_points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn fractions(&self, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![self.offset];
        }
        (0..n)
            .map(|k| self.offset + (1.0 - 2.0 * self.offset) * k as f64 / (n - 1) as f64)
            .collect()
    }

    fn r_values(&self) -> Vec<f64> {
        let n = self.r_points;
        if n == 1 {
            return vec![self.r_min];
        }
        let (lo, hi) = (self.r_min.ln(), self.r_max.ln());
        (0..n)
            .map(|k| (lo + (hi - lo) * k as f64 / (n - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    pub r: f64,
    pub b1: f64,
    pub c1: f64,
    pub f: f64,
}

/// Count of grid points with 1 − f in [lower, upper); `None` is unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginBin {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub count: usize,
}

const MARGIN_EDGES: [f64; 7] = [-VIOLATION_TOL, 0.0, 1e-12, 1e-9, 1e-6, 1e-3, 1e-1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyScanReport {
    pub schema: String,
    pub experiment: String,
    pub grid: GridSpec,
    pub points: usize,
    pub max_f: f64,
    pub argmax: GridPoint,
    pub violations: usize,
    pub nan_count: usize,
    pub margin_histogram: Vec<MarginBin>,
    /// Grid points rebuilt as explicit states for every θ.
    pub state_checks: usize,
    /// Largest |cfs_lhs(e₁, b, c) − f| over the rebuilt points.
    pub state_check_max_deviation: f64,
    /// Violating or non-finite points, plus the arg-max.
    #[serde(skip)]
    pub records: Vec<GridPoint>,
}

#[derive(Default)]
struct Block {
    max: Option<GridPoint>,
    bins: [usize; MARGIN_EDGES.len() + 1],
    abnormal: Vec<GridPoint>,
    nan_count: usize,
    violations: usize,
    checks: usize,
    max_dev: f64,
}

/// Evaluates f over the grid. The theorem predicts max f ≤ 1.
pub fn run_family_theorem_scan(grid: &GridSpec) -> Result<FamilyScanReport> {
    grid.validate()?;
    let xs = grid.fractions(grid.x_points);
    let rs = grid.r_values();
    let bf = grid.fractions(grid.b1_points);
    let cf = grid.fractions(grid.c1_points);
    let inner = bf.len() * cf.len();

    let blocks: Vec<Block> = (0..xs.len() * rs.len())
        .into_par_iter()
        .map(|block| {
            let (x, r) = (xs[block / rs.len()], rs[block % rs.len()]);
            let p = FamilyParams::new(x, r, 0.0)?;
            let (bb, cb) = (p.b1_bound(), p.c1_bound());
            let mut out = Block::default();
            for (i, fb) in bf.iter().enumerate() {
                for (j, fc) in cf.iter().enumerate() {
                    let (b1, c1) = (fb * bb, fc * cb);
                    let f = f_lhs_unchecked(x, r, b1, c1);
                    let pt = GridPoint { x, r, b1, c1, f };
                    if !f.is_finite() {
                        out.nan_count += 1;
                        out.abnormal.push(pt);
                        continue;
                    }
                    if out.max.is_none_or(|m| f > m.f) {
                        out.max = Some(pt);
                    }
                    let margin = 1.0 - f;
                    out.bins[MARGIN_EDGES.iter().take_while(|&&e| margin >= e).count()] += 1;
                    if f > 1.0 + VIOLATION_TOL {
                        out.violations += 1;
                        out.abnormal.push(pt);
                    }
                    if (block * inner + i * cf.len() + j).is_multiple_of(grid.check_stride) {
                        for &theta in &grid.thetas {
                            let p = FamilyParams::new(x, r, theta)?;
                            let q = ExcludedPairParams::worst_case(&p, b1, c1, 0.0)?;
                            let lhs = family_cfs_check(&p, &q)?.lhs;
                            out.checks += 1;
                            out.max_dev = out.max_dev.max((lhs - f).abs());
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut bins = [0usize; MARGIN_EDGES.len() + 1];
    let mut argmax: Option<GridPoint> = None;
    let (mut nan_count, mut violations, mut checks, mut max_dev) = (0, 0, 0, 0.0f64);
    let mut records = Vec::new();
    for b in blocks {
        for (acc, c) in bins.iter_mut().zip(b.bins) {
            *acc += c;
        }
        if let Some(m) = b.max {
            if argmax.is_none_or(|a| m.f > a.f) {
                argmax = Some(m);
            }
        }
        nan_count += b.nan_count;
        violations += b.violations;
        checks += b.checks;
        max_dev = max_dev.max(b.max_dev);
        records.extend(b.abnormal);
    }
    let argmax = argmax.ok_or_else(|| invalid("no finite grid values"))?;
    records.push(argmax);

    let margin_histogram = bins
        .iter()
        .enumerate()
        .map(|(k, &count)| MarginBin {
            lower: k.checked_sub(1).map(|i| MARGIN_EDGES[i]),
            upper: MARGIN_EDGES.get(k).copied(),
            count,
        })
        .collect();

    Ok(FamilyScanReport {
        schema: SCHEMA.to_string(),
        experiment: "familyscan".to_string(),
        grid: grid.clone(),
        points: grid.len(),
        max_f: argmax.f,
        argmax,
        violations,
        nan_count,
        margin_histogram,
        state_checks: checks,
        state_check_max_deviation: max_dev,
        records,
    })
}
