//! Reproducible random projection instances and objective-value sweeps.
//!
//! An instance draws, in fixed order from one [`SplitMix64`] stream, the
//! constraint matrix `A` (row-major, `m x n`), an anchor `x*`, and an offset
//! `d`, all uniform on `[0,1)`. The right-hand side `b = A x* + 0.1` keeps
//! `x*` strictly inside `P = { x : A x <= b, x >= 0 }` with slack 0.1, and
//! the query point is `q = x* + d/2` (usually outside `P`).

use crate::distortion::Distortion;
use crate::projection::{project_lp, Polyhedron, ProjError};
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDto", into = "InstanceDto")]
pub struct ProjectionInstance {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub polyhedron: Polyhedron,
    pub x_star: Vec<f64>,
    pub d: Vec<f64>,
    pub q: Vec<f64>,
}

impl ProjectionInstance {
    pub fn q_feasible(&self) -> bool {
        self.polyhedron.contains(&self.q, 1e-12)
    }
}

pub fn generate_instance(n: usize, m: usize, seed: u64) -> Result<ProjectionInstance, ProjError> {
    let mut rng = SplitMix64::new(seed);
    let a: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.next_f64()).collect())
        .collect();
    let x_star: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
    let d: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
    let b: Vec<f64> = a
        .iter()
        .map(|row| row.iter().zip(&x_star).map(|(a, x)| a * x).sum::<f64>() + 0.1)
        .collect();
    let q: Vec<f64> = x_star.iter().zip(&d).map(|(x, d)| x + d / 2.0).collect();
    Ok(ProjectionInstance {
        n,
        m,
        seed,
        polyhedron: Polyhedron::new(a, b)?,
        x_star,
        d,
        q,
    })
}

/// One `(distortion, alpha)` cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub g: String,
    pub alpha: f64,
    pub value: f64,
}

/// Projection objective values over an alpha grid for each labeled
/// distortion, via [`project_lp`]; rows follow the given orders, so output
/// is deterministic.
pub fn alpha_sweep(
    instance: &ProjectionInstance,
    alphas: &[f64],
    distortions: &[(String, Distortion)],
) -> Result<Vec<SweepRow>, ProjError> {
    let mut rows = Vec::with_capacity(alphas.len() * distortions.len());
    for (label, g) in distortions {
        for &alpha in alphas {
            let p = project_lp(&instance.q, &instance.polyhedron, alpha, g)?;
            rows.push(SweepRow {
                g: label.clone(),
                alpha,
                value: p.value,
            });
        }
    }
    Ok(rows)
}

#[derive(Serialize, Deserialize)]
struct InstanceDto {
    n: usize,
    m: usize,
    seed: u64,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    x_star: Vec<f64>,
    d: Vec<f64>,
    q: Vec<f64>,
}

impl From<ProjectionInstance> for InstanceDto {
    fn from(v: ProjectionInstance) -> Self {
        InstanceDto {
            n: v.n,
            m: v.m,
            seed: v.seed,
            a: v.polyhedron.rows().to_vec(),
            b: v.polyhedron.rhs().to_vec(),
            x_star: v.x_star,
            d: v.d,
            q: v.q,
        }
    }
}

impl TryFrom<InstanceDto> for ProjectionInstance {
    type Error = String;

    fn try_from(dto: InstanceDto) -> Result<Self, String> {
        let polyhedron =
            Polyhedron::new(dto.a, dto.b).map_err(|e| format!("invalid polyhedron: {e}"))?;
        if polyhedron.n() != dto.n || polyhedron.m() != dto.m {
            return Err(format!(
                "declared {}x{} but A is {}x{}",
                dto.m,
                dto.n,
                polyhedron.m(),
                polyhedron.n()
            ));
        }
        for (name, v) in [("x_star", &dto.x_star), ("d", &dto.d), ("q", &dto.q)] {
            if v.len() != dto.n {
                return Err(format!("{name} has length {}, expected {}", v.len(), dto.n));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(format!("{name} contains a non-finite value"));
            }
        }
        Ok(ProjectionInstance {
            n: dto.n,
            m: dto.m,
            seed: dto.seed,
            polyhedron,
            x_star: dto.x_star,
            d: dto.d,
            q: dto.q,
        })
    }
}
