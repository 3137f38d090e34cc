//! Grid sweeps over input ensembles and extraction of the upper Pareto
//! envelope of the resulting union of polyhedra.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{
    check_regime, classical_capacity_product, cq_polyhedron_general, cqe_polyhedron_general,
    entanglement_assisted_classical, quantum_capacity, EnsembleSymmetric, EnsembleTwoLetter,
    RatePointCQ, RatePointCQE,
};
use crate::error::{check_unit, Error, Result};

/// Default number of grid points per axis of the symmetric sweep.
pub const DEFAULT_GRID: usize = 513;
/// Default number of grid points per axis of the five-parameter sweep.
pub const DEFAULT_GRID_GENERAL: usize = 13;

const DEDUP: f64 = 1e-9;

/// Ensemble that generates a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Generator {
    Symmetric(EnsembleSymmetric),
    TwoLetter(EnsembleTwoLetter),
}

impl Generator {
    pub fn two_letter(&self) -> EnsembleTwoLetter {
        match self {
            Generator::Symmetric(e) => e.as_two_letter(),
            Generator::TwoLetter(e) => *e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
    pub generator: Generator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    /// Symmetric ensembles, classical/quantum.
    Cq,
    /// Two-letter ensembles, classical/quantum.
    CqGeneral,
    /// Symmetric ensembles, classical/quantum/entanglement.
    Cqe,
    /// Two-letter ensembles, classical/quantum/entanglement.
    CqeGeneral,
}

impl RegionKind {
    pub fn has_entanglement(&self) -> bool {
        matches!(self, RegionKind::Cqe | RegionKind::CqeGeneral)
    }

    pub fn is_general(&self) -> bool {
        matches!(self, RegionKind::CqGeneral | RegionKind::CqeGeneral)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMeta {
    /// Axis names of the sweep, in nesting order.
    pub axes: Vec<&'static str>,
    /// Points per axis.
    pub shape: Vec<usize>,
    /// Extra ensembles added at the one-dimensional capacity optima.
    pub anchors: usize,
    /// Number of polyhedra swept.
    pub polyhedra: usize,
}

/// Upper envelope of a union of rate polyhedra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionBoundary {
    pub eta: f64,
    pub kind: RegionKind,
    pub grid: GridMeta,
    /// Sorted by `C` ascending; along a CQ boundary `Q` is non-increasing.
    pub points: Vec<BoundaryPoint>,
}

impl RegionBoundary {
    pub fn cq_points(&self) -> Vec<RatePointCQ> {
        self.points.iter().map(|b| RatePointCQ { c: b.c, q: b.q }).collect()
    }

    pub fn cqe_points(&self) -> Vec<RatePointCQE> {
        self.points
            .iter()
            .map(|b| RatePointCQE {
                c: b.c,
                q: b.q,
                e: b.e.unwrap_or(0.0),
            })
            .collect()
    }

    /// Envelope `max_i min(Q_i, C_i + Q_i - c)` of a CQ boundary, or `None`
    /// beyond its classical intercept.
    pub fn q_at(&self, c: f64) -> Option<f64> {
        self.points
            .iter()
            .filter(|b| c <= b.c + b.q)
            .map(|b| b.q.min(b.c + b.q - c))
            .max_by(f64::total_cmp)
    }

    /// Largest classical rate on the boundary.
    pub fn c_intercept(&self) -> f64 {
        self.points.iter().map(|b| b.c).fold(0.0, f64::max)
    }

    /// Largest quantum rate on the boundary.
    pub fn q_intercept(&self) -> f64 {
        self.points.iter().map(|b| b.q).fold(0.0, f64::max)
    }
}

fn check_grid(name: &'static str, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain {
            name,
            value: n as f64,
            range: "[2, inf)",
        });
    }
    Ok(())
}

fn axis(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Coherence axis `nu = sin^2(pi t / 2)`, dense at both ends. Near `nu = 1`
/// the output entropies have an `x log x` edge and a uniform axis leaves a
/// visible notch next to the classical intercept.
fn coherence_axis(n: usize) -> Vec<f64> {
    axis(n).into_iter().map(|t| (std::f64::consts::FRAC_PI_2 * t).sin().powi(2)).collect()
}

fn symmetric_grid(grid_p: usize, grid_nu: usize) -> Vec<EnsembleSymmetric> {
    let ps = axis(grid_p);
    let nus = coherence_axis(grid_nu);
    ps.iter()
        .flat_map(|&p| nus.iter().map(move |&nu| EnsembleSymmetric { p, nu }))
        .collect()
}

fn general_grid(n: usize) -> Vec<EnsembleTwoLetter> {
    let a = axis(n);
    let mut out = Vec::with_capacity(n.pow(5));
    for &p0 in &a {
        for &q0 in &a {
            for &q1 in &a {
                for &nu0 in &a {
                    for &nu1 in &a {
                        out.push(EnsembleTwoLetter {
                            p0,
                            q0,
                            q1,
                            nu0,
                            nu1,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Symmetric ensembles at the optima of the quantum, product-state classical
/// and entanglement-assisted classical capacities.
fn anchors(eta: f64) -> Result<Vec<EnsembleSymmetric>> {
    let mut out = vec![EnsembleSymmetric {
        p: classical_capacity_product(eta)?.1,
        nu: 1.0,
    }];
    if eta > 0.5 {
        out.push(EnsembleSymmetric {
            p: quantum_capacity(eta)?.1,
            nu: 0.0,
        });
    }
    out.push(EnsembleSymmetric {
        p: entanglement_assisted_classical(eta)?.1,
        nu: 0.0,
    });
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct CqCandidate {
    q_max: f64,
    sum: f64,
    generator: Generator,
}

fn cq_candidate(eta: f64, generator: Generator) -> Result<CqCandidate> {
    let poly = cq_polyhedron_general(eta, &generator.two_letter())?;
    let sum = poly.cq_sum_max.max(0.0);
    Ok(CqCandidate {
        q_max: poly.q_max.min(sum),
        sum,
        generator,
    })
}

/// Corners of the union of `{Q <= a_i, C + Q <= s_i}` that are not dominated.
fn cq_envelope(mut cands: Vec<CqCandidate>) -> Vec<BoundaryPoint> {
    cands.sort_by(|x, y| y.sum.total_cmp(&x.sum).then(y.q_max.total_cmp(&x.q_max)));
    let mut kept: Vec<CqCandidate> = Vec::new();
    for cand in cands {
        if kept.last().is_none_or(|k| cand.q_max > k.q_max) {
            kept.push(cand);
        }
    }
    kept.reverse();
    let (Some(first), Some(last)) = (kept.first().copied(), kept.last().copied()) else {
        return Vec::new();
    };
    let point = |c: f64, q: f64, generator: Generator| BoundaryPoint {
        c,
        q,
        e: None,
        generator,
    };
    let mut raw = Vec::with_capacity(kept.len() + 2);
    if first.sum - first.q_max > 0.0 {
        raw.push(point(0.0, first.q_max, first.generator));
    }
    raw.extend(kept.iter().map(|k| point(k.sum - k.q_max, k.q_max, k.generator)));
    if last.q_max > 0.0 {
        raw.push(point(last.sum, 0.0, last.generator));
    }
    let mut out: Vec<BoundaryPoint> = Vec::with_capacity(raw.len());
    for p in raw {
        if out.last().is_none_or(|prev| p.c - prev.c > DEDUP) {
            out.push(p);
        }
    }
    out
}

fn cq_sweep(eta: f64, generators: Vec<Generator>) -> Result<Vec<BoundaryPoint>> {
    let cands = generators
        .into_par_iter()
        .map(|g| cq_candidate(eta, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(cq_envelope(cands))
}

/// Classical/quantum boundary from a `grid_p x grid_nu` sweep of symmetric
/// ensembles. Requires `eta >= 1/2`.
pub fn cq_boundary(eta: f64, grid_p: usize, grid_nu: usize) -> Result<RegionBoundary> {
    let eta = check_regime(eta)?;
    check_grid("grid_p", grid_p)?;
    check_grid("grid_nu", grid_nu)?;
    let anchors = anchors(eta)?;
    let n_anchor = anchors.len();
    let mut gens: Vec<Generator> = symmetric_grid(grid_p, grid_nu)
        .into_iter()
        .map(Generator::Symmetric)
        .collect();
    let polyhedra = gens.len();
    gens.extend(anchors.into_iter().map(Generator::Symmetric));
    Ok(RegionBoundary {
        eta,
        kind: RegionKind::Cq,
        grid: GridMeta {
            axes: vec!["p", "nu"],
            shape: vec![grid_p, grid_nu],
            anchors: n_anchor,
            polyhedra,
        },
        points: cq_sweep(eta, gens)?,
    })
}

/// Classical/quantum boundary from an `n^5` sweep of two-letter ensembles.
/// Valid for any `eta`; quantum rates are floored at zero.
pub fn cq_boundary_general(eta: f64, n: usize) -> Result<RegionBoundary> {
    let eta = check_unit("eta", eta)?;
    check_grid("grid", n)?;
    let anchors = anchors(eta)?;
    let n_anchor = anchors.len();
    let mut gens: Vec<Generator> = general_grid(n).into_iter().map(Generator::TwoLetter).collect();
    let polyhedra = gens.len();
    gens.extend(anchors.iter().map(|a| Generator::TwoLetter(a.as_two_letter())));
    Ok(RegionBoundary {
        eta,
        kind: RegionKind::CqGeneral,
        grid: GridMeta {
            axes: vec!["p0", "q0", "q1", "nu0", "nu1"],
            shape: vec![n; 5],
            anchors: n_anchor,
            polyhedra,
        },
        points: cq_sweep(eta, gens)?,
    })
}

#[derive(Debug, Clone, Copy)]
struct CqeCandidate {
    rate: RatePointCQE,
    generator: Generator,
}

/// Points not weakly dominated in all of `C`, `Q`, `E`.
fn cqe_envelope(mut cands: Vec<CqeCandidate>) -> Vec<BoundaryPoint> {
    cands.sort_by(|x, y| {
        y.rate
            .c
            .total_cmp(&x.rate.c)
            .then(y.rate.q.total_cmp(&x.rate.q))
            .then(y.rate.e.total_cmp(&x.rate.e))
    });
    // Staircase of (Q, E) over points with larger C: E strictly decreases as
    // Q increases. Q >= 0, so bit patterns order like the values.
    let key = |q: f64| (q.max(0.0) + 0.0).to_bits();
    let mut stair: BTreeMap<u64, f64> = BTreeMap::new();
    let mut seen: HashSet<(i64, i64, i64)> = HashSet::new();
    let mut out = Vec::new();
    for cand in cands {
        let RatePointCQE { c, q, e } = cand.rate;
        let k = key(q);
        if stair.range(k..).next().is_some_and(|(_, &e2)| e2 >= e) {
            continue;
        }
        let cell = |x: f64| (x / DEDUP).round() as i64;
        if !seen.insert((cell(c), cell(q), cell(e))) {
            continue;
        }
        let covered: Vec<u64> = stair.range(..=k).filter(|(_, &e2)| e2 <= e).map(|(&k2, _)| k2).collect();
        for k2 in covered {
            stair.remove(&k2);
        }
        stair.insert(k, e);
        out.push(BoundaryPoint {
            c,
            q,
            e: Some(e),
            generator: cand.generator,
        });
    }
    out.sort_by(|x, y| {
        x.c.total_cmp(&y.c)
            .then(y.q.total_cmp(&x.q))
            .then(y.e.unwrap_or(0.0).total_cmp(&x.e.unwrap_or(0.0)))
    });
    out
}

fn cqe_sweep(eta: f64, generators: Vec<Generator>) -> Result<Vec<BoundaryPoint>> {
    let cands = generators
        .into_par_iter()
        .map(|g| {
            let poly = cqe_polyhedron_general(eta, &g.two_letter())?;
            Ok(poly.corners().map(|rate| CqeCandidate { rate, generator: g }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(cqe_envelope(cands.into_iter().flatten().collect()))
}

/// Classical/quantum/entanglement boundary from a symmetric-ensemble sweep.
/// Requires `eta >= 1/2`.
pub fn cqe_boundary(eta: f64, grid_p: usize, grid_nu: usize) -> Result<RegionBoundary> {
    let eta = check_regime(eta)?;
    check_grid("grid_p", grid_p)?;
    check_grid("grid_nu", grid_nu)?;
    let anchors = anchors(eta)?;
    let n_anchor = anchors.len();
    let mut gens: Vec<Generator> = symmetric_grid(grid_p, grid_nu)
        .into_iter()
        .map(Generator::Symmetric)
        .collect();
    let polyhedra = gens.len();
    gens.extend(anchors.into_iter().map(Generator::Symmetric));
    Ok(RegionBoundary {
        eta,
        kind: RegionKind::Cqe,
        grid: GridMeta {
            axes: vec!["p", "nu"],
            shape: vec![grid_p, grid_nu],
            anchors: n_anchor,
            polyhedra,
        },
        points: cqe_sweep(eta, gens)?,
    })
}

/// Classical/quantum/entanglement boundary from an `n^5` two-letter sweep.
pub fn cqe_boundary_general(eta: f64, n: usize) -> Result<RegionBoundary> {
    let eta = check_unit("eta", eta)?;
    check_grid("grid", n)?;
    let anchors = anchors(eta)?;
    let n_anchor = anchors.len();
    let mut gens: Vec<Generator> = general_grid(n).into_iter().map(Generator::TwoLetter).collect();
    let polyhedra = gens.len();
    gens.extend(anchors.iter().map(|a| Generator::TwoLetter(a.as_two_letter())));
    Ok(RegionBoundary {
        eta,
        kind: RegionKind::CqeGeneral,
        grid: GridMeta {
            axes: vec!["p0", "q0", "q1", "nu0", "nu1"],
            shape: vec![n; 5],
            anchors: n_anchor,
            polyhedra,
        },
        points: cqe_sweep(eta, gens)?,
    })
}

/// Chord between `(0, Q_cap)` and `(C_prod, 0)`, `samples` points uniform in
/// the mixing fraction.
pub fn time_sharing_baseline(eta: f64, samples: usize) -> Result<Vec<RatePointCQ>> {
    let eta = check_unit("eta", eta)?;
    if eta <= 0.5 {
        return Err(Error::Domain {
            name: "eta",
            value: eta,
            range: "(0.5, 1]",
        });
    }
    check_grid("samples", samples)?;
    let (q_cap, _) = quantum_capacity(eta)?;
    let (c_prod, _) = classical_capacity_product(eta)?;
    Ok((0..samples)
        .map(|i| {
            let t = i as f64 / (samples - 1) as f64;
            RatePointCQ {
                c: t * c_prod,
                q: (1.0 - t) * q_cap,
            }
        })
        .collect())
}
