//! Frame properties of the translates `{T_m f_k : m in M, k}` with
//! `f_k = involution(h_k)`, read off the analysis polyphase matrix.
//!
//! The optimal bounds are the extremes of the eigenvalues of `H*(gamma) H(gamma)`
//! over the dual of `M`. On finite groups every dual point is visited; on `Z^d`
//! the polyphase matrix `E(z)` is sampled on a uniform torus grid and the
//! result is tagged [`BoundMethod::TorusGrid`].

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{DualPoint, Signal};
use crate::laurent::LaurentPoly;
use crate::polyphase::{
    analysis_matrix, check_perfect_reconstruction, filters_from_synthesis, synthesis_from_laurent,
    synthesis_from_sampled, synthesis_matrix, FilterBank, PolyphaseMatrix,
};
use crate::{DEFAULT_GRID, DEFAULT_TOL};

/// Singular values below this fraction of the largest do not count toward rank.
const RANK_RTOL: f64 = 1e-10;
/// A lower bound at or below this is reported as "not a frame".
const FRAME_ATOL: f64 = 1e-12;
/// Largest group accepted by [`frame_operator_oracle`].
pub const ORACLE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    /// Torus points per dimension on `Z^d`.
    pub grid: usize,
    pub tol: f64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { grid: DEFAULT_GRID, tol: DEFAULT_TOL }
    }
}

/// Whether spectral extremes are exact or sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    ExactEnumeration,
    /// `r^d` uniform samples of the torus.
    TorusGrid(usize),
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundMethod::ExactEnumeration => f.write_str("exact-enumeration"),
            BoundMethod::TorusGrid(r) => write!(f, "torus-grid({r})"),
        }
    }
}

impl std::str::FromStr for BoundMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "exact-enumeration" {
            return Ok(BoundMethod::ExactEnumeration);
        }
        s.strip_prefix("torus-grid(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|r| r.parse().ok())
            .map(BoundMethod::TorusGrid)
            .ok_or_else(|| format!("unknown method tag {s:?}"))
    }
}

impl Serialize for BoundMethod {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BoundMethod {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Frame verdicts and optimal bounds of an analysis bank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    /// Always true for finitely supported filters.
    pub is_bessel: bool,
    pub is_frame: bool,
    pub is_tight: bool,
    /// Only present when `K = L`.
    pub is_riesz: Option<bool>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Where `lambda_min` is smallest: a dual representative on finite groups,
    /// `theta` (with `z = exp(2 pi i theta)`) on `Z^d`.
    pub argmin: DualPoint,
    pub argmax: DualPoint,
    pub method: BoundMethod,
}

/// Sample points of the dual of `M` together with the matching matrices.
fn spectral_samples(pm: &PolyphaseMatrix, grid: usize) -> Result<(Vec<DualPoint>, Vec<DMatrix<Complex64>>, BoundMethod)> {
    if let Some(mats) = pm.sampled() {
        let points = pm
            .lattice()
            .dual_representatives()
            .iter()
            .cloned()
            .map(DualPoint::Discrete)
            .collect();
        return Ok((points, mats.to_vec(), BoundMethod::ExactEnumeration));
    }
    let e = pm.laurent().expect("integer backend");
    let grid = grid.max(1);
    let points = torus_grid(e.dim(), grid);
    let mats = points
        .iter()
        .map(|p| pm.at(p))
        .collect::<Result<Vec<_>>>()?;
    Ok((points, mats, BoundMethod::TorusGrid(grid)))
}

/// `theta = j / r` for every `j` in `{0..r-1}^d`, first coordinate fastest.
pub(crate) fn torus_grid(dim: usize, r: usize) -> Vec<DualPoint> {
    let total = r.pow(dim as u32);
    (0..total)
        .map(|mut j| {
            let theta = (0..dim)
                .map(|_| {
                    let t = (j % r) as f64 / r as f64;
                    j /= r;
                    t
                })
                .collect();
            DualPoint::Torus(theta)
        })
        .collect()
}

struct Extremes {
    min: f64,
    max: f64,
    argmin: usize,
    argmax: usize,
    full_rank: bool,
}

/// Eigenvalue extremes of `m* m` (or `m m*` when `outer`) across samples.
fn gram_extremes(mats: &[DMatrix<Complex64>], outer: bool) -> (Extremes, Vec<DMatrix<Complex64>>) {
    let mut ex = Extremes { min: f64::INFINITY, max: f64::NEG_INFINITY, argmin: 0, argmax: 0, full_rank: true };
    let mut grams = Vec::with_capacity(mats.len());
    for (i, m) in mats.iter().enumerate() {
        let gram = if outer { m * m.adjoint() } else { m.adjoint() * m };
        let n = gram.nrows();
        let eig = gram.clone().symmetric_eigen().eigenvalues;
        let (lo, hi) = eig.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let sv = m.clone().svd(false, false).singular_values;
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let rank = sv.iter().filter(|&&s| s > RANK_RTOL * smax && s > 0.0).count();
        let lo = if rank < n {
            ex.full_rank = false;
            0.0
        } else {
            lo.max(0.0)
        };
        if lo < ex.min {
            ex.min = lo;
            ex.argmin = i;
        }
        if hi > ex.max {
            ex.max = hi;
            ex.argmax = i;
        }
        grams.push(gram);
    }
    (ex, grams)
}

fn tight_residual(grams: &[DMatrix<Complex64>]) -> (f64, f64) {
    let n: usize = grams.iter().map(|g| g.nrows()).sum();
    let mean = grams.iter().map(|g| g.trace().re).sum::<f64>() / n.max(1) as f64;
    let residual = grams
        .iter()
        .map(|g| {
            let eye = DMatrix::<Complex64>::identity(g.nrows(), g.ncols()) * Complex64::new(mean, 0.0);
            (g - eye).iter().map(|v| v.norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    (mean, residual)
}

/// Optimal frame bounds `A = min lambda_min`, `B = max lambda_max` of
/// `H*(gamma) H(gamma)` and the derived verdicts.
pub fn frame_bounds(bank: &FilterBank, opts: &BoundOptions) -> Result<FrameReport> {
    let h = analysis_matrix(bank)?;
    let (points, mats, method) = spectral_samples(&h, opts.grid)?;
    let (ex, grams) = gram_extremes(&mats, false);
    let lower_bound = if ex.full_rank && ex.min > FRAME_ATOL { ex.min } else { 0.0 };
    let is_frame = lower_bound > 0.0;
    let (mean, residual) = tight_residual(&grams);
    let is_tight = is_frame && residual <= opts.tol * mean.max(1.0);
    let is_riesz = (bank.channels() == bank.lattice().index()).then_some(is_frame);
    Ok(FrameReport {
        is_bessel: true,
        is_frame,
        is_tight,
        is_riesz,
        lower_bound,
        upper_bound: ex.max.max(lower_bound),
        argmin: points[ex.argmin].clone(),
        argmax: points[ex.argmax].clone(),
        method,
    })
}

/// `H*(gamma) H(gamma) = A I` for all `gamma`, with `A > 0`.
pub fn is_tight(bank: &FilterBank, opts: &BoundOptions) -> Result<bool> {
    Ok(frame_bounds(bank, opts)?.is_tight)
}

/// `det H(gamma) != 0` for all `gamma` (maximally decimated banks only). On
/// `Z^d` the determinant is checked on the torus grid.
pub fn is_riesz_basis(bank: &FilterBank, opts: &BoundOptions) -> Result<bool> {
    let (k, l) = (bank.channels(), bank.lattice().index());
    if k != l {
        return Err(Error::NotMaximallyDecimated { channels: k, index: l });
    }
    let h = analysis_matrix(bank)?;
    let (_, mats, _) = spectral_samples(&h, opts.grid)?;
    Ok(mats.into_iter().all(|m| m.determinant().norm() > opts.tol))
}

fn prune_filter(s: Signal) -> Result<Signal> {
    let cutoff = 1e-13 * s.max_abs();
    let group = s.group().clone();
    Signal::from_samples(&group, s.support().filter(|(_, v)| v.norm() > cutoff))
}

/// Keeps only coefficients within `rtol` of the largest one.
fn dominant_terms(p: &LaurentPoly, rtol: f64) -> Vec<(Vec<i64>, Complex64)> {
    let cutoff = rtol * p.max_coefficient();
    p.terms().filter(|(_, c)| c.norm() > cutoff).map(|(k, c)| (k.to_vec(), c)).collect()
}

/// Returns `bank` with its synthesis filters replaced by the canonical dual
/// frame, whose polyphase matrix is the pseudoinverse
/// `G = (H* H)^{-1} H*`.
///
/// On `Z^d` this is only possible when `det(E* E)` is a monomial, so that the
/// inverse is again a Laurent polynomial matrix; otherwise
/// [`Error::NonFirDual`] is returned.
pub fn canonical_dual(bank: &FilterBank) -> Result<FilterBank> {
    let h = analysis_matrix(bank)?;
    let lattice = bank.lattice();
    let g = if let Some(mats) = h.sampled() {
        let report = frame_bounds(bank, &BoundOptions::default())?;
        if !report.is_frame {
            return Err(Error::NotAFrame { lower_bound: report.lower_bound });
        }
        let mut out = Vec::with_capacity(mats.len());
        for m in mats {
            let gram = m.adjoint() * m;
            let chol = gram.cholesky().ok_or(Error::NotAFrame { lower_bound: 0.0 })?;
            out.push(chol.solve(&m.adjoint()));
        }
        synthesis_from_sampled(lattice, out)
    } else {
        let e = h.laurent().expect("integer backend");
        let gram = e.adjoint().mul(e)?;
        let det = gram.det()?;
        let terms = dominant_terms(&det, 1e-10);
        if terms.is_empty() {
            return Err(Error::NotAFrame { lower_bound: 0.0 });
        }
        let [(k, c)] = terms.as_slice() else { return Err(Error::NonFirDual) };
        let inv_det = LaurentPoly::monomial(k.iter().map(|v| -v).collect(), c.inv());
        let r = gram.adjugate()?.scale(&inv_det)?.mul(&e.adjoint())?;
        synthesis_from_laurent(lattice, r)
    };
    let synthesis = filters_from_synthesis(&g)?
        .into_iter()
        .map(prune_filter)
        .collect::<Result<Vec<_>>>()?;
    bank.with_synthesis(synthesis)
}

/// Outcome of [`check_dual_frames`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualFrameReport {
    /// `G(gamma) H(gamma) = I` for all `gamma`.
    pub are_dual: bool,
    pub residual: f64,
    /// Optimal bounds of the synthesis system, from `G(gamma) G*(gamma)`.
    pub synthesis_lower: f64,
    pub synthesis_upper: f64,
    /// How the synthesis bounds were obtained; the duality verdict itself is
    /// always exact.
    pub method: BoundMethod,
}

/// Decides whether the analysis and synthesis families are dual frames and
/// reports the synthesis-side bounds.
pub fn check_dual_frames(bank: &FilterBank, opts: &BoundOptions) -> Result<DualFrameReport> {
    let pr = check_perfect_reconstruction(bank, opts.tol)?;
    let g = synthesis_matrix(bank)?;
    let (_, mats, method) = spectral_samples(&g, opts.grid)?;
    let (ex, _) = gram_extremes(&mats, true);
    Ok(DualFrameReport {
        are_dual: pr.holds,
        residual: pr.residual,
        synthesis_lower: ex.min.max(0.0),
        synthesis_upper: ex.max,
        method,
    })
}

/// The frame operator `S = sum_k sum_{m in M} (T_m f_k)(T_m f_k)*` assembled
/// as an explicit `|G| x |G|` matrix.
#[derive(Debug, Clone)]
pub struct FrameOperator {
    pub matrix: DMatrix<Complex64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `max |S T_m - T_m S|` over a sample of lattice translations.
    pub commutation_residual: f64,
}

impl FrameOperator {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Brute-force frame operator for finite groups up to [`ORACLE_CAP`] elements.
pub fn frame_operator_oracle(bank: &FilterBank) -> Result<FrameOperator> {
    let lattice = bank.lattice();
    let group = lattice.group();
    let n = group.cardinality().ok_or(Error::UnsupportedBackend("integer"))?;
    if n > ORACLE_CAP {
        return Err(Error::SizeCap { size: n, cap: ORACLE_CAP });
    }
    let members = lattice.members().expect("finite lattice");
    let mut s = DMatrix::<Complex64>::zeros(n, n);
    for f in bank.frame_generators() {
        let support: Vec<_> = f.support().collect();
        for m in members {
            let atoms: Vec<(usize, Complex64)> = support
                .iter()
                .map(|(p, v)| (group.linear_index(&group.add(p, m)).unwrap(), *v))
                .collect();
            for &(i, a) in &atoms {
                for &(j, b) in &atoms {
                    s[(i, j)] += a * b.conj();
                }
            }
        }
    }
    let shift: Vec<Vec<usize>> = members
        .iter()
        .filter(|m| !m.is_zero())
        .take(8)
        .map(|m| {
            (0..n)
                .map(|i| group.linear_index(&group.add(&group.element_at(i).unwrap(), m)).unwrap())
                .collect()
        })
        .collect();
    let mut commutation_residual: f64 = 0.0;
    for perm in &shift {
        for a in 0..n {
            for b in 0..n {
                commutation_residual = commutation_residual.max((s[(perm[a], perm[b])] - s[(a, b)]).norm());
            }
        }
    }
    let mut eigenvalues: Vec<f64> = s.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(FrameOperator { matrix: s, eigenvalues, commutation_residual })
}
