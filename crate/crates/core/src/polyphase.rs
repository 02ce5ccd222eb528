//! Polyphase representation of filter banks.
//!
//! For a lattice `M` with transversal `l_0, ..., l_{L-1}` the polyphase
//! components are
//!
//! ```text
//! x_l(m)     = x(m + l)        (signals and synthesis filters, g_{l,k}(m) = g_k(m + l))
//! h_{k,l}(m) = h_k(m - l)      (analysis filters)
//! ```
//!
//! and their `M`-Fourier transforms form the polyphase vector `X(gamma)` and
//! the matrices `H(gamma)` (`K x L`) and `G(gamma)` (`L x K`), so that the
//! bank acts as `Y = G H X`.
//!
//! On finite groups the dual group of `M` is enumerated through the canonical
//! representatives of `G^/M^perp` (see [`Lattice::dual_representatives`]) and
//! spectra are sampled exactly there. On `Z^d` the same objects are Laurent
//! polynomials in `z` with `gamma = z^M`, e.g. `E_{k,l}(z) = sum_n h_k(Mn - l) z^{-n}`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{DualPoint, Group, GroupElement, Signal};
use crate::lattice::Lattice;
use crate::laurent::{LaurentMatrix, LaurentPoly, IDENTITY_TOL};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A `K`-channel filter bank on `lattice.group()`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    lattice: Lattice,
    analysis: Vec<Signal>,
    synthesis: Option<Vec<Signal>>,
}

impl FilterBank {
    /// Validates channel counts and groups. Filters are finitely supported by
    /// construction of [`Signal`].
    pub fn new(lattice: Lattice, analysis: Vec<Signal>, synthesis: Option<Vec<Signal>>) -> Result<Self> {
        if analysis.is_empty() {
            return Err(Error::EmptyBank);
        }
        let all = analysis.iter().chain(synthesis.iter().flatten());
        if all.into_iter().any(|f| f.group() != lattice.group()) {
            return Err(Error::GroupMismatch);
        }
        if let Some(s) = &synthesis {
            if s.len() != analysis.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} analysis filters but {} synthesis filters",
                    analysis.len(),
                    s.len()
                )));
            }
        }
        Ok(FilterBank { lattice, analysis, synthesis })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn group(&self) -> &Group {
        self.lattice.group()
    }

    pub fn analysis(&self) -> &[Signal] {
        &self.analysis
    }

    pub fn synthesis(&self) -> Option<&[Signal]> {
        self.synthesis.as_deref()
    }

    /// Number of channels `K`.
    pub fn channels(&self) -> usize {
        self.analysis.len()
    }

    pub fn with_synthesis(&self, synthesis: Vec<Signal>) -> Result<FilterBank> {
        FilterBank::new(self.lattice.clone(), self.analysis.clone(), Some(synthesis))
    }

    pub fn without_synthesis(&self) -> FilterBank {
        FilterBank { synthesis: None, ..self.clone() }
    }

    /// Same bank on a different transversal of the same subgroup.
    pub fn with_lattice(&self, lattice: Lattice) -> Result<FilterBank> {
        FilterBank::new(lattice, self.analysis.clone(), self.synthesis.clone())
    }

    /// Multiplies every analysis filter by `c`.
    pub fn scale_analysis(&self, c: Complex64) -> FilterBank {
        FilterBank {
            analysis: self.analysis.iter().map(|h| h.scale(c)).collect(),
            ..self.clone()
        }
    }

    /// The analysis frame generators `f_k = involution(h_k)`.
    pub fn frame_generators(&self) -> Vec<Signal> {
        self.analysis.iter().map(Signal::involution).collect()
    }
}

/// Spectral data of a polyphase vector: either exact samples over the dual
/// of `M` (`[l][gamma]`), or Laurent polynomials in `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectra {
    Sampled(Vec<Vec<Complex64>>),
    Laurent(Vec<LaurentPoly>),
}

/// The polyphase transform `X = [X_l]` of a signal.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyphaseVector {
    lattice: Lattice,
    entries: Spectra,
}

impl PolyphaseVector {
    pub fn new(lattice: &Lattice, entries: Spectra) -> Result<Self> {
        let len = match &entries {
            Spectra::Sampled(v) => {
                let n = lattice.dual_size().ok_or(Error::UnsupportedBackend("integer"))?;
                if let Some(bad) = v.iter().find(|e| e.len() != n) {
                    return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
                }
                v.len()
            }
            Spectra::Laurent(v) => {
                if lattice.is_finite() {
                    return Err(Error::UnsupportedBackend("finite"));
                }
                let d = lattice.group().rank();
                if let Some(bad) = v.iter().find(|e| e.dim() != d) {
                    return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
                }
                v.len()
            }
        };
        if len != lattice.index() {
            return Err(Error::DimensionMismatch { expected: lattice.index(), found: len });
        }
        Ok(PolyphaseVector { lattice: lattice.clone(), entries })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn entries(&self) -> &Spectra {
        &self.entries
    }

    pub fn sampled(&self) -> Option<&[Vec<Complex64>]> {
        match &self.entries {
            Spectra::Sampled(v) => Some(v),
            Spectra::Laurent(_) => None,
        }
    }

    pub fn laurent(&self) -> Option<&[LaurentPoly]> {
        match &self.entries {
            Spectra::Laurent(v) => Some(v),
            Spectra::Sampled(_) => None,
        }
    }

    /// `<X, Y> = sum_l integral X_l conj(Y_l)` with the normalized Haar measure
    /// on the dual of `M`.
    pub fn inner(&self, other: &PolyphaseVector) -> Result<Complex64> {
        if self.lattice != other.lattice {
            return Err(Error::GroupMismatch);
        }
        match (&self.entries, &other.entries) {
            (Spectra::Sampled(a), Spectra::Sampled(b)) => {
                let n = self.lattice.dual_size().unwrap() as f64;
                let s: Complex64 = a
                    .iter()
                    .zip(b)
                    .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| u * v.conj()))
                    .sum();
                Ok(s / n)
            }
            (Spectra::Laurent(a), Spectra::Laurent(b)) => Ok(a
                .iter()
                .zip(b)
                .flat_map(|(x, y)| x.terms().map(move |(k, c)| c * y.coefficient(k).conj()))
                .sum()),
            _ => Err(Error::UnsupportedBackend("mixed")),
        }
    }

    /// Applies a matrix-valued function pointwise: `(M X)(gamma)`.
    fn apply(&self, matrix: &PolyphaseMatrix) -> Result<PolyphaseVector> {
        if matrix.cols != self.lattice.index() && matrix.cols != self.len() {
            return Err(Error::ShapeMismatch("matrix columns do not match vector length".into()));
        }
        match (&self.entries, &matrix.data) {
            (Spectra::Sampled(x), MatrixData::Sampled(ms)) => {
                let n = ms.len();
                let mut out = vec![vec![ZERO; n]; matrix.rows];
                for (g, m) in ms.iter().enumerate() {
                    for (r, row) in out.iter_mut().enumerate() {
                        row[g] = (0..matrix.cols).map(|c| m[(r, c)] * x[c][g]).sum();
                    }
                }
                Ok(PolyphaseVector { lattice: self.lattice.clone(), entries: Spectra::Sampled(out) })
            }
            (Spectra::Laurent(x), MatrixData::Laurent(m)) => {
                let col = LaurentMatrix::from_entries(x.len(), 1, x.clone())?;
                let prod = m.mul(&col)?;
                let entries = (0..prod.rows()).map(|r| prod.get(r, 0).clone()).collect();
                Ok(PolyphaseVector { lattice: self.lattice.clone(), entries: Spectra::Laurent(entries) })
            }
            _ => Err(Error::UnsupportedBackend("mixed")),
        }
    }

    fn len(&self) -> usize {
        match &self.entries {
            Spectra::Sampled(v) => v.len(),
            Spectra::Laurent(v) => v.len(),
        }
    }
}

/// Which side of the bank a polyphase matrix describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// `H(gamma)`, `K x L`.
    Analysis,
    /// `G(gamma)`, `L x K`.
    Synthesis,
}

#[derive(Debug, Clone, PartialEq)]
enum MatrixData {
    Sampled(Vec<DMatrix<Complex64>>),
    Laurent(LaurentMatrix),
}

/// A polyphase matrix over the dual of `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyphaseMatrix {
    lattice: Lattice,
    role: Role,
    rows: usize,
    cols: usize,
    data: MatrixData,
}

impl PolyphaseMatrix {
    pub fn role(&self) -> Role {
        self.role
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// One matrix per dual representative (finite backend).
    pub fn sampled(&self) -> Option<&[DMatrix<Complex64>]> {
        match &self.data {
            MatrixData::Sampled(v) => Some(v),
            MatrixData::Laurent(_) => None,
        }
    }

    /// `E(z)` or `R(z)` (integer backend).
    pub fn laurent(&self) -> Option<&LaurentMatrix> {
        match &self.data {
            MatrixData::Laurent(m) => Some(m),
            MatrixData::Sampled(_) => None,
        }
    }

    /// Value at a dual point: a character `xi` of `G` on the finite backend
    /// (any member of the coset `xi + M^perp`), or `theta` with `z = e^{2 pi i theta}`
    /// on the integer backend.
    pub fn at(&self, point: &DualPoint) -> Result<DMatrix<Complex64>> {
        match (&self.data, point) {
            (MatrixData::Sampled(v), DualPoint::Discrete(xi)) => {
                let (r, _) = self.lattice.dual_class(xi)?;
                Ok(v[r].clone())
            }
            (MatrixData::Laurent(m), DualPoint::Torus(theta)) => m.eval(theta),
            _ => Err(Error::GroupMismatch),
        }
    }

    /// Pointwise product `self * other`.
    pub fn mul(&self, other: &PolyphaseMatrix) -> Result<PolyphaseMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = match (&self.data, &other.data) {
            (MatrixData::Sampled(a), MatrixData::Sampled(b)) => {
                MatrixData::Sampled(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (MatrixData::Laurent(a), MatrixData::Laurent(b)) => MatrixData::Laurent(a.mul(b)?),
            _ => return Err(Error::UnsupportedBackend("mixed")),
        };
        Ok(PolyphaseMatrix { lattice: self.lattice.clone(), role: self.role, rows: self.rows, cols: other.cols, data })
    }
}

/// Accumulates the `M`-Fourier transform of the polyphase pieces of `signal`.
/// `locate(p)` returns, for a support point `p`, the polyphase index it feeds
/// and the lattice point `m` it sits at.
fn polyphase_spectra(
    lattice: &Lattice,
    signal: &Signal,
    count: usize,
    locate: impl Fn(&GroupElement) -> Result<(usize, GroupElement)>,
) -> Result<Spectra> {
    let group = lattice.group();
    if lattice.is_finite() {
        let reps = lattice.dual_representatives();
        let mut out = vec![vec![ZERO; reps.len()]; count];
        for (p, v) in signal.support() {
            let (i, m) = locate(&p)?;
            for (acc, xi) in out[i].iter_mut().zip(reps) {
                *acc += v * group.character_unchecked(m.coords(), xi).conj();
            }
        }
        Ok(Spectra::Sampled(out))
    } else {
        let d = group.rank();
        let mut terms: Vec<Vec<(Vec<i64>, Complex64)>> = vec![Vec::new(); count];
        for (p, v) in signal.support() {
            let (i, m) = locate(&p)?;
            let n = lattice.lattice_coords(&m).expect("split lands in the lattice");
            terms[i].push((n.into_iter().map(|c| -c).collect(), v));
        }
        let polys = terms
            .into_iter()
            .map(|t| LaurentPoly::from_terms(d, t))
            .collect::<Result<_>>()?;
        Ok(Spectra::Laurent(polys))
    }
}

/// `p = l_i + m`: the layout of signals and synthesis filters.
fn locate_forward(lattice: &Lattice) -> impl Fn(&GroupElement) -> Result<(usize, GroupElement)> + '_ {
    move |p| lattice.split(p)
}

/// `p = m - l_i`: the layout of analysis filters, `h_{k,l}(m) = h_k(m - l)`.
fn locate_analysis(lattice: &Lattice) -> impl Fn(&GroupElement) -> Result<(usize, GroupElement)> + '_ {
    move |p| {
        let g = lattice.group();
        let i = lattice.coset_of(&g.neg(p))?;
        Ok((i, g.add(p, &lattice.transversal()[i])))
    }
}

/// Polyphase transform `X_l(gamma) = sum_{m in M} x(m + l) conj(<m, gamma>)`.
pub fn polyphase_forward(x: &Signal, lattice: &Lattice) -> Result<PolyphaseVector> {
    if x.group() != lattice.group() {
        return Err(Error::GroupMismatch);
    }
    let entries = polyphase_spectra(lattice, x, lattice.index(), locate_forward(lattice))?;
    Ok(PolyphaseVector { lattice: lattice.clone(), entries })
}

/// Inverse polyphase transform:
/// `x(m + l) = integral X_l(gamma) <m, gamma> d gamma`.
pub fn polyphase_inverse(xv: &PolyphaseVector) -> Result<Signal> {
    let lattice = &xv.lattice;
    let group = lattice.group();
    match &xv.entries {
        Spectra::Sampled(entries) => {
            let members = lattice.members().ok_or(Error::UnsupportedBackend("integer"))?;
            let reps = lattice.dual_representatives();
            let scale = 1.0 / reps.len() as f64;
            let mut dense = vec![ZERO; group.cardinality().unwrap()];
            for (l, spectrum) in lattice.transversal().iter().zip(entries) {
                for m in members {
                    let v: Complex64 = spectrum
                        .iter()
                        .zip(reps)
                        .map(|(s, xi)| s * group.character_unchecked(m.coords(), xi))
                        .sum();
                    dense[group.linear_index(&group.add(m, l)).unwrap()] = v * scale;
                }
            }
            Signal::from_dense(group, dense)
        }
        Spectra::Laurent(entries) => {
            let matrix = lattice.matrix().ok_or(Error::UnsupportedBackend("finite"))?;
            let mut samples = Vec::new();
            for (l, poly) in lattice.transversal().iter().zip(entries) {
                for (k, c) in poly.terms() {
                    let n: Vec<i64> = k.iter().map(|e| -e).collect();
                    let m = matrix.mul_vec(&n);
                    samples.push((group.add(&group.element(m)?, l), c));
                }
            }
            Signal::from_samples(group, samples)
        }
    }
}

fn assemble(lattice: &Lattice, role: Role, rows: usize, cols: usize, cells: Vec<Vec<Spectra>>) -> Result<PolyphaseMatrix> {
    // cells[k] holds the L spectra of filter k, each wrapped as a one-entry Spectra
    let data = if lattice.is_finite() {
        let n = lattice.dual_size().unwrap();
        let mut mats = vec![DMatrix::zeros(rows, cols); n];
        for (k, per_filter) in cells.iter().enumerate() {
            for (l, s) in per_filter.iter().enumerate() {
                let Spectra::Sampled(v) = s else { unreachable!() };
                for (g, mat) in mats.iter_mut().enumerate() {
                    let (r, c) = match role {
                        Role::Analysis => (k, l),
                        Role::Synthesis => (l, k),
                    };
                    mat[(r, c)] = v[0][g];
                }
            }
        }
        MatrixData::Sampled(mats)
    } else {
        let d = lattice.group().rank();
        let mut m = LaurentMatrix::zeros(rows, cols, d);
        for (k, per_filter) in cells.into_iter().enumerate() {
            for (l, s) in per_filter.into_iter().enumerate() {
                let Spectra::Laurent(mut v) = s else { unreachable!() };
                let (r, c) = match role {
                    Role::Analysis => (k, l),
                    Role::Synthesis => (l, k),
                };
                *m.get_mut(r, c) = v.pop().unwrap();
            }
        }
        MatrixData::Laurent(m)
    };
    Ok(PolyphaseMatrix { lattice: lattice.clone(), role, rows, cols, data })
}

fn split_entries(s: Spectra) -> Vec<Spectra> {
    match s {
        Spectra::Sampled(v) => v.into_iter().map(|e| Spectra::Sampled(vec![e])).collect(),
        Spectra::Laurent(v) => v.into_iter().map(|e| Spectra::Laurent(vec![e])).collect(),
    }
}

/// `H(gamma) = [H_{k,l}(gamma)]`, the `K x L` analysis polyphase matrix
/// (`E(z)` on `Z^d`).
pub fn analysis_matrix(bank: &FilterBank) -> Result<PolyphaseMatrix> {
    let lattice = bank.lattice();
    let cells = bank
        .analysis()
        .iter()
        .map(|h| polyphase_spectra(lattice, h, lattice.index(), locate_analysis(lattice)).map(split_entries))
        .collect::<Result<Vec<_>>>()?;
    assemble(lattice, Role::Analysis, bank.channels(), lattice.index(), cells)
}

/// `G(gamma) = [G_{l,k}(gamma)]`, the `L x K` synthesis polyphase matrix
/// (`R(z)` on `Z^d`).
pub fn synthesis_matrix(bank: &FilterBank) -> Result<PolyphaseMatrix> {
    let lattice = bank.lattice();
    let synth = bank.synthesis().ok_or(Error::MissingSynthesis)?;
    let cells = synth
        .iter()
        .map(|g| polyphase_spectra(lattice, g, lattice.index(), locate_forward(lattice)).map(split_entries))
        .collect::<Result<Vec<_>>>()?;
    assemble(lattice, Role::Synthesis, lattice.index(), bank.channels(), cells)
}

/// Rebuilds filters from a synthesis-layout polyphase matrix: column `k`
/// holds the `M`-Fourier transforms of `m -> g_k(m + l)`.
pub(crate) fn filters_from_synthesis(matrix: &PolyphaseMatrix) -> Result<Vec<Signal>> {
    let lattice = &matrix.lattice;
    (0..matrix.cols)
        .map(|k| {
            let entries = match &matrix.data {
                MatrixData::Sampled(ms) => {
                    Spectra::Sampled((0..matrix.rows).map(|l| ms.iter().map(|m| m[(l, k)]).collect()).collect())
                }
                MatrixData::Laurent(m) => {
                    Spectra::Laurent((0..matrix.rows).map(|l| m.get(l, k).clone()).collect())
                }
            };
            polyphase_inverse(&PolyphaseVector::new(lattice, entries)?)
        })
        .collect()
}

pub(crate) fn synthesis_from_sampled(lattice: &Lattice, mats: Vec<DMatrix<Complex64>>) -> PolyphaseMatrix {
    let (rows, cols) = mats.first().map_or((0, 0), |m| m.shape());
    PolyphaseMatrix { lattice: lattice.clone(), role: Role::Synthesis, rows, cols, data: MatrixData::Sampled(mats) }
}

pub(crate) fn synthesis_from_laurent(lattice: &Lattice, m: LaurentMatrix) -> PolyphaseMatrix {
    PolyphaseMatrix { lattice: lattice.clone(), role: Role::Synthesis, rows: m.rows(), cols: m.cols(), data: MatrixData::Laurent(m) }
}

/// Subbands and reconstruction of a filter bank run in the signal domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BankOutput {
    /// `c_k = down_M(x * h_k)`, as signals on `G` supported in `M`.
    pub subbands: Vec<Signal>,
    /// `y = sum_k (up_M c_k) * g_k`, when synthesis filters are present.
    pub output: Option<Signal>,
}

/// Runs the bank on `x` by direct convolution, decimation and expansion.
pub fn apply_filter_bank(x: &Signal, bank: &FilterBank) -> Result<BankOutput> {
    if x.group() != bank.group() {
        return Err(Error::GroupMismatch);
    }
    let lattice = bank.lattice();
    let subbands = bank
        .analysis()
        .iter()
        .map(|h| lattice.downsample(&x.convolve(h)?))
        .collect::<Result<Vec<_>>>()?;
    let output = match bank.synthesis() {
        None => None,
        Some(synth) => {
            let mut y = Signal::zeros(bank.group());
            for (c, g) in subbands.iter().zip(synth) {
                y = y.add(&lattice.expand(c)?.convolve(g)?)?;
            }
            Some(y)
        }
    };
    Ok(BankOutput { subbands, output })
}

/// `H(gamma) X(gamma)`, the polyphase-domain subbands `C(gamma)`.
pub fn predicted_subbands(x: &Signal, bank: &FilterBank) -> Result<PolyphaseVector> {
    polyphase_forward(x, bank.lattice())?.apply(&analysis_matrix(bank)?)
}

/// `G(gamma) H(gamma) X(gamma)`, the polyphase transform of the output.
pub fn predicted_output(x: &Signal, bank: &FilterBank) -> Result<PolyphaseVector> {
    predicted_subbands(x, bank)?.apply(&synthesis_matrix(bank)?)
}

/// How a perfect-reconstruction verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrMethod {
    /// `G(gamma) H(gamma) = I` checked at every point of the finite dual of `M`.
    ExactEnumeration,
    /// `R(z) E(z) = I` checked as a Laurent polynomial identity.
    LaurentIdentity,
}

impl std::fmt::Display for PrMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PrMethod::ExactEnumeration => "exact-enumeration",
            PrMethod::LaurentIdentity => "laurent-identity",
        })
    }
}

/// Outcome of [`check_perfect_reconstruction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrReport {
    pub holds: bool,
    /// Largest entry (or coefficient) magnitude of `G H - I`.
    pub residual: f64,
    pub method: PrMethod,
}

/// Decides `y = x` for every input, i.e. `G(gamma) H(gamma) = I_L` for all
/// `gamma`. On `Z^d` the identity is decided on the Laurent polynomials, which
/// covers every `z` on the torus.
pub fn check_perfect_reconstruction(bank: &FilterBank, tol: f64) -> Result<PrReport> {
    let product = synthesis_matrix(bank)?.mul(&analysis_matrix(bank)?)?;
    let l = bank.lattice().index();
    match &product.data {
        MatrixData::Sampled(ms) => {
            let eye = DMatrix::<Complex64>::identity(l, l);
            let residual = ms
                .iter()
                .map(|m| (m - &eye).iter().map(|v| v.norm()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            Ok(PrReport { holds: residual <= tol, residual, method: PrMethod::ExactEnumeration })
        }
        MatrixData::Laurent(m) => {
            let residual = m.identity_residual()?;
            let tol = if tol > 0.0 { tol } else { IDENTITY_TOL };
            Ok(PrReport { holds: m.is_identity(tol), residual, method: PrMethod::LaurentIdentity })
        }
    }
}

/// `X(xi) = p(xi)^T X(xi + M^perp)` with `p(xi) = [conj(<l, xi>)]_l`:
/// recovers the Fourier transform on `G` from polyphase data (finite backend).
pub fn fourier_from_polyphase(xv: &PolyphaseVector, xi: &DualPoint) -> Result<Complex64> {
    let entries = xv.sampled().ok_or(Error::UnsupportedBackend("integer"))?;
    let DualPoint::Discrete(xi) = xi else { return Err(Error::GroupMismatch) };
    let lattice = &xv.lattice;
    let group = lattice.group();
    let (r, _) = lattice.dual_class(xi)?;
    Ok(lattice
        .transversal()
        .iter()
        .zip(entries)
        .map(|(l, e)| group.character_unchecked(l.coords(), xi).conj() * e[r])
        .sum())
}

/// The transform used for quincunx banks on `Z_2P x Z_2Q`:
///
/// ```text
/// (Lambda x)(n, m) = DFT[x_0](n, m) + W_2P^{-n} W_2Q^{-m} DFT[x_1](n, m)
/// ```
///
/// with `x_0(u, v) = x(2u, 2v)`, `x_1(u, v) = x(2u+1, 2v+1)` and the `P x Q`
/// point DFT. Only the quincunx samples of `x` are read. Values are returned
/// for every `(n, m)` in `Z_2P x Z_2Q`, in colexicographic order.
pub fn quincunx_lambda(x: &Signal) -> Result<Vec<Complex64>> {
    let orders = x.group().orders().ok_or(Error::UnsupportedBackend("integer"))?;
    if orders.len() != 2 || orders[0] % 2 != 0 || orders[1] % 2 != 0 {
        return Err(Error::InvalidGroup("quincunx transform needs Z_2P x Z_2Q".into()));
    }
    let (p, q) = (orders[0] / 2, orders[1] / 2);
    let g = x.group();
    let mut out = Vec::with_capacity((4 * p * q) as usize);
    for m in 0..2 * q {
        for n in 0..2 * p {
            let mut acc = ZERO;
            for v in 0..q {
                for u in 0..p {
                    let base = -(((u * n) % p) as f64 / p as f64 + ((v * m) % q) as f64 / q as f64);
                    let w = Complex64::cis(std::f64::consts::TAU * base);
                    let x0 = x.get(&g.element([2 * u, 2 * v])?);
                    let x1 = x.get(&g.element([2 * u + 1, 2 * v + 1])?);
                    acc += w * x0;
                    if x1 != ZERO {
                        let shift = -(n as f64 / (2 * p) as f64 + m as f64 / (2 * q) as f64);
                        acc += w * Complex64::cis(std::f64::consts::TAU * shift) * x1;
                    }
                }
            }
            out.push(acc);
        }
    }
    Ok(out)
}
