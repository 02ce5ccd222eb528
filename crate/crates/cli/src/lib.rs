//! JSON documents and command implementations behind the `abelbank` binary.
//!
//! Every command returns an [`Output`] (a JSON value plus exit code) or a
//! [`Failure`]; the binary only parses arguments and does I/O.

use std::fmt;

use abelbank::{
    apply_filter_bank, canonical_dual, check_dual_frames, check_mod_polyphase_relation, check_perfect_reconstruction,
    frame_bounds, modulation_matrix, BoundOptions, DualFrameReport, FilterBank, FrameReport, Group, GroupElement,
    Lattice, LatticeSpec, PrReport, Signal, TransversalConvention,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const BANK_SCHEMA: &str = "abelbank/bank/v1";
pub const SIGNAL_SCHEMA: &str = "abelbank/signal/v1";
pub const REPORT_SCHEMA: &str = "abelbank/report/v1";
pub const APPLY_SCHEMA: &str = "abelbank/apply/v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit codes.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

/// `[[coords], [re, im]]` pairs, one per nonzero tap.
pub type Taps = Vec<(Vec<i64>, [f64; 2])>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankDocument {
    #[serde(rename = "$schema")]
    pub schema: String,
    pub group: Group,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub transversal: TransversalConvention,
    pub analysis: Vec<Taps>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesis: Option<Vec<Taps>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalDocument {
    #[serde(rename = "$schema")]
    pub schema: String,
    pub group: Group,
    pub samples: Taps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrSummary {
    pub holds: bool,
    pub residual: f64,
    pub method: String,
}

impl From<PrReport> for PrSummary {
    fn from(r: PrReport) -> Self {
        PrSummary { holds: r.holds, residual: r.residual, method: r.method.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationSummary {
    /// Largest residual of `H_mod = H D W` and its inverse form.
    pub factorization_residual: f64,
    /// `max |W W* - L I|`.
    pub w_orthogonality_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    #[serde(rename = "$schema")]
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub channels: usize,
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perfect_reconstruction: Option<PrSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_frames: Option<DualFrameReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<ModulationSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplyDocument {
    #[serde(rename = "$schema")]
    pub schema: String,
    pub tool_version: String,
    /// `c_k`, as signals on `G` supported in `M`.
    pub subbands: Vec<SignalDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<SignalDocument>,
}

/// A command error with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }

    pub fn math(message: impl Into<String>) -> Self {
        Failure { code: EXIT_FAIL, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn input_err(e: abelbank::Error) -> Failure {
    Failure::input(e.to_string())
}

/// A document to print together with the exit code to return.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub document: serde_json::Value,
    pub code: u8,
}

impl Output {
    fn new(doc: &impl Serialize, code: u8) -> Self {
        Output { document: serde_json::to_value(doc).expect("documents serialize"), code }
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.document).expect("values serialize");
        s.push('\n');
        s
    }
}

/// Settings shared by the commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub grid: usize,
    pub tol: f64,
    /// Overrides the document's convention when set.
    pub transversal: Option<TransversalConvention>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { grid: abelbank::DEFAULT_GRID, tol: abelbank::DEFAULT_TOL, transversal: None }
    }
}

impl Settings {
    fn bound_options(&self) -> BoundOptions {
        BoundOptions { grid: self.grid, tol: self.tol }
    }
}

fn check_schema(found: &str, expected: &str) -> Result<(), Failure> {
    if found != expected {
        return Err(Failure::input(format!("expected $schema {expected:?}, found {found:?}")));
    }
    Ok(())
}

pub fn parse_bank(text: &str) -> Result<BankDocument, Failure> {
    let doc: BankDocument = serde_json::from_str(text).map_err(|e| Failure::input(format!("bank document: {e}")))?;
    check_schema(&doc.schema, BANK_SCHEMA)?;
    Ok(doc)
}

pub fn parse_signal(text: &str) -> Result<SignalDocument, Failure> {
    let doc: SignalDocument =
        serde_json::from_str(text).map_err(|e| Failure::input(format!("signal document: {e}")))?;
    check_schema(&doc.schema, SIGNAL_SCHEMA)?;
    Ok(doc)
}

fn taps_to_signal(group: &Group, taps: &Taps, what: &str) -> Result<Signal, Failure> {
    let mut samples = Vec::with_capacity(taps.len());
    for (coords, [re, im]) in taps {
        if coords.len() != group.rank() {
            return Err(Failure::input(format!("{what}: point {coords:?} has the wrong rank")));
        }
        if let Some(orders) = group.orders() {
            if coords.iter().zip(orders).any(|(c, s)| !(0..*s).contains(c)) {
                return Err(Failure::input(format!("{what}: point {coords:?} is outside the group ranges")));
            }
        }
        if !re.is_finite() || !im.is_finite() {
            return Err(Failure::input(format!("{what}: non-finite value at {coords:?}")));
        }
        let n = group.element(coords.clone()).map_err(input_err)?;
        samples.push((n, Complex64::new(*re, *im)));
    }
    Signal::from_samples(group, samples).map_err(|e| Failure::input(format!("{what}: {e}")))
}

pub fn signal_to_taps(x: &Signal) -> Taps {
    x.support().map(|(n, v)| (n.into_coords(), [v.re, v.im])).collect()
}

pub fn signal_document(x: &Signal) -> SignalDocument {
    SignalDocument { schema: SIGNAL_SCHEMA.into(), group: x.group().clone(), samples: signal_to_taps(x) }
}

fn build_lattice(doc: &BankDocument, convention: TransversalConvention) -> Result<Lattice, Failure> {
    let lattice = match &doc.lattice {
        LatticeSpec::Generators(gens) => {
            if !doc.group.is_finite() {
                return Err(Failure::input("generator lattices need a finite group; use a matrix on Z^d"));
            }
            let gens = gens
                .iter()
                .map(|g| doc.group.element(g.coords().to_vec()))
                .collect::<Result<Vec<GroupElement>, _>>()
                .map_err(input_err)?;
            Lattice::from_generators(&doc.group, &gens)
        }
        LatticeSpec::Matrix(m) => {
            if doc.group != Group::integer(m.dim()).map_err(input_err)? {
                return Err(Failure::input(format!("a {0}x{0} lattice matrix needs group Z^{0}", m.dim())));
            }
            Lattice::from_matrix(m.clone())
        }
        LatticeSpec::Quincunx { p, q } => {
            let expected = Group::finite([2 * p, 2 * q]).map_err(input_err)?;
            if doc.group != expected {
                return Err(Failure::input(format!("quincunx({p}, {q}) lives on Z_{} x Z_{}", 2 * p, 2 * q)));
            }
            Lattice::quincunx(*p, *q)
        }
    }
    .map_err(input_err)?;
    lattice.with_convention(convention).map_err(input_err)
}

/// Builds the in-memory bank described by a document.
pub fn bank_from_document(doc: &BankDocument, settings: &Settings) -> Result<FilterBank, Failure> {
    let lattice = build_lattice(doc, settings.transversal.unwrap_or(doc.transversal))?;
    let to_signals = |list: &[Taps], side: &str| {
        list.iter()
            .enumerate()
            .map(|(k, t)| taps_to_signal(&doc.group, t, &format!("{side} filter {k}")))
            .collect::<Result<Vec<_>, _>>()
    };
    let analysis = to_signals(&doc.analysis, "analysis")?;
    let synthesis = doc.synthesis.as_deref().map(|s| to_signals(s, "synthesis")).transpose()?;
    FilterBank::new(lattice, analysis, synthesis).map_err(input_err)
}

pub fn signal_from_document(doc: &SignalDocument) -> Result<Signal, Failure> {
    taps_to_signal(&doc.group, &doc.samples, "signal")
}

fn report(command: &str, bank: &FilterBank) -> ReportDocument {
    ReportDocument {
        schema: REPORT_SCHEMA.into(),
        tool_version: TOOL_VERSION.into(),
        command: command.into(),
        channels: bank.channels(),
        index: bank.lattice().index(),
        perfect_reconstruction: None,
        frame: None,
        dual_frames: None,
        modulation: None,
    }
}

/// `verify-pr`: exit 0 iff the bank reconstructs perfectly.
pub fn verify_pr(doc: &BankDocument, settings: &Settings) -> Result<Output, Failure> {
    let bank = bank_from_document(doc, settings)?;
    if bank.synthesis().is_none() {
        return Err(Failure::input("verify-pr needs synthesis filters"));
    }
    let pr = check_perfect_reconstruction(&bank, settings.tol).map_err(input_err)?;
    let mut r = report("verify-pr", &bank);
    r.perfect_reconstruction = Some(pr.into());
    Ok(Output::new(&r, if pr.holds { EXIT_PASS } else { EXIT_FAIL }))
}

/// `analyze`: frame report, plus PR and dual-frame data when synthesis filters
/// are present and modulation residuals on finite groups.
pub fn analyze(doc: &BankDocument, settings: &Settings) -> Result<Output, Failure> {
    let bank = bank_from_document(doc, settings)?;
    let opts = settings.bound_options();
    let mut r = report("analyze", &bank);
    r.frame = Some(frame_bounds(&bank, &opts).map_err(input_err)?);
    if bank.synthesis().is_some() {
        r.perfect_reconstruction = Some(check_perfect_reconstruction(&bank, settings.tol).map_err(input_err)?.into());
        r.dual_frames = Some(check_dual_frames(&bank, &opts).map_err(input_err)?);
    }
    if bank.lattice().is_finite() {
        let data = modulation_matrix(&bank).map_err(input_err)?;
        let l = bank.lattice().index();
        let ww = data.w() * data.w().adjoint();
        let w_res = (0..l)
            .flat_map(|i| (0..l).map(move |j| (i, j)))
            .map(|(i, j)| (ww[(i, j)] - if i == j { Complex64::new(l as f64, 0.0) } else { Complex64::new(0.0, 0.0) }).norm())
            .fold(0.0, f64::max);
        r.modulation = Some(ModulationSummary {
            factorization_residual: check_mod_polyphase_relation(&bank).map_err(input_err)?,
            w_orthogonality_residual: w_res,
        });
    }
    Ok(Output::new(&r, EXIT_PASS))
}

/// `dual`: the input document with its synthesis filters replaced by the
/// canonical dual.
pub fn dual(doc: &BankDocument, settings: &Settings) -> Result<Output, Failure> {
    let bank = bank_from_document(doc, settings)?;
    let dual = canonical_dual(&bank).map_err(|e| match e {
        abelbank::Error::NotAFrame { .. } | abelbank::Error::NonFirDual => Failure::math(e.to_string()),
        other => input_err(other),
    })?;
    let mut out = doc.clone();
    out.transversal = settings.transversal.unwrap_or(doc.transversal);
    out.synthesis = Some(dual.synthesis().unwrap().iter().map(signal_to_taps).collect());
    Ok(Output::new(&out, EXIT_PASS))
}

/// `apply`: subbands and, when synthesis filters are present, the output.
pub fn apply(doc: &BankDocument, signal: &SignalDocument, settings: &Settings) -> Result<Output, Failure> {
    let bank = bank_from_document(doc, settings)?;
    let x = signal_from_document(signal)?;
    if x.group() != bank.group() {
        return Err(Failure::input("signal and bank live on different groups"));
    }
    let out = apply_filter_bank(&x, &bank).map_err(input_err)?;
    let doc = ApplyDocument {
        schema: APPLY_SCHEMA.into(),
        tool_version: TOOL_VERSION.into(),
        subbands: out.subbands.iter().map(signal_document).collect(),
        output: out.output.as_ref().map(signal_document),
    };
    Ok(Output::new(&doc, EXIT_PASS))
}
