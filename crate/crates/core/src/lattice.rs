//! Finite-index subgroups `M` of a discrete abelian group `G`.
//!
//! A [`Lattice`] carries its index `L`, an ordered transversal (one coset
//! representative per coset, zero first) and, on finite groups, the
//! annihilator `M^perp` together with a canonical set of representatives of
//! `G^/M^perp`, which is how the dual group of `M` is enumerated.
//!
//! Canonical orders are colexicographic: coordinates are compared from the last
//! one to the first, matching the dense storage order of [`Signal`].

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{DualPoint, Group, GroupElement, Signal};
use crate::intmat::{floor_div, IntMatrix};

/// Which coset representatives to use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransversalConvention {
    /// Colexicographically smallest representative of each coset (finite
    /// groups) or the fundamental parallelepiped points `M[0,1)^d` (on `Z^d`).
    #[default]
    Lex,
    /// Negatives of the `Lex` representatives, e.g. `{0, -1, ..., -(L-1)}` on `Z_s`.
    Negative,
}

/// How a lattice was specified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeSpec {
    Generators(Vec<GroupElement>),
    Matrix(IntMatrix),
    Quincunx { p: i64, q: i64 },
}

/// A subgroup of finite index with its coset and dual-group bookkeeping.
///
/// Cloning is cheap; the tables are shared.
#[derive(Debug, Clone)]
pub struct Lattice {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    group: Group,
    spec: LatticeSpec,
    convention: TransversalConvention,
    transversal: Vec<GroupElement>,
    backend: Backend,
}

#[derive(Debug)]
enum Backend {
    Finite(FiniteTables),
    Integer(IntegerTables),
}

#[derive(Debug)]
struct FiniteTables {
    members: Vec<GroupElement>,
    is_member: Vec<bool>,
    /// Transversal index of the coset of each element (by linear index).
    coset: Vec<usize>,
    annihilator: Vec<Vec<i64>>,
    dual_reps: Vec<Vec<i64>>,
    /// For each character (by linear index): (dual representative, annihilator offset).
    dual_class: Vec<(usize, usize)>,
}

#[derive(Debug)]
struct IntegerTables {
    matrix: IntMatrix,
    adjugate: IntMatrix,
    det: i64,
    hnf: IntMatrix,
    /// Fundamental-domain reduction of each transversal element -> its index.
    cosets: HashMap<Vec<i64>, usize>,
    torus_annihilator: Vec<Vec<f64>>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        let (a, b) = (&*self.inner, &*other.inner);
        if a.group != b.group || a.transversal != b.transversal {
            return false;
        }
        match (&a.backend, &b.backend) {
            (Backend::Finite(x), Backend::Finite(y)) => x.is_member == y.is_member,
            (Backend::Integer(x), Backend::Integer(y)) => x.hnf == y.hnf,
            _ => false,
        }
    }
}

pub(crate) fn colex_cmp(a: &[i64], b: &[i64]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

impl Lattice {
    /// Subgroup of a finite group generated by `gens` (the empty list gives `{0}`).
    pub fn from_generators(group: &Group, gens: &[GroupElement]) -> Result<Self> {
        let gens = gens
            .iter()
            .map(|g| group.element(g.coords().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Lattice::build_finite(group, LatticeSpec::Generators(gens), TransversalConvention::Lex, None)
    }

    /// `M = matrix * Z^d` inside `Z^d`; requires `det(matrix) > 0`.
    pub fn from_matrix(matrix: IntMatrix) -> Result<Self> {
        Lattice::build_integer(matrix, TransversalConvention::Lex, None)
    }

    /// The quincunx subgroup of `Z_2P x Z_2Q`: pairs whose coordinates are both
    /// even or both odd. Index 2, transversal `[(0,0), (1,0)]`, annihilator
    /// `{(0,0), (P,Q)}`.
    pub fn quincunx(p: i64, q: i64) -> Result<Self> {
        if p < 1 || q < 1 {
            return Err(Error::InvalidLattice(format!("quincunx needs P, Q >= 1 (got {p}, {q})")));
        }
        let group = Group::finite([2 * p, 2 * q])?;
        let lat = Lattice::build_finite(
            &group,
            LatticeSpec::Quincunx { p, q },
            TransversalConvention::Lex,
            None,
        )?;
        debug_assert_eq!(lat.transversal()[1].coords(), &[1, 0]);
        Ok(lat)
    }

    /// Same subgroup with the representatives chosen by `convention`.
    pub fn with_convention(&self, convention: TransversalConvention) -> Result<Self> {
        self.rebuild(convention, None)
    }

    /// Same subgroup with an explicit transversal. The list must have `L`
    /// entries, start with zero and hit every coset once.
    pub fn with_transversal(&self, transversal: Vec<GroupElement>) -> Result<Self> {
        let transversal = transversal
            .into_iter()
            .map(|t| self.group().element(t.into_coords()))
            .collect::<Result<Vec<_>>>()?;
        self.rebuild(self.convention(), Some(transversal))
    }

    fn rebuild(
        &self,
        convention: TransversalConvention,
        custom: Option<Vec<GroupElement>>,
    ) -> Result<Self> {
        match &self.inner.backend {
            Backend::Finite(_) => {
                Lattice::build_finite(self.group(), self.spec().clone(), convention, custom)
            }
            Backend::Integer(t) => Lattice::build_integer(t.matrix.clone(), convention, custom),
        }
    }

    fn generators_of(group: &Group, spec: &LatticeSpec) -> Result<Vec<GroupElement>> {
        match spec {
            LatticeSpec::Generators(g) => Ok(g.clone()),
            LatticeSpec::Quincunx { .. } => Ok(vec![group.element([1, 1])?, group.element([2, 0])?]),
            LatticeSpec::Matrix(_) => Err(Error::InvalidLattice("matrix spec on a finite group".into())),
        }
    }

    fn build_finite(
        group: &Group,
        spec: LatticeSpec,
        convention: TransversalConvention,
        custom: Option<Vec<GroupElement>>,
    ) -> Result<Self> {
        let size = group
            .cardinality()
            .ok_or(Error::UnsupportedBackend("integer"))?;
        if size > crate::group::DENSE_LIMIT {
            return Err(Error::SizeCap { size, cap: crate::group::DENSE_LIMIT });
        }
        let gens = Lattice::generators_of(group, &spec)?;

        // subgroup closure
        let mut is_member = vec![false; size];
        let mut members = Vec::new();
        let mut queue = VecDeque::from([group.zero()]);
        is_member[0] = true;
        while let Some(n) = queue.pop_front() {
            for g in &gens {
                let next = group.add(&n, g);
                let idx = group.linear_index(&next).unwrap();
                if !is_member[idx] {
                    is_member[idx] = true;
                    queue.push_back(next);
                }
            }
            members.push(n);
        }
        members.sort_by(|a, b| colex_cmp(a.coords(), b.coords()));
        let index = size / members.len();

        // canonical cosets: colexicographically smallest representative first
        let mut canonical = vec![usize::MAX; size];
        let mut lex_reps = Vec::with_capacity(index);
        for (i, n) in group.elements()?.enumerate() {
            if canonical[i] != usize::MAX {
                continue;
            }
            let id = lex_reps.len();
            for m in &members {
                canonical[group.linear_index(&group.add(&n, m)).unwrap()] = id;
            }
            lex_reps.push(n);
        }

        let transversal = match custom {
            Some(t) => t,
            None => match convention {
                TransversalConvention::Lex => lex_reps,
                TransversalConvention::Negative => lex_reps.iter().map(|r| group.neg(r)).collect(),
            },
        };
        if transversal.len() != index {
            return Err(Error::InvalidLattice(format!(
                "transversal has {} entries, index is {index}",
                transversal.len()
            )));
        }
        if !transversal[0].is_zero() {
            return Err(Error::InvalidLattice("transversal must start with zero".into()));
        }
        let mut canon_to_t = vec![usize::MAX; index];
        for (i, t) in transversal.iter().enumerate() {
            let c = canonical[group.linear_index(t).unwrap()];
            if canon_to_t[c] != usize::MAX {
                return Err(Error::InvalidLattice(format!(
                    "transversal entries {:?} and {:?} share a coset",
                    transversal[canon_to_t[c]].coords(),
                    t.coords()
                )));
            }
            canon_to_t[c] = i;
        }
        let coset = canonical.into_iter().map(|c| canon_to_t[c]).collect();

        // annihilator: characters trivial on every generator
        let annihilator: Vec<Vec<i64>> = group
            .elements()?
            .map(GroupElement::into_coords)
            .filter(|xi| gens.iter().all(|g| group.character_is_trivial(g.coords(), xi)))
            .collect();
        debug_assert_eq!(annihilator.len(), index);

        // representatives of G^/M^perp
        let mut dual_class = vec![(usize::MAX, usize::MAX); size];
        let mut dual_reps = Vec::with_capacity(size / index);
        for (i, xi) in group.elements()?.enumerate() {
            if dual_class[i].0 != usize::MAX {
                continue;
            }
            let r = dual_reps.len();
            for (j, eta) in annihilator.iter().enumerate() {
                let sum: Vec<i64> = xi.coords().iter().zip(eta).map(|(a, b)| a + b).collect();
                let k = group.linear_index(&group.reduce(sum)).unwrap();
                dual_class[k] = (r, j);
            }
            dual_reps.push(xi.into_coords());
        }

        Ok(Lattice {
            inner: Arc::new(Inner {
                group: group.clone(),
                spec,
                convention,
                transversal,
                backend: Backend::Finite(FiniteTables {
                    members,
                    is_member,
                    coset,
                    annihilator,
                    dual_reps,
                    dual_class,
                }),
            }),
        })
    }

    fn build_integer(
        matrix: IntMatrix,
        convention: TransversalConvention,
        custom: Option<Vec<GroupElement>>,
    ) -> Result<Self> {
        let d = matrix.dim();
        let det = matrix.det();
        if det <= 0 {
            return Err(Error::InvalidLattice(format!("matrix determinant must be positive (got {det})")));
        }
        let group = Group::integer(d)?;
        let adjugate = matrix.adjugate();
        let hnf = matrix.column_hnf();

        let fundamental = fundamental_points(&matrix, &adjugate, det, &hnf);
        let transversal: Vec<GroupElement> = match custom {
            Some(t) => t,
            None => fundamental
                .iter()
                .map(|p| match convention {
                    TransversalConvention::Lex => group.reduce(p.clone()),
                    TransversalConvention::Negative => group.reduce(p.iter().map(|c| -c).collect()),
                })
                .collect(),
        };
        if transversal.len() != det as usize {
            return Err(Error::InvalidLattice(format!(
                "transversal has {} entries, index is {det}",
                transversal.len()
            )));
        }
        if !transversal[0].is_zero() {
            return Err(Error::InvalidLattice("transversal must start with zero".into()));
        }
        let mut cosets = HashMap::new();
        for (i, t) in transversal.iter().enumerate() {
            let key = reduce_fundamental(&matrix, &adjugate, det, t.coords());
            if cosets.insert(key, i).is_some() {
                return Err(Error::InvalidLattice(format!(
                    "transversal entry {:?} repeats a coset",
                    t.coords()
                )));
            }
        }

        let mt = matrix.transpose();
        let adj_t = adjugate.transpose();
        let mut torus_annihilator: Vec<Vec<f64>> =
            fundamental_points(&mt, &adj_t, det, &mt.column_hnf())
                .iter()
                .map(|k| {
                    adj_t
                        .mul_vec(k)
                        .iter()
                        .map(|&v| (v as i128).rem_euclid(det as i128) as f64 / det as f64)
                        .collect()
                })
                .collect();
        torus_annihilator.sort_by(|a, b| a.iter().rev().partial_cmp(b.iter().rev()).unwrap());

        Ok(Lattice {
            inner: Arc::new(Inner {
                group,
                spec: LatticeSpec::Matrix(matrix.clone()),
                convention,
                transversal,
                backend: Backend::Integer(IntegerTables {
                    matrix,
                    adjugate,
                    det,
                    hnf,
                    cosets,
                    torus_annihilator,
                }),
            }),
        })
    }

    pub fn group(&self) -> &Group {
        &self.inner.group
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.inner.spec
    }

    pub fn convention(&self) -> TransversalConvention {
        self.inner.convention
    }

    /// The index `L = [G : M]`.
    pub fn index(&self) -> usize {
        self.inner.transversal.len()
    }

    pub fn transversal(&self) -> &[GroupElement] {
        &self.inner.transversal
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.inner.backend, Backend::Finite(_))
    }

    /// The defining matrix on the integer backend.
    pub fn matrix(&self) -> Option<&IntMatrix> {
        match &self.inner.backend {
            Backend::Integer(t) => Some(&t.matrix),
            Backend::Finite(_) => None,
        }
    }

    /// Column Hermite normal form of the defining matrix (integer backend).
    pub fn hnf(&self) -> Option<&IntMatrix> {
        match &self.inner.backend {
            Backend::Integer(t) => Some(&t.hnf),
            Backend::Finite(_) => None,
        }
    }

    pub fn contains(&self, n: &GroupElement) -> bool {
        if !self.group().contains(n) {
            return false;
        }
        match &self.inner.backend {
            Backend::Finite(t) => t.is_member[self.group().linear_index(n).unwrap()],
            Backend::Integer(t) => {
                let det = t.det as i128;
                t.adjugate
                    .mul_vec(n.coords())
                    .iter()
                    .all(|&v| (v as i128).rem_euclid(det) == 0)
            }
        }
    }

    /// Index `i` of the coset containing `n`, so that `n - l_i` lies in `M`.
    pub fn coset_of(&self, n: &GroupElement) -> Result<usize> {
        self.group().check(n)?;
        Ok(match &self.inner.backend {
            Backend::Finite(t) => t.coset[self.group().linear_index(n).unwrap()],
            Backend::Integer(t) => t.cosets[&reduce_fundamental(&t.matrix, &t.adjugate, t.det, n.coords())],
        })
    }

    /// Writes `n = l_i + m` with `m` in `M`; returns `(i, m)`.
    pub fn split(&self, n: &GroupElement) -> Result<(usize, GroupElement)> {
        let i = self.coset_of(n)?;
        Ok((i, self.group().sub(n, &self.inner.transversal[i])))
    }

    /// Elements of `M` in colexicographic order (finite backend).
    pub fn members(&self) -> Option<&[GroupElement]> {
        match &self.inner.backend {
            Backend::Finite(t) => Some(&t.members),
            Backend::Integer(_) => None,
        }
    }

    /// `M^perp` in colexicographic order, zero first (finite backend).
    pub fn annihilator(&self) -> Option<Vec<DualPoint>> {
        match &self.inner.backend {
            Backend::Finite(t) => Some(t.annihilator.iter().cloned().map(DualPoint::Discrete).collect()),
            Backend::Integer(_) => None,
        }
    }

    pub(crate) fn annihilator_coords(&self) -> &[Vec<i64>] {
        match &self.inner.backend {
            Backend::Finite(t) => &t.annihilator,
            Backend::Integer(_) => &[],
        }
    }

    /// Torus offsets `M^{-T} k`, `k` in `N(M^T)`, describing `M^perp` inside
    /// `T^d` on the integer backend.
    pub fn torus_annihilator(&self) -> Option<&[Vec<f64>]> {
        match &self.inner.backend {
            Backend::Integer(t) => Some(&t.torus_annihilator),
            Backend::Finite(_) => None,
        }
    }

    /// Canonical representatives of `G^/M^perp`, one per character of `M`
    /// (finite backend). All sampled spectra are indexed in this order.
    pub fn dual_representatives(&self) -> &[Vec<i64>] {
        match &self.inner.backend {
            Backend::Finite(t) => &t.dual_reps,
            Backend::Integer(_) => &[],
        }
    }

    /// `N = |M|`, the number of dual points of `M` (finite backend).
    pub fn dual_size(&self) -> Option<usize> {
        match &self.inner.backend {
            Backend::Finite(t) => Some(t.dual_reps.len()),
            Backend::Integer(_) => None,
        }
    }

    /// For a character `xi` of a finite `G`: `(r, j)` with `xi = rep_r + eta_j`.
    pub fn dual_class(&self, xi: &[i64]) -> Result<(usize, usize)> {
        match &self.inner.backend {
            Backend::Finite(t) => {
                let xi = self.group().element(xi.to_vec())?;
                Ok(t.dual_class[self.group().linear_index(&xi).unwrap()])
            }
            Backend::Integer(_) => Err(Error::UnsupportedBackend("integer")),
        }
    }

    /// Coordinates `n` with `m = M n` for `m` in `M` (integer backend).
    pub fn lattice_coords(&self, m: &GroupElement) -> Option<Vec<i64>> {
        let Backend::Integer(t) = &self.inner.backend else { return None };
        let det = t.det as i128;
        t.adjugate
            .mul_vec(m.coords())
            .iter()
            .map(|&v| {
                let v = v as i128;
                (v.rem_euclid(det) == 0).then(|| (v / det) as i64)
            })
            .collect()
    }

    /// Reduction of `n` by the Hermite-normal-form columns: the unique digit
    /// vector `r` with `0 <= r_i < H_ii` and `n - r` in `M` (integer backend).
    pub fn hnf_digits(&self, n: &[i64]) -> Option<Vec<i64>> {
        let Backend::Integer(t) = &self.inner.backend else { return None };
        Some(hnf_reduce(&t.hnf, n))
    }

    /// Restriction `(down_M x)(m) = x(m)`; the result is a signal on `G`
    /// supported in `M`.
    pub fn downsample(&self, x: &Signal) -> Result<Signal> {
        if x.group() != self.group() {
            return Err(Error::GroupMismatch);
        }
        Signal::from_samples(self.group(), x.support().filter(|(n, _)| self.contains(n)))
    }

    /// Zero-fill expansion of a signal on `M` (given as a signal on `G`
    /// supported in `M`) to all of `G`.
    pub fn expand(&self, c: &Signal) -> Result<Signal> {
        if c.group() != self.group() {
            return Err(Error::GroupMismatch);
        }
        if let Some((n, _)) = c.support().find(|(n, _)| !self.contains(n)) {
            return Err(Error::InvalidSignal(format!(
                "expander input is supported off the lattice at {:?}",
                n.coords()
            )));
        }
        Ok(c.clone())
    }
}

fn hnf_reduce(hnf: &IntMatrix, n: &[i64]) -> Vec<i64> {
    let d = hnf.dim();
    let mut r: Vec<i128> = n.iter().map(|&v| v as i128).collect();
    for i in 0..d {
        let h = hnf.get(i, i) as i128;
        let q = floor_div(r[i], h);
        for (row, ri) in r.iter_mut().enumerate().skip(i) {
            *ri -= q * hnf.get(row, i) as i128;
        }
    }
    r.into_iter().map(|v| v as i64).collect()
}

/// `n - M floor(M^{-1} n)`, the representative of `n + M` in `M[0,1)^d`.
fn reduce_fundamental(matrix: &IntMatrix, adjugate: &IntMatrix, det: i64, n: &[i64]) -> Vec<i64> {
    let q: Vec<i64> = adjugate
        .mul_vec(n)
        .iter()
        .map(|&v| floor_div(v as i128, det as i128) as i64)
        .collect();
    let mq = matrix.mul_vec(&q);
    n.iter().zip(mq).map(|(a, b)| a - b).collect()
}

/// Integer points of `M[0,1)^d`, enumerated from the HNF digit set and sorted
/// colexicographically with zero first.
fn fundamental_points(matrix: &IntMatrix, adjugate: &IntMatrix, det: i64, hnf: &IntMatrix) -> Vec<Vec<i64>> {
    let d = matrix.dim();
    let bounds: Vec<i64> = (0..d).map(|i| hnf.get(i, i)).collect();
    let mut digits = vec![0i64; d];
    let mut out = Vec::with_capacity(det as usize);
    loop {
        out.push(reduce_fundamental(matrix, adjugate, det, &digits));
        let mut k = 0;
        loop {
            if k == d {
                out.sort_by(|a, b| {
                    let za = a.iter().all(|&c| c == 0);
                    let zb = b.iter().all(|&c| c == 0);
                    zb.cmp(&za).then_with(|| colex_cmp(a, b))
                });
                return out;
            }
            digits[k] += 1;
            if digits[k] < bounds[k] {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}
