//! Discrete abelian groups: finite products of cyclic groups `Z_s1 x ... x Z_sd`
//! and the integer lattice `Z^d`.
//!
//! Signals are complex-valued functions on a group. On finite groups they are
//! stored densely in colexicographic order (first coordinate varies fastest),
//! on `Z^d` (and on very large finite groups) as a sparse coefficient map.
//!
//! The dual group of `Z_s` is identified with `Z_s` through
//! `<n, xi> = exp(2 pi i n xi / s)`, and the dual of `Z` with the torus through
//! `<n, theta> = exp(2 pi i n theta)`. The Haar measure on the dual group is
//! normalized to total mass one, so the inverse transform on a finite group
//! carries a `1/|G|` factor.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite groups up to this cardinality store signals densely.
pub const DENSE_LIMIT: usize = 1 << 20;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Shape of a discrete abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    /// `Z_s1 x ... x Z_sd` with the listed orders.
    Finite(Vec<i64>),
    /// `Z^d` with the given rank.
    Integer(usize),
}

/// A validated discrete abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupKind", into = "GroupKind")]
pub struct Group {
    kind: GroupKind,
    /// lcm of the orders; common denominator of character phases.
    period: i128,
}

impl TryFrom<GroupKind> for Group {
    type Error = Error;

    fn try_from(kind: GroupKind) -> Result<Self> {
        match kind {
            GroupKind::Finite(orders) => Group::finite(orders),
            GroupKind::Integer(rank) => Group::integer(rank),
        }
    }
}

impl From<Group> for GroupKind {
    fn from(g: Group) -> Self {
        g.kind
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// An element of a group, stored as its coordinate vector.
///
/// Elements handed out by [`Group`] methods are always reduced, so equality is
/// coordinatewise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<i64>);

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }
}

/// A point of the dual group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualPoint {
    /// Character of a finite group, `0 <= xi_j < s_j`.
    Discrete(Vec<i64>),
    /// Point `theta` of `[0,1)^d`, standing for `z = exp(2 pi i theta)`.
    Torus(Vec<f64>),
}

impl DualPoint {
    pub fn rank(&self) -> usize {
        match self {
            DualPoint::Discrete(v) => v.len(),
            DualPoint::Torus(v) => v.len(),
        }
    }
}

impl Group {
    pub fn finite(orders: impl Into<Vec<i64>>) -> Result<Self> {
        let orders = orders.into();
        if orders.is_empty() {
            return Err(Error::InvalidGroup("finite group needs at least one factor".into()));
        }
        let mut period: i128 = 1;
        for &s in &orders {
            if s < 1 {
                return Err(Error::InvalidGroup(format!("cyclic order {s} must be >= 1")));
            }
            let s = s as i128;
            period = (period / gcd(period, s))
                .checked_mul(s)
                .filter(|p| *p <= i64::MAX as i128)
                .ok_or_else(|| Error::InvalidGroup("orders are too large".into()))?;
        }
        Ok(Group { kind: GroupKind::Finite(orders), period })
    }

    pub fn cyclic(order: i64) -> Result<Self> {
        Group::finite(vec![order])
    }

    pub fn integer(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidGroup("integer rank must be >= 1".into()));
        }
        Ok(Group { kind: GroupKind::Integer(rank), period: 1 })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn rank(&self) -> usize {
        match &self.kind {
            GroupKind::Finite(o) => o.len(),
            GroupKind::Integer(d) => *d,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, GroupKind::Finite(_))
    }

    pub fn orders(&self) -> Option<&[i64]> {
        match &self.kind {
            GroupKind::Finite(o) => Some(o),
            GroupKind::Integer(_) => None,
        }
    }

    /// `|G|`, or `None` for `Z^d` (and for finite groups too large for `usize`).
    pub fn cardinality(&self) -> Option<usize> {
        self.orders()?
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s as usize))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Builds an element, reducing coordinates modulo the orders on finite groups.
    pub fn element(&self, coords: impl Into<Vec<i64>>) -> Result<GroupElement> {
        let coords = coords.into();
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: coords.len() });
        }
        Ok(self.reduce(coords))
    }

    pub(crate) fn reduce(&self, mut coords: Vec<i64>) -> GroupElement {
        if let GroupKind::Finite(orders) = &self.kind {
            for (c, &s) in coords.iter_mut().zip(orders) {
                *c = c.rem_euclid(s);
            }
        }
        GroupElement(coords)
    }

    pub fn contains(&self, n: &GroupElement) -> bool {
        if n.rank() != self.rank() {
            return false;
        }
        match &self.kind {
            GroupKind::Finite(orders) => n.0.iter().zip(orders).all(|(&c, &s)| (0..s).contains(&c)),
            GroupKind::Integer(_) => true,
        }
    }

    pub(crate) fn check(&self, n: &GroupElement) -> Result<()> {
        if n.rank() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: n.rank() });
        }
        if !self.contains(n) {
            return Err(Error::InvalidSignal(format!("element {:?} is not reduced", n.0)));
        }
        Ok(())
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.reduce(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.reduce(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.reduce(a.0.iter().map(|x| -x).collect())
    }

    /// Position of `n` in the colexicographic enumeration of a finite group.
    pub fn linear_index(&self, n: &GroupElement) -> Option<usize> {
        let orders = self.orders()?;
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (&c, &s) in n.0.iter().zip(orders) {
            idx += c as usize * stride;
            stride *= s as usize;
        }
        Some(idx)
    }

    /// Inverse of [`Group::linear_index`].
    pub fn element_at(&self, mut idx: usize) -> Option<GroupElement> {
        let orders = self.orders()?;
        let mut coords = Vec::with_capacity(orders.len());
        for &s in orders {
            coords.push((idx % s as usize) as i64);
            idx /= s as usize;
        }
        Some(GroupElement(coords))
    }

    /// All elements of a finite group in colexicographic order.
    pub fn elements(&self) -> Result<impl Iterator<Item = GroupElement> + '_> {
        let n = self
            .cardinality()
            .ok_or(Error::UnsupportedBackend("integer"))?;
        Ok((0..n).map(move |i| self.element_at(i).expect("finite group")))
    }

    /// Builds and validates a dual-group point.
    pub fn dual_point(&self, point: DualPoint) -> Result<DualPoint> {
        if point.rank() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: point.rank() });
        }
        match (&self.kind, point) {
            (GroupKind::Finite(orders), DualPoint::Discrete(xi)) => Ok(DualPoint::Discrete(
                xi.iter().zip(orders).map(|(x, s)| x.rem_euclid(*s)).collect(),
            )),
            (GroupKind::Integer(_), DualPoint::Torus(theta)) => Ok(DualPoint::Torus(
                theta.iter().map(|t| t.rem_euclid(1.0)).collect(),
            )),
            _ => Err(Error::GroupMismatch),
        }
    }

    /// Exact phase numerator of `<n, xi>` over the common denominator `period`,
    /// reduced into `[0, period)`.
    pub(crate) fn phase_numerator(&self, n: &[i64], xi: &[i64]) -> i128 {
        let orders = match &self.kind {
            GroupKind::Finite(o) => o,
            GroupKind::Integer(_) => unreachable!("phase numerator on integer group"),
        };
        let mut acc: i128 = 0;
        for ((&a, &b), &s) in n.iter().zip(xi).zip(orders) {
            let s = s as i128;
            let prod = (a as i128).rem_euclid(s) * (b as i128).rem_euclid(s) % s;
            acc = (acc + prod * (self.period / s)) % self.period;
        }
        acc
    }

    /// `<n, xi> == 1` decided in exact integer arithmetic.
    pub(crate) fn character_is_trivial(&self, n: &[i64], xi: &[i64]) -> bool {
        self.phase_numerator(n, xi) == 0
    }

    /// `<n, xi>` on a finite group, without rank checks.
    pub(crate) fn character_unchecked(&self, n: &[i64], xi: &[i64]) -> Complex64 {
        let num = self.phase_numerator(n, xi);
        if (4 * num) % self.period == 0 {
            return match 4 * num / self.period {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
        }
        Complex64::cis(TAU * num as f64 / self.period as f64)
    }

    /// The character pairing `<n, xi>`.
    pub fn character(&self, n: &GroupElement, xi: &DualPoint) -> Result<Complex64> {
        self.check(n)?;
        if xi.rank() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: xi.rank() });
        }
        match (&self.kind, xi) {
            (GroupKind::Finite(_), DualPoint::Discrete(x)) => Ok(self.character_unchecked(&n.0, x)),
            (GroupKind::Integer(_), DualPoint::Torus(theta)) => {
                let phase: f64 = n
                    .0
                    .iter()
                    .zip(theta)
                    .map(|(&k, &t)| (k as f64 * t).rem_euclid(1.0))
                    .sum();
                Ok(Complex64::cis(TAU * phase))
            }
            _ => Err(Error::GroupMismatch),
        }
    }
}

/// A complex-valued, finitely supported signal on a discrete abelian group.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    group: Group,
    samples: Samples,
}

#[derive(Debug, Clone, PartialEq)]
enum Samples {
    Dense(Vec<Complex64>),
    Sparse(BTreeMap<GroupElement, Complex64>),
}

fn stores_dense(group: &Group) -> bool {
    group.cardinality().is_some_and(|n| n <= DENSE_LIMIT)
}

impl Signal {
    pub fn zeros(group: &Group) -> Self {
        let samples = if stores_dense(group) {
            Samples::Dense(vec![ZERO; group.cardinality().unwrap()])
        } else {
            Samples::Sparse(BTreeMap::new())
        };
        Signal { group: group.clone(), samples }
    }

    /// Unit impulse at `n`.
    pub fn delta(group: &Group, n: &GroupElement) -> Result<Self> {
        Signal::from_samples(group, [(n.clone(), Complex64::new(1.0, 0.0))])
    }

    /// Dense signal on a finite group, values in colexicographic order.
    pub fn from_dense(group: &Group, values: Vec<Complex64>) -> Result<Self> {
        let n = group.cardinality().ok_or(Error::UnsupportedBackend("integer"))?;
        if values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: values.len() });
        }
        if stores_dense(group) {
            Ok(Signal { group: group.clone(), samples: Samples::Dense(values) })
        } else {
            let pairs = values
                .into_iter()
                .enumerate()
                .filter(|(_, v)| *v != ZERO)
                .map(|(i, v)| (group.element_at(i).unwrap(), v));
            Signal::from_samples(group, pairs)
        }
    }

    /// Builds a signal from `(element, value)` pairs. Elements are reduced on
    /// finite groups; a repeated element is an error.
    pub fn from_samples(
        group: &Group,
        samples: impl IntoIterator<Item = (GroupElement, Complex64)>,
    ) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (n, v) in samples {
            let n = group.element(n.into_coords())?;
            if seen.insert(n.clone(), v).is_some() {
                return Err(Error::InvalidSignal(format!("duplicate support entry {:?}", n.coords())));
            }
        }
        let mut out = Signal::zeros(group);
        for (n, v) in seen {
            out.set(&n, v);
        }
        Ok(out)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    fn set(&mut self, n: &GroupElement, v: Complex64) {
        match &mut self.samples {
            Samples::Dense(d) => d[self.group.linear_index(n).unwrap()] = v,
            Samples::Sparse(s) => {
                if v == ZERO {
                    s.remove(n);
                } else {
                    s.insert(n.clone(), v);
                }
            }
        }
    }

    fn accumulate(&mut self, n: &GroupElement, v: Complex64) {
        match &mut self.samples {
            Samples::Dense(d) => d[self.group.linear_index(n).unwrap()] += v,
            Samples::Sparse(s) => {
                let e = s.entry(n.clone()).or_insert(ZERO);
                *e += v;
                if *e == ZERO {
                    s.remove(n);
                }
            }
        }
    }

    /// Value at `n` (zero off the support). `n` must be a reduced element.
    pub fn get(&self, n: &GroupElement) -> Complex64 {
        match &self.samples {
            Samples::Dense(d) => self.group.linear_index(n).map_or(ZERO, |i| d[i]),
            Samples::Sparse(s) => s.get(n).copied().unwrap_or(ZERO),
        }
    }

    /// Nonzero samples, in colexicographic order on dense storage and in
    /// coordinate order on sparse storage.
    pub fn support(&self) -> Box<dyn Iterator<Item = (GroupElement, Complex64)> + '_> {
        match &self.samples {
            Samples::Dense(d) => Box::new(
                d.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != ZERO)
                    .map(|(i, v)| (self.group.element_at(i).unwrap(), *v)),
            ),
            Samples::Sparse(s) => Box::new(s.iter().map(|(n, v)| (n.clone(), *v))),
        }
    }

    /// Full array of values over a finite group in colexicographic order.
    pub fn to_dense(&self) -> Result<Vec<Complex64>> {
        match &self.samples {
            Samples::Dense(d) => Ok(d.clone()),
            Samples::Sparse(_) => {
                let n = self.group.cardinality().ok_or(Error::UnsupportedBackend("integer"))?;
                let mut out = vec![ZERO; n];
                for (e, v) in self.support() {
                    out[self.group.linear_index(&e).unwrap()] = v;
                }
                Ok(out)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support().next().is_none()
    }

    pub fn norm_l1(&self) -> f64 {
        self.support().map(|(_, v)| v.norm()).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.support().map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.support().map(|(_, v)| v.norm()).fold(0.0, f64::max)
    }

    /// `<self, other> = sum_n self(n) conj(other(n))`.
    pub fn inner(&self, other: &Signal) -> Result<Complex64> {
        self.same_group(other)?;
        Ok(self.support().map(|(n, v)| v * other.get(&n).conj()).sum())
    }

    fn same_group(&self, other: &Signal) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn scale(&self, c: Complex64) -> Signal {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Signal {
        let mut out = Signal::zeros(&self.group);
        for (n, v) in self.support() {
            out.set(&n, f(v));
        }
        out
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        self.same_group(other)?;
        let mut out = self.clone();
        for (n, v) in other.support() {
            out.accumulate(&n, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `||self - other||_2`.
    pub fn distance(&self, other: &Signal) -> Result<f64> {
        Ok(self.sub(other)?.norm_l2())
    }

    /// `(T_m x)(n) = x(n - m)`.
    pub fn translate(&self, m: &GroupElement) -> Result<Signal> {
        self.group.check(m)?;
        let mut out = Signal::zeros(&self.group);
        for (n, v) in self.support() {
            out.set(&self.group.add(&n, m), v);
        }
        Ok(out)
    }

    /// `x~(n) = conj(x(-n))`.
    pub fn involution(&self) -> Signal {
        let mut out = Signal::zeros(&self.group);
        for (n, v) in self.support() {
            out.set(&self.group.neg(&n), v.conj());
        }
        out
    }

    /// `(x * y)(m) = sum_n x(n) y(m - n)`, wrapping on finite groups.
    pub fn convolve(&self, other: &Signal) -> Result<Signal> {
        self.same_group(other)?;
        let rhs: Vec<_> = other.support().collect();
        let mut out = Signal::zeros(&self.group);
        for (a, xa) in self.support() {
            for (b, yb) in &rhs {
                out.accumulate(&self.group.add(&a, b), xa * yb);
            }
        }
        Ok(out)
    }

    /// Fourier transform `X(xi) = sum_n x(n) conj(<n, xi>)` over a finite group,
    /// indexed like the group (colexicographic in `xi`).
    pub fn fourier(&self) -> Result<Vec<Complex64>> {
        let orders = self.group.orders().ok_or(Error::UnsupportedBackend("integer"))?.to_vec();
        let mut data = self.to_dense()?;
        separable_dft(&mut data, &orders, -1.0);
        Ok(data)
    }

    /// Inverse of [`Signal::fourier`]: `x(n) = (1/|G|) sum_xi X(xi) <n, xi>`.
    pub fn inverse_fourier(group: &Group, spectrum: &[Complex64]) -> Result<Signal> {
        let orders = group.orders().ok_or(Error::UnsupportedBackend("integer"))?.to_vec();
        let n = group.cardinality().unwrap();
        if spectrum.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: spectrum.len() });
        }
        let mut data = spectrum.to_vec();
        separable_dft(&mut data, &orders, 1.0);
        let scale = 1.0 / n as f64;
        data.iter_mut().for_each(|v| *v *= scale);
        Signal::from_dense(group, data)
    }
}

/// In-place multidimensional DFT computed axis by axis, `sign = -1` forward.
fn separable_dft(data: &mut [Complex64], orders: &[i64], sign: f64) {
    let mut stride = 1usize;
    let mut line = Vec::new();
    for &s in orders {
        let s = s as usize;
        let twiddle: Vec<Complex64> =
            (0..s).map(|k| Complex64::cis(sign * TAU * k as f64 / s as f64)).collect();
        let block = stride * s;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                line.clear();
                line.extend((0..s).map(|j| data[base + j * stride]));
                for k in 0..s {
                    let mut acc = ZERO;
                    for (j, v) in line.iter().enumerate() {
                        acc += v * twiddle[(j * k) % s];
                    }
                    data[base + k * stride] = acc;
                }
            }
        }
        stride = block;
    }
}
