//! Alias-component (modulation) description of a filter bank on a finite group.
//!
//! With `M^perp = {eta_0 = 0, ..., eta_{L-1}}` in the lattice's annihilator
//! order, the modulation matrix is `H_mod(xi) = [H_k(xi + eta_j)]` (`K x L`),
//! where `H_k` is the Fourier transform of `h_k` on all of `G`. It relates to
//! the polyphase matrix through
//!
//! ```text
//! H_mod(xi) = H(xi + M^perp) D(xi) W,     D(xi) = diag(<l_i, xi>),  W = [<l_i, eta_j>]
//! ```
//!
//! and `W W* = L I`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{DualPoint, Group, Signal};
use crate::lattice::Lattice;
use crate::polyphase::{analysis_matrix, FilterBank};

/// Agreement required between the two sides of the alias identities.
const IDENTITY_TOL: f64 = 1e-10;

/// Modulation matrices of a bank at every character of `G`.
#[derive(Debug, Clone)]
pub struct ModulationData {
    lattice: Lattice,
    /// Indexed by the linear (colexicographic) index of `xi`.
    h_mod: Vec<DMatrix<Complex64>>,
    w: DMatrix<Complex64>,
}

impl ModulationData {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// `H_mod(xi)`.
    pub fn at(&self, xi: &[i64]) -> Result<&DMatrix<Complex64>> {
        Ok(&self.h_mod[xi_index(self.lattice.group(), xi)?])
    }

    /// All `H_mod(xi)`, in colexicographic order of `xi`.
    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.h_mod
    }

    /// `W = [<l_i, eta_j>]`.
    pub fn w(&self) -> &DMatrix<Complex64> {
        &self.w
    }

    /// `D(xi) = diag(<l_i, xi>)`.
    pub fn d(&self, xi: &[i64]) -> Result<DMatrix<Complex64>> {
        let group = self.lattice.group();
        xi_index(group, xi)?;
        let diag: Vec<Complex64> = self
            .lattice
            .transversal()
            .iter()
            .map(|l| group.character_unchecked(l.coords(), xi))
            .collect();
        Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }

    /// `x_mod(xi) = [X(xi + eta_j)]`.
    pub fn x_mod(&self, x: &Signal, xi: &[i64]) -> Result<Vec<Complex64>> {
        if x.group() != self.lattice.group() {
            return Err(Error::GroupMismatch);
        }
        alias_points(&self.lattice, xi)?
            .iter()
            .map(|p| Ok(fourier_at(x, p)))
            .collect()
    }

    /// `(1/L) H_mod(xi) x_mod(xi)`: the subband spectra `C_k(xi + M^perp)`.
    pub fn subband_spectra(&self, x: &Signal, xi: &[i64]) -> Result<Vec<Complex64>> {
        let v = nalgebra::DVector::from_vec(self.x_mod(x, xi)?);
        let l = self.lattice.index() as f64;
        Ok((self.at(xi)? * v).iter().map(|c| c / l).collect())
    }
}

fn xi_index(group: &Group, xi: &[i64]) -> Result<usize> {
    let e = group.element(xi.to_vec())?;
    group.linear_index(&e).ok_or(Error::UnsupportedBackend("integer"))
}

/// `xi + eta_j` for every annihilator element, reduced.
fn alias_points(lattice: &Lattice, xi: &[i64]) -> Result<Vec<Vec<i64>>> {
    let group = lattice.group();
    let orders = group.orders().ok_or(Error::UnsupportedBackend("integer"))?;
    if xi.len() != orders.len() {
        return Err(Error::DimensionMismatch { expected: orders.len(), found: xi.len() });
    }
    Ok(lattice
        .annihilator_coords()
        .iter()
        .map(|eta| {
            eta.iter()
                .zip(xi)
                .zip(orders)
                .map(|((e, x), s)| (e + x).rem_euclid(*s))
                .collect()
        })
        .collect())
}

/// `X(xi) = sum_n x(n) conj(<n, xi>)` by direct summation over the support.
fn fourier_at(x: &Signal, xi: &[i64]) -> Complex64 {
    let g = x.group();
    x.support().map(|(n, v)| v * g.character_unchecked(n.coords(), xi).conj()).sum()
}

fn finite_xi(lattice: &Lattice, xi: &DualPoint) -> Result<Vec<i64>> {
    if !lattice.is_finite() {
        return Err(Error::UnsupportedBackend("integer"));
    }
    match lattice.group().dual_point(xi.clone())? {
        DualPoint::Discrete(v) => Ok(v),
        DualPoint::Torus(_) => Err(Error::GroupMismatch),
    }
}

/// Both sides of the decimation identity at `xi`: the `M`-Fourier transform
/// of `down_M x`, and the alias average `(1/L) sum_eta X(xi + eta)`.
pub fn decimation_sides(x: &Signal, lattice: &Lattice, xi: &DualPoint) -> Result<(Complex64, Complex64)> {
    if x.group() != lattice.group() {
        return Err(Error::GroupMismatch);
    }
    let xi = finite_xi(lattice, xi)?;
    let g = lattice.group();
    let direct: Complex64 = x
        .support()
        .filter(|(n, _)| lattice.contains(n))
        .map(|(n, v)| v * g.character_unchecked(n.coords(), &xi).conj())
        .sum();
    let alias: Complex64 = alias_points(lattice, &xi)?.iter().map(|p| fourier_at(x, p)).sum();
    Ok((direct, alias / lattice.index() as f64))
}

/// `M`-Fourier transform of `down_M x` at `xi`, after checking it against the
/// alias average.
pub fn decimation_spectrum(x: &Signal, lattice: &Lattice, xi: &DualPoint) -> Result<Complex64> {
    let (direct, alias) = decimation_sides(x, lattice, xi)?;
    let residual = (direct - alias).norm();
    if residual > IDENTITY_TOL * x.norm_l1().max(1.0) {
        return Err(Error::IdentityViolation { what: "decimation alias identity", residual });
    }
    Ok(direct)
}

/// Builds `H_mod(xi)` for every character `xi` of `G`, and `W`.
pub fn modulation_matrix(bank: &FilterBank) -> Result<ModulationData> {
    let lattice = bank.lattice();
    let group = lattice.group();
    if !lattice.is_finite() {
        return Err(Error::UnsupportedBackend("integer"));
    }
    let spectra = bank
        .analysis()
        .iter()
        .map(Signal::fourier)
        .collect::<Result<Vec<_>>>()?;
    let (k, l) = (bank.channels(), lattice.index());
    let mut h_mod = Vec::with_capacity(group.cardinality().unwrap());
    for xi in group.elements()? {
        let idx: Vec<usize> = alias_points(lattice, xi.coords())?
            .into_iter()
            .map(|p| xi_index(group, &p))
            .collect::<Result<_>>()?;
        h_mod.push(DMatrix::from_fn(k, l, |r, c| spectra[r][idx[c]]));
    }
    let eta = lattice.annihilator_coords();
    let w = DMatrix::from_fn(l, l, |i, j| group.character_unchecked(lattice.transversal()[i].coords(), &eta[j]));
    Ok(ModulationData { lattice: lattice.clone(), h_mod, w })
}

/// Largest entrywise residual of `H_mod = H D W` and of
/// `H = (1/L) H_mod W* conj(D)` over all characters of `G`.
pub fn check_mod_polyphase_relation(bank: &FilterBank) -> Result<f64> {
    let data = modulation_matrix(bank)?;
    let h = analysis_matrix(bank)?;
    let mats = h.sampled().expect("finite backend");
    let lattice = bank.lattice();
    let l = lattice.index() as f64;
    let w_adj = data.w.adjoint();
    let mut worst: f64 = 0.0;
    for (xi, hm) in lattice.group().elements()?.zip(&data.h_mod) {
        let (r, _) = lattice.dual_class(xi.coords())?;
        let d = data.d(xi.coords())?;
        let forward = &mats[r] * &d * &data.w;
        let back = hm * &w_adj * d.map(|c| c.conj()) / Complex64::new(l, 0.0);
        let a = (forward - hm).iter().map(|c| c.norm()).fold(0.0, f64::max);
        let b = (back - &mats[r]).iter().map(|c| c.norm()).fold(0.0, f64::max);
        worst = worst.max(a).max(b);
    }
    Ok(worst)
}

/// `Y(xi) = (1/L) [G_1(xi) .. G_K(xi)] H_mod(xi) x_mod(xi)`: the Fourier
/// transform of the bank output predicted from the modulation domain.
pub fn output_spectrum(data: &ModulationData, bank: &FilterBank, x: &Signal, xi: &[i64]) -> Result<Complex64> {
    let synth = bank.synthesis().ok_or(Error::MissingSynthesis)?;
    let c = data.subband_spectra(x, xi)?;
    Ok(synth.iter().zip(c).map(|(g, ck)| fourier_at(g, xi) * ck).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyphase::{apply_filter_bank, predicted_subbands};

    fn z4() -> (Group, Lattice) {
        let g = Group::cyclic(4).unwrap();
        let m = Lattice::from_generators(&g, &[g.element([2]).unwrap()]).unwrap();
        (g, m)
    }

    fn delta(g: &Group, n: &[i64]) -> Signal {
        Signal::delta(g, &g.element(n.to_vec()).unwrap()).unwrap()
    }

    fn wave(g: &Group) -> Signal {
        let n = g.cardinality().unwrap();
        let v = (0..n).map(|i| Complex64::new((i as f64 * 1.3).sin(), (i as f64 * 0.4).cos())).collect();
        Signal::from_dense(g, v).unwrap()
    }

    fn haar(g: &Group) -> Vec<Signal> {
        let r = Complex64::new(0.5f64.sqrt(), 0.0);
        let (a, b) = (delta(g, &[0]), delta(g, &[3]));
        vec![a.add(&b).unwrap().scale(r), a.sub(&b).unwrap().scale(r)]
    }

    #[test]
    fn decimation_examples() {
        let (g, m) = z4();
        for xi in 0..4 {
            let p = DualPoint::Discrete(vec![xi]);
            let v = decimation_spectrum(&delta(&g, &[0]), &m, &p).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            let (a, b) = decimation_sides(&delta(&g, &[1]), &m, &p).unwrap();
            assert!(a.norm() < 1e-15 && b.norm() < 1e-15);
        }
        let z6 = Group::cyclic(6).unwrap();
        let m3 = Lattice::from_generators(&z6, &[z6.element([3]).unwrap()]).unwrap();
        let x = wave(&z6);
        for xi in 0..6 {
            let (a, b) = decimation_sides(&x, &m3, &DualPoint::Discrete(vec![xi])).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn lazy_modulation_matrix() {
        let (g, m) = z4();
        let bank = FilterBank::new(m, vec![delta(&g, &[0]), delta(&g, &[3])], None).unwrap();
        let data = modulation_matrix(&bank).unwrap();
        for xi in 0..4i64 {
            let w4 = Complex64::cis(std::f64::consts::TAU * xi as f64 / 4.0);
            let expected = DMatrix::from_row_slice(2, 2, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), w4, -w4]);
            assert!((data.at(&[xi]).unwrap() - expected).norm() < 1e-14);
        }
        let ww = data.w() * data.w().adjoint();
        assert!((ww - DMatrix::<Complex64>::identity(2, 2) * Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert!(check_mod_polyphase_relation(&bank).unwrap() < 1e-12);
    }

    #[test]
    fn single_delta_filter() {
        let g = Group::finite([4, 4]).unwrap();
        let m = Lattice::from_generators(&g, &[g.element([2, 0]).unwrap(), g.element([0, 2]).unwrap()]).unwrap();
        let bank = FilterBank::new(m, vec![delta(&g, &[0, 0])], None).unwrap();
        let data = modulation_matrix(&bank).unwrap();
        assert!(data.matrices().iter().all(|h| h.iter().all(|v| *v == Complex64::new(1.0, 0.0))));
        assert_eq!(check_mod_polyphase_relation(&bank).unwrap(), 0.0);

        // sixth roots of unity do not sum to zero exactly in floating point
        let g = Group::finite([4, 6]).unwrap();
        let m = Lattice::from_generators(&g, &[g.element([2, 0]).unwrap(), g.element([0, 3]).unwrap()]).unwrap();
        let bank = FilterBank::new(m, vec![delta(&g, &[0, 0])], None).unwrap();
        assert!(check_mod_polyphase_relation(&bank).unwrap() < 1e-15);
    }

    #[test]
    fn haar_output_and_subbands() {
        let (g, m) = z4();
        let h = haar(&g);
        let gs: Vec<Signal> = h.iter().map(Signal::involution).collect();
        let bank = FilterBank::new(m.clone(), h, Some(gs)).unwrap();
        assert!(check_mod_polyphase_relation(&bank).unwrap() < 1e-12);
        let data = modulation_matrix(&bank).unwrap();
        let x = wave(&g);
        let y = apply_filter_bank(&x, &bank).unwrap().output.unwrap();
        let yf = y.fourier().unwrap();
        let c = predicted_subbands(&x, &bank).unwrap();
        for xi in 0..4 {
            assert!((output_spectrum(&data, &bank, &x, &[xi]).unwrap() - yf[xi as usize]).norm() < 1e-10);
            let (r, _) = m.dual_class(&[xi]).unwrap();
            for (k, v) in data.subband_spectra(&x, &[xi]).unwrap().iter().enumerate() {
                assert!((v - c.sampled().unwrap()[k][r]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn integer_backend_rejected() {
        let z = Group::integer(1).unwrap();
        let lat = Lattice::from_matrix(crate::intmat::IntMatrix::diagonal(&[2])).unwrap();
        let bank = FilterBank::new(lat.clone(), vec![delta(&z, &[0])], None).unwrap();
        assert!(matches!(modulation_matrix(&bank), Err(Error::UnsupportedBackend(_))));
        assert!(decimation_spectrum(&delta(&z, &[0]), &lat, &DualPoint::Torus(vec![0.1])).is_err());
    }
}
