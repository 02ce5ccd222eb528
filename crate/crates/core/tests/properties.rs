mod common;

use abelbank::{
    analysis_matrix, apply_filter_bank, canonical_dual, check_mod_polyphase_relation, check_perfect_reconstruction,
    decimation_sides, fourier_from_polyphase, frame_bounds, modulation_matrix, polyphase_forward, polyphase_inverse,
    predicted_output, predicted_subbands, BoundOptions, DualPoint, FilterBank, Group, IntMatrix, LaurentMatrix,
    LaurentPoly, Lattice, Signal,
};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn setting() -> impl Strategy<Value = u64> {
    any::<u64>()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn random_bank(seed: u64, k_extra: usize) -> FilterBank {
    let mut r = rng(seed);
    let (g, gens) = random_setting(&mut r);
    let lat = lattice(&g, &gens);
    let k = lat.index() + k_extra;
    let filters = (0..k).map(|_| random_fir(&g, &mut r, 5)).collect();
    FilterBank::new(lat, filters, None).unwrap()
}

fn small_poly(seed: u64, dim: usize) -> LaurentPoly {
    let mut r = rng(seed);
    let terms = (0..r.gen_range(0..5))
        .map(|_| ((0..dim).map(|_| r.gen_range(-2..=2)).collect(), random_complex(&mut r)))
        .collect::<Vec<_>>();
    LaurentPoly::from_terms(dim, terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn character_is_bihomomorphism(a in 0i64..12, b in 0i64..12, p in 0i64..12, q in 0i64..12, x in 0i64..12, y in 0i64..12) {
        let g = Group::finite([12, 8]).unwrap();
        let n = el(&g, &[a, b]);
        let m = el(&g, &[p, q]);
        let xi = DualPoint::Discrete(vec![x, y % 8]);
        let eta = DualPoint::Discrete(vec![p, q % 8]);
        let lhs = g.character(&g.add(&n, &m), &xi).unwrap();
        let rhs = g.character(&n, &xi).unwrap() * g.character(&m, &xi).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        let sum = DualPoint::Discrete(vec![x + p, (y + q) % 8]);
        let lhs = g.character(&n, &sum).unwrap();
        let rhs = g.character(&n, &xi).unwrap() * g.character(&n, &eta).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        let oracle = character(&[12, 8], n.coords(), &[x, y % 8]);
        prop_assert!((g.character(&n, &xi).unwrap() - oracle).norm() < 1e-12);
    }

    #[test]
    fn convolution_laws(seed in setting()) {
        let mut r = rng(seed);
        let g = Group::finite([6, 4]).unwrap();
        let (x, y, z) = (random_fir(&g, &mut r, 5), random_fir(&g, &mut r, 5), random_fir(&g, &mut r, 5));
        prop_assert!(x.convolve(&y).unwrap().distance(&y.convolve(&x).unwrap()).unwrap() < 1e-12);
        let l = x.convolve(&y).unwrap().convolve(&z).unwrap();
        let rr = x.convolve(&y.convolve(&z).unwrap()).unwrap();
        prop_assert!(l.distance(&rr).unwrap() < 1e-12);
        prop_assert_eq!(x.convolve(&delta(&g, &[0, 0])).unwrap(), x.clone());
        prop_assert!(x.convolve(&y).unwrap().norm_l2() <= x.norm_l2() * y.norm_l1() + 1e-12);
    }

    #[test]
    fn integer_convolution_laws(seed in setting()) {
        let mut r = rng(seed);
        let z2 = Group::integer(2).unwrap();
        let mk = |r: &mut rand_chacha::ChaCha8Rng| {
            let pts: std::collections::BTreeSet<Vec<i64>> =
                (0..4).map(|_| vec![r.gen_range(-3..=3), r.gen_range(-3..=3)]).collect();
            Signal::from_samples(&z2, pts.into_iter().map(|p| (el(&z2, &p), Complex64::new(r.gen_range(-4..=4) as f64, 0.0)))).unwrap()
        };
        let (x, y, z) = (mk(&mut r), mk(&mut r), mk(&mut r));
        // small integer samples keep every product exact
        prop_assert_eq!(x.convolve(&y).unwrap(), y.convolve(&x).unwrap());
        prop_assert_eq!(
            x.convolve(&y).unwrap().convolve(&z).unwrap(),
            x.convolve(&y.convolve(&z).unwrap()).unwrap()
        );
        prop_assert_eq!(x.convolve(&delta(&z2, &[0, 0])).unwrap(), x);
    }

    #[test]
    fn fourier_round_trip_and_oracle(seed in setting()) {
        let mut r = rng(seed);
        let g = Group::finite([r.gen_range(1..9), r.gen_range(1..9)]).unwrap();
        let x = random_signal(&g, &mut r);
        let f = x.fourier().unwrap();
        prop_assert!(relative_error(&f, &dft(&x)) < 1e-12);
        let back = Signal::inverse_fourier(&g, &f).unwrap();
        prop_assert!(back.distance(&x).unwrap() < 1e-12 * x.norm_l2());
        let n = g.cardinality().unwrap() as f64;
        let energy: f64 = f.iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
        prop_assert!((energy - x.norm_l2().powi(2)).abs() < 1e-10 * energy.max(1.0));
    }

    #[test]
    fn lattice_partition_and_annihilator(seed in setting()) {
        let mut r = rng(seed);
        let (g, gens) = random_setting(&mut r);
        let lat = lattice(&g, &gens);
        let orders = g.orders().unwrap().to_vec();
        let members = subgroup(&orders, &gens);
        prop_assert_eq!(lat.index() * members.len(), g.cardinality().unwrap());
        let mut seen = std::collections::BTreeSet::new();
        for l in lat.transversal() {
            for m in &members {
                prop_assert!(seen.insert(add(&orders, l.coords(), m)));
            }
        }
        let ann = annihilator(&orders, &members);
        prop_assert_eq!(ann.len(), lat.index());
        let lib_ann: Vec<Vec<i64>> = lat.annihilator().unwrap().into_iter().map(|p| match p {
            DualPoint::Discrete(v) => v,
            DualPoint::Torus(_) => unreachable!(),
        }).collect();
        prop_assert_eq!(&lib_ann, &ann);
        for n in elements(&orders) {
            let s: Complex64 = ann.iter().map(|eta| character(&orders, &n, eta)).sum();
            let expected = if members.contains(&n) { lat.index() as f64 } else { 0.0 };
            prop_assert!((s - c(expected)).norm() < 1e-9);
            prop_assert_eq!(lat.contains(&el(&g, &n)), members.contains(&n));
        }
    }

    #[test]
    fn integer_membership_matches_hnf(rows in proptest::collection::vec(-4i64..=4, 4), pts in proptest::collection::vec((-30i64..30, -30i64..30), 40)) {
        let m = IntMatrix::from_rows(vec![rows[..2].to_vec(), rows[2..].to_vec()]).unwrap();
        prop_assume!(m.det() > 0);
        let lat = Lattice::from_matrix(m).unwrap();
        for (a, b) in pts {
            let n = el(lat.group(), &[a, b]);
            let digits = lat.hnf_digits(&[a, b]).unwrap();
            prop_assert_eq!(lat.contains(&n), digits.iter().all(|&d| d == 0));
            let (i, rest) = lat.split(&n).unwrap();
            prop_assert!(lat.contains(&rest));
            prop_assert_eq!(lat.group().add(&lat.transversal()[i], &rest), n);
        }
    }

    #[test]
    fn laurent_ring_axioms(s1 in setting(), s2 in setting(), s3 in setting(), t in proptest::collection::vec(0.0f64..1.0, 2)) {
        let (a, b, cc) = (small_poly(s1, 2), small_poly(s2, 2), small_poly(s3, 2));
        let close = |p: &LaurentPoly, q: &LaurentPoly| p.sub(q).unwrap().max_coefficient() < 1e-12;
        prop_assert!(close(&a.mul(&b).unwrap().mul(&cc).unwrap(), &a.mul(&b.mul(&cc).unwrap()).unwrap()));
        prop_assert!(close(&a.mul(&b.add(&cc).unwrap()).unwrap(), &a.mul(&b).unwrap().add(&a.mul(&cc).unwrap()).unwrap()));
        let ev = |p: &LaurentPoly| p.eval(&t).unwrap();
        prop_assert!((ev(&a.mul(&b).unwrap()) - ev(&a) * ev(&b)).norm() < 1e-10);
        prop_assert!((ev(&a.add(&b).unwrap()) - ev(&a) - ev(&b)).norm() < 1e-10);
        prop_assert!((ev(&a.adjoint()) - ev(&a).conj()).norm() < 1e-10);
        let m = LaurentMatrix::from_entries(2, 2, vec![a.clone(), b.clone(), cc.clone(), a.mul(&b).unwrap()]).unwrap();
        prop_assert!((m.adjoint().eval(&t).unwrap() - m.eval(&t).unwrap().adjoint()).norm() < 1e-10);
        let det = m.det().unwrap().eval(&t).unwrap();
        prop_assert!((det - m.eval(&t).unwrap().determinant()).norm() < 1e-9);
    }

    #[test]
    fn polyphase_unitarity_and_round_trip(seed in setting()) {
        let mut r = rng(seed);
        let (g, gens) = random_setting(&mut r);
        let lat = lattice(&g, &gens);
        let (x, y) = (random_signal(&g, &mut r), random_signal(&g, &mut r));
        let (px, py) = (polyphase_forward(&x, &lat).unwrap(), polyphase_forward(&y, &lat).unwrap());
        prop_assert!((px.inner(&py).unwrap() - x.inner(&y).unwrap()).norm() < 1e-11 * x.norm_l2() * y.norm_l2());
        prop_assert!(polyphase_inverse(&px).unwrap().distance(&x).unwrap() < 1e-12 * x.norm_l2());
        let f = x.fourier().unwrap();
        for (i, xi) in elements(g.orders().unwrap()).into_iter().enumerate() {
            let v = fourier_from_polyphase(&px, &DualPoint::Discrete(xi)).unwrap();
            prop_assert!((v - f[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn subbands_and_output_match_time_domain(seed in setting()) {
        let bank = random_bank(seed, 1);
        let mut r = rng(seed ^ 0x5eed);
        let g = bank.group().clone();
        let x = random_signal(&g, &mut r);
        let out = apply_filter_bank(&x, &bank).unwrap();
        let c = predicted_subbands(&x, &bank).unwrap();
        for (k, sub) in out.subbands.iter().enumerate() {
            let direct = polyphase_forward(sub, bank.lattice()).unwrap();
            prop_assert!(max_diff(&direct.sampled().unwrap()[0], &c.sampled().unwrap()[k]) < 1e-10);
        }
        let synth = (0..bank.channels()).map(|_| random_fir(&g, &mut r, 4)).collect();
        let full = bank.with_synthesis(synth).unwrap();
        let y = apply_filter_bank(&x, &full).unwrap().output.unwrap();
        let py = polyphase_forward(&y, full.lattice()).unwrap();
        let pred = predicted_output(&x, &full).unwrap();
        for (a, b) in py.sampled().unwrap().iter().zip(pred.sampled().unwrap()) {
            prop_assert!(max_diff(a, b) < 1e-10);
        }
    }

    #[test]
    fn pr_verdict_is_bidirectional(seed in setting(), perturb in any::<bool>()) {
        let bank = random_bank(seed, 0);
        prop_assume!(frame_bounds(&bank, &BoundOptions::default()).unwrap().is_frame);
        let mut dual = canonical_dual(&bank).unwrap();
        let mut r = rng(seed.wrapping_add(1));
        if perturb {
            let mut s = dual.synthesis().unwrap().to_vec();
            s[0] = s[0].add(&random_fir(bank.group(), &mut r, 1).scale(c(0.5))).unwrap();
            dual = dual.with_synthesis(s).unwrap();
        }
        let rep = check_perfect_reconstruction(&dual, 1e-9).unwrap();
        if rep.holds {
            for _ in 0..10 {
                let x = random_signal(bank.group(), &mut r);
                let y = apply_filter_bank(&x, &dual).unwrap().output.unwrap();
                prop_assert!(y.distance(&x).unwrap() < 1e-9 * x.norm_l2());
            }
        } else {
            prop_assert!(perturb);
            // a delta at the perturbed coset exposes the defect
            let worst = bank.group().elements().unwrap().map(|n| {
                let x = Signal::delta(bank.group(), &n).unwrap();
                apply_filter_bank(&x, &dual).unwrap().output.unwrap().distance(&x).unwrap()
            }).fold(0.0, f64::max);
            prop_assert!(worst > 1e-9);
        }
    }

    #[test]
    fn frame_inequality_and_scaling(seed in setting(), scale in 0.1f64..5.0) {
        let bank = random_bank(seed, 1);
        let opts = BoundOptions::default();
        let rep = frame_bounds(&bank, &opts).unwrap();
        let mut r = rng(seed ^ 0xf00d);
        for _ in 0..10 {
            let x = random_signal(bank.group(), &mut r);
            let energy: f64 = apply_filter_bank(&x, &bank).unwrap().subbands.iter().map(|s| s.norm_l2().powi(2)).sum();
            let n2 = x.norm_l2().powi(2);
            prop_assert!(energy <= rep.upper_bound * n2 * (1.0 + 1e-10));
            prop_assert!(energy >= rep.lower_bound * n2 * (1.0 - 1e-10));
        }
        let scaled = frame_bounds(&bank.scale_analysis(c(scale)), &opts).unwrap();
        let s2 = scale * scale;
        prop_assert!((scaled.upper_bound - s2 * rep.upper_bound).abs() <= 1e-10 * s2 * rep.upper_bound);
        prop_assert!((scaled.lower_bound - s2 * rep.lower_bound).abs() <= 1e-10 * s2 * rep.upper_bound);
        prop_assert_eq!((scaled.is_frame, scaled.is_tight, scaled.is_riesz), (rep.is_frame, rep.is_tight, rep.is_riesz));
    }

    #[test]
    fn modulation_laws(seed in setting()) {
        let bank = random_bank(seed, 1);
        let mut r = rng(seed ^ 0xabc);
        let lat = bank.lattice();
        let g = bank.group();
        prop_assert!(check_mod_polyphase_relation(&bank).unwrap() < 1e-10);
        let data = modulation_matrix(&bank).unwrap();
        let l = lat.index();
        let ww = data.w() * data.w().adjoint();
        prop_assert!((ww - nalgebra::DMatrix::<Complex64>::identity(l, l) * c(l as f64)).norm() < 1e-10);
        let x = random_signal(g, &mut r);
        let orders = g.orders().unwrap().to_vec();
        let down = lat.downsample(&x).unwrap();
        let spectrum = down.fourier().unwrap();
        let ann: Vec<Vec<i64>> = lat.annihilator().unwrap().into_iter().map(|p| match p {
            DualPoint::Discrete(v) => v,
            DualPoint::Torus(_) => unreachable!(),
        }).collect();
        for (i, xi) in elements(&orders).into_iter().enumerate() {
            let (a, b) = decimation_sides(&x, lat, &DualPoint::Discrete(xi.clone())).unwrap();
            prop_assert!((a - b).norm() < 1e-10);
            // the expander output spectrum is M^perp-periodic
            for eta in &ann {
                let j = elements(&orders).iter().position(|p| *p == add(&orders, &xi, eta)).unwrap();
                prop_assert!((spectrum[i] - spectrum[j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn integer_matrix_matches_embedding(seed in setting()) {
        let mut r = rng(seed);
        let z = Group::integer(1).unwrap();
        let k = 2;
        let filters: Vec<Signal> = (0..k).map(|_| {
            let pts: std::collections::BTreeSet<i64> = (0..5).map(|_| r.gen_range(-6..=6)).collect();
            Signal::from_samples(&z, pts.into_iter().map(|p| (el(&z, &[p]), random_complex(&mut r)))).unwrap()
        }).collect();
        let bank = FilterBank::new(Lattice::from_matrix(IntMatrix::diagonal(&[2])).unwrap(), filters.clone(), None).unwrap();
        let s = 64i64;
        let g = Group::cyclic(s).unwrap();
        let embedded = filters.iter().map(|f| Signal::from_samples(&g, f.support().map(|(p, v)| (el(&g, p.coords()), v))).unwrap()).collect();
        let fb = FilterBank::new(lattice(&g, &[vec![2]]), embedded, None).unwrap();
        let e = analysis_matrix(&bank).unwrap();
        let h = analysis_matrix(&fb).unwrap();
        for (xi, hm) in fb.lattice().dual_representatives().iter().zip(h.sampled().unwrap()) {
            let em = e.at(&DualPoint::Torus(vec![2.0 * xi[0] as f64 / s as f64])).unwrap();
            prop_assert!((em - hm).norm() < 1e-8);
        }
    }
}
