use hybrid_dealias::dft::{DftProvider, Engine};
use hybrid_dealias::oracle::{padded_dft_slice, random_input, relative_error};
use hybrid_dealias::pfft::{
    CenteredPfft, CenteredSeq, ComplexKernel, ComplexPfft, HermitianPfft, HermitianSeq, PaddedTransform,
};
use hybrid_dealias::plan::{derive_params, Placement, PlanParams, Symmetry};
use hybrid_dealias::{Complex64, Error};
use proptest::prelude::*;

fn params(len: usize, min_padded: usize, m: usize, symmetry: Symmetry) -> Option<PlanParams> {
    let p = derive_params(len, min_padded, m, symmetry).ok()?;
    p.validate().ok().map(|_| p)
}

fn hermitian_input(seed: u64, len: usize) -> Vec<Complex64> {
    let mut f = random_input(seed, len.div_ceil(2));
    f[0].im = 0.0;
    f
}

fn input_for(p: &PlanParams, seed: u64) -> Vec<Complex64> {
    match p.symmetry {
        Symmetry::Hermitian => hermitian_input(seed, p.len),
        _ => random_input(seed, p.len),
    }
}

fn blocks_of<K: PaddedTransform>(k: &K, f: &[Complex64]) -> Vec<Vec<Complex64>>
where
    K::Spectral: Into<Complex64>,
{
    (0..k.residue_count())
        .map(|r| k.forward_block(f, r).unwrap().data.into_iter().map(Into::into).collect())
        .collect()
}

fn check_slicing(p: PlanParams, seed: u64) {
    let f = input_for(&p, seed);
    let blocks = match p.symmetry {
        Symmetry::Hermitian => blocks_of(&HermitianPfft::new(p, &mut DftProvider::default()).unwrap(), &f),
        _ => blocks_of(&ComplexKernel::new(p, &mut DftProvider::default()).unwrap(), &f),
    };
    for (r, block) in blocks.iter().enumerate() {
        let expected = padded_dft_slice(&f, &p, r).unwrap();
        let err = relative_error(block, &expected);
        assert!(err < 1e-12, "{p:?} residue {r}: {err:e}");
    }
}

fn roundtrip_error(p: PlanParams, seed: u64) -> f64 {
    let f = input_for(&p, seed);
    let qm = p.padded_len() as f64;
    let mut acc = vec![Complex64::default(); f.len()];
    let mut add = |part: Vec<Complex64>| acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
    match p.symmetry {
        Symmetry::Hermitian => {
            let k = HermitianPfft::new(p, &mut DftProvider::default()).unwrap();
            for r in 0..p.n {
                add(k.backward_block(&k.forward_block(&f, r).unwrap()).unwrap());
            }
        }
        _ => {
            let k = ComplexKernel::new(p, &mut DftProvider::default()).unwrap();
            for r in 0..p.n {
                add(k.backward_block(&k.forward_block(&f, r).unwrap()).unwrap());
            }
        }
    }
    let scaled: Vec<Complex64> = f.iter().map(|x| x * qm).collect();
    relative_error(&acc, &scaled)
}

#[test]
fn complex_slicing_covers_all_regimes() {
    let mut regimes = [false; 3];
    for len in 1..=12 {
        for min_padded in [2 * len - 1, 2 * len, 3 * len] {
            for m in 1..=min_padded {
                if let Some(p) = params(len, min_padded, m, Symmetry::Complex) {
                    regimes[p.p.min(3) - 1] = true;
                    check_slicing(p, (len * 100 + m) as u64);
                }
            }
        }
    }
    assert_eq!(regimes, [true; 3]);
}

#[test]
fn centered_and_hermitian_slicing() {
    for symmetry in [Symmetry::Centered, Symmetry::Hermitian] {
        for len in 1..=16 {
            for min_padded in len..=3 * len {
                for m in 1..=min_padded {
                    if let Some(p) = params(len, min_padded, m, symmetry) {
                        check_slicing(p, (len * 1000 + min_padded * 10 + m) as u64);
                    }
                }
            }
        }
    }
}

#[test]
fn roundtrip_all_symmetries_and_placements() {
    for symmetry in [Symmetry::Complex, Symmetry::Centered, Symmetry::Hermitian] {
        for placement in [Placement::InPlace, Placement::OutOfPlace] {
            for len in 1..=14 {
                for min_padded in [2 * len - 1, 2 * len, 3 * len] {
                    for m in 1..=min_padded {
                        if let Some(p) = params(len, min_padded, m, symmetry) {
                            let err = roundtrip_error(p.with_placement(placement), m as u64);
                            assert!(err < 1e-11, "{p:?}: {err:e}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn out_of_place_matches_in_place() {
    for symmetry in [Symmetry::Complex, Symmetry::Centered] {
        let p = params(19, 40, 3, symmetry).unwrap();
        let f = random_input(3, 19);
        let a = ComplexKernel::new(p, &mut DftProvider::default()).unwrap();
        let b = ComplexKernel::new(p.with_placement(Placement::OutOfPlace), &mut DftProvider::default()).unwrap();
        for r in 0..p.n {
            assert_eq!(a.forward_block(&f, r).unwrap(), b.forward_block(&f, r).unwrap());
        }
    }
}

#[test]
fn naive_engine_agrees_with_fast() {
    let p = params(11, 17, 2, Symmetry::Hermitian).unwrap();
    let f = hermitian_input(5, 11);
    let fast = HermitianPfft::new(p, &mut DftProvider::default()).unwrap();
    let naive = HermitianPfft::new(p, &mut DftProvider::new(Engine::Naive)).unwrap();
    for r in 0..p.n {
        let a = fast.forward_block(&f, r).unwrap().data;
        let b = naive.forward_block(&f, r).unwrap().data;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn fig1_geometry_matches_slice() {
    let p = params(6, 11, 4, Symmetry::Complex).unwrap();
    assert_eq!((p.p, p.q), (2, 3));
    let k = ComplexPfft::with_provider_default(p).unwrap();
    let f = random_input(11, 6);
    let block = k.forward2(&f, 1).unwrap();
    assert!(relative_error(&block.data, &padded_dft_slice(&f, &p, 1).unwrap()) < 1e-12);
}

#[test]
fn regime_mismatch_is_reported() {
    let p = params(6, 11, 4, Symmetry::Complex).unwrap();
    let k = ComplexPfft::with_provider_default(p).unwrap();
    let f = random_input(1, 6);
    assert!(matches!(k.forward1(&f, 0), Err(Error::WrongRegime { .. })));
    assert!(matches!(k.forward_inner(&f, 0), Err(Error::WrongRegime { .. })));
    assert!(matches!(k.forward2(&f, 3), Err(Error::ResidueOutOfRange { index: 3, count: 3 })));
    assert!(matches!(k.forward2(&f[..5], 0), Err(Error::LengthMismatch { .. })));
}

#[test]
fn centered_examples() {
    // L=5, m=3, M=7: q = 3, residue 1.
    let p = params(5, 7, 3, Symmetry::Centered).unwrap();
    assert_eq!((p.p, p.q, p.n), (2, 3, 3));
    let k = CenteredPfft::new(p, &mut DftProvider::default()).unwrap();
    let f = CenteredSeq::new(random_input(7, 5));
    let block = k.forward2c(&f, 1).unwrap();
    assert!(relative_error(&block.data, &padded_dft_slice(f.values(), &p, 1).unwrap()) < 1e-12);

    // L=11, m=2, M=17: p = 6, n = 3, q = 9.
    let p = params(11, 17, 2, Symmetry::Centered).unwrap();
    assert_eq!((p.p, p.n, p.q), (6, 3, 9));
    let k = CenteredPfft::new(p, &mut DftProvider::default()).unwrap();
    let f = CenteredSeq::new(random_input(8, 11));
    for v in 0..3 {
        let block = k.forward_inner_c(&f, v).unwrap();
        assert!(relative_error(&block.data, &padded_dft_slice(f.values(), &p, v).unwrap()) < 1e-12);
    }
    assert!(matches!(k.forward2c(&f, 0), Err(Error::WrongRegime { .. })));

    // L=2: logical {-1, 0}, q = 2.
    let p = params(2, 2, 1, Symmetry::Centered).unwrap();
    assert_eq!(p.q, 2);
    assert!(roundtrip_error(p, 9) < 1e-14);
}

#[test]
fn centered_is_shifted_complex() {
    for len in 1..=12 {
        let origin = (len / 2) as i64;
        for m in 1..=2 * len {
            let (Some(pc), Some(pu)) =
                (params(len, 2 * len, m, Symmetry::Centered), params(len, 2 * len, m, Symmetry::Complex))
            else {
                continue;
            };
            // Compare on spectral indices both layouts hold: the p = 2 residues with equal q.
            if pc.p != 2 || pu.p > 2 || pc.q != pu.q {
                continue;
            }
            let f = random_input(len as u64, len);
            let c = CenteredPfft::new(pc, &mut DftProvider::default()).unwrap();
            let u = ComplexPfft::with_provider_default(pu).unwrap();
            let qm = pc.padded_len() as i64;
            for r in 0..pc.n {
                let bc = c.forward_block(&f, r).unwrap().data;
                let bu = u.forward_block(&f, r).unwrap().data;
                let shifted: Vec<Complex64> = bu
                    .iter()
                    .enumerate()
                    .map(|(l, x)| {
                        let k = (pc.q * l + r) as i64;
                        let e = (-k * origin).rem_euclid(qm) as f64;
                        x * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e / qm as f64)
                    })
                    .collect();
                assert!(relative_error(&bc, &shifted) < 1e-12, "L={len} m={m} r={r}");
            }
        }
    }
}

#[test]
fn hermitian_examples() {
    // L=1, m=1.
    let p = params(1, 1, 1, Symmetry::Hermitian);
    assert!(p.is_none(), "q < p for L = M = m = 1");
    let p = params(1, 2, 1, Symmetry::Hermitian).unwrap();
    let k = HermitianPfft::new(p, &mut DftProvider::default()).unwrap();
    let f = HermitianSeq::new(vec![Complex64::new(2.5, 0.0)]).unwrap();
    assert_eq!(k.forward2h(&f, 0).unwrap().data, vec![2.5]);

    // L=7, m=4, M=11: q = 3, residue 2, even m.
    let p = params(7, 11, 4, Symmetry::Hermitian).unwrap();
    assert_eq!((p.p, p.n, p.q), (2, 3, 3));
    let k = HermitianPfft::new(p, &mut DftProvider::default()).unwrap();
    let f = HermitianSeq::new(hermitian_input(4, 7)).unwrap();
    let block = k.forward2h(&f, 2).unwrap();
    let expected = padded_dft_slice(f.values(), &p, 2).unwrap();
    let norm = f.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(expected.iter().all(|z| z.im.abs() <= 1e-12 * norm));
    let got: Vec<Complex64> = block.data.iter().map(|&x| x.into()).collect();
    assert!(relative_error(&got, &expected) < 1e-12);
    let mut acc = vec![Complex64::default(); 4];
    for r in 0..3 {
        let part = k.backward2h(&k.forward2h(&f, r).unwrap()).unwrap();
        acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
    }
    let scaled: Vec<Complex64> = f.values().iter().map(|x| x * 12.0).collect();
    assert!(relative_error(&acc, &scaled) < 1e-13);

    // L=19, m=2, M=29: p = 10, q = 15.
    let p = params(19, 29, 2, Symmetry::Hermitian).unwrap();
    assert_eq!((p.p, p.n, p.q), (10, 3, 15));
    let k = HermitianPfft::new(p, &mut DftProvider::default()).unwrap();
    let f = HermitianSeq::new(hermitian_input(6, 19)).unwrap();
    let got: Vec<Complex64> = k.forward_inner_h(&f, 1).unwrap().data.iter().map(|&x| x.into()).collect();
    assert!(relative_error(&got, &padded_dft_slice(f.values(), &p, 1).unwrap()) < 1e-12);
    assert!(roundtrip_error(p, 6) < 1e-12);

    let zeros = HermitianSeq::new(vec![Complex64::default(); 10]).unwrap();
    assert!(k.forward_inner_h(&zeros, 2).unwrap().data.iter().all(|&x| x == 0.0));
}

#[test]
fn hermitian_rejects_complex_origin() {
    let err = HermitianSeq::new(vec![Complex64::new(1.0, 1e-3), Complex64::new(0.5, 0.5)]);
    assert!(matches!(err, Err(Error::NotHermitian(_))));
    let ok = HermitianSeq::new(vec![Complex64::new(1.0, 1e-16), Complex64::new(0.5, 0.5)]);
    assert!(ok.is_ok());
}

#[test]
fn hermitian_matches_centered_on_symmetrized_input() {
    for len in 1usize..=15 {
        for m in 1..=len + 2 {
            let min_padded = (3 * len).div_ceil(2);
            let (Some(ph), Some(pc)) =
                (params(len, min_padded, m, Symmetry::Hermitian), params(len, min_padded, m, Symmetry::Centered))
            else {
                continue;
            };
            let f = HermitianSeq::new(hermitian_input(len as u64, len)).unwrap();
            let full = f.symmetrize(len).unwrap();
            let h = HermitianPfft::new(ph, &mut DftProvider::default()).unwrap();
            let c = CenteredPfft::new(pc, &mut DftProvider::default()).unwrap();
            for v in 0..ph.n {
                let a: Vec<Complex64> = h.forward_block(f.values(), v).unwrap().data.iter().map(|&x| x.into()).collect();
                let b = c.forward_block(full.values(), v).unwrap().data;
                assert!(relative_error(&a, &b) < 1e-12, "L={len} m={m} v={v}");
            }
        }
    }
}

#[test]
fn hermitian_work_buffer_symmetry() {
    let p = params(9, 14, 5, Symmetry::Hermitian).unwrap();
    let k = HermitianPfft::new(p, &mut DftProvider::default()).unwrap();
    let f = HermitianSeq::new(hermitian_input(12, 9)).unwrap();
    for r in 0..p.n {
        let w = k.work_values(&f, r).unwrap();
        for s in 0..p.m {
            let mirror = w[(p.m - s) % p.m].conj();
            assert!((w[s] - mirror).norm() < 1e-14, "r={r} s={s}");
        }
    }
}

#[test]
fn conjugate_pair_examples() {
    let p = params(7, 20, 2, Symmetry::Complex).unwrap();
    assert!(p.n >= 3);
    let k = ComplexPfft::with_provider_default(p).unwrap();
    let f = random_input(21, 7);
    assert!(k.forward_conjugate_pair(&f, 0).is_err());
    let (a, b) = k.forward_conjugate_pair(&f, 1).unwrap();
    assert_eq!(b.index, p.n - 1);
    assert!(relative_error(&a.data, &k.forward_inner(&f, 1).unwrap().data) < 1e-13);
    assert!(relative_error(&b.data, &k.forward_inner(&f, p.n - 1).unwrap().data) < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_pair_equals_two_forwards(len in 3usize..40, extra in 0usize..60, m in 1usize..8, seed in any::<u64>(), v_seed in any::<usize>()) {
        let min_padded = 2 * len + extra;
        let Some(p) = params(len, min_padded, m, Symmetry::Complex) else { return Ok(()); };
        prop_assume!(p.p > 2 && p.n >= 3);
        let v = 1 + v_seed % (p.n - 1);
        prop_assume!(2 * v != p.n);
        let k = ComplexPfft::with_provider_default(p).unwrap();
        let f = random_input(seed, len);
        let (a, b) = k.forward_conjugate_pair(&f, v).unwrap();
        prop_assert!(relative_error(&a.data, &k.forward_inner(&f, v).unwrap().data) < 1e-13);
        prop_assert!(relative_error(&b.data, &k.forward_inner(&f, p.n - v).unwrap().data) < 1e-13);
    }

    #[test]
    fn forward_is_linear(len in 1usize..30, m in 1usize..12, a in -2.0f64..2.0, seed in any::<u64>()) {
        let Some(p) = params(len, 2 * len, m, Symmetry::Complex) else { return Ok(()); };
        let k = ComplexPfft::with_provider_default(p).unwrap();
        let f = random_input(seed, len);
        let g = random_input(seed ^ 1, len);
        let h: Vec<Complex64> = f.iter().zip(&g).map(|(x, y)| x * a + y).collect();
        for r in 0..p.n {
            let bf = k.forward_block(&f, r).unwrap().data;
            let bg = k.forward_block(&g, r).unwrap().data;
            let combined: Vec<Complex64> = bf.iter().zip(&bg).map(|(x, y)| x * a + y).collect();
            prop_assert!(relative_error(&k.forward_block(&h, r).unwrap().data, &combined) < 1e-12);
        }
    }
}
