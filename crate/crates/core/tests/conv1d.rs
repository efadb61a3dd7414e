use hybrid_dealias::conv1d::{plan_complex, plan_hermitian, ComplexConv1d, HermitianConv1d};
use hybrid_dealias::mult::{builtin_mult_product, Pointwise};
use hybrid_dealias::oracle::{
    direct_convolution, direct_convolution_centered, direct_convolution_hermitian, random_input, relative_error,
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

fn convolve(p: PlanParams, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let product = builtin_mult_product(2).unwrap();
    if p.symmetry == Symmetry::Hermitian {
        let mut plan: HermitianConv1d = plan_hermitian(p, 2, 1).unwrap();
        plan.convolve_new(&[f, g], &product).unwrap().remove(0)
    } else {
        let mut plan: ComplexConv1d = plan_complex(p, 2, 1).unwrap();
        plan.convolve_new(&[f, g], &product).unwrap().remove(0)
    }
}

fn oracle(symmetry: Symmetry, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    match symmetry {
        Symmetry::Complex => direct_convolution(&[f, g], f.len()).unwrap(),
        Symmetry::Centered => direct_convolution_centered(&[f, g]).unwrap(),
        Symmetry::Hermitian => direct_convolution_hermitian(&[f, g]).unwrap(),
    }
}

#[test]
fn scalar_product() {
    let p = params(1, 1, 1, Symmetry::Complex).unwrap();
    let one = [Complex64::new(1.0, 0.0)];
    assert_eq!(convolve(p, &one, &one), vec![Complex64::new(1.0, 0.0)]);
}

#[test]
fn delta_reproduces_input() {
    let g = random_input(3, 8);
    let mut delta = vec![Complex64::default(); 8];
    delta[0] = Complex64::new(1.0, 0.0);
    for m in 1..=16 {
        if let Some(p) = params(8, 16, m, Symmetry::Complex) {
            assert!(relative_error(&convolve(p, &delta, &g), &g) < 1e-13, "m={m}");
        }
    }
    let mut centered = vec![Complex64::default(); 8];
    centered[4] = Complex64::new(1.0, 0.0);
    let p = params(8, 12, 3, Symmetry::Centered).unwrap();
    assert!(relative_error(&convolve(p, &centered, &g), &g) < 1e-13);
}

#[test]
fn fig1_geometry() {
    let p = params(6, 11, 4, Symmetry::Complex).unwrap();
    let f = random_input(1, 6);
    let g = random_input(2, 6);
    assert!(relative_error(&convolve(p, &f, &g), &oracle(Symmetry::Complex, &f, &g)) < 1e-12);
}

#[test]
fn complex_matches_direct_sum_for_every_m() {
    for len in 1..=48 {
        for min_padded in [2 * len - 1, 2 * len] {
            let f = random_input(len as u64, len);
            let g = random_input(1000 + len as u64, len);
            let expected = oracle(Symmetry::Complex, &f, &g);
            for m in 1..=min_padded {
                if let Some(p) = params(len, min_padded, m, Symmetry::Complex) {
                    let err = relative_error(&convolve(p, &f, &g), &expected);
                    assert!(err < 1e-11, "L={len} M={min_padded} m={m}: {err:e}");
                }
            }
        }
    }
}

#[test]
fn centered_and_hermitian_match_direct_sum() {
    for symmetry in [Symmetry::Centered, Symmetry::Hermitian] {
        for len in 1usize..=31 {
            let min_padded = (3 * len).div_ceil(2);
            let (f, g) = if symmetry == Symmetry::Hermitian {
                (hermitian_input(len as u64, len), hermitian_input(77 + len as u64, len))
            } else {
                (random_input(len as u64, len), random_input(77 + len as u64, len))
            };
            let expected = oracle(symmetry, &f, &g);
            for m in 1..=min_padded {
                if let Some(p) = params(len, min_padded, m, symmetry) {
                    let err = relative_error(&convolve(p, &f, &g), &expected);
                    assert!(err < 1e-11, "{symmetry} L={len} m={m}: {err:e}");
                }
            }
        }
    }
}

#[test]
fn hermitian_examples() {
    let p = params(1, 2, 1, Symmetry::Hermitian).unwrap();
    let out = convolve(p, &[Complex64::new(1.5, 0.0)], &[Complex64::new(-2.0, 0.0)]);
    assert!((out[0] - Complex64::new(-3.0, 0.0)).norm() < 1e-15);

    let p = params(7, 11, 4, Symmetry::Hermitian).unwrap();
    let f = hermitian_input(5, 7);
    let g = hermitian_input(6, 7);
    let out = convolve(p, &f, &g);
    assert!(relative_error(&out, &oracle(Symmetry::Hermitian, &f, &g)) < 1e-12);
    let norm = out.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(out[0].im.abs() <= 1e-12 * norm);
}

#[test]
fn hermitian_rejects_complex_origin() {
    let p = params(5, 8, 2, Symmetry::Hermitian).unwrap();
    let mut plan = plan_hermitian(p, 2, 1).unwrap();
    let f = random_input(1, 3);
    let res = plan.convolve_new(&[&f, &f], &builtin_mult_product(2).unwrap());
    assert!(matches!(res, Err(Error::NotHermitian(_))));
}

#[test]
fn padding_beyond_minimum_is_harmless() {
    let f = random_input(17, 17);
    let g = random_input(18, 17);
    for m in [1, 2, 3, 4, 5, 8, 9, 17] {
        let results: Vec<Vec<Complex64>> = [33, 34, 40, 64]
            .iter()
            .filter_map(|&mp| params(17, mp, m, Symmetry::Complex))
            .map(|p| convolve(p, &f, &g))
            .collect();
        for pair in results.windows(2) {
            assert!(relative_error(&pair[0], &pair[1]) < 1e-11);
        }
    }
}

#[test]
fn residues_per_pass_and_placement_do_not_change_results() {
    for symmetry in [Symmetry::Complex, Symmetry::Centered, Symmetry::Hermitian] {
        let len = 23;
        let min_padded = if symmetry == Symmetry::Complex { 60 } else { 40 };
        let (f, g) = if symmetry == Symmetry::Hermitian {
            (hermitian_input(1, len), hermitian_input(2, len))
        } else {
            (random_input(1, len), random_input(2, len))
        };
        let expected = oracle(symmetry, &f, &g);
        for m in [2, 3, 5] {
            let base = params(len, min_padded, m, symmetry).unwrap();
            for d in 1..=base.n {
                for placement in [Placement::InPlace, Placement::OutOfPlace] {
                    let p = base.with_residues_per_pass(d).unwrap().with_placement(placement);
                    let err = relative_error(&convolve(p, &f, &g), &expected);
                    assert!(err < 1e-11, "{symmetry} m={m} D={d} {placement:?}: {err:e}");
                }
            }
        }
    }
}

#[test]
fn conjugate_pairs_are_used_for_d2() {
    let p = params(20, 80, 3, Symmetry::Complex).unwrap().with_residues_per_pass(2).unwrap();
    assert!(p.p > 2 && p.n >= 3);
    let plan = plan_complex(p, 2, 1).unwrap();
    assert!(plan.paired());
    assert!(plan.residue_groups().iter().skip(1).any(|g| g.len() == 2 && g[0] + g[1] == p.n));
}

#[test]
fn in_place_overwrites_first_outputs() {
    let p = params(9, 17, 4, Symmetry::Complex).unwrap();
    let f = random_input(4, 9);
    let g = random_input(5, 9);
    let mut plan = plan_complex(p, 2, 1).unwrap();
    let mut data = vec![f.clone(), g.clone()];
    plan.convolve(&mut data, &builtin_mult_product(2).unwrap()).unwrap();
    assert!(relative_error(&data[0], &oracle(Symmetry::Complex, &f, &g)) < 1e-12);
    assert_eq!(data[1], g);
}

#[test]
fn more_outputs_than_inputs() {
    let p = params(10, 19, 4, Symmetry::Complex).unwrap();
    let f = random_input(6, 10);
    let square_and_copy = Pointwise::new(1, 2, |x: &[Complex64], y: &mut [Complex64]| {
        y[0] = x[0] * x[0];
        y[1] = x[0];
    })
    .unwrap();
    let mut plan = plan_complex(p, 1, 2).unwrap();
    let out = plan.convolve_new(&[&f], &square_and_copy).unwrap();
    assert!(relative_error(&out[0], &oracle(Symmetry::Complex, &f, &f)) < 1e-12);
    assert!(relative_error(&out[1], &f) < 1e-13);
}

#[test]
fn arity_mismatch_is_rejected() {
    let p = params(4, 8, 2, Symmetry::Complex).unwrap();
    let mut plan = plan_complex(p, 3, 1).unwrap();
    let f = random_input(1, 4);
    let err = plan.convolve_new(&[&f, &f], &builtin_mult_product(2).unwrap());
    assert!(matches!(err, Err(Error::Arity(_))));
    let err = plan.convolve_new(&[&f, &f, &f[..3]], &builtin_mult_product(3).unwrap());
    assert!(matches!(err, Err(Error::LengthMismatch { .. })));
}

#[test]
fn three_fold_product() {
    let p = params(12, 34, 5, Symmetry::Complex).unwrap();
    let (f, g, h) = (random_input(1, 12), random_input(2, 12), random_input(3, 12));
    let mut plan = plan_complex(p, 3, 1).unwrap();
    let out = plan.convolve_new(&[&f, &g, &h], &builtin_mult_product(3).unwrap()).unwrap();
    assert!(relative_error(&out[0], &direct_convolution(&[&f, &g, &h], 12).unwrap()) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_convolution_is_bilinear(len in 1usize..30, m in 1usize..20, a in -3.0f64..3.0, seed in any::<u64>()) {
        let Some(p) = params(len, 2 * len, m, Symmetry::Complex) else { return Ok(()); };
        let f1 = random_input(seed, len);
        let f2 = random_input(seed.wrapping_add(1), len);
        let g = random_input(seed.wrapping_add(2), len);
        let mix: Vec<Complex64> = f1.iter().zip(&f2).map(|(x, y)| x * a + y).collect();
        let lhs = convolve(p, &mix, &g);
        let rhs: Vec<Complex64> = convolve(p, &f1, &g).iter().zip(convolve(p, &f2, &g)).map(|(x, y)| x * a + y).collect();
        prop_assert!(relative_error(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn any_valid_m_matches_oracle(len in 1usize..40, extra in 0usize..40, m in 1usize..80, seed in any::<u64>()) {
        let min_padded = 2 * len - 1 + extra;
        let Some(p) = params(len, min_padded, m, Symmetry::Complex) else { return Ok(()); };
        let f = random_input(seed, len);
        let g = random_input(seed ^ 7, len);
        prop_assert!(relative_error(&convolve(p, &f, &g), &oracle(Symmetry::Complex, &f, &g)) < 1e-11);
    }
}
