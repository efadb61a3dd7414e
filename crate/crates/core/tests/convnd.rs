use hybrid_dealias::convnd::{
    axis_params, check_hyperplane_symmetry, hermitian_symmetrize_boundary, plan_complex_nd, plan_hermitian_nd, Layout,
};
use hybrid_dealias::mult::builtin_mult_product;
use hybrid_dealias::oracle::{direct_convolution_nd, naive_padded_dft, random_input, relative_error, stored_dims};
use hybrid_dealias::plan::{PlanParams, Symmetry};
use hybrid_dealias::{Complex64, Error};

fn valid_m(len: usize, min_padded: usize, symmetry: Symmetry) -> Vec<usize> {
    (1..=min_padded)
        .filter(|&m| {
            hybrid_dealias::plan::derive_params(len, min_padded, m, symmetry).is_ok_and(|p| p.validate().is_ok())
        })
        .collect()
}

fn hermitian_pair(dims: &[usize], axes: &[(usize, usize, usize)], seed: u64) -> (Vec<Complex64>, Vec<Complex64>) {
    let size: usize = stored_dims(dims, Symmetry::Hermitian).iter().product();
    let params = axis_params(Symmetry::Hermitian, axes).unwrap();
    let f = hermitian_symmetrize_boundary(&random_input(seed, size), &params).unwrap();
    let g = hermitian_symmetrize_boundary(&random_input(seed + 1, size), &params).unwrap();
    (f, g)
}

fn run(kind: Symmetry, axes: &[(usize, usize, usize)], f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let product = builtin_mult_product(2).unwrap();
    if kind == Symmetry::Hermitian {
        plan_hermitian_nd(axes, 2, 1).unwrap().convolve_new(&[f, g], &product).unwrap().remove(0)
    } else {
        plan_complex_nd(kind, axes, 2, 1).unwrap().convolve_new(&[f, g], &product).unwrap().remove(0)
    }
}

#[test]
fn scalar_2d() {
    let f = [Complex64::new(2.0, 1.0)];
    let g = [Complex64::new(-1.0, 3.0)];
    let out = run(Symmetry::Complex, &[(1, 1, 1), (1, 1, 1)], &f, &g);
    assert!((out[0] - f[0] * g[0]).norm() < 1e-15);
}

#[test]
fn delta_2d_is_identity() {
    let g = random_input(4, 16);
    let mut delta = vec![Complex64::default(); 16];
    delta[0] = Complex64::new(1.0, 0.0);
    for m in [1, 2, 3, 4, 8] {
        let out = run(Symmetry::Complex, &[(4, 8, m), (4, 8, m)], &delta, &g);
        assert!(relative_error(&out, &g) < 1e-13, "m={m}");
    }
}

#[test]
fn complex_2d_matches_direct_sum() {
    for len in 1..=12 {
        let min_padded = 2 * len;
        let f = random_input(len as u64, len * len);
        let g = random_input(50 + len as u64, len * len);
        let expected = direct_convolution_nd(&[&f, &g], &[len, len], Symmetry::Complex).unwrap();
        let ms = valid_m(len, min_padded, Symmetry::Complex);
        for &mx in ms.iter().step_by(3) {
            for &my in ms.iter().rev().step_by(4) {
                let out = run(Symmetry::Complex, &[(len, min_padded, mx), (len, min_padded - 1, my)], &f, &g);
                let err = relative_error(&out, &expected);
                assert!(err < 1e-11, "L={len} mx={mx} my={my}: {err:e}");
            }
        }
    }
}

#[test]
fn complex_3d_matches_direct_sum() {
    for len in 1..=6 {
        let f = random_input(len as u64, len * len * len);
        let g = random_input(90 + len as u64, len * len * len);
        let expected = direct_convolution_nd(&[&f, &g], &[len; 3], Symmetry::Complex).unwrap();
        for m in valid_m(len, 2 * len, Symmetry::Complex) {
            let axes = [(len, 2 * len, m), (len, 2 * len, m.max(2).min(2 * len)), (len, 2 * len, 1.max(m / 2))];
            let out = run(Symmetry::Complex, &axes, &f, &g);
            let err = relative_error(&out, &expected);
            assert!(err < 1e-11, "L={len} m={m}: {err:e}");
        }
    }
}

#[test]
fn centered_2d_matches_direct_sum() {
    for len in 1usize..=9 {
        let min_padded = (3 * len).div_ceil(2);
        let f = random_input(len as u64, len * len);
        let g = random_input(7 + len as u64, len * len);
        let expected = direct_convolution_nd(&[&f, &g], &[len, len], Symmetry::Centered).unwrap();
        for m in valid_m(len, min_padded, Symmetry::Centered) {
            let out = run(Symmetry::Centered, &[(len, min_padded, m), (len, min_padded, m)], &f, &g);
            assert!(relative_error(&out, &expected) < 1e-11, "L={len} m={m}");
        }
    }
}

#[test]
fn hermitian_2d_matches_direct_sum() {
    for len in 1usize..=9 {
        let min_padded = (3 * len).div_ceil(2);
        let dims = [len, len];
        let ms = valid_m(len, min_padded, Symmetry::Hermitian);
        for &mx in &ms {
            for &my in &ms {
                let axes = [(len, min_padded, mx), (len, min_padded, my)];
                let (f, g) = hermitian_pair(&dims, &axes, (len * 10 + mx) as u64);
                let expected = direct_convolution_nd(&[&f, &g], &dims, Symmetry::Hermitian).unwrap();
                let out = run(Symmetry::Hermitian, &axes, &f, &g);
                let err = relative_error(&out, &expected);
                assert!(err < 1e-11, "L={len} mx={mx} my={my}: {err:e}");
            }
        }
    }
}

#[test]
fn hermitian_3d_matches_direct_sum() {
    for len in [3usize, 4, 5] {
        let min_padded = (3 * len).div_ceil(2);
        let dims = [len; 3];
        let axes = [(len, min_padded, 2), (len, min_padded, 1), (len, min_padded, 2)];
        let (f, g) = hermitian_pair(&dims, &axes, len as u64);
        let expected = direct_convolution_nd(&[&f, &g], &dims, Symmetry::Hermitian).unwrap();
        assert!(relative_error(&run(Symmetry::Hermitian, &axes, &f, &g), &expected) < 1e-11);
    }
}

#[test]
fn residues_per_pass_on_outer_axes() {
    let len = 7;
    let f = random_input(1, len * len);
    let g = random_input(2, len * len);
    let expected = direct_convolution_nd(&[&f, &g], &[len, len], Symmetry::Complex).unwrap();
    let base = axis_params(Symmetry::Complex, &[(len, 30, 2), (len, 14, 3)]).unwrap();
    for d in 1..=base[0].n {
        let axes = vec![base[0].with_residues_per_pass(d).unwrap(), base[1]];
        let mut plan = hybrid_dealias::convnd::ComplexConvNd::plan(axes, 2, 1, &mut Default::default()).unwrap();
        let out = plan.convolve_new(&[&f, &g], &builtin_mult_product(2).unwrap()).unwrap();
        assert!(relative_error(&out[0], &expected) < 1e-11, "D={d}");
    }
}

#[test]
fn stride_does_not_change_result() {
    let (lx, ly) = (6, 5);
    let f = random_input(3, lx * ly);
    let g = random_input(4, lx * ly);
    let axes = [(lx, 2 * lx, 2), (ly, 2 * ly, 3)];
    let contiguous = run(Symmetry::Complex, &axes, &f, &g);
    let layout = Layout::with_stride(&[lx, ly], 0, ly + 2).unwrap();
    let spread = |x: &[Complex64]| {
        let mut out = vec![Complex64::new(9.0, 9.0); layout.span()];
        for i in 0..lx {
            for j in 0..ly {
                out[layout.offset(&[i, j])] = x[i * ly + j];
            }
        }
        out
    };
    let (fs, gs) = (spread(&f), spread(&g));
    let mut out = vec![Complex64::new(-7.0, 0.0); layout.span()];
    let mut plan = plan_complex_nd(Symmetry::Complex, &axes, 2, 1).unwrap();
    plan.convolve_into(&[&fs, &gs], &layout, &mut [&mut out], &layout, &builtin_mult_product(2).unwrap()).unwrap();
    for i in 0..lx {
        for j in 0..ly {
            assert!((out[layout.offset(&[i, j])] - contiguous[i * ly + j]).norm() < 1e-12);
        }
        for j in ly..ly + 2 {
            if i + 1 < lx {
                assert_eq!(out[i * (ly + 2) + j], Complex64::new(-7.0, 0.0));
            }
        }
    }
}

#[test]
fn factorizes_into_axis_dfts() {
    // Full-spectrum route: naive 2-D DFT of the zero-padded inputs, product, inverse.
    let (lx, ly) = (5, 7);
    let axes = [(lx, 2 * lx, 3), (ly, 2 * ly, 4)];
    let params: Vec<PlanParams> = axis_params(Symmetry::Complex, &axes).unwrap();
    let (nx, ny) = (params[0].padded_len(), params[1].padded_len());
    let f = random_input(8, lx * ly);
    let g = random_input(9, lx * ly);
    let dft2 = |x: &[Complex64], sign: i64, rows: usize, cols: usize| {
        let mut grid = vec![Complex64::default(); nx * ny];
        for i in 0..rows {
            let row: Vec<(i64, Complex64)> = (0..cols).map(|j| (sign * j as i64, x[i * cols + j])).collect();
            for (k, v) in naive_padded_dft(&row, ny).unwrap().into_iter().enumerate() {
                grid[i * ny + k] = v;
            }
        }
        let mut out = vec![Complex64::default(); nx * ny];
        for k in 0..ny {
            let column: Vec<(i64, Complex64)> = (0..nx).map(|i| (sign * i as i64, grid[i * ny + k])).collect();
            for (l, v) in naive_padded_dft(&column, nx).unwrap().into_iter().enumerate() {
                out[l * ny + k] = v;
            }
        }
        out
    };
    let product: Vec<Complex64> = dft2(&f, 1, lx, ly).iter().zip(dft2(&g, 1, lx, ly)).map(|(a, b)| a * b).collect();
    let back = dft2(&product, -1, nx, ny);
    let expected: Vec<Complex64> = (0..lx)
        .flat_map(|i| (0..ly).map(move |j| (i, j)))
        .map(|(i, j)| back[i * ny + j] / (nx * ny) as f64)
        .collect();
    assert!(relative_error(&run(Symmetry::Complex, &axes, &f, &g), &expected) < 1e-11);
}

#[test]
fn hyperplane_repair() {
    let axes = axis_params(Symmetry::Hermitian, &[(4, 6, 2), (5, 8, 2)]).unwrap();
    let layout = Layout::contiguous(&[4, 3]);
    let zero = vec![Complex64::default(); 12];
    assert_eq!(hermitian_symmetrize_boundary(&zero, &axes).unwrap(), zero);
    let raw = random_input(1, 12);
    assert!(matches!(check_hyperplane_symmetry(&raw, &layout, &axes), Err(Error::NotHermitian(_))));
    let fixed = hermitian_symmetrize_boundary(&raw, &axes).unwrap();
    check_hyperplane_symmetry(&fixed, &layout, &axes).unwrap();
    assert_eq!(hermitian_symmetrize_boundary(&fixed, &axes).unwrap(), fixed);
    // Off-hyperplane entries are untouched; the unpaired x = -2 point is zeroed.
    for i in 0..4 {
        assert_eq!(fixed[i * 3 + 1], raw[i * 3 + 1]);
    }
    assert_eq!(fixed[0], Complex64::default());
    assert_eq!(fixed[2 * 3].im, 0.0);

    let mut plan = plan_hermitian_nd(&[(4, 6, 2), (5, 8, 2)], 2, 1).unwrap();
    let res = plan.convolve_new(&[&raw, &raw], &builtin_mult_product(2).unwrap());
    assert!(matches!(res, Err(Error::NotHermitian(_))));
}

#[test]
fn rejects_bad_plans_and_calls() {
    assert!(matches!(plan_complex_nd(Symmetry::Complex, &[(4, 8, 2)], 2, 1), Err(Error::Unsupported(_))));
    let mixed = vec![
        axis_params(Symmetry::Complex, &[(4, 8, 2)]).unwrap()[0],
        axis_params(Symmetry::Centered, &[(4, 8, 2)]).unwrap()[0],
    ];
    let err = hybrid_dealias::convnd::ComplexConvNd::plan(mixed, 2, 1, &mut Default::default());
    assert!(matches!(err, Err(Error::InvalidParameter(_))));
    let mut plan = plan_complex_nd(Symmetry::Complex, &[(3, 6, 2), (3, 6, 2)], 2, 1).unwrap();
    let f = random_input(1, 8);
    let res = plan.convolve_new(&[&f, &f], &builtin_mult_product(2).unwrap());
    assert!(matches!(res, Err(Error::LengthMismatch { .. })));
}

#[test]
fn in_place_api() {
    let axes = [(3, 6, 2), (4, 8, 3), (2, 4, 1)];
    let f = random_input(1, 24);
    let g = random_input(2, 24);
    let expected = direct_convolution_nd(&[&f, &g], &[3, 4, 2], Symmetry::Complex).unwrap();
    let mut plan = plan_complex_nd(Symmetry::Complex, &axes, 2, 1).unwrap();
    let mut data = vec![f, g.clone()];
    plan.convolve(&mut data, &builtin_mult_product(2).unwrap()).unwrap();
    assert!(relative_error(&data[0], &expected) < 1e-12);
    assert_eq!(data[1], g);
}
