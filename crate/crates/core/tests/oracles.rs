//! Builders and reconstructions against from-scratch reference computations.

mod common;

use common::*;
use hsrecon_core::*;
use rand::Rng;

fn first_difference_oracle(rows: usize, cols: usize) -> Dense {
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| match j {
                    _ if j == i => 1.0,
                    _ if j == i + 1 => -1.0,
                    _ => 0.0,
                })
                .collect()
        })
        .collect()
}

#[test]
fn difference_matrices_match_stencils() {
    for n in 2..=6 {
        let d1 = build_first_difference(n - 1, n).unwrap();
        assert_eq!(to_dense(&d1), first_difference_oracle(n - 1, n));
    }
    for n in 3..=8 {
        let d2 = to_dense(&build_second_difference(n).unwrap());
        for (i, row) in d2.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let expected = match j.wrapping_sub(i) {
                    0 | 2 => 1.0,
                    1 => -2.0,
                    _ => 0.0,
                };
                assert_eq!(v, expected, "D2({n}) entry ({i}, {j})");
            }
        }
    }
}

#[test]
fn kronecker_extensions_match_elementwise_oracle() {
    let mut rng = rng(11);
    for r in 1..=6 {
        for c in 1..=6 {
            let base = random_dense(r, c, &mut rng);
            let m = Matrix::from_rows(&base).unwrap();
            for t in 1..=5 {
                let got = to_dense(&kron_identity_extend(&m, t).unwrap());
                assert!(max_abs_diff(&got, &kron(&identity(t), &base)) < 1e-12);
                if r == c {
                    let got = to_dense(&kron_ones_extend(&m, t).unwrap());
                    assert!(max_abs_diff(&got, &kron(&ones(t), &base)) < 1e-12);
                }
            }
        }
    }
}

#[test]
fn smoothness_prior_matches_explicit_inverse() {
    for &(n, alpha) in &[(3, 1.0), (7, 1e-2), (12, 1e-4), (49, 1e-6)] {
        let d2 = first_difference_oracle(n - 2, n - 1);
        let d2 = mul(&d2, &first_difference_oracle(n - 1, n));
        let mut sm = mul(&transpose(&d2), &d2);
        for (i, row) in sm.iter_mut().enumerate() {
            row[i] += alpha;
        }
        let expected = inverse(&sm);
        let got = to_dense(build_smoothness_prior(n, alpha).unwrap().k_s());
        let rel = max_abs_diff(&got, &expected) / max_abs(&expected);
        assert!(rel < 1e-8, "n={n} alpha={alpha}: relative error {rel:e}");
    }
}

#[test]
fn forward_capture_matches_triple_loop() {
    let mut rng = rng(5);
    let grid = SpectralGrid::new(500.0, 600.0, 11).unwrap();
    let responses = random_dense(4, 11, &mut rng)
        .into_iter()
        .map(|r| r.into_iter().map(f64::abs).collect::<Vec<_>>())
        .collect::<Vec<_>>();
    let bank = FilterBank::new(grid, Matrix::from_rows(&responses).unwrap()).unwrap();
    let (h, w) = (3, 5);
    let scene_data: Vec<f64> = (0..h * w * 11).map(|_| rng.random_range(0.0..1.0)).collect();
    let scene = HyperCube::new(h, w, grid, scene_data.clone()).unwrap();
    let capture = forward_capture(&scene, &bank).unwrap();
    for y in 0..h {
        for x in 0..w {
            for (c, filter) in responses.iter().enumerate() {
                let mut v = 0.0;
                for (k, f) in filter.iter().enumerate() {
                    v += f * scene_data[(y * w + x) * 11 + k];
                }
                assert!((capture.value(y, x, c) - v).abs() < 1e-14);
            }
        }
    }
}

fn random_bank<R: Rng>(m: usize, n: usize, rng: &mut R) -> FilterBank {
    let grid = SpectralGrid::new(400.0, 400.0 + 10.0 * (n - 1) as f64, n).unwrap();
    let rows: Dense = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(0.05..1.0)).collect())
        .collect();
    FilterBank::new(grid, Matrix::from_rows(&rows).unwrap()).unwrap()
}

/// `W = K_CSR F̂ᵀ (F̂ K_CSR F̂ᵀ + N̂)⁻¹` by explicit Kronecker products and a
/// Gauss-Jordan inverse.
fn collaborative_oracle(f: &Dense, k_s: &Dense, noise: &[f64], t: usize) -> Dense {
    let f_hat = kron(&identity(t), f);
    let k_csr = kron(&ones(t), k_s);
    let n_hat = kron(&identity(t), &diag(noise));
    let system = add(&mul(&mul(&f_hat, &k_csr), &transpose(&f_hat)), &n_hat);
    mul(&mul(&k_csr, &transpose(&f_hat)), &inverse(&system))
}

fn diag(v: &[f64]) -> Dense {
    (0..v.len())
        .map(|i| (0..v.len()).map(|j| if i == j { v[i] } else { 0.0 }).collect())
        .collect()
}

#[test]
fn collaborative_filter_matches_dense_construction() {
    let mut rng = rng(21);
    for trial in 0..20 {
        let (m, n) = (3, 7);
        let bank = random_bank(m, n, &mut rng);
        let k_s = random_spd(n, &mut rng);
        let prior = SmoothnessPrior::from_covariance(Matrix::from_rows(&k_s).unwrap()).unwrap();
        let noise: Vec<f64> = (0..m).map(|_| rng.random_range(1e-3..0.1)).collect();
        let cov = NoiseCovariance::new(noise.clone()).unwrap();
        let f = to_dense(bank.responses());
        for t in 1..=4 {
            let expected = collaborative_oracle(&f, &k_s, &noise, t);
            let scale = max_abs(&expected);
            let fast = to_dense(&build_collaborative_filter(&bank, &prior, &cov, t).unwrap().weights());
            let dense = to_dense(&dense_collaborative_weights(&bank, &prior, &cov, t).unwrap());
            assert!(max_abs_diff(&fast, &expected) / scale < 1e-9, "trial {trial} t={t}");
            assert!(max_abs_diff(&dense, &expected) / scale < 1e-9, "trial {trial} t={t}");
        }
    }
}

#[test]
fn wiener_image_matches_per_pixel_oracle() {
    let mut rng = rng(8);
    let grid = SpectralGrid::default();
    let bank = generate_flat_top_bank(grid, 9, 3.0).unwrap();
    let noisy = random_cube(5, 4, 9, &mut rng);
    let cov = NoiseCovariance::new((0..9).map(|i| 0.001 * (i + 1) as f64).collect()).unwrap();
    let alpha = 1e-3;

    let d2 = to_dense(&build_second_difference(49).unwrap());
    let mut sm = mul(&transpose(&d2), &d2);
    for (i, row) in sm.iter_mut().enumerate() {
        row[i] += alpha;
    }
    let k_s = inverse(&sm);
    let f = to_dense(bank.responses());
    let ks_ft = mul(&k_s, &transpose(&f));
    let w = mul(&ks_ft, &inverse(&add(&mul(&f, &ks_ft), &diag(cov.variances()))));

    let got = reconstruct_wiener_image(&noisy, &bank, &cov, alpha).unwrap();
    let mut worst: f64 = 0.0;
    for y in 0..5 {
        for x in 0..4 {
            let expected = matvec(&w, noisy.pixel(y, x));
            for (g, e) in got.pixel(y, x).iter().zip(&expected) {
                worst = worst.max((g - e.max(0.0)).abs());
            }
        }
    }
    assert!(worst < 1e-8, "max deviation {worst:e}");
}

#[test]
fn cube_distance_matches_loop() {
    let mut rng = rng(3);
    let img = random_cube(9, 10, 3, &mut rng);
    for _ in 0..50 {
        let b = rng.random_range(1..=4);
        let a = Position::new(rng.random_range(0..=9 - b), rng.random_range(0..=10 - b));
        let c = Position::new(rng.random_range(0..=9 - b), rng.random_range(0..=10 - b));
        let mut expected = 0.0;
        for dy in 0..b {
            for dx in 0..b {
                for ch in 0..3 {
                    let d = img.value(a.row + dy, a.col + dx, ch) - img.value(c.row + dy, c.col + dx, ch);
                    expected += d * d;
                }
            }
        }
        assert!((cube_distance(&img, a, c, b).unwrap() - expected).abs() < 1e-12);
    }
}

#[test]
fn planted_duplicates_are_found_in_order() {
    let mut rng = rng(4);
    let (h, w, m, b) = (24, 24, 3, 4);
    let base = random_cube(h, w, m, &mut rng);
    let mut data = base.data().to_vec();
    let source = Position::new(2, 3);
    for target in [Position::new(15, 5), Position::new(10, 12)] {
        for dy in 0..b {
            for dx in 0..b {
                for c in 0..m {
                    data[((target.row + dy) * w + target.col + dx) * m + c] =
                        base.value(source.row + dy, source.col + dx, c);
                }
            }
        }
    }
    let img = MultiCube::new(h, w, m, data).unwrap();
    let params = CsrParams { block_size: b, window: 33, mu_c: 10, ..CsrParams::default() };
    let ms = match_cubes(&img, source, &params, 1e-12).unwrap();
    let got: Vec<Position> = ms.positions().collect();
    assert_eq!(got, [source, Position::new(10, 12), Position::new(15, 5)]);
}

#[test]
fn aggregation_counts_match_recount() {
    let mut rng = rng(9);
    let grid = SpectralGrid::new(400.0, 500.0, 11).unwrap();
    let bank = generate_flat_top_bank(grid, 3, 3.0).unwrap();
    let noisy = random_cube(13, 17, 3, &mut rng);
    let cov = NoiseCovariance::uniform(3, 0.05).unwrap();
    let params = CsrParams { block_size: 4, window: 9, step: 3, mu_c: 5, ..CsrParams::default() };
    let plan = CsrPlan::new(&noisy, &bank, &cov, &params).unwrap();
    let mut acc = plan.new_accumulator();
    plan.process(plan.references(), &mut acc).unwrap();

    let (ph, pw) = (plan.padded_image().height(), plan.padded_image().width());
    let mut counts = vec![0u32; ph * pw];
    let mut sums = vec![0.0; ph * pw * 11];
    for &r in plan.references() {
        let ms = plan.match_at(r).unwrap();
        let blocks = plan.reconstruct(&ms).unwrap();
        for (p, block) in ms.positions().zip(&blocks) {
            for dy in 0..4 {
                for dx in 0..4 {
                    let idx = (p.row + dy) * pw + p.col + dx;
                    counts[idx] += 1;
                    for k in 0..11 {
                        sums[idx * 11 + k] += block.data[(dy * 4 + dx) * 11 + k];
                    }
                }
            }
        }
    }
    assert_eq!(acc.counts(), &counts[..]);
    let pad = plan.padding();
    for y in 0..13 {
        for x in 0..17 {
            assert!(counts[(y + pad) * pw + x + pad] > 0, "pixel ({y}, {x}) not covered");
        }
    }
    let out = plan.finish(&acc).unwrap();
    for y in 0..13 {
        for x in 0..17 {
            let idx = (y + pad) * pw + x + pad;
            for k in 0..11 {
                let mean = (sums[idx * 11 + k] / counts[idx] as f64).max(0.0);
                assert!((out.pixel(y, x)[k] - mean).abs() < 1e-12);
            }
        }
    }
}
