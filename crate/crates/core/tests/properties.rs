use std::f64::consts::TAU;

use nepcim_core::contour::{indicator, projection_apply, QuadratureNodes};
use nepcim_core::geometry::{cover_rectangle, Disk, Rectangle};
use nepcim_core::linalg::{dense_eig, eigenvalues, lu_solve, smallest_eigenpair, thin_svd, DenseMatrix};
use nepcim_core::problems::{companion_oracle, DiagonalNep, PolynomialNep};
use nepcim_core::rng::ProbeRng;
use nepcim_core::sim::merge_candidates;
use nepcim_core::{SolveCounter, C64};
use proptest::prelude::*;

fn lex_sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn unitary(n: usize, seed: u64) -> DenseMatrix {
    thin_svd(&ProbeRng::new(seed).complex_matrix(n, n)).unwrap().u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covering_is_complete(
        x0 in -5.0f64..5.0, y0 in -5.0f64..5.0, side in 0.1f64..4.0,
        gx in 1usize..8, gy in 1usize..8, u in 0.0f64..=1.0, v in 0.0f64..=1.0,
    ) {
        let h = side / gx as f64;
        let domain = Rectangle::new(x0, x0 + side, y0, y0 + h * gy as f64).unwrap();
        let disks = cover_rectangle(&domain, gx, gy).unwrap();
        prop_assert_eq!(disks.len(), gx * gy);
        let z = C64::new(domain.x_min + u * domain.width(), domain.y_min + v * domain.height());
        prop_assert!(disks.iter().any(|d| (z - d.center()).norm() <= d.radius() * (1.0 + 1e-12)));
        let squares = disks.iter().filter(|d| d.inscribed_square_contains(z)).count();
        let closed = disks.iter().filter(|d| d.expanded_square_contains(z, 1e-12)).count();
        prop_assert!(squares <= 1);
        prop_assert!(closed >= 1);
        for d in &disks {
            let hr = 2.0 * d.radius() / 2f64.sqrt();
            prop_assert!((hr - h).abs() <= 4.0 * f64::EPSILON * h.max(1.0));
        }
    }

    #[test]
    fn subdivision_conserves_points(
        cx in -3.0f64..3.0, cy in -3.0f64..3.0, r in 0.01f64..2.0,
        u in -0.999f64..0.999, v in -0.999f64..0.999,
    ) {
        let parent = Disk::new(C64::new(cx, cy), r).unwrap();
        let z = parent.center() + C64::new(u, v) * parent.half_side();
        prop_assume!(u.abs() > 1e-9 && v.abs() > 1e-9);
        let children = parent.subdivide();
        let hits = children.iter().filter(|c| c.inscribed_square_contains(z)).count();
        prop_assert_eq!(hits, 1);
        for c in &children {
            prop_assert!((c.radius() - r / 2.0).abs() <= f64::EPSILON * r);
        }
    }

    #[test]
    fn quadrature_nodes_pair_up(n2 in 2usize..40, r in 0.01f64..10.0, phase in 0.0f64..TAU) {
        let n = 2 * n2;
        let d = Disk::new(C64::new(1.0, -2.0), r).unwrap();
        let q = QuadratureNodes::rotated(d, n, phase);
        let s: C64 = q.weights().iter().sum();
        prop_assert!(s.norm() <= 4.0 * n as f64 * f64::EPSILON * r);
        for j in 0..n2 {
            let mid = (q.nodes()[j] + q.nodes()[j + n2]) / 2.0;
            prop_assert!((mid - d.center()).norm() <= 8.0 * f64::EPSILON * (r + 3.0));
        }
    }

    #[test]
    fn lu_residual_is_small(n in 1usize..60, seed in any::<u64>()) {
        let mut rng = ProbeRng::new(seed);
        let a = rng.complex_matrix(n, n);
        let b = rng.complex_matrix(n, 2);
        let x = lu_solve(&a, &b).unwrap().x;
        let res = a.matmul(&x).sub(&b).frobenius_norm() / b.frobenius_norm();
        let kappa_proxy = x.frobenius_norm() * a.frobenius_norm() / b.frobenius_norm();
        prop_assert!(res < 1e-13 * kappa_proxy.max(1.0), "residual {res}");
    }

    #[test]
    fn svd_reconstructs(rows in 1usize..40, extra in 0usize..20, seed in any::<u64>()) {
        let l = rows.min(1 + extra % 12);
        let a = ProbeRng::new(seed).complex_matrix(rows, l);
        let s = thin_svd(&a).unwrap();
        prop_assert!(s.reconstruct().sub(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
        prop_assert!(s.u.adjoint().matmul(&s.u).sub(&DenseMatrix::identity(l)).frobenius_norm() <= 1e-12);
        prop_assert!(s.w.adjoint().matmul(&s.w).sub(&DenseMatrix::identity(l)).frobenius_norm() <= 1e-12);
        prop_assert!(s.sigma.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn eigenvalues_survive_unitary_similarity(n in 1usize..12, seed in any::<u64>()) {
        let a = ProbeRng::new(seed).complex_matrix(n, n);
        let q = unitary(n, seed ^ 0x5555);
        let b = q.adjoint().matmul(&a).matmul(&q);
        let ea = lex_sorted(eigenvalues(&a).unwrap());
        let eb = eigenvalues(&b).unwrap();
        // match greedily; sorting alone is fragile for near-equal real parts
        let mut used = vec![false; n];
        for z in &ea {
            let (j, d) = eb.iter().enumerate().filter(|(j, _)| !used[*j])
                .map(|(j, w)| (j, (w - z).norm())).min_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
            used[j] = true;
            prop_assert!(d < 1e-8 * (1.0 + z.norm()), "{z} off by {d}");
        }
    }

    #[test]
    fn smallest_eigenpair_is_nearest_to_shift(n in 1usize..20, seed in any::<u64>(), sr in -0.5f64..0.5, si in -0.5f64..0.5) {
        let a = ProbeRng::new(seed).complex_matrix(n, n);
        let shift = C64::new(sr, si);
        let all = dense_eig(&a).unwrap().values;
        let mut dists: Vec<f64> = all.iter().map(|z| (z - shift).norm()).collect();
        dists.sort_by(f64::total_cmp);
        // ties make the target ambiguous
        prop_assume!(dists.len() < 2 || dists[1] > 1.05 * dists[0]);
        let nearest = all.iter().min_by(|x, y| (*x - shift).norm().total_cmp(&(*y - shift).norm())).unwrap();
        match smallest_eigenpair(&a, shift) {
            Ok(pair) => {
                prop_assert!((pair.value - nearest).norm() < 1e-8 * (1.0 + nearest.norm()));
                let r = a.matvec(&pair.vector);
                let res: f64 = r.iter().zip(&pair.vector).map(|(x, v)| (x - pair.value * v).norm_sqr()).sum::<f64>().sqrt();
                prop_assert!(res <= 1e-8 * a.frobenius_norm());
            }
            // slow convergence when the ratio of distances is close to one
            Err(e) => prop_assert!(dists[1] < 1.2 * dists[0], "{e}"),
        }
    }

    #[test]
    fn merge_never_grows_and_keeps_separated_points(pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 0..30)) {
        let pts: Vec<C64> = pts.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        let merged = merge_candidates(&pts, 1e-3);
        prop_assert!(merged.len() <= pts.len());
        let separated = pts.iter().enumerate().all(|(i, a)| pts[i + 1..].iter().all(|b| (a - b).norm() >= 1e-3));
        if separated {
            prop_assert_eq!(merged, pts);
        }
    }

    #[test]
    fn indicator_is_rotation_robust(
        phase in 0.0f64..TAU, rho in 0.0f64..0.75, phi in 0.0f64..TAU, seed in any::<u64>(),
    ) {
        let d = Disk::new(C64::new(0.2, -0.1), 0.5).unwrap();
        let root = d.center() + C64::from_polar(rho * d.radius(), phi);
        let p = DiagonalNep::with_padding(&[root], &[C64::new(5.0, 0.0), C64::new(-4.0, 2.0)]);
        let f = ProbeRng::new(seed).unit_vector(3);
        let counter = SolveCounter::new();
        let (plain, _) = indicator(&p, d, &f, 16, &counter).unwrap();
        let by_hand = |phase: f64| {
            let q = QuadratureNodes::rotated(d, 16, phase);
            let mut full = [C64::new(0.0, 0.0); 3];
            let mut half = [C64::new(0.0, 0.0); 3];
            for (j, (&z, &w)) in q.nodes().iter().zip(q.weights()).enumerate() {
                for (i, mu) in [root, C64::new(5.0, 0.0), C64::new(-4.0, 2.0)].iter().enumerate() {
                    let x = f[i] / (z - mu);
                    full[i] += w * x;
                    if j % 2 == 1 {
                        half[i] += w * 2.0 * x;
                    }
                }
            }
            full.iter().zip(&half).map(|(a, b)| (a / b).norm_sqr()).sum::<f64>().sqrt() / 3f64.sqrt()
        };
        prop_assert!((by_hand(0.0) - plain).abs() < 1e-12, "{} vs {plain}", by_hand(0.0));
        // rotation only moves the truncation error, which is O(rho^(N/2))
        let rotated = by_hand(phase);
        prop_assert!((rotated - plain).abs() <= 3.0 * rho.powi(8) + 1e-12, "{rotated} vs {plain}");
    }
}

#[test]
fn projection_error_decays_geometrically() {
    let d = Disk::new(C64::new(0.0, 0.0), 1.0).unwrap();
    let a = C64::from_polar(0.5, 0.7);
    let p = DiagonalNep::new(vec![a, a]);
    let f = ProbeRng::new(1).unit_vector(2);
    let errors: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| {
            let s = projection_apply(&p, d, &f, n, &SolveCounter::new()).unwrap();
            s.full.iter().zip(&f).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
        })
        .collect();
    // exact error is |a^N / (1 - a^N)| for a unit probe
    for w in errors.windows(2) {
        assert!(w[1] < w[0] * 0.01 || w[1] < 1e-15, "{errors:?}");
    }
    let a8 = a.powi(8);
    assert!((errors[0] - (a8 / (1.0 - a8)).norm()).abs() < 1e-12, "{errors:?}");
}

#[test]
fn oracle_reproduces_planted_roots() {
    let mut rng = ProbeRng::new(4);
    for n in 1..8 {
        let roots: Vec<C64> = (0..n).map(|_| rng.complex()).collect();
        let t0 = DenseMatrix::from_diagonal(&roots.iter().map(|z| -z).collect::<Vec<_>>());
        let p = PolynomialNep::new(vec![t0, DenseMatrix::identity(n)]).unwrap();
        let got = lex_sorted(companion_oracle(&p).unwrap());
        let want = lex_sorted(roots);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-14, "{g} vs {w}");
        }
    }
}

#[test]
fn oracle_values_make_t_singular() {
    use nepcim_core::NepProblem;
    for seed in 0..5 {
        let p = nepcim_core::problems::random_qep(5, seed);
        for z in companion_oracle(&p).unwrap() {
            let t = p.evaluate(z);
            let s = thin_svd(&t).unwrap();
            let smallest = *s.sigma.last().unwrap();
            assert!(smallest < 1e-6 * t.frobenius_norm(), "seed {seed}, {z}: {smallest}");
        }
    }
}
