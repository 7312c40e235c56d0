use coop_noma::alternating::{alternate, Scheme, DEFAULT_MAX_ITER, DEFAULT_TOL};
use coop_noma::harness::{parse_grid, run_experiment, ExperimentConfig, ExperimentKind, SchemeKind};
use coop_noma::model::{sample_channel, PathLossSpec, SystemParams};
use coop_noma::numerics::{eigh, norm, svd, CMatrix, HermitianMatrix, C64};
use coop_noma::optimal_tx::rho_star;
use coop_noma::rates::{audit, combined_sinr_d, rate_r, sinr_d_phase1, sinr_d_phase2};
use coop_noma::rx_filter::{optimal_receive_filter, sic_margin, FilterGeometry};
use proptest::prelude::*;

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)), n)
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    complex_vec(rows * cols).prop_map(move |d| CMatrix::from_row_slice(rows, cols, &d))
}

fn hermitian() -> impl Strategy<Value = HermitianMatrix> {
    (1usize..=6).prop_flat_map(|n| matrix(n, n)).prop_map(|m| HermitianMatrix::symmetrize(m.plus(&m.adjoint())))
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

proptest! {
    #[test]
    fn eigh_reconstructs_with_unitary_vectors(a in hermitian()) {
        let e = eigh(&a);
        let n = a.dim();
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let scale = 1.0 + a.frobenius_norm();
        for i in 0..n {
            for j in 0..n {
                let vi = e.vector(i);
                let vj = e.vector(j);
                let g = dot(&vi, &vj);
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g - C64::new(want, 0.0)).norm() < 1e-10);
            }
            // A v = λ v
            let av = a.as_matrix().mul_vec(&e.vector(i));
            let err: f64 = av.iter().zip(e.vector(i)).map(|(x, v)| (x - v * e.values[i]).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(err < 1e-10 * scale);
        }
    }

    #[test]
    fn svd_reconstructs(m in (1usize..=4, 1usize..=8).prop_flat_map(|(r, c)| matrix(r, c))) {
        let d = svd(&m);
        prop_assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(d.singular_values.iter().all(|s| *s >= 0.0));
        // ‖A v₀‖ equals the largest singular value.
        let top = norm(&m.mul_vec(&d.v.column(0)));
        prop_assert!((top - d.singular_values[0]).abs() < 1e-10 * (1.0 + d.singular_values[0]));
        prop_assert!((norm(&d.v.column(0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_star_minimizes(b in 1e-3f64..1e3, c in 1e-3f64..1e3, r in 1e-4f64..0.9999) {
        let (rho, value) = rho_star(b, c).unwrap();
        prop_assert!(rho > 0.0 && rho < 1.0);
        prop_assert!((value - (b + c + 2.0 * (b * c).sqrt())).abs() <= 1e-12 * value);
        prop_assert!(b / r + c / (1.0 - r) >= value * (1.0 - 1e-12));
    }

    #[test]
    fn filter_parametrization(h1 in complex_vec(4), h2 in complex_vec(4), l in 0.0f64..=1.0, m in 0.0f64..=1.0) {
        let g = FilterGeometry::from_vectors(h1.clone(), h2.clone());
        let w = g.filter(l);
        prop_assert!((norm(&w) - 1.0).abs() < 1e-12);
        prop_assert!((dot(&h1, &w).norm_sqr() - g.objective(l)).abs() < 1e-10);
        let h2n: f64 = h2.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((dot(&h2, &w).norm_sqr() - l * h2n).abs() < 1e-10);
        // Concave along the parametrization, peaked at the matched filter.
        let mid = g.objective(0.5 * (l + m));
        prop_assert!(mid >= 0.5 * (g.objective(l) + g.objective(m)) - 1e-12);
        prop_assert!(g.objective(g.matched_lambda()) >= g.objective(l) - 1e-12);
    }

    #[test]
    fn optimal_filter_is_feasible_and_best(
        h1 in complex_vec(4), h2 in complex_vec(4), rho in 0.05f64..1.0, rd in 0.0f64..4.0
    ) {
        let g = FilterGeometry::from_vectors(h1, h2);
        let p = SystemParams::default().with_rd_min(rd);
        let Ok(sol) = optimal_receive_filter(&g, rho, &p) else {
            prop_assert!(sic_margin(&g, 1.0, rho, &p) < 0.0);
            return Ok(());
        };
        let scale = 2.0 * rho * p.ps * (1.0 + g.h1.iter().chain(&g.h2).map(|v| v.norm_sqr()).sum::<f64>());
        prop_assert!(sic_margin(&g, sol.lambda, rho, &p) >= -1e-9 * scale);
        let best = g.objective(sol.lambda);
        for k in 0..=200 {
            let l = k as f64 / 200.0;
            if sic_margin(&g, l, rho, &p) >= 0.0 {
                prop_assert!(g.objective(l) <= best * (1.0 + 1e-9) + 1e-15);
            }
        }
    }

    #[test]
    fn grid_is_ascending_and_inclusive(a in 0u32..20, len in 0u32..40, step in 1u32..8) {
        let (start, step) = (a as f64 * 0.25, step as f64 * 0.25);
        let stop = start + len as f64 * step;
        let g = parse_grid(&format!("{start}:{stop}:{step}")).unwrap();
        prop_assert_eq!(g.len(), len as usize + 1);
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
        prop_assert!((g[g.len() - 1] - stop).abs() < 1e-9);
    }

    #[test]
    fn truncation_keeps_leading_antennas(seed in any::<u64>(), n in 1usize..=8) {
        let p = SystemParams { n: 8, ..Default::default() };
        let full = sample_channel(&p, &PathLossSpec::default(), seed);
        let t = full.truncate_relay(n);
        prop_assert_eq!(t.h_sr.cols(), n);
        prop_assert_eq!(&t.h_rd[..], &full.h_rd[..n]);
        prop_assert_eq!(t.h_sr.column(n - 1), full.h_sr.column(n - 1));
        prop_assert_eq!(&t.h_sd, &full.h_sd);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn designs_pass_the_audit(seed in any::<u64>(), rd in 0.0f64..2.0) {
        let p = SystemParams::default().with_rd_min(rd);
        let ch = sample_channel(&p, &PathLossSpec::default(), seed);
        for scheme in [Scheme::Optimal, Scheme::Zf] {
            if let Ok((sol, trace)) = alternate(&ch, &p, scheme, DEFAULT_MAX_ITER, DEFAULT_TOL) {
                prop_assert!(audit(&ch, &sol, &p, 1e-6).all_ok());
                prop_assert!(trace.is_monotone(1e-8));
                prop_assert!(rate_r(&ch, &sol, &p) >= 0.0);
                let sum = sinr_d_phase1(&ch, &sol, &p) + sinr_d_phase2(&ch, &sol, &p);
                prop_assert!((combined_sinr_d(&ch, &sol, &p) - sum).abs() <= 1e-12 * (1.0 + sum));
            }
        }
    }

    #[test]
    fn optimal_dominates_zf_per_instance(seed in any::<u64>(), rd in 0.0f64..2.0) {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::RateRegion,
            trials: 1,
            base_seed: seed,
            rdmin_grid: format!("{rd}"),
            schemes: vec![SchemeKind::Optimal, SchemeKind::Zf],
            ..Default::default()
        };
        let res = run_experiment(&cfg).unwrap();
        let (opt, zf) = (&res.rows[0], &res.rows[1]);
        if zf.outage_prob == 0.0 {
            prop_assert_eq!(opt.outage_prob, 0.0);
            prop_assert!(opt.mean_rate_r >= zf.mean_rate_r - 1e-6);
        }
    }
}
