use adhestring::cli_io::config::{parse_config, Diagnostic, RunConfig, SolverKind};
use adhestring::diagnostics::{
    detect_singularities, entropy_residual, seeded_test_bank, summarize_entropy, weak_residual, DetectorConfig,
};
use adhestring::initial_conditions::{IcFamily, IcSpec, InitialCondition};
use adhestring::potentials::PotentialSpec;
use adhestring::scalar::sup_distance;
use adhestring::solvers::{
    solve_characteristic_split, solve_dalembert_picard, solve_leapfrog, Grid1D, SolutionRecord, SolveOptions,
    SourceRule, SplitStep, WaveState,
};
use proptest::prelude::*;

fn potential_strategy() -> impl Strategy<Value = PotentialSpec<f64>> {
    prop_oneof![
        Just(PotentialSpec::Exact),
        (0.01..0.5f64).prop_map(PotentialSpec::Tilde),
        (0.01..0.5f64).prop_map(PotentialSpec::Bar),
        (0.01..1.9f64).prop_map(PotentialSpec::Quad),
        (0.02..0.5f64).prop_map(PotentialSpec::Mollified),
    ]
}

fn leapfrog(grid: &Grid1D<f64>, pot: &PotentialSpec<f64>, fam: IcFamily<f64>) -> SolutionRecord<f64> {
    let ic = InitialCondition::new(fam, grid.length).unwrap();
    solve_leapfrog(grid, pot, &ic, &SolveOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn potential_is_even_and_derivative_odd(pot in potential_strategy(), u in -3.0..3.0f64) {
        prop_assert_eq!(pot.phi(-u), pot.phi(u));
        prop_assert_eq!(pot.phi_prime(-u), -pot.phi_prime(u));
    }

    #[test]
    fn derivative_matches_difference_quotient(pot in potential_strategy(), u in -3.0..3.0f64) {
        let h = 1e-6;
        prop_assume!(pot.breakpoints().iter().all(|b| (u - b).abs() > 10.0 * h));
        let fd = (pot.phi(u + h) - pot.phi(u - h)) / (2.0 * h);
        // mollified moments are Simpson-accurate to about 1e-6
        prop_assert!((fd - pot.phi_prime(u)).abs() < 2e-5, "{} at {}: {} vs {}", pot, u, fd, pot.phi_prime(u));
    }
}

#[test]
fn uniform_data_stays_uniform_bitwise() {
    let grid = Grid1D::new(10.0, 101, 0.9, 5.0).unwrap();
    for pot in [PotentialSpec::Exact, PotentialSpec::Bar(0.1), PotentialSpec::Mollified(0.2)] {
        let rec = leapfrog(&grid, &pot, IcFamily::Uniform { u0: 0.3, u1: 1.7 });
        for s in &rec.snapshots {
            assert!(s.u.iter().all(|&u| u.to_bits() == s.u[0].to_bits()), "{pot} at t={}", s.t);
        }
    }
}

#[test]
fn pointwise_convergence_of_uniform_run() {
    // bonded oscillation u = c cos(√2 t)
    let mut errs = Vec::new();
    for nx in [101, 201, 401] {
        let grid = Grid1D::new(10.0, nx, 0.5, 3.0).unwrap();
        let rec = leapfrog(&grid, &PotentialSpec::Exact, IcFamily::Uniform { u0: 0.8, u1: 0.0 });
        let err = rec
            .snapshots
            .iter()
            .map(|s| (s.u[nx / 2] - 0.8 * (2f64.sqrt() * s.t).cos()).abs())
            .fold(0.0, f64::max);
        errs.push(err);
    }
    assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
}

#[test]
fn disturbances_travel_at_unit_speed() {
    let nx = 201;
    let grid = Grid1D::<f64>::new(10.0, nx, 1.0, 2.0).unwrap();
    let x = grid.nodes();
    let base: Vec<f64> = x.iter().map(|&x| 0.5 * (0.3 * x).cos()).collect();
    let mut bumped = base.clone();
    let (lo, hi) = (95, 105);
    for (i, u) in bumped.iter_mut().enumerate().take(hi + 1).skip(lo) {
        *u += 0.05 * (1.0 + (std::f64::consts::PI * (i as f64 - 100.0) / 5.0).cos());
    }
    let tab = |u0: Vec<f64>| IcFamily::Tabulated { x: x.clone(), u0, u1: vec![0.0; nx] };
    let a = leapfrog(&grid, &PotentialSpec::Exact, tab(base));
    let b = leapfrog(&grid, &PotentialSpec::Exact, tab(bumped));
    for (n, (sa, sb)) in a.snapshots.iter().zip(&b.snapshots).enumerate() {
        for i in 0..nx {
            let outside = i + n < lo || i > hi + n;
            if outside {
                assert_eq!(sa.u[i], sb.u[i], "level {n}, node {i}");
            }
        }
    }
}

#[test]
fn smooth_problem_converges_at_second_order() {
    // λ = 0.8 puts T = 1 on a level of every grid
    let pot = PotentialSpec::Mollified(0.3);
    let fam = IcFamily::C2Cubic { xi0: 0.006, xi1: 0.5 };
    let finals: Vec<Vec<f64>> = [201, 401, 801]
        .iter()
        .map(|&nx| {
            let grid = Grid1D::new(10.0, nx, 0.8, 1.0).unwrap();
            leapfrog(&grid, &pot, fam.clone()).final_state().u.clone()
        })
        .collect();
    let coarse = |v: &[f64], k: usize| v.iter().step_by(k).copied().collect::<Vec<_>>();
    let d1 = sup_distance(&finals[0], &coarse(&finals[1], 2));
    let d2 = sup_distance(&coarse(&finals[1], 2), &coarse(&finals[2], 4));
    let order = (d1 / d2).log2();
    assert!(order >= 1.9, "observed order {order} ({d1:e}, {d2:e})");
}

#[test]
fn smooth_potential_conserves_energy_under_refinement() {
    let pot = PotentialSpec::Mollified(0.3);
    let fam = IcFamily::MollifiedQuadratic { xi0: 0.05, xi1: 0.3, eta: 0.3 };
    let drift = |nx: usize| {
        let grid = Grid1D::new(10.0, nx, 0.9, 3.0).unwrap();
        let rec = leapfrog(&grid, &pot, fam.clone());
        let e0 = rec.energy_series[0].total;
        rec.energy_series.iter().map(|e| (e.total - e0).abs() / e0).fold(0.0, f64::max)
    };
    let (a, b) = (drift(201), drift(401));
    assert!(a < 1e-2 && b < a / 3.0, "{a:e} -> {b:e}");
}

#[test]
fn three_solvers_agree_on_smooth_problem() {
    let grid = Grid1D::new(10.0, 401, 1.0, 1.0).unwrap();
    let pot = PotentialSpec::Mollified(0.2);
    let ic = InitialCondition::new(IcFamily::C2Cubic { xi0: 0.006, xi1: 1.2 }, 10.0).unwrap();
    let opts = SolveOptions { split_step: SplitStep::Midpoint, ..SolveOptions::default() };
    let cs = solve_characteristic_split(&grid, &pot, &ic, &opts).unwrap();
    let pc = solve_dalembert_picard(&grid, &pot, &ic, 1.0, 200, &opts).unwrap();
    // λ = 0.8 also lands on T = 1
    let lf_grid = Grid1D { courant: 0.8, ..grid };
    let lf = solve_leapfrog(&lf_grid, &pot, &ic, &opts).unwrap();
    let d_cs = sup_distance(&cs.final_state().u, &pc.final_state().u);
    let d_lf = sup_distance(&lf.final_state().u, &pc.final_state().u);
    assert!(d_cs < 5e-3 && d_lf < 5e-3, "charsplit {d_cs:e}, leapfrog {d_lf:e}");
}

#[test]
fn source_rules_agree_without_crossings() {
    let grid = Grid1D::new(10.0, 201, 0.9, 2.0).unwrap();
    let ic = InitialCondition::new(IcFamily::Uniform { u0: 0.5, u1: 0.1 }, 10.0).unwrap();
    let run = |source_rule| {
        let opts = SolveOptions { source_rule, ..SolveOptions::default() };
        solve_leapfrog(&grid, &PotentialSpec::Exact, &ic, &opts).unwrap()
    };
    assert_eq!(run(SourceRule::Nodal).snapshots, run(SourceRule::CrossingResolved).snapshots);
}

fn scaled(rec: &SolutionRecord<f64>, c: f64) -> SolutionRecord<f64> {
    let mut out = rec.clone();
    for s in &mut out.snapshots {
        for a in [&mut s.u, &mut s.v, &mut s.w] {
            a.iter_mut().for_each(|x| *x *= c);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn detector_is_scale_equivariant(k in -6i32..6, negative in any::<bool>()) {
        let grid = Grid1D::new(10.0, 201, 0.9, 2.0).unwrap();
        let rec = leapfrog(&grid, &PotentialSpec::Exact, IcFamily::C1ArcShiftMiddle { xi0: 0.7, xi1: -1.2, a: 6.0 });
        let c = if negative { -(2f64.powi(k)) } else { 2f64.powi(k) };
        let a = detect_singularities(&rec, &DetectorConfig::default());
        let b = detect_singularities(&scaled(&rec, c), &DetectorConfig::default());
        let key = |m: &adhestring::diagnostics::CharacteristicMap<f64>| {
            m.points.iter().map(|p| (p.level, p.x.to_bits(), p.kind)).collect::<Vec<_>>()
        };
        prop_assert_eq!(key(&a), key(&b));
    }
}

#[test]
fn glued_uniform_oscillation_has_no_entropy_production() {
    let grid = Grid1D::new(10.0, 401, 0.9, 3.0).unwrap();
    let rec = leapfrog(&grid, &PotentialSpec::Exact, IcFamily::Uniform { u0: 0.7, u1: 0.0 });
    let res = entropy_residual(&rec, &PotentialSpec::Exact).unwrap();
    let s = summarize_entropy(&res, None, 0);
    assert!(s.max_abs_smooth < 1e-3, "{s:?}");
}

#[test]
fn weak_residual_of_rest_state_vanishes() {
    let grid = Grid1D::new(10.0, 101, 0.9, 2.0).unwrap();
    let rec = leapfrog(&grid, &PotentialSpec::Exact, IcFamily::Uniform { u0: 0.0, u1: 0.0 });
    let bank = seeded_test_bank(7, 12, 2.0, 10.0);
    assert!(weak_residual(&rec, &PotentialSpec::Exact, &bank).iter().all(|r| r.value == 0.0));
}

#[test]
fn weak_residual_detects_corrupted_record() {
    // a smooth 1e-2 perturbation that solves nothing; white noise of the
    // same size mostly averages out against the bumps
    let grid = Grid1D::new(10.0, 2001, 0.9, 2.0).unwrap();
    let clean = adhestring::experiments::regularity_example_record(&grid).unwrap();
    let mut corrupted = clean.clone();
    let dx = grid.dx();
    let xs = grid.nodes();
    for s in &mut corrupted.snapshots {
        let k = 3.0 * std::f64::consts::PI / grid.length;
        let u: Vec<f64> = s.u.iter().zip(&xs).map(|(&u, &x)| u + 1e-2 * (k * x).cos() * (3.0 * s.t).cos()).collect();
        *s = WaveState::new(s.t, u, s.v.clone(), dx);
    }
    let bank = seeded_test_bank(42, 16, 2.0, 10.0);
    let worst = |r: &SolutionRecord<f64>| {
        weak_residual(r, &PotentialSpec::Exact, &bank).iter().map(|w| w.relative()).fold(0.0, f64::max)
    };
    let (bad, good) = (worst(&corrupted), worst(&clean));
    assert!(bad > 1e-3 && bad > 20.0 * good, "{bad} vs {good}");
}

fn config_strategy() -> impl Strategy<Value = RunConfig> {
    let ic = prop_oneof![
        (-0.01..0.01f64, -2.0..2.0f64).prop_map(|(xi0, xi1)| IcFamily::C2Cubic { xi0, xi1 }),
        (-1.0..1.0f64, -2.0..2.0f64, 5.5..9.0f64).prop_map(|(xi0, xi1, a)| IcFamily::C1ArcShiftHalf { xi0, xi1, a }),
        (-1.0..1.0f64, -2.0..2.0f64, 0.05..0.5f64).prop_map(|(xi0, xi1, eta)| IcFamily::MollifiedQuadratic { xi0, xi1, eta }),
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(u0, u1)| IcFamily::Uniform { u0, u1 }),
    ];
    let solver = prop_oneof![Just(SolverKind::Leapfrog), Just(SolverKind::Picard), Just(SolverKind::CharSplit)];
    (
        (8.0..12.0f64, 8usize..3000, prop::option::of(0.05..=1.0f64), 0.0..20.0f64),
        (potential_strategy(), ic, solver, 1usize..50),
        (prop::collection::btree_set(prop::sample::select(Diagnostic::ALL.to_vec()), 0..6), any::<u64>(), "[a-z][a-z0-9_/]{0,12}"),
        (any::<bool>(), any::<bool>(), 1usize..500, 1usize..64, 1.0..20.0f64, 1.0..20.0f64),
    )
        .prop_map(|((length, nx, courant, final_time), (potential, ic, solver, stride), (diagnostics, seed, output), rest)| {
            let (nodal, euler, picard_iters, bank_size, jump_factor, kink_factor) = rest;
            let courant = if solver == SolverKind::CharSplit { courant.map(|_| 1.0) } else { courant };
            RunConfig {
                length,
                nx,
                courant,
                final_time,
                potential,
                ic: IcSpec::Family(ic),
                solver,
                stride,
                diagnostics,
                seed,
                output: output.into(),
                source: if nodal { SourceRule::Nodal } else { SourceRule::CrossingResolved },
                split_step: if euler { SplitStep::Euler } else { SplitStep::Midpoint },
                picard_iters,
                bank_size,
                jump_factor,
                kink_factor,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn config_round_trips(cfg in config_strategy()) {
        prop_assume!(cfg.validate().is_ok());
        let text = cfg.serialize();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.serialize(), text);
    }
}

#[test]
fn single_precision_tracks_double() {
    let g32 = Grid1D::<f32>::new(10.0, 201, 0.9, 2.0).unwrap();
    let g64 = Grid1D::<f64>::new(10.0, 201, 0.9, 2.0).unwrap();
    let ic32 = InitialCondition::new(IcFamily::C2Cubic { xi0: 0.003f32, xi1: 0.3 }, 10.0).unwrap();
    let ic64 = InitialCondition::new(IcFamily::C2Cubic { xi0: 0.003f64, xi1: 0.3 }, 10.0).unwrap();
    let a = solve_leapfrog(&g32, &PotentialSpec::Exact, &ic32, &SolveOptions::default()).unwrap();
    let b = solve_leapfrog(&g64, &PotentialSpec::Exact, &ic64, &SolveOptions::default()).unwrap();
    let diff = a.final_state().u.iter().zip(&b.final_state().u).map(|(&x, &y)| (x as f64 - y).abs()).fold(0.0, f64::max);
    // glued throughout, so no threshold crossing amplifies rounding
    assert!(diff < 1e-5, "{diff}");
}
