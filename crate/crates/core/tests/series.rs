use lambertw_series::oracle::{solve_phi, solve_w};
use lambertw_series::real::{pow2, Argument};
use lambertw_series::series::{
    default_tolerance, eval_comtet, eval_lagrange_w, eval_log_tau, eval_log_tau_zeta, eval_zeta, evaluate,
    log_shift_residual, phi_via_w, variables_from, Series,
};
use lambertw_series::stirling::StirlingTables;
use lambertw_series::Error;
use rug::ops::Pow;
use rug::{Float, Rational};

const W2: &str = "0.852605502013725491346472414695317466898453300151403508772107";

fn arg(s: &str) -> Argument {
    Argument::parse(s).unwrap()
}

fn one() -> Rational {
    Rational::from(1)
}

fn abs_diff(a: &Float, b: &Float) -> Float {
    Float::with_val(a.prec().max(b.prec()), a - b).abs()
}

fn zero_tol() -> Float {
    Float::new(64)
}

#[test]
fn every_series_is_exact_at_e() {
    let tables = StirlingTables::default();
    let vars = variables_from(&Argument::e(), &one(), 200).unwrap();
    for n in [1, 5, 20] {
        for series in [Series::Comtet, Series::Zeta, Series::LogTau, Series::LogTauZeta] {
            let r = evaluate(series, &vars, n, &zero_tol(), &tables).unwrap();
            assert!(r.correction.is_zero(), "{series} N={n}: {}", r.correction);
            assert_eq!(r.value, 1, "{series} N={n}");
        }
        let w = eval_lagrange_w(&vars.sigma, &vars.tau, n, &tables).unwrap();
        assert!(w.value.is_zero());
    }
}

#[test]
fn comtet_at_e_for_other_alpha_is_base() {
    // at x = e every correction carries L2 = 0, whatever alpha is
    let tables = StirlingTables::default();
    let vars = variables_from(&Argument::e(), &Rational::from(3), 128).unwrap();
    let r = eval_comtet(&vars, 10, &zero_tol(), &tables).unwrap();
    assert!(r.correction.is_zero());
    assert_eq!(r.value, 1);
}

#[test]
fn tau_for_large_x_alpha_two() {
    let x = arg("1e10");
    let lo = variables_from(&x, &Rational::from(2), 128).unwrap();
    let hi = variables_from(&x, &Rational::from(2), 256).unwrap();
    let want = Float::with_val(256, Float::parse("0.2724431377398926421754065002709781218237").unwrap());
    assert!(abs_diff(&hi.tau, &want) < pow2(256, -125));
    assert!(abs_diff(&lo.tau, &hi.tau) < pow2(128, -124));
    // tau = sigma ln(alpha / sigma)
    let check = Float::with_val(256, Float::with_val(256, hi.alpha_value() / &hi.sigma).ln()) * &hi.sigma;
    assert!(abs_diff(&check, &hi.tau) < pow2(256, -250));
    assert!(hi.zeta > 0 && hi.zeta < 1);
}

#[test]
fn comtet_large_x_within_error_scale() {
    let tables = StirlingTables::default();
    let x = arg("1e10");
    let vars = variables_from(&x, &one(), 200).unwrap();
    let r = eval_comtet(&vars, 8, &zero_tol(), &tables).unwrap();
    let w = solve_w(&x, 200).unwrap().root;
    let err = abs_diff(&r.value, &w);
    let scale = Float::with_val(200, Float::with_val(200, &vars.l2 / &vars.l1).pow(9u32));
    assert!(err < scale, "err {} scale {}", err.to_f64(), scale.to_f64());
}

#[test]
fn comtet_converges_past_the_boundary_for_alpha_two() {
    let tables = StirlingTables::default();
    let x = arg("1.05*(2*e)^2");
    let vars = variables_from(&x, &Rational::from(2), 128).unwrap();
    let r = eval_comtet(&vars, 30, &zero_tol(), &tables).unwrap();
    let tail: Vec<f64> = r.term_magnitudes.iter().map(|t| t.to_f64()).collect();
    assert!(tail[29] < tail[9], "{tail:?}");
    let want = solve_phi(&x, &Rational::from(2), 128).unwrap().root;
    assert!(abs_diff(&r.value, &want) < 1e-3);
}

#[test]
fn comtet_matches_lagrange_w_route() {
    let tables = StirlingTables::default();
    for (x, alpha) in [("1e10", 1), ("50", 1), ("1e6", 2), ("1e30", 3)] {
        let alpha = Rational::from(alpha);
        let vars = variables_from(&arg(x), &alpha, 200).unwrap();
        for n in [1, 4, 12] {
            let direct = eval_comtet(&vars, n, &zero_tol(), &tables).unwrap();
            let w = eval_lagrange_w(&vars.sigma, &vars.tau, n, &tables).unwrap();
            let a = vars.alpha_value();
            let rebuilt = Float::with_val(200, &vars.l1 - Float::with_val(200, &a * &vars.l2))
                + Float::with_val(200, &a * &w.value);
            assert!(abs_diff(&direct.value, &rebuilt) < pow2(200, -190), "x={x} n={n}");
        }
    }
}

#[test]
fn lagrange_w_solves_its_equation() {
    let tables = StirlingTables::default();
    let sigma = Float::with_val(200, Float::parse("0.1").unwrap());
    let tau = Float::with_val(200, Float::parse("0.05").unwrap());
    let w = eval_lagrange_w(&sigma, &tau, 20, &tables).unwrap().value;
    let residual = Float::with_val(
        200,
        -Float::with_val(200, (-w.clone()).exp_m1()) + Float::with_val(200, &sigma * &w) - &tau,
    );
    assert!(residual.abs() < 1e-12);
    let want = Float::with_val(
        200,
        Float::parse("0.0464189842893686928076194517091663346941043012").unwrap(),
    );
    assert!(abs_diff(&w, &want) < 1e-12);
}

#[test]
fn log_tau_is_lagrange_w_in_shifted_variables() {
    let tables = StirlingTables::default();
    for x in ["1e4", "1e10", "40"] {
        let vars = variables_from(&arg(x), &one(), 200).unwrap();
        let eta = vars.eta.clone().unwrap();
        let ltau = vars.ltau.clone().unwrap();
        let tau2 = Float::with_val(200, &eta * &ltau);
        for n in [1, 6, 12] {
            let direct = eval_log_tau(&vars, n, &zero_tol(), &tables).unwrap();
            let v = eval_lagrange_w(&eta, &tau2, n, &tables).unwrap();
            let rebuilt = Float::with_val(200, &vars.l1 - &vars.l2) - &ltau + &v.value;
            assert!(abs_diff(&direct.value, &rebuilt) < pow2(200, -190), "x={x} n={n}");
        }
    }
}

#[test]
fn log_tau_zeta_is_zeta_in_shifted_variables() {
    // the L_tau expansion is the zeta expansion with sigma -> eta, tau -> eta L_tau
    let tables = StirlingTables::default();
    let vars = variables_from(&arg("1e5"), &one(), 200).unwrap();
    let r = eval_log_tau_zeta(&vars, 10, &zero_tol(), &tables).unwrap();
    let w = solve_w(&arg("1e5"), 200).unwrap().root;
    let r3 = eval_zeta(&vars, 10, &zero_tol(), &tables).unwrap();
    assert!(abs_diff(&r.value, &w) < abs_diff(&r3.value, &w));
}

#[test]
fn w_of_two_by_both_associated_series() {
    let tables = StirlingTables::default();
    let vars = variables_from(&arg("2"), &one(), 200).unwrap();
    let want = Float::with_val(200, Float::parse(W2).unwrap());
    for series in [Series::Zeta, Series::LogTauZeta] {
        let r = evaluate(series, &vars, 30, &zero_tol(), &tables).unwrap();
        let rel = Float::with_val(200, abs_diff(&r.value, &want) / &want);
        assert!(rel < 1e-10, "{series}: {}", rel.to_f64());
    }
}

#[test]
fn log_tau_zeta_beats_comtet_at_six_terms() {
    let tables = StirlingTables::default();
    let x = arg("1e10");
    let vars = variables_from(&x, &one(), 200).unwrap();
    let w = solve_w(&x, 232).unwrap().root;
    let e4c = abs_diff(&eval_log_tau_zeta(&vars, 6, &zero_tol(), &tables).unwrap().value, &w);
    let e2a = abs_diff(&eval_comtet(&vars, 6, &zero_tol(), &tables).unwrap().value, &w);
    // roughly a factor L1^6 apart; allow two orders of magnitude slack
    let l1_6 = Float::with_val(200, (&vars.l1).pow(6u32)).to_f64();
    let ratio = (e2a.clone() / e4c.clone()).to_f64();
    assert!(ratio > l1_6 / 100.0, "ratio {ratio:e} vs L1^6 {l1_6:e}");
    let _ = eval_log_tau(&vars, 12, &zero_tol(), &tables).unwrap();
}

#[test]
fn log_tau_needs_tau_below_one() {
    let tables = StirlingTables::default();
    let vars = variables_from(&arg("30"), &Rational::from(3), 64).unwrap();
    let err = eval_comtet(&vars, 4, &zero_tol(), &tables);
    assert!(err.is_ok());
    // alpha = 3 is rejected by the alpha = 1 series before tau is looked at
    assert!(matches!(
        eval_log_tau(&vars, 4, &zero_tol(), &tables),
        Err(Error::UnsupportedParameter(_))
    ));
}

#[test]
fn cancellation_is_absorbed_at_large_n() {
    // 300 terms of the alpha = 2 expansion: the inner sums cancel by ~100 bits
    let tables = StirlingTables::new(310);
    let x = arg("1.1*(2*e)^2");
    let alpha = Rational::from(2);
    let vars = variables_from(&x, &alpha, 200).unwrap();
    let r = eval_comtet(&vars, 300, &zero_tol(), &tables).unwrap();
    assert!(r.working_precision > 200 + 32 + 50, "{}", r.working_precision);
    let want = solve_phi(&x, &alpha, 200).unwrap().root;
    assert!(
        abs_diff(&r.value, &want) < 1e-20,
        "{}",
        abs_diff(&r.value, &want).to_f64()
    );
}

#[test]
fn early_stop_and_tail() {
    let tables = StirlingTables::default();
    let vars = variables_from(&arg("1e20"), &one(), 200).unwrap();
    let tol = Float::with_val(200, 1e-30);
    let r = eval_zeta(&vars, 30, &tol, &tables).unwrap();
    assert!(r.converged);
    assert!(r.terms_used < 30);
    assert!(r.last_term < tol);
    assert!(r.tail_estimate < r.last_term);
    assert_eq!(r.term_magnitudes.len(), r.terms_used);

    let r = eval_zeta(&vars, 3, &tol, &tables).unwrap();
    assert!(!r.converged);
    assert_eq!(r.terms_used, 3);
}

#[test]
fn defining_equation_residual_shrinks() {
    let tables = StirlingTables::default();
    let x = arg("1e6");
    let vars = variables_from(&x, &one(), 200).unwrap();
    let ln_x = x.ln(232);
    let mut previous = f64::INFINITY;
    for n in [2, 6, 12, 24] {
        let y = eval_log_tau_zeta(&vars, n, &zero_tol(), &tables).unwrap().value;
        let y = Float::with_val(232, &y);
        // |y e^y - x| / x = |exp(ln y + y - ln x) - 1|
        let res = (Float::with_val(232, y.ln_ref()) + &y - &ln_x).exp_m1().abs().to_f64();
        assert!(res < previous, "N={n}: {res:e}");
        previous = res;
    }
    assert!(previous < 1e-40);
}

#[test]
fn reduction_to_w() {
    let tables = StirlingTables::default();
    let tol = default_tolerance(200);
    let x = arg("4*e^2");
    let two = Rational::from(2);
    let r = phi_via_w(&x, &two, 10, Series::Zeta, &tol, 200, &tables).unwrap();
    assert_eq!(r.value, 2);

    // phi_via_w is alpha times the W series at the transformed point
    let x = arg("1e20");
    let r = phi_via_w(&x, &two, 10, Series::LogTauZeta, &Float::new(200), 200, &tables).unwrap();
    let reduced = x.reduce_for_alpha(&two).unwrap();
    let vars = variables_from(&reduced, &one(), 200).unwrap();
    let direct = eval_log_tau_zeta(&vars, 10, &Float::new(200), &tables).unwrap();
    assert_eq!(r.value, Float::with_val(200, &direct.value * 2u32));

    let want = solve_phi(&x, &two, 200).unwrap().root;
    let mut previous = f64::INFINITY;
    for n in [2, 5, 10] {
        let r = phi_via_w(&x, &two, n, Series::LogTauZeta, &Float::new(200), 200, &tables).unwrap();
        let err = abs_diff(&r.value, &want).to_f64();
        assert!(err < previous);
        previous = err;
    }
    let vars_big = variables_from(&reduced, &one(), 200).unwrap();
    let scale = Float::with_val(200, &vars_big.l2 / Float::with_val(200, vars_big.l1.square_ref()))
        .pow(10u32)
        .to_f64();
    assert!(previous < 2.0 * scale, "{previous:e} vs {scale:e}");
}

#[test]
fn reduction_outside_series_domain() {
    let tables = StirlingTables::default();
    let tol = default_tolerance(128);
    let err = phi_via_w(&Argument::e(), &Rational::from(3), 20, Series::Zeta, &tol, 128, &tables).unwrap_err();
    match err {
        Error::Domain(msg) => assert!(msg.contains("0.46"), "{msg}"),
        other => panic!("{other:?}"),
    }
    // the oracle still answers there
    let r = solve_phi(&Argument::e(), &Rational::from(3), 128).unwrap();
    assert!(abs_diff(&r.root, &Float::with_val(128, 1)) < pow2(128, -120));
}

#[test]
fn log_shift_identity_spot_checks() {
    for (s, t) in [("0.3", "0.4"), ("0.05", "0.8")] {
        let sigma = Float::with_val(200, Float::parse(s).unwrap());
        let tau = Float::with_val(200, Float::parse(t).unwrap());
        let r = log_shift_residual(&sigma, &tau, 200).unwrap();
        assert!(r < pow2(200, -180), "{s} {t}: {r}");
    }
}

#[test]
fn log_tau_against_comtet_at_1e4() {
    let tables = StirlingTables::default();
    let vars = variables_from(&arg("1e4"), &one(), 200).unwrap();
    let w = solve_w(&arg("1e4"), 232).unwrap().root;
    let e4a = abs_diff(&eval_log_tau(&vars, 12, &zero_tol(), &tables).unwrap().value, &w);
    let e2a = abs_diff(&eval_comtet(&vars, 12, &zero_tol(), &tables).unwrap().value, &w);
    // errors of both truncations from an independent 60-digit evaluation;
    // at this x the eta expansion is the less accurate of the two
    let close = |got: &Float, want: f64| (got.to_f64() / want - 1.0).abs() < 1e-12;
    assert!(close(&e4a, 3.5101029201205750914e-10), "4a {e4a}");
    assert!(close(&e2a, 4.4504526343756412869e-11), "2a {e2a}");
    assert!(e4a > e2a);
}

#[test]
fn term_magnitudes_eventually_decrease() {
    let tables = StirlingTables::new(130);
    let cases = [
        (Series::Zeta, "2"),
        (Series::Zeta, "10"),
        (Series::Zeta, "1e3"),
        (Series::LogTauZeta, "2"),
        (Series::LogTauZeta, "1e6"),
        (Series::Comtet, "10"),
        (Series::Comtet, "1e10"),
        (Series::LogTau, "1e5"),
    ];
    for (series, x) in cases {
        let vars = variables_from(&arg(x), &one(), 200).unwrap();
        let r = evaluate(series, &vars, 60, &zero_tol(), &tables).unwrap();
        // single terms dip near sign changes of their inner sums; the
        // envelope over blocks of ten decreases
        let block_max: Vec<Float> = r.term_magnitudes[10..]
            .chunks(10)
            .map(|c| c.iter().max_by(|a, b| a.partial_cmp(b).unwrap()).unwrap().clone())
            .collect();
        assert!(block_max.windows(2).all(|w| w[1] < w[0]), "{series} at {x}");
    }
}
