use lambertw_series::experiments::*;
use lambertw_series::real::{pow2, Argument};
use lambertw_series::report::{to_csv_string, CsvRow};
use lambertw_series::series::Series;
use lambertw_series::Error;
use rug::{Float, Rational};

fn arg(s: &str) -> Argument {
    Argument::parse(s).unwrap()
}

fn one() -> Rational {
    Rational::from(1)
}

#[test]
fn scan_is_ordered_and_deterministic() {
    let grid = geometric_grid(&arg("2"), &arg("1e6"), 12, 200).unwrap();
    let config = ScanConfig::new(200);
    let a = convergence_scan(Series::Zeta, &one(), &grid, &config);
    let b = convergence_scan(Series::Zeta, &one(), &grid, &config);
    assert_eq!(a, b);
    for (v, x) in a.iter().zip(&grid) {
        assert_eq!(&v.x, x);
    }
    let csv_a = to_csv_string(&a.iter().map(|v| CsvRow::from_verdict(v, 200)).collect::<Vec<_>>(), 30).unwrap();
    let csv_b = to_csv_string(&b.iter().map(|v| CsvRow::from_verdict(v, 200)).collect::<Vec<_>>(), 30).unwrap();
    assert_eq!(csv_a, csv_b);
}

#[test]
fn converged_values_agree_with_reference() {
    // far from x = 2 the tau expansion needs more than the default 64 terms
    let config = ScanConfig::new(200).with_max_terms(200);
    let grid = geometric_grid(&arg("2"), &arg("1e30"), 10, 200).unwrap();
    for series in [Series::Zeta, Series::LogTauZeta] {
        for v in convergence_scan(series, &one(), &grid, &config) {
            let Verdict::Converged(t) = v.verdict else {
                panic!("{series} at {}: {:?}", v.x, v.verdict)
            };
            // the stopping term is below tolerance
            assert!(v.last_term_trace[t - 1] <= config.tol);
            let r = v.reference.unwrap();
            let err = Float::with_val(200, v.value.unwrap() - &r).abs();
            assert!(
                err <= Float::with_val(200, &config.tol * 10u32) * r.abs(),
                "{series} at {}",
                v.x
            );
        }
    }
}

#[test]
fn boundary_point_converges_with_zero_terms() {
    let v = convergence_scan(Series::Comtet, &one(), &[Argument::e()], &ScanConfig::new(200));
    assert!(v[0].verdict.is_converged());
    assert_eq!(v[0].value.as_ref().unwrap(), &1);
    assert!(v[0].last_term_trace.iter().all(|t| t.is_zero()));
}

#[test]
fn comtet_alpha_two_above_boundary() {
    let x = arg("(12/10)*(2*e)^2");
    let config = ScanConfig::new(200)
        .with_max_terms(400)
        .with_tol(Float::with_val(200, 1e-12));
    let v = convergence_scan(Series::Comtet, &Rational::from(2), &[x], &config);
    assert!(v[0].verdict.is_converged(), "{:?}", v[0].verdict);
}

#[test]
fn comtet_diverges_below_e() {
    // sigma = 1/L1 > 1 below e: terms grow geometrically
    let v = convergence_scan(
        Series::Comtet,
        &one(),
        &[arg("2")],
        &ScanConfig::new(200).with_max_terms(40),
    );
    assert_eq!(v[0].verdict, Verdict::Diverging);
}

#[test]
fn out_of_domain_is_a_verdict() {
    let config = ScanConfig::new(128);
    let v = convergence_scan(Series::Zeta, &Rational::from(2), &[arg("100")], &config);
    assert!(matches!(v[0].verdict, Verdict::OutOfDomain(_)));
    let v = convergence_scan(Series::LogTau, &Rational::from(2), &[arg("1e5")], &config);
    assert!(matches!(v[0].verdict, Verdict::OutOfDomain(_)), "{:?}", v[0].verdict);
}

#[test]
fn error_curve_is_exact_at_e() {
    for series in [Series::Comtet, Series::Zeta, Series::LogTau, Series::LogTauZeta] {
        for n in [1, 3, 8] {
            let rows = error_curve(series, n, &one(), &[Argument::e()], 200);
            assert_eq!(rows[0].abs_err.as_ref().unwrap(), &0, "{series} N = {n}");
        }
    }
}

#[test]
fn error_curve_flags_domain_errors() {
    let rows = error_curve(Series::Zeta, 5, &Rational::from(2), &[arg("100"), arg("1e3")], 128);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.approx.is_none() && r.note.is_some()));
    let csv = to_csv_string(
        &rows.iter().map(|r| CsvRow::from_error_row(r, 128)).collect::<Vec<_>>(),
        10,
    )
    .unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with("out_of_domain")));
}

#[test]
fn associated_form_beats_comtet_at_1e10() {
    let x = [arg("1e10")];
    let e4c = error_curve(Series::LogTauZeta, 6, &one(), &x, 200)[0]
        .rel_err
        .clone()
        .unwrap();
    let e2a = error_curve(Series::Comtet, 6, &one(), &x, 200)[0]
        .rel_err
        .clone()
        .unwrap();
    assert!(e4c < e2a);
}

#[test]
fn order_fits_near_one() {
    let x = arg("1e40");
    let ns: Vec<usize> = (2..=10).collect();
    for series in [Series::Comtet, Series::Zeta, Series::LogTauZeta, Series::LogTau] {
        let fit = order_fit(series, &ns, &x, 200).unwrap();
        assert!((0.8..=1.2).contains(&fit.slope), "{series}: {}", fit.slope);
        assert!(!fit.precision_limited);
        assert_eq!(fit.points.len(), 9);
    }
}

#[test]
fn comtet_and_zeta_orders_agree() {
    // both truncation errors scale like (L2/L1)^N
    let x = arg("1e40");
    let ns: Vec<usize> = (2..=10).collect();
    let a = order_fit(Series::Comtet, &ns, &x, 200).unwrap().slope;
    let b = order_fit(Series::Zeta, &ns, &x, 200).unwrap().slope;
    assert!(
        (a - b).abs() <= 0.1,
        "2a slope {a:.4}, 3a slope {b:.4}, gap {:.4}",
        (a - b).abs()
    );
}

#[test]
fn order_fit_reports_precision_floor() {
    // at 64 bits the higher orders of 4c are below the floor
    let fit = order_fit(Series::LogTauZeta, &(2..=10).collect::<Vec<_>>(), &arg("1e40"), 64);
    match fit {
        Ok(f) => assert!(f.precision_limited),
        Err(Error::InsufficientData(_)) => {}
        Err(e) => panic!("unexpected {e}"),
    }
}

#[test]
fn taylor_match_for_w_series() {
    for series in [Series::Zeta, Series::LogTauZeta] {
        let d = taylor_match_check(series, 4, 300).unwrap();
        assert_eq!(d.len(), 4);
        for row in &d {
            assert!(row.deviation <= pow2(300, -50), "{series} order {}", row.order);
        }
    }
    let control = taylor_match_check(Series::Comtet, 4, 300).unwrap();
    assert!(control[1].deviation > 0.1);
    // more terms than the cap still yields at most six coefficients
    assert_eq!(taylor_match_check(Series::Zeta, 8, 128).unwrap().len(), 6);
}

#[test]
fn probe_runs_inside_unit_interval() {
    let grid = probe_grid(6, 128).unwrap();
    for series in [Series::Comtet, Series::LogTauZeta] {
        let v = conjecture_probe(series, &grid, 40, 128).unwrap();
        assert_eq!(v.len(), 6);
    }
    let at_two = conjecture_probe(Series::LogTauZeta, &[arg("2")], 64, 200).unwrap();
    assert!(at_two[0].verdict.is_converged());
}
