//! Exact series against direct numeric evaluation, and report properties.

use num_rational::Rational64;
use qseries_core::numeric::{self, Nome, NomeSample};
use qseries_core::special::{self, AngleTenths, ArgSpec, DenominatorVariant};
use qseries_core::verify::{self, Backend, Expected};
use qseries_core::{dsl, Kernel, PSeries, Real};

const Q: f64 = 0.05;
const ORDER: i64 = 60;
const TERMS: usize = 60;

fn at(s: &PSeries) -> f64 {
    s.evaluate(Q)
}

fn close(series: f64, direct: f64, what: &str) {
    assert!((series - direct).abs() < 1e-8, "{what}: series {series}, direct {direct}");
}

fn real(x: Real) -> f64 {
    x.into()
}

#[test]
fn constructors_match_direct_sums() {
    let x = Real::from(Q);
    for (arg, xa) in [(ArgSpec::Q, Q), (ArgSpec::neg(1), -Q), (ArgSpec::pos(2), Q * Q), (ArgSpec::neg(2), -Q * Q)] {
        let xr = Real::from(xa);
        close(at(&special::phi(arg, ORDER).unwrap()), real(numeric::phi_real(xr, TERMS)), "phi");
        close(at(&special::psi(arg, ORDER).unwrap()), real(numeric::psi_real(xr, TERMS)), "psi");
        close(at(&special::f_sum(arg, ORDER).unwrap()), real(numeric::f_real(xr, TERMS)), "f sum");
        close(at(&special::f_product(arg, ORDER).unwrap()), real(numeric::f_real(xr, TERMS)), "f product");
        close(at(&special::chi(arg, ORDER).unwrap()), real(numeric::chi_real(xr, TERMS)), "chi");
    }
    for k in [1, 3, 5, 7] {
        for (variant, signed) in [(DenominatorVariant::Literal, false), (DenominatorVariant::Signed, true)] {
            let s = special::denominator_sum(k, variant, ArgSpec::Q, ORDER).unwrap();
            let direct = numeric::denominator_sum_real(k, signed, x, TERMS).unwrap();
            close(at(&s), real(direct), "denominator sum");
        }
    }
}

#[test]
fn theta_series_match_complex_evaluation() {
    let sample = NomeSample::polar(Real::from(Q), Rational64::from_integer(0)).unwrap();
    let nome = Nome::plain(&sample);
    for (j, ms) in [(1u8, [0, 1, 3]), (2, [0, 5, 10]), (3, [0, 1, 3]), (4, [0, 2, 4])] {
        for m in ms {
            let s = special::theta_sum(j, AngleTenths(m), ArgSpec::Q, ORDER).unwrap();
            let v = numeric::theta(j, m, &nome, 30).unwrap().value;
            close(at(&s), real(v.re), "theta");
            assert!(real(v.im).abs() < 1e-20);
        }
    }
}

#[test]
fn product_identities_hold_at_a_real_point() {
    let r = |x: f64| Real::from(x);
    let phi = |x| real(numeric::phi_real(r(x), TERMS));
    let psi = |x| real(numeric::psi_real(r(x), TERMS));
    let f = |x| real(numeric::f_real(r(x), TERMS));
    let chi = |x| real(numeric::chi_real(r(x), TERMS));
    let q = Q;
    close(f(-q * q).powi(3), psi(q * q) * phi(-q * q).powi(2), "f^3 = psi phi^2");
    close(phi(-q * q).powi(2), phi(q) * phi(-q), "phi^2(-q^2) = phi(q) phi(-q)");
    close(f(q), chi(q) * f(-q * q), "f(q) = chi(q) f(-q^2)");
    close(
        (phi(q).powi(2) - 5.0 * phi(q.powi(5)).powi(2)) * chi(q),
        -4.0 * f(-q * q).powi(2) * chi(q.powi(5)),
        "lost notebook identity",
    );
}

#[test]
fn documented_differences_vanish_numerically() {
    for (id, text) in dsl::IDENTITY_EXPRESSIONS {
        let v = at(&dsl::expand(text, ORDER).unwrap());
        if *id == "I13a" {
            assert!(v.abs() > 1e-3, "{id}: {v}");
        } else {
            assert!(v.abs() < 1e-12, "{id}: {v}");
        }
    }
}

#[test]
fn passing_is_monotone_in_the_order() {
    for record in verify::registry().iter().filter(|r| r.backend() == Backend::Exact) {
        let high = verify::check_exact_record(record, 40, Kernel::Karatsuba).unwrap();
        for n in [1, 2, 7, 20] {
            let low = verify::check_exact_record(record, n, Kernel::Karatsuba).unwrap();
            if high.pass {
                assert!(low.pass, "{} passes at 40 but not at {n}", record.id);
            }
            assert!(low.matches_expected(record.expected), "{} at {n}", record.id);
        }
    }
}

#[test]
fn kernel_choice_does_not_change_verdicts() {
    for id in ["I4", "I8", "I13a", "I13b"] {
        let a = verify::check_exact(id, 60, Kernel::Naive).unwrap();
        let b = verify::check_exact(id, 60, Kernel::Karatsuba).unwrap();
        assert_eq!((a.pass, a.first_mismatch), (b.pass, b.first_mismatch), "{id}");
    }
}

#[test]
fn suite_at_order_one_passes_on_constant_terms() {
    let mut config = verify::SuiteConfig::new(1);
    config.grid = verify::default_grid();
    let reports = verify::run_all(&config);
    for (report, record) in reports.iter().zip(verify::registry()) {
        assert_eq!(report.id, record.id);
        assert!(report.pass, "{}", report.id);
        assert!(report.matches_expected(record.expected));
    }
}

#[test]
fn suite_at_order_fifty_fails_only_the_printed_variant() {
    let reports = verify::run_all(&verify::SuiteConfig::new(50));
    assert_eq!(reports.len(), 17);
    let failing: Vec<_> = reports.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect();
    assert_eq!(failing, ["I13a"]);
    let record = verify::lookup("I13a").unwrap();
    assert_eq!(record.expected, Expected::FailAtExponent(1));
}
