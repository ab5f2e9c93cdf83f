use branchcut::hem::{self, HemError, Network, Verdict};
use branchcut::PrecisionContext;
use num_complex::Complex64;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(256).unwrap()
}

fn three_bus(c: PrecisionContext) -> Network {
    Network::from_json(include_str!("../../../data/three_bus.json"), c).unwrap()
}

/// Plain f64 Gauss-Seidel on
/// `sum_k Y_ik V_k + a y_i V_i = a conj(S_i) / conj(V_i)` with the slack at 1.
fn gauss_seidel(net: &Network, alpha: f64) -> Vec<Complex64> {
    let n = net.buses().len();
    let mut y = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for br in net.branches() {
        let g = br.y_series.to_c64();
        y[br.from][br.from] += g;
        y[br.to][br.to] += g;
        y[br.from][br.to] -= g;
        y[br.to][br.from] -= g;
    }
    let mut v = vec![Complex64::new(1.0, 0.0); n];
    for _ in 0..5000 {
        let mut step: f64 = 0.0;
        for i in net.pq_buses() {
            let bus = &net.buses()[i];
            let mut rhs = alpha * bus.s.to_c64().conj() / v[i].conj();
            for k in 0..n {
                if k != i {
                    rhs -= y[i][k] * v[k];
                }
            }
            let next = rhs / (y[i][i] + alpha * bus.y_shunt.to_c64());
            step = step.max((next - v[i]).norm());
            v[i] = next;
        }
        if step < 1e-15 {
            break;
        }
    }
    v
}

#[test]
fn two_bus_coefficients_follow_the_binomial_series() {
    let c = ctx();
    let net = Network::two_bus(c.real(10.0), c.real(-1.0), c);
    let vs = hem::series_to_order(&net, 10, c).unwrap();
    // V = (1 + sqrt(1 - 0.4 a)) / 2
    let mut binom = 1.0;
    for n in 1..=10 {
        binom *= (0.5 - (n as f64 - 1.0)) / n as f64;
        let want = 0.5 * binom * (-0.4f64).powi(n as i32);
        let got = vs.v(1)[n].to_c64();
        assert!((got.re - want).abs() < 1e-15 * (1.0 + want.abs()), "order {n}: {got} vs {want}");
        assert!(got.im.abs() < 1e-30);
    }
}

#[test]
fn three_bus_solution_matches_gauss_seidel() {
    let c = ctx();
    let net = three_bus(c);
    let sol = hem::solve(&net, 1.0, 40, 1e-12, c).unwrap();
    assert_eq!(sol.report.verdict, Verdict::Converged);
    let volts = sol.voltages.unwrap();
    let oracle = gauss_seidel(&net, 1.0);
    for (a, b) in volts.iter().zip(&oracle) {
        assert!((a.to_c64() - b).norm() < 1e-10, "{} vs {b}", a.to_c64());
    }
    assert!(hem::mismatch(&net, &volts, 1.0).unwrap() < 1e-12);
}

#[test]
fn low_order_coefficients_match_finite_differences() {
    let c = ctx();
    let net = three_bus(c);
    let vs = hem::series_to_order(&net, 3, c).unwrap();
    let h = 1e-3;
    let (plus, minus, mid) = (gauss_seidel(&net, h), gauss_seidel(&net, -h), gauss_seidel(&net, 0.0));
    for i in net.pq_buses() {
        let d1 = (plus[i] - minus[i]) / (2.0 * h);
        let d2 = (plus[i] - 2.0 * mid[i] + minus[i]) / (2.0 * h * h);
        assert!((vs.v(i)[1].to_c64() - d1).norm() < 1e-5, "bus {i} first order");
        assert!((vs.v(i)[2].to_c64() - d2).norm() < 1e-4, "bus {i} second order");
    }
}

#[test]
fn conjugated_network_has_conjugated_coefficients() {
    let c = ctx();
    let net = three_bus(c);
    let a = hem::series_to_order(&net, 12, c).unwrap();
    let b = hem::series_to_order(&net.conjugated(), 12, c).unwrap();
    for i in 0..net.buses().len() {
        for (x, y) in a.v(i).iter().zip(b.v(i)) {
            assert!((&x.conj() - y).abs_f64() < 1e-60);
        }
    }
}

#[test]
fn reciprocal_series_stays_consistent() {
    let c = ctx();
    let vs = hem::series_to_order(&three_bus(c), 25, c).unwrap();
    for n in 0..=25 {
        assert!(vs.convolution_residual(n) < 1e-60, "order {n}");
    }
}

#[test]
fn unloaded_network_stays_flat() {
    let c = ctx();
    let net = Network::from_json(include_str!("../../../data/unloaded.json"), c).unwrap();
    let vs = hem::series_to_order(&net, 5, c).unwrap();
    for i in 0..net.buses().len() {
        assert!(vs.v(i)[1..].iter().all(|x| x.is_zero()));
    }
}

#[test]
fn two_bus_snbp_is_at_the_fold() {
    let c = ctx();
    let est = hem::snbp_estimate(&Network::two_bus(c.real(10.0), c.real(-1.0), c), 30, 1e6, c).unwrap();
    assert!(est.is_stable());
    assert!((est.alpha_star - 2.5).abs() < 0.025, "{}", est.alpha_star);
    let sol = hem::solve(&Network::two_bus(c.real(10.0), c.real(-1.0), c), 2.6, 40, 1e-10, c).unwrap();
    assert_eq!(sol.report.verdict, Verdict::Nonconvergent);
}

#[test]
fn malformed_networks_are_rejected() {
    let c = ctx();
    let two_slacks = r#"{"buses": [{"id": 1, "kind": "slack"}, {"id": 2, "kind": "slack"}],
        "branches": [{"from": 1, "to": 2, "y_series": [1, -3]}]}"#;
    assert!(matches!(Network::from_json(two_slacks, c), Err(HemError::InvalidNetwork(_))));
    let island = r#"{"buses": [{"id": 1, "kind": "slack"}, {"id": 2, "kind": "pq"}, {"id": 3, "kind": "pq"}],
        "branches": [{"from": 1, "to": 2, "y_series": [1, -3]}]}"#;
    assert!(matches!(Network::from_json(island, c), Err(HemError::InvalidNetwork(_))));
    let unknown = "{\"buses\": [],\n \"lines\": []}";
    assert!(matches!(Network::from_json(unknown, c), Err(HemError::Parse { line: 2, .. })));
}
