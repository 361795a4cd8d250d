//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).
//!
//! Criteria cover: the exactly solved symmetric families against the solver,
//! closed-form stationarity, large-q asymptotics, bipartite oracle
//! equivalence, Schmidt reconstruction, the single-qubit quadratic,
//! critical-point identities, the sequential chain, the entanglement-vs-q
//! table emitted by the CLI, and a grid-plus-polish brute-force cross-check.

use geoent::closest::{self, SolverConfig};
use geoent::linalg::hermitian_eig;
use geoent::qstate::{expand_product, overlap, FactorShape, ProductState, PureState};
use geoent::rng::Xoshiro256pp;
use geoent::schmidt::{
    qubit_split_quadratic, reduced_density, schmidt_chain, schmidt_decompose, von_neumann_entropy,
    BipartiteSplit, Side,
};
use geoent::symmetric::{
    asymptotic_nq, binomial, build_state, closed_form_nq, FamilyKind, SymmetricFamily,
};
use num_complex::Complex64;
use std::time::{Duration, Instant};

fn report(name: &str, result: Result<(), String>) {
    match result {
        Ok(()) => println!("{name}: PASS"),
        Err(reason) => {
            println!("{name}: FAIL - {reason}");
            panic!("{name} failed: {reason}");
        }
    }
}

fn check(cond: bool, message: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message.into())
    }
}

fn check_runtime(elapsed: Duration, budget: Duration) -> Result<(), String> {
    check(
        elapsed <= budget,
        format!("runtime {elapsed:?} exceeded budget {budget:?}"),
    )
}

fn random_state(shape: FactorShape, rng: &mut Xoshiro256pp) -> PureState {
    let amps: Vec<Complex64> = (0..shape.total_dim())
        .map(|_| rng.standard_complex())
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let amps = amps.into_iter().map(|a| a / norm).collect();
    PureState::new(shape, amps).expect("normalized by construction")
}

fn random_product(dims: &[usize], rng: &mut Xoshiro256pp) -> ProductState {
    ProductState::new(
        dims.iter()
            .map(|&d| (0..d).map(|_| rng.standard_complex()).collect())
            .collect(),
    )
    .unwrap()
}

/// Critical-point identity checks applied to every converged extremum.
fn assert_critical_identities(
    psi: &PureState,
    report: &closest::ExtremaReport,
    label: &str,
) -> Result<(), String> {
    for e in report.extrema.iter().filter(|e| !e.degenerate) {
        let ov = overlap(psi, &e.product).map_err(|err| err.to_string())?;
        check(
            (ov - Complex64::new(e.norm_product, 0.0)).norm() <= 1e-9,
            format!("{label}: |<psi|phi> - prod N| = {:.3e}", (ov - Complex64::new(e.norm_product, 0.0)).norm()),
        )?;
        check(
            ov.im.abs() <= 1e-9,
            format!("{label}: Im overlap {:.3e}", ov.im),
        )?;
        check(
            (e.dist_sq - (1.0 - e.norm_product)).abs() <= 1e-12,
            format!("{label}: D_C^2 identity"),
        )?;
        check(
            (e.dist_sq_normalized - 2.0 * (1.0 - e.cos_theta)).abs() <= 1e-12,
            format!("{label}: D_N^2 identity"),
        )?;
        check(
            e.norm_product <= 1.0 + 1e-9,
            format!("{label}: Cauchy-Schwarz bound {}", e.norm_product),
        )?;
    }
    Ok(())
}

#[test]
fn criterion_01_w_state_values() {
    report("criterion 1 (W-state solver values)", (|| {
        let start = Instant::now();
        for q in 3..=7usize {
            let qf = q as f64;
            let expected = 1.0 - (1.0 - 1.0 / qf).powf(qf - 1.0);
            let psi = build_state(&SymmetricFamily::new(FamilyKind::W, q).unwrap())
                .map_err(|e| e.to_string())?;
            let report = closest::find_extrema(&psi, &SolverConfig::default())
                .map_err(|e| e.to_string())?;
            check(
                (report.entanglement - expected).abs() <= 1e-7,
                format!("q={q}: {} vs {expected}", report.entanglement),
            )?;
            if q == 3 {
                check(
                    (report.entanglement - 5.0 / 9.0).abs() <= 1e-7,
                    format!("q=3 must give 5/9, got {}", report.entanglement),
                )?;
            }
        }
        check_runtime(start.elapsed(), Duration::from_secs(5))
    })());
}

#[test]
fn criterion_02_dicke_values() {
    report("criterion 2 (Dicke solver values)", (|| {
        let start = Instant::now();
        for (q, p) in [(4usize, 2usize), (5, 2), (6, 3)] {
            let (qf, pf) = (q as f64, p as f64);
            let expected = (pf / qf).powf(pf - 1.0)
                * (1.0 - pf / qf).powf(qf - pf)
                * binomial(q as u64 - 1, p as u64 - 1);
            let psi = build_state(&SymmetricFamily::new(FamilyKind::Dicke(p), q).unwrap())
                .map_err(|e| e.to_string())?;
            let report = closest::find_extrema(&psi, &SolverConfig::default())
                .map_err(|e| e.to_string())?;
            check(
                (report.best().norm_product - expected).abs() <= 1e-7,
                format!("(q,p)=({q},{p}): {} vs {expected}", report.best().norm_product),
            )?;
            if (q, p) == (4, 2) {
                check(
                    (report.best().norm_product - 0.375).abs() <= 1e-7,
                    "Dicke(4,2) must give 3/8".to_string(),
                )?;
            }
        }
        check_runtime(start.elapsed(), Duration::from_secs(10))
    })());
}

#[test]
fn criterion_03_branch_stationarity() {
    report("criterion 3 (closed-form branch stationarity)", (|| {
        let kinds = [
            FamilyKind::GhzP(0.3),
            FamilyKind::GhzP(0.5),
            FamilyKind::RingPairs,
        ];
        for kind in kinds {
            for q in 3..=10usize {
                let family = SymmetricFamily::new(kind.clone(), q).unwrap();
                let psi = build_state(&family).map_err(|e| e.to_string())?;
                let closed = closed_form_nq(&family).map_err(|e| e.to_string())?;
                let phi = closed.ansatz.product_state(q);
                let residual = closest::residual(&psi, &phi).map_err(|e| e.to_string())?;
                check(
                    residual <= 1e-9,
                    format!("{} q={q}: residual {residual:.3e}", kind.label()),
                )?;
                // The ansatz's actual norm product must reproduce the
                // closed-form expression.
                let qf = q as f64;
                let formula = match kind {
                    FamilyKind::GhzP(p) => {
                        let e = 1.0 / (qf - 2.0);
                        p * (1.0 - p) / (p.powf(e) + (1.0 - p).powf(e)).powf(qf - 2.0)
                    }
                    FamilyKind::RingPairs => {
                        4.0 * (qf - 2.0).powf(qf - 2.0) * qf.powf(1.0 - qf)
                    }
                    _ => unreachable!(),
                };
                let ansatz_nq = closed.ansatz.factor_norm().powi(q as i32);
                check(
                    (ansatz_nq - formula).abs() <= 1e-12,
                    format!("{} q={q}: ansatz N^q {ansatz_nq} vs formula {formula}", kind.label()),
                )?;
                check(
                    (closed.n_q_exact - formula).abs() <= 1e-12,
                    format!("{} q={q}: closed form mismatch", kind.label()),
                )?;
            }
        }
        let ring4 = SymmetricFamily::new(FamilyKind::RingPairs, 4).unwrap();
        check(
            (closed_form_nq(&ring4).unwrap().n_q_exact - 0.25).abs() <= 1e-12,
            "ring q=4 must give exactly 1/4".to_string(),
        )
    })());
}

#[test]
fn criterion_04_large_q_asymptotics() {
    report("criterion 4 (large-q asymptotics)", (|| {
        let start = Instant::now();
        for kind in [
            FamilyKind::GhzP(0.3),
            FamilyKind::GhzP(0.5),
            FamilyKind::Dicke(2),
            FamilyKind::Dicke(3),
        ] {
            let family = SymmetricFamily::new(kind.clone(), 40).unwrap();
            let exact = closed_form_nq(&family).map_err(|e| e.to_string())?.n_q_exact;
            let asym = asymptotic_nq(&family).value;
            let rel = ((exact - asym) / exact).abs();
            check(
                rel <= 0.05,
                format!("{} q=40: relative gap {rel:.4}", kind.label()),
            )?;
        }
        let dicke2 = SymmetricFamily::new(FamilyKind::Dicke(2), 40).unwrap();
        let value = asymptotic_nq(&dicke2).value;
        check(
            (value - 0.270671).abs() <= 1e-6,
            format!("Dicke p=2 asymptote {value} vs 0.270671"),
        )?;
        let w_limit = FamilyKind::W.large_q_limit().unwrap();
        check(
            (w_limit - 0.367879).abs() <= 1e-6,
            format!("W limit {w_limit} vs e^-1"),
        )?;
        check_runtime(start.elapsed(), Duration::from_secs(1))
    })());
}

#[test]
fn criterion_05_bipartite_oracle_equivalence() {
    report("criterion 5 (bipartite oracle equivalence)", (|| {
        let start = Instant::now();
        let mut rng = Xoshiro256pp::new(0x51_0a);
        for case in 0..200 {
            let u = 2 + (rng.next_below(7) as usize);
            let v = 2 + (rng.next_below(7) as usize);
            let shape = FactorShape::new(vec![u, v]).unwrap();
            let psi = random_state(shape, &mut rng);
            let cfg = SolverConfig {
                rng_seed: case,
                ..SolverConfig::default()
            };
            let report = closest::find_extrema(&psi, &cfg).map_err(|e| e.to_string())?;

            let split = BipartiteSplit::new(&[0], 2).unwrap();
            let rho = reduced_density(&psi, &split, Side::A).map_err(|e| e.to_string())?;
            let ev = hermitian_eig(&rho.matrix).map_err(|e| e.to_string())?.eigenvalues;
            for e in report.extrema.iter().filter(|e| !e.degenerate) {
                let nearest = ev
                    .iter()
                    .map(|l| (l - e.norm_product).abs())
                    .fold(f64::INFINITY, f64::min);
                check(
                    nearest <= 1e-8,
                    format!("case {case} ({u}x{v}): norm product {} off eigenvalues by {nearest:.3e}", e.norm_product),
                )?;
            }
            check(
                (report.best().norm_product - ev[0]).abs() <= 1e-8,
                format!("case {case}: best {} vs lambda_max {}", report.best().norm_product, ev[0]),
            )?;
        }
        check_runtime(start.elapsed(), Duration::from_secs(60))
    })());
}

#[test]
fn criterion_06_schmidt_reconstruction_and_entropy() {
    report("criterion 6 (Schmidt reconstruction and entropy)", (|| {
        let mut rng = Xoshiro256pp::new(0x5c_11);
        for case in 0..200 {
            // Random shape with n <= 256.
            let shape = loop {
                let factors = 2 + (rng.next_below(3) as usize);
                let dims: Vec<usize> =
                    (0..factors).map(|_| 2 + (rng.next_below(5) as usize)).collect();
                if dims.iter().product::<usize>() <= 256 {
                    break FactorShape::new(dims).unwrap();
                }
            };
            let count = shape.factor_count();
            let psi = random_state(shape, &mut rng);
            let left_len = 1 + (rng.next_below((count - 1) as u64) as usize);
            let mut pool: Vec<usize> = (0..count).collect();
            let mut left = Vec::new();
            for _ in 0..left_len {
                let pick = rng.next_below(pool.len() as u64) as usize;
                left.push(pool.remove(pick));
            }
            let split = BipartiteSplit::new(&left, count).map_err(|e| e.to_string())?;
            let dec = schmidt_decompose(&psi, &split).map_err(|e| e.to_string())?;

            let total: f64 = dec.coefficients.iter().sum();
            check(
                (total - 1.0).abs() <= 1e-10,
                format!("case {case}: sum p = {total}"),
            )?;

            // Reconstruct sum_k sqrt(p_k) |alpha_k><beta_k| against the
            // matricized amplitudes.
            let m = geoent::schmidt::matricize(&psi, &split).map_err(|e| e.to_string())?;
            let (rows, cols) = (m.nrows(), m.ncols());
            let mut err = 0.0f64;
            for r in 0..rows {
                for c in 0..cols {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..dec.coefficients.len() {
                        acc += dec.left_vectors[(r, k)]
                            * dec.right_vectors[(c, k)].conj()
                            * dec.coefficients[k].max(0.0).sqrt();
                    }
                    err += (acc - m[(r, c)]).norm_sqr();
                }
            }
            check(
                err.sqrt() <= 1e-10,
                format!("case {case}: reconstruction error {:.3e}", err.sqrt()),
            )?;

            let ev_a = hermitian_eig(
                &reduced_density(&psi, &split, Side::A).map_err(|e| e.to_string())?.matrix,
            )
            .map_err(|e| e.to_string())?
            .eigenvalues;
            let ev_b = hermitian_eig(
                &reduced_density(&psi, &split, Side::B).map_err(|e| e.to_string())?.matrix,
            )
            .map_err(|e| e.to_string())?
            .eigenvalues;
            for i in 0..ev_a.len().max(ev_b.len()) {
                let a = ev_a.get(i).copied().unwrap_or(0.0);
                let b = ev_b.get(i).copied().unwrap_or(0.0);
                check(
                    (a - b).abs() <= 1e-10,
                    format!("case {case}: rho_A/rho_B eigenvalue gap {:.3e}", (a - b).abs()),
                )?;
            }
        }

        // S of the Bell split is exactly one bit.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(
            FactorShape::qubits(2).unwrap(),
            vec![
                Complex64::new(h, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(h, 0.0),
            ],
        )
        .unwrap();
        let split = BipartiteSplit::new(&[0], 2).unwrap();
        let dec = schmidt_decompose(&bell, &split).map_err(|e| e.to_string())?;
        let s = von_neumann_entropy(&dec.coefficients).map_err(|e| e.to_string())?;
        check((s - 1.0).abs() <= 1e-12, format!("S(Bell) = {s}"))
    })());
}

#[test]
fn criterion_07_single_qubit_quadratic() {
    report("criterion 7 (single-qubit quadratic)", (|| {
        let mut rng = Xoshiro256pp::new(0x9_0b);
        for case in 0..200 {
            let qubits = 2 + (rng.next_below(5) as usize);
            let shape = FactorShape::qubits(qubits).unwrap();
            let psi = random_state(shape, &mut rng);
            let qubit = rng.next_below(qubits as u64) as usize;
            let quad = qubit_split_quadratic(&psi, qubit).map_err(|e| e.to_string())?;
            let split = BipartiteSplit::new(&[qubit], qubits).unwrap();
            let rho = reduced_density(&psi, &split, Side::A).map_err(|e| e.to_string())?;
            let ev = hermitian_eig(&rho.matrix).map_err(|e| e.to_string())?.eigenvalues;
            check(
                (ev[0] - quad.mu_plus).abs() <= 1e-12 && (ev[1] - quad.mu_minus).abs() <= 1e-12,
                format!(
                    "case {case}: mu ({}, {}) vs eig ({}, {})",
                    quad.mu_plus, quad.mu_minus, ev[0], ev[1]
                ),
            )?;
        }
        // Product states have a single nonzero eigenvalue.
        for case in 0..50 {
            let qubits = 2 + (case % 4) as usize;
            let dims = vec![2usize; qubits];
            let phi = random_product(&dims, &mut rng);
            let expanded = expand_product(&phi);
            if expanded.norm_sqr() < 1e-6 {
                continue;
            }
            let psi = expanded.renormalize().map_err(|e| e.to_string())?;
            for qubit in 0..qubits {
                let quad = qubit_split_quadratic(&psi, qubit).map_err(|e| e.to_string())?;
                check(
                    quad.mu_minus <= 1e-10,
                    format!("product case {case} qubit {qubit}: mu_minus {:.3e}", quad.mu_minus),
                )?;
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_08_critical_point_identities() {
    report("criterion 8 (critical-point identities)", (|| {
        let mut rng = Xoshiro256pp::new(0xc8);
        let cfg = SolverConfig {
            restarts: 12,
            ..SolverConfig::default()
        };

        // Random bipartite and qubit states.
        for case in 0..20 {
            let u = 2 + (rng.next_below(5) as usize);
            let v = 2 + (rng.next_below(5) as usize);
            let psi = random_state(FactorShape::new(vec![u, v]).unwrap(), &mut rng);
            let report = closest::find_extrema(&psi, &cfg).map_err(|e| e.to_string())?;
            assert_critical_identities(&psi, &report, &format!("bipartite {case}"))?;
        }
        for case in 0..20 {
            let qubits = 2 + (rng.next_below(3) as usize);
            let psi = random_state(FactorShape::qubits(qubits).unwrap(), &mut rng);
            let report = closest::find_extrema(&psi, &cfg).map_err(|e| e.to_string())?;
            assert_critical_identities(&psi, &report, &format!("qubits {case}"))?;
        }
        // The symmetric families.
        for (kind, q) in [
            (FamilyKind::GhzP(0.5), 3usize),
            (FamilyKind::GhzP(0.3), 4),
            (FamilyKind::W, 5),
            (FamilyKind::RingPairs, 4),
            (FamilyKind::Dicke(2), 5),
        ] {
            let psi = build_state(&SymmetricFamily::new(kind.clone(), q).unwrap())
                .map_err(|e| e.to_string())?;
            let report = closest::find_extrema(&psi, &cfg).map_err(|e| e.to_string())?;
            assert_critical_identities(&psi, &report, &kind.label())?;
        }
        Ok(())
    })());
}

#[test]
fn criterion_09_chain_measure() {
    report("criterion 9 (chain measure)", (|| {
        let start = Instant::now();
        let h = std::f64::consts::FRAC_1_SQRT_2;

        let mut ghz = vec![Complex64::new(0.0, 0.0); 8];
        ghz[0] = Complex64::new(h, 0.0);
        ghz[7] = Complex64::new(h, 0.0);
        let ghz = PureState::new(FactorShape::qubits(3).unwrap(), ghz).unwrap();

        let s = 1.0 / 3.0f64.sqrt();
        let mut w3 = vec![Complex64::new(0.0, 0.0); 8];
        w3[0b100] = Complex64::new(s, 0.0);
        w3[0b010] = Complex64::new(s, 0.0);
        w3[0b001] = Complex64::new(s, 0.0);
        let w3 = PureState::new(FactorShape::qubits(3).unwrap(), w3).unwrap();

        let mut bb = vec![Complex64::new(0.0, 0.0); 16];
        for (i, j) in [(0usize, 0usize), (0, 3), (3, 0), (3, 3)] {
            bb[(i << 2) | j] = Complex64::new(0.5, 0.0);
        }
        let bb = PureState::new(FactorShape::qubits(4).unwrap(), bb).unwrap();

        let all_orders = |n: usize| -> Vec<Vec<usize>> {
            let mut order: Vec<usize> = (0..n).collect();
            let mut out = vec![order.clone()];
            loop {
                let mut i = order.len() - 1;
                while i > 0 && order[i - 1] >= order[i] {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                let mut j = order.len() - 1;
                while order[j] <= order[i - 1] {
                    j -= 1;
                }
                order.swap(i - 1, j);
                order[i..].reverse();
                out.push(order.clone());
            }
            out
        };

        for order in all_orders(3) {
            let chain = schmidt_chain(&ghz, &order).map_err(|e| e.to_string())?;
            check(
                (chain.entanglement_chain - 0.5).abs() <= 1e-10,
                format!("GHZ3 order {order:?}: {}", chain.entanglement_chain),
            )?;
            let chain = schmidt_chain(&w3, &order).map_err(|e| e.to_string())?;
            check(
                (chain.chain_norm - 1.0 / 3.0).abs() <= 1e-10,
                format!("W3 order {order:?}: chain_norm {}", chain.chain_norm),
            )?;
        }
        for order in all_orders(4) {
            let chain = schmidt_chain(&bb, &order).map_err(|e| e.to_string())?;
            check(
                (chain.chain_norm - 0.25).abs() <= 1e-10
                    && (chain.entanglement_chain - 0.75).abs() <= 1e-10,
                format!("Bell x Bell order {order:?}: chain_norm {}", chain.chain_norm),
            )?;
        }
        check_runtime(start.elapsed(), Duration::from_secs(5))
    })());
}

#[test]
fn criterion_10_fig2_reproduction() {
    report("criterion 10 (fig2 CSV/SVG reproduction)", (|| {
        let dir = std::env::temp_dir().join(format!("geoent-acceptance-{}", std::process::id()));
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let csv_a = dir.join("fig2-a.csv");
        let svg_a = dir.join("fig2-a.svg");
        let csv_b = dir.join("fig2-b.csv");
        let svg_b = dir.join("fig2-b.svg");
        for (csv, svg) in [(&csv_a, &svg_a), (&csv_b, &svg_b)] {
            let out = std::process::Command::new(env!("CARGO_BIN_EXE_geoent"))
                .args([
                    "fig2",
                    "--qmin",
                    "3",
                    "--qmax",
                    "20",
                    "--csv",
                    csv.to_str().unwrap(),
                    "--svg",
                    svg.to_str().unwrap(),
                ])
                .output()
                .map_err(|e| e.to_string())?;
            check(out.status.success(), "fig2 run failed".to_string())?;
        }
        check(
            std::fs::read(&svg_a).map_err(|e| e.to_string())?
                == std::fs::read(&svg_b).map_err(|e| e.to_string())?,
            "SVG bytes differ between runs".to_string(),
        )?;
        check(
            std::fs::read(&csv_a).map_err(|e| e.to_string())?
                == std::fs::read(&csv_b).map_err(|e| e.to_string())?,
            "CSV bytes differ between runs".to_string(),
        )?;

        let csv = std::fs::read_to_string(&csv_a).map_err(|e| e.to_string())?;
        let mut series: std::collections::BTreeMap<String, Vec<(usize, f64)>> =
            std::collections::BTreeMap::new();
        for line in csv.lines().skip(1) {
            let mut parts = line.split(',');
            let q: usize = parts.next().unwrap().parse().map_err(|_| "bad q")?;
            let family = parts.next().unwrap().to_string();
            let value: f64 = parts.next().unwrap().parse().map_err(|_| "bad value")?;
            series.entry(family).or_default().push((q, value));
        }
        check(series.len() == 4, format!("expected 4 series, got {}", series.len()))?;

        for (label, rows) in &series {
            let kind = match label.as_str() {
                "w" => FamilyKind::W,
                "ring" => FamilyKind::RingPairs,
                "ghz:0.5" => FamilyKind::GhzP(0.5),
                "dicke:2" => FamilyKind::Dicke(2),
                other => return Err(format!("unexpected family `{other}`")),
            };
            for &(q, value) in rows {
                let family = SymmetricFamily::new(kind.clone(), q).unwrap();
                let expected = closed_form_nq(&family).unwrap().entanglement_branch;
                check(
                    (value - expected).abs() <= 1e-12,
                    format!("{label} q={q}: csv {value} vs closed form {expected}"),
                )?;
            }
            for window in rows.windows(2) {
                let (q0, v0) = window[0];
                let (_q1, v1) = window[1];
                if q0 >= 4 {
                    check(
                        v1 >= v0 - 1e-12,
                        format!("{label}: series not monotone at q={q0}"),
                    )?;
                }
            }
        }
        Ok(())
    })());
}

/// Independent oracle for criterion 11: dense grid over Bloch angles of a
/// normalized product state followed by Nelder-Mead polish of
/// |<psi|phi_hat>|^2. No alternating fixed-point step involved.
mod oracle {
    use super::*;

    fn qubit_vec(theta: f64, phi: f64) -> [Complex64; 2] {
        [
            Complex64::new(theta.cos(), 0.0),
            Complex64::from_polar(theta.sin(), phi),
        ]
    }

    fn overlap_sq(psi: &PureState, angles: &[f64]) -> f64 {
        let qubits = angles.len() / 2;
        let vecs: Vec<[Complex64; 2]> = (0..qubits)
            .map(|k| qubit_vec(angles[2 * k], angles[2 * k + 1]))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (flat, &amp) in psi.amplitudes().iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let mut term = amp.conj();
            for (k, v) in vecs.iter().enumerate() {
                term *= v[(flat >> (qubits - 1 - k)) & 1];
            }
            acc += term;
        }
        acc.norm_sqr()
    }

    /// Standard Nelder-Mead (reflect 1, expand 2, contract 1/2, shrink 1/2)
    /// maximizing the overlap from a given start.
    fn nelder_mead_polish(psi: &PureState, start: &[f64]) -> f64 {
        let dim = start.len();
        let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim + 1);
        simplex.push((overlap_sq(psi, start), start.to_vec()));
        for i in 0..dim {
            let mut vertex = start.to_vec();
            vertex[i] += 0.15;
            simplex.push((overlap_sq(psi, &vertex), vertex));
        }
        for _ in 0..4000 {
            simplex.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            if simplex[0].0 - simplex[dim].0 < 1e-14 {
                break;
            }
            let centroid: Vec<f64> = (0..dim)
                .map(|i| simplex[..dim].iter().map(|(_, v)| v[i]).sum::<f64>() / dim as f64)
                .collect();
            let worst = simplex[dim].clone();
            let at = |scale: f64| -> Vec<f64> {
                (0..dim)
                    .map(|i| centroid[i] + scale * (centroid[i] - worst.1[i]))
                    .collect()
            };
            let reflected = at(1.0);
            let fr = overlap_sq(psi, &reflected);
            if fr > simplex[0].0 {
                let expanded = at(2.0);
                let fe = overlap_sq(psi, &expanded);
                simplex[dim] = if fe > fr {
                    (fe, expanded)
                } else {
                    (fr, reflected)
                };
            } else if fr > simplex[dim - 1].0 {
                simplex[dim] = (fr, reflected);
            } else {
                let contracted = at(-0.5);
                let fc = overlap_sq(psi, &contracted);
                if fc > simplex[dim].0 {
                    simplex[dim] = (fc, contracted);
                } else {
                    let best = simplex[0].1.clone();
                    for entry in simplex.iter_mut().skip(1) {
                        for (x, b) in entry.1.iter_mut().zip(best.iter()) {
                            *x = b + 0.5 * (*x - b);
                        }
                        entry.0 = overlap_sq(psi, &entry.1);
                    }
                }
            }
        }
        simplex
            .iter()
            .map(|(value, _)| *value)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Max of |<psi|phi_hat>|^2 over normalized product states.
    pub fn best_overlap_sq(psi: &PureState) -> f64 {
        let qubits = psi.shape().factor_count();
        let theta_steps = 7usize; // [0, pi/2]
        let phi_steps = 10usize; // [0, 2pi)
        let mut ranked: Vec<(f64, Vec<f64>)> = Vec::new();
        let mut config = vec![0.0f64; 2 * qubits];
        let mut indices = vec![0usize; 2 * qubits];
        'grid: loop {
            for k in 0..qubits {
                config[2 * k] =
                    indices[2 * k] as f64 * std::f64::consts::FRAC_PI_2 / (theta_steps - 1) as f64;
                config[2 * k + 1] =
                    indices[2 * k + 1] as f64 * std::f64::consts::TAU / phi_steps as f64;
            }
            ranked.push((overlap_sq(psi, &config), config.clone()));
            if ranked.len() > 512 {
                ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
                ranked.truncate(64);
            }
            let mut pos = 0;
            loop {
                if pos == indices.len() {
                    break 'grid;
                }
                let radix = if pos % 2 == 0 { theta_steps } else { phi_steps };
                indices[pos] += 1;
                if indices[pos] < radix {
                    break;
                }
                indices[pos] = 0;
                pos += 1;
            }
        }
        ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        // Polish a diverse subset of the best grid points: greedily take up
        // to 12 leaders pairwise separated by at least 0.4 rad in some angle.
        let mut starts: Vec<&Vec<f64>> = Vec::new();
        for (_, config) in ranked.iter().take(64) {
            if starts.len() >= 12 {
                break;
            }
            let far_enough = starts.iter().all(|kept| {
                kept.iter()
                    .zip(config.iter())
                    .any(|(a, b)| (a - b).abs() > 0.4)
            });
            if far_enough || starts.is_empty() {
                starts.push(config);
            }
        }
        starts
            .iter()
            .map(|start| nelder_mead_polish(psi, start))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[test]
fn criterion_11_brute_force_cross_check() {
    report("criterion 11 (grid-plus-polish cross-check)", (|| {
        let start = Instant::now();
        let mut rng = Xoshiro256pp::new(0xb1_1e);
        for case in 0..50 {
            let psi = random_state(FactorShape::qubits(3).unwrap(), &mut rng);
            let cfg = SolverConfig {
                rng_seed: case,
                ..SolverConfig::default()
            };
            let report = closest::find_extrema(&psi, &cfg).map_err(|e| e.to_string())?;
            let oracle = oracle::best_overlap_sq(&psi);
            check(
                (report.best().norm_product - oracle).abs() <= 1e-5,
                format!(
                    "case {case}: solver {} vs oracle {oracle}",
                    report.best().norm_product
                ),
            )?;
        }
        // Two-qubit states against the same oracle (tolerance 1e-6).
        for case in 0..12 {
            let psi = random_state(FactorShape::qubits(2).unwrap(), &mut rng);
            let cfg = SolverConfig {
                rng_seed: 1000 + case,
                ..SolverConfig::default()
            };
            let report = closest::find_extrema(&psi, &cfg).map_err(|e| e.to_string())?;
            let oracle = oracle::best_overlap_sq(&psi);
            check(
                (report.best().norm_product - oracle).abs() <= 1e-6,
                format!(
                    "2-qubit case {case}: solver {} vs oracle {oracle}",
                    report.best().norm_product
                ),
            )?;
        }
        check_runtime(start.elapsed(), Duration::from_secs(120))
    })());
}
