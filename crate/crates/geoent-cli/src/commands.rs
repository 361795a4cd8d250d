//! Implementations of the five subcommands and their report printing.

use crate::{svg, Failure, GlobalArgs, DEFAULT_MAX_QUBITS, MAX_QUBITS_ENV};
use geoent::closest::{self, SolveError, SolverConfig};
use geoent::qstate::{read_state, PureState};
use geoent::schmidt::{
    chain_min_over_orders, qubit_split_quadratic, schmidt_chain, schmidt_decompose,
    von_neumann_entropy, BipartiteSplit, ChainSearchConfig, SchmidtChain,
};
use geoent::symmetric::{
    asymptotic_nq, build_state, closed_form_nq, fig2_table, FamilyKind, SymmetricFamily,
};
use std::fmt::Write as _;
use std::time::Instant;

/// FNV-1a 64-bit digest of the input bytes, for the report header.
fn fnv1a_digest(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn max_amplitudes() -> Result<usize, Failure> {
    let cap = match std::env::var(MAX_QUBITS_ENV) {
        Ok(text) => text.parse::<u32>().map_err(|_| {
            Failure::usage(format!("{MAX_QUBITS_ENV} must be a small integer, got `{text}`"))
        })?,
        Err(_) => DEFAULT_MAX_QUBITS,
    };
    Ok(1usize << cap.min(30))
}

struct LoadedState {
    path: String,
    digest: u64,
    state: PureState,
}

fn load_state(global: &GlobalArgs) -> Result<LoadedState, Failure> {
    let path = global
        .state
        .as_ref()
        .ok_or_else(|| Failure::usage("--state <FILE> is required"))?;
    let bytes = std::fs::read(path)
        .map_err(|err| Failure::usage(format!("cannot read `{path}`: {err}")))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::usage(format!("`{path}` is not valid UTF-8")))?;
    let state = read_state(&text).map_err(|err| Failure::usage(format!("{path}: {err}")))?;
    let cap = max_amplitudes()?;
    if state.shape().total_dim() > cap {
        return Err(Failure::usage(format!(
            "state has {} amplitudes, above the cap of {cap}; raise {MAX_QUBITS_ENV} to override",
            state.shape().total_dim()
        )));
    }
    Ok(LoadedState {
        path: path.clone(),
        digest: fnv1a_digest(&bytes),
        state,
    })
}

fn solver_config(global: &GlobalArgs) -> SolverConfig {
    SolverConfig {
        restarts: global.restarts,
        tol_residual: global.tol,
        rng_seed: global.seed,
        ..SolverConfig::default()
    }
}

fn print_header(global: &GlobalArgs, command: &str, loaded: Option<&LoadedState>) {
    if global.quiet {
        return;
    }
    println!("# command: {command}");
    if let Some(loaded) = loaded {
        println!(
            "# input: {} digest=fnv1a:{:016x} dims={:?} n={}",
            loaded.path,
            loaded.digest,
            loaded.state.shape().dims(),
            loaded.state.shape().total_dim()
        );
    }
    println!(
        "# config: seed={} restarts={} tol={:e}",
        global.seed, global.restarts, global.tol
    );
}

fn print_wall_time(global: &GlobalArgs, start: Instant) {
    if !global.quiet {
        println!("# wall_time_ms: {:.3}", start.elapsed().as_secs_f64() * 1e3);
    }
}

pub fn measure(global: &GlobalArgs, all_extrema: bool) -> Result<(), Failure> {
    let start = Instant::now();
    let loaded = load_state(global)?;
    print_header(global, "measure", Some(&loaded));
    let cfg = solver_config(global);
    let report = match closest::find_extrema(&loaded.state, &cfg) {
        Ok(report) => report,
        Err(SolveError::NoConvergence { best_residual }) => {
            return Err(Failure::new(
                2,
                format!("no restart converged (best residual {best_residual:.3e})"),
            ))
        }
        Err(other) => return Err(Failure::usage(other.to_string())),
    };
    let best = report.best();
    println!("entanglement = {:.12}", report.entanglement);
    println!("cos_theta    = {:.12}", best.cos_theta);
    println!("dist_sq      = {:.12}", best.dist_sq);
    println!("dist_sq_norm = {:.12}", best.dist_sq_normalized);
    println!(
        "extrema: {} distinct ({} degenerate)",
        report.extrema.len(),
        report.extrema.iter().filter(|e| e.degenerate).count()
    );
    if all_extrema {
        for (idx, e) in report.extrema.iter().enumerate() {
            let norms = e
                .norms
                .iter()
                .map(|n| format!("{n:.12}"))
                .collect::<Vec<_>>()
                .join(" ");
            println!(
                "extremum[{idx}]: norm_product={:.12} cos_theta={:.12} dist_sq={:.12} residual={:.3e} sweeps={}{} norms=[{}]",
                e.norm_product,
                e.cos_theta,
                e.dist_sq,
                e.residual,
                e.sweeps,
                if e.degenerate { " degenerate" } else { "" },
                norms
            );
        }
    }
    print_wall_time(global, start);
    Ok(())
}

fn parse_factor_list(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Failure::usage(format!("bad factor index `{tok}`")))
        })
        .collect()
}

pub fn schmidt(
    global: &GlobalArgs,
    split: Option<String>,
    qubit: Option<usize>,
) -> Result<(), Failure> {
    let start = Instant::now();
    let loaded = load_state(global)?;
    print_header(global, "schmidt", Some(&loaded));
    let factor_count = loaded.state.shape().factor_count();

    let (split, quadratic_qubit) = match (split, qubit) {
        (Some(spec), None) => {
            let (left_text, right_text) = spec
                .split_once('|')
                .ok_or_else(|| Failure::usage("--split expects \"<left>|<right>\", e.g. 0,2|1,3"))?;
            let left = parse_factor_list(left_text)?;
            let right = parse_factor_list(right_text)?;
            let split = BipartiteSplit::from_parts(&left, &right, factor_count)
                .map_err(|err| Failure::usage(err.to_string()))?;
            (split, None)
        }
        (None, Some(k)) => {
            let split = BipartiteSplit::new(&[k], factor_count)
                .map_err(|err| Failure::usage(err.to_string()))?;
            (split, Some(k))
        }
        _ => return Err(Failure::usage("exactly one of --split or --qubit is required")),
    };

    let dec = schmidt_decompose(&loaded.state, &split)
        .map_err(|err| Failure::usage(err.to_string()))?;
    println!(
        "split: {:?} | {:?}",
        split.left_factors(),
        split.right_factors()
    );
    for (k, p) in dec.coefficients.iter().enumerate() {
        println!("p[{k}] = {p:.12}");
    }
    let entropy = von_neumann_entropy(&dec.coefficients)
        .map_err(|err| Failure::usage(err.to_string()))?;
    println!("entropy_bits = {entropy:.12}");
    if let Some(k) = quadratic_qubit {
        let quad = qubit_split_quadratic(&loaded.state, k)
            .map_err(|err| Failure::usage(err.to_string()))?;
        println!("C        = {:.12}", quad.c_invariant);
        println!("mu_plus  = {:.12}", quad.mu_plus);
        println!("mu_minus = {:.12}", quad.mu_minus);
        println!("theta_max = {:.12}  (cos theta_max = mu_plus convention)", quad.theta_max);
        println!("theta_c   = {:.12}  (cos theta_C = sqrt(mu_plus) convention)", quad.theta_c);
    }
    if let Some(path) = &global.csv {
        let mut out = String::from("k,p\n");
        for (k, p) in dec.coefficients.iter().enumerate() {
            let _ = writeln!(out, "{k},{p:.11e}");
        }
        std::fs::write(path, out)
            .map_err(|err| Failure::usage(format!("cannot write `{path}`: {err}")))?;
        if !global.quiet {
            println!("# csv: {path}");
        }
    }
    print_wall_time(global, start);
    Ok(())
}

fn print_chain(chain: &SchmidtChain) {
    for (s, stage) in chain.stages.iter().enumerate() {
        let coeffs = stage
            .coefficients
            .iter()
            .map(|p| format!("{p:.12}"))
            .collect::<Vec<_>>()
            .join(", ");
        println!(
            "stage {}: qubit {} | rest  p = [{}]  selected {} (p = {:.12})",
            s + 1,
            stage.qubit,
            coeffs,
            stage.selected,
            stage.coefficients[stage.selected]
        );
    }
    println!("chain_norm = {:.12}", chain.chain_norm);
    println!("entanglement_chain = {:.12}", chain.entanglement_chain);
}

pub fn chain(
    global: &GlobalArgs,
    order: Option<String>,
    min_over_orders: bool,
) -> Result<(), Failure> {
    let start = Instant::now();
    let loaded = load_state(global)?;
    print_header(global, "chain", Some(&loaded));
    match (order, min_over_orders) {
        (Some(spec), false) => {
            let order = parse_factor_list(&spec)?;
            let chain = schmidt_chain(&loaded.state, &order)
                .map_err(|err| Failure::usage(err.to_string()))?;
            println!("order: {order:?}");
            print_chain(&chain);
        }
        (None, true) => {
            let cfg = ChainSearchConfig::default();
            let (best_order, chain) = chain_min_over_orders(&loaded.state, &cfg)
                .map_err(|err| Failure::usage(err.to_string()))?;
            println!("best_order: {best_order:?}");
            print_chain(&chain);
        }
        _ => return Err(Failure::usage("exactly one of --order or --min-over-orders is required")),
    }
    print_wall_time(global, start);
    Ok(())
}

fn parse_family(spec: &str) -> Result<FamilyKind, Failure> {
    let lower = spec.trim().to_ascii_lowercase();
    if lower == "w" {
        return Ok(FamilyKind::W);
    }
    if lower == "ring" {
        return Ok(FamilyKind::RingPairs);
    }
    if let Some(p_text) = lower.strip_prefix("ghz:") {
        let p: f64 = p_text
            .parse()
            .map_err(|_| Failure::usage(format!("bad ghz weight `{p_text}`")))?;
        return Ok(FamilyKind::GhzP(p));
    }
    if let Some(p_text) = lower.strip_prefix("dicke:") {
        let p: usize = p_text
            .parse()
            .map_err(|_| Failure::usage(format!("bad dicke excitation count `{p_text}`")))?;
        return Ok(FamilyKind::Dicke(p));
    }
    Err(Failure::usage(format!(
        "unknown family `{spec}`; expected ghz:<p> | w | ring | dicke:<p>"
    )))
}

pub fn family(global: &GlobalArgs, spec: &str, q: usize, verify: bool) -> Result<(), Failure> {
    let start = Instant::now();
    print_header(global, "family", None);
    let kind = parse_family(spec)?;
    let family =
        SymmetricFamily::new(kind.clone(), q).map_err(|err| Failure::usage(err.to_string()))?;
    if verify && q > 7 {
        return Err(Failure::usage("--verify supports q <= 7"));
    }
    let cap = max_amplitudes()?;
    if 1usize << q > cap {
        return Err(Failure::usage(format!(
            "q={q} gives {} amplitudes, above the cap of {cap}; raise {MAX_QUBITS_ENV} to override",
            1usize << q
        )));
    }
    let state = build_state(&family).map_err(|err| Failure::usage(err.to_string()))?;
    let closed = closed_form_nq(&family).map_err(|err| Failure::usage(err.to_string()))?;
    let nonzero = state.amplitudes().iter().filter(|a| a.norm() > 0.0).count();

    println!("family = {}  q = {q}", kind.label());
    println!("state: {nonzero} nonzero amplitudes over {}", 1usize << q);
    println!("N^q (symmetric-ansatz branch) = {:.12}", closed.n_q_exact);
    println!(
        "entanglement_branch = {:.12}  (symmetric-ansatz branch, not necessarily the global measure)",
        closed.entanglement_branch
    );
    println!(
        "ansatz: alpha0 = {:.12}  alpha1 = {:.12}",
        closed.ansatz.alpha0, closed.ansatz.alpha1
    );
    let residual = closest::residual(&state, &closed.ansatz.product_state(q))
        .map_err(|err| Failure::usage(err.to_string()))?;
    println!("ansatz stationarity residual = {residual:.3e}");
    let asym = asymptotic_nq(&family);
    println!(
        "asymptotic N^q = {:.12}{}",
        asym.value,
        if asym.closed_formula {
            ""
        } else {
            "  (no large-q formula; exact value shown)"
        }
    );
    if let Some(limit) = kind.large_q_limit() {
        println!("large-q limit of N^q = {limit:.12}");
    }

    if verify {
        let cfg = solver_config(global);
        let report = closest::find_extrema(&state, &cfg)
            .map_err(|err| Failure::usage(err.to_string()))?;
        println!("solver best norm_product = {:.12}", report.best().norm_product);
        let matched = report
            .extrema
            .iter()
            .any(|e| !e.degenerate && (e.norm_product - closed.n_q_exact).abs() < 1e-7);
        if matched {
            println!("solver cross-check: branch found among extrema");
        } else {
            println!(
                "solver cross-check: branch not reached by descent restarts (stationary by residual {residual:.3e})"
            );
        }
    }
    print_wall_time(global, start);
    Ok(())
}

/// The four series of the entanglement-vs-q figure, in report order.
pub fn fig2_families() -> Vec<FamilyKind> {
    vec![
        FamilyKind::W,
        FamilyKind::Dicke(2),
        FamilyKind::GhzP(0.5),
        FamilyKind::RingPairs,
    ]
}

pub fn fig2(global: &GlobalArgs, qmin: usize, qmax: usize) -> Result<(), Failure> {
    let start = Instant::now();
    print_header(global, "fig2", None);
    if qmin < 3 || qmin > qmax {
        return Err(Failure::usage(format!(
            "need 3 <= qmin <= qmax, got qmin={qmin} qmax={qmax}"
        )));
    }
    let families = fig2_families();
    let rows =
        fig2_table(qmin, qmax, &families).map_err(|err| Failure::usage(err.to_string()))?;

    let mut csv = String::from("q,family,entanglement\n");
    for row in &rows {
        let _ = writeln!(csv, "{},{},{:.11e}", row.q, row.family, row.entanglement);
    }
    match &global.csv {
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|err| Failure::usage(format!("cannot write `{path}`: {err}")))?;
            if !global.quiet {
                println!("# csv: {path} ({} rows)", rows.len());
            }
        }
        None => print!("{csv}"),
    }
    if let Some(path) = &global.svg {
        let chart = svg::line_chart(&rows, &families, qmin, qmax);
        std::fs::write(path, chart)
            .map_err(|err| Failure::usage(format!("cannot write `{path}`: {err}")))?;
        if !global.quiet {
            println!("# svg: {path}");
        }
    }
    print_wall_time(global, start);
    Ok(())
}
