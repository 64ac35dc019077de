use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmatrix::bialgebra::{
    build_bialgebra_double, classify, cocycle, rr_bracket, schouten, Classification,
};
use rmatrix::dialgebra::{
    bracket_r_jacobi_residual, fit_mcybe_constant, homomorphism_residual, mcybe_residual,
};
use rmatrix::factorization::{factor, propagate, SplitKind};
use rmatrix::lax::{integrate, involution_scan, random_tridiagonal, IntegratorConfig, Trajectory};
use rmatrix::liealg::{sl, PolynomialObservable};
use rmatrix::toda::{
    band_matrix, bm_lax_matrix, bm_rhs, cartan_to_flaschka, cartan_toda_lax, integrate_bm,
    integrate_flaschka, lax_from_flaschka, open_toda_lax, toda_algebra, toda_rhs, CartanCoordinates,
    ShiftLattice, TodaChain,
};
use serde_json::{json, Value};

use crate::inputs::{
    build_endomorphism, build_tensor, load_algebra, load_matrix, load_r_file, resolve_algebra, rows,
};
use crate::report::{tol, Checks};
use crate::{
    AlgebraArgs, ChainArgs, CliError, Command, CompareArgs, ExpectedClass, FactoriseArgs, FlowArgs,
    FlowSystem, KindArg, Outcome, RunManifest, StepArgs, TodaArgs, TodaVariant, VerifyArgs,
    VerifyBialgebraArgs,
};

pub(crate) fn dispatch(m: &RunManifest, scale: f64) -> Result<Outcome, CliError> {
    let mut checks = Checks::new(scale);
    let mut csv = None;
    let data = match &m.command {
        Command::Verify(a) => verify(a, m.seed, scale, &mut checks)?,
        Command::VerifyBialgebra(a) => verify_bialgebra(a, scale, &mut checks)?,
        Command::Flow(a) => {
            let (data, body) = flow(a, m.seed, &mut checks)?;
            csv = Some(body);
            data
        }
        Command::Factorise(a) => factorise(a, &mut checks)?,
        Command::Compare(a) => compare(a, m.seed, &mut checks)?,
        Command::Toda(a) => toda(a, m.seed, &mut checks)?,
        Command::Algebra(a) => algebra(a, scale, &mut checks)?,
    };
    Ok(Outcome {
        report: checks.finish(m.command.name(), m.seed, data),
        csv,
    })
}

fn verify(args: &VerifyArgs, seed: u64, scale: f64, checks: &mut Checks) -> Result<Value, CliError> {
    let file = load_r_file(&args.r_matrix)?;
    let alg = resolve_algebra(args.algebra.as_deref(), &args.r_matrix, &file, scale)?;
    let r = build_endomorphism(&file, &alg)?;

    let mc = mcybe_residual(&r, args.c);
    checks
        .add("mcybe_residual", mc.max_residual, tol::MCYBE)
        .at(format!("basis pair ({}, {})", mc.worst_pair.0, mc.worst_pair.1));
    checks.add("r_bracket_jacobi", bracket_r_jacobi_residual(&r), tol::R_JACOBI);
    checks.add("homomorphism_residual", homomorphism_residual(&r), tol::HOMOMORPHISM);
    let fit = fit_mcybe_constant(&r);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = alg.matrix_size();
    let hams: Vec<_> = (1..=(m - 1).max(2) as u32).map(PolynomialObservable::trace_power).collect();
    let involution = match random_tridiagonal(&alg, &mut rng.clone()) {
        Ok(_) => {
            let rep = involution_scan(&r, &hams, args.samples, &mut rng)?;
            checks
                .add("involution_max", rep.max_abs, tol::INVOLUTION)
                .at(format!("H{} and H{}", rep.worst_pair.0 + 1, rep.worst_pair.1 + 1));
            json!({ "samples": rep.samples, "hamiltonians": hams.len() })
        }
        Err(e) => json!({ "skipped": format!("algebra has no tridiagonal states: {e}") }),
    };
    Ok(json!({
        "algebra": alg.name(),
        "dim": alg.dim(),
        "c": args.c,
        "fitted_c": fit.c,
        "fitted_c_residual": fit.max_residual,
        "skew_residual": r.skew_residual()?,
        "involution": involution,
    }))
}

fn expected(e: ExpectedClass) -> Classification {
    match e {
        ExpectedClass::Triangular => Classification::Triangular,
        ExpectedClass::QuasiTriangular => Classification::QuasiTriangular,
        ExpectedClass::Factorisable => Classification::Factorisable,
        ExpectedClass::None => Classification::None,
    }
}

fn verify_bialgebra(args: &VerifyBialgebraArgs, scale: f64, checks: &mut Checks) -> Result<Value, CliError> {
    let file = load_r_file(&args.r)?;
    let alg = resolve_algebra(args.algebra.as_deref(), &args.r, &file, scale)?;
    let r = build_tensor(&file, &alg)?;
    let a = r.skew();
    let rep = classify(&r, tol::TENSOR_VANISHING * scale);

    checks.add("sym_invariance", rep.sym_invariance, tol::SYM_INVARIANCE);
    checks.add("cocycle_residual", rep.cocycle_residual, tol::COCYCLE);
    checks.diagnostic("schouten_aa_norm", rep.schouten_norm, tol::TENSOR_VANISHING);
    if let Some(v) = rep.rr_norm {
        checks.diagnostic("rr_norm", v, tol::TENSOR_VANISHING);
    }

    let aa = schouten(&a)?;
    checks.add(
        "aa_bracket_identity",
        rr_bracket(&a)?.max_abs_diff(&aa.scale(-0.5)),
        tol::TENSOR_IDENTITY,
    );
    let mut notes = Vec::new();
    if rep.sym_invariance <= tol::SYM_INVARIANCE * scale {
        let mut worst = (0.0f64, 0usize);
        for i in 0..alg.dim() {
            let x = alg.basis_element(i);
            let d = (cocycle(&r, &x)? - cocycle(&a, &x)?).amax();
            if d > worst.0 {
                worst = (d, i);
            }
        }
        checks
            .add("coboundary_of_skew_part", worst.0, tol::TENSOR_IDENTITY)
            .at(format!("basis element {}", worst.1));
        match build_bialgebra_double(&r) {
            Ok(double) => {
                checks.add("double_invariance", double.invariance_residual(), tol::DOUBLE_INVARIANCE);
                checks.add("double_jacobi", double.jacobi_residual(), tol::DOUBLE_JACOBI);
            }
            Err(e) => notes.push(format!("double not built: {e}")),
        }
    } else {
        notes.push("symmetric part is not ad-invariant; coboundary and double checks skipped".into());
    }
    if let Some(e) = args.expect {
        let mismatch = if rep.classification == expected(e) { 0.0 } else { 1.0 };
        checks.add("classification_mismatch", mismatch, 0.0);
    }
    Ok(json!({
        "algebra": alg.name(),
        "classification": rep.classification,
        "sym_norm": rep.sym_norm,
        "notes": notes,
    }))
}

fn chain_from_args(args: &ChainArgs, seed: u64) -> Result<TodaChain, CliError> {
    let chain = match (&args.a, &args.b) {
        (Some(a), Some(b)) => TodaChain::new(a.clone(), b.clone())?,
        (None, None) => {
            let n = args
                .n
                .ok_or_else(|| CliError::Usage("give --n, or both --a and --b".into()))?;
            let g = sl(n + 1)?;
            let l = random_tridiagonal(&g, &mut ChaCha8Rng::seed_from_u64(seed))?;
            TodaChain::from_lax_matrix(&l.matrix())?
        }
        _ => return Err(CliError::Usage("--a and --b must be given together".into())),
    };
    if let Some(n) = args.n {
        if n != chain.n() {
            return Err(CliError::Usage(format!("--n {n} disagrees with len(b) = {}", chain.n())));
        }
    }
    Ok(chain)
}

fn config(steps: &StepArgs) -> IntegratorConfig {
    IntegratorConfig::new(steps.dt, steps.t_end).record_every(steps.record_every.max(1))
}

/// Largest `|x_t[k] − x_0[k]|` with the step and component where it occurs.
fn max_drift(series: &[Vec<f64>]) -> (f64, usize, usize) {
    let mut worst = (0.0, 0, 0);
    for (t, row) in series.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let d = (v - series[0][k]).abs();
            if d > worst.0 {
                worst = (d, t, k);
            }
        }
    }
    worst
}

fn drift_check(checks: &mut Checks, name: &str, series: &[Vec<f64>], times: &[f64], base: f64) {
    let (d, step, k) = max_drift(series);
    checks
        .add(name, d, base)
        .at(format!("recorded step {step} (t = {}), component {}", times[step], k + 1));
}

fn conservation_checks(checks: &mut Checks, traj: &Trajectory) -> Result<(), CliError> {
    let obs = [PolynomialObservable::trace_power(1), PolynomialObservable::trace_power(2)];
    let hs = traj
        .states
        .iter()
        .map(|s| obs.iter().map(|h| h.evaluate(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let eig: Vec<Vec<f64>> = traj.eigenvalues.iter().map(|e| e.iter().map(|z| z.re).collect()).collect();
    drift_check(checks, "hamiltonian_drift", &hs, &traj.times, tol::CONSERVATION);
    drift_check(checks, "eigenvalue_drift", &eig, &traj.times, tol::CONSERVATION);
    Ok(())
}

fn lax_trajectory(system: FlowSystem, chain: &TodaChain, steps: &StepArgs) -> Result<Trajectory, CliError> {
    let alg = toda_algebra(chain)?;
    let sys = match system {
        FlowSystem::Toda => open_toda_lax(&alg)?,
        FlowSystem::TodaCartan => cartan_toda_lax(&alg)?,
    };
    let l0 = lax_from_flaschka(chain, &alg)?;
    Ok(integrate(&sys, &l0, &config(steps))?)
}

fn chains(traj: &Trajectory) -> Result<Vec<TodaChain>, CliError> {
    Ok(traj
        .states
        .iter()
        .map(|s| TodaChain::from_lax_matrix(&s.matrix()))
        .collect::<Result<_, _>>()?)
}

/// Shortest round-trip text, switching to exponent form outside [1e-4, 1e6).
fn number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn flow(args: &FlowArgs, seed: u64, checks: &mut Checks) -> Result<(Value, String), CliError> {
    let chain = chain_from_args(&args.chain, seed)?;
    let traj = lax_trajectory(args.system, &chain, &args.steps)?;
    conservation_checks(checks, &traj)?;

    let n = chain.n();
    let mut csv = String::from("t");
    for i in 1..=n + 1 {
        write!(csv, ",a_{i}").unwrap();
    }
    for i in 1..=n {
        write!(csv, ",b_{i}").unwrap();
    }
    csv.push_str(",H1,H2");
    for i in 1..=n + 1 {
        write!(csv, ",eig_{i}").unwrap();
    }
    csv.push('\n');
    let (h1, h2) = (PolynomialObservable::trace_power(1), PolynomialObservable::trace_power(2));
    for ((t, s), c) in traj.times.iter().zip(&traj.states).zip(chains(&traj)?) {
        csv.push_str(&number(*t));
        for v in c.a.iter().chain(&c.b) {
            write!(csv, ",{}", number(*v)).unwrap();
        }
        write!(csv, ",{},{}", number(h1.evaluate(s)?), number(h2.evaluate(s)?)).unwrap();
        for e in rmatrix::lax::sorted_spectrum(&s.matrix()) {
            write!(csv, ",{}", number(e.re)).unwrap();
        }
        csv.push('\n');
    }
    let data = json!({
        "system": format!("{:?}", args.system),
        "algebra": traj.states[0].algebra().name(),
        "n": n,
        "initial": chain,
        "records": traj.len(),
        "csv": args.out.as_ref().map(|p| p.display().to_string()),
    });
    Ok((data, csv))
}

fn factorise(args: &FactoriseArgs, checks: &mut Checks) -> Result<Value, CliError> {
    let g = load_matrix(&args.matrix)?;
    let f = factor(&g, args.kind.into())?;
    checks.add("reassembly_residual", f.residual, tol::REASSEMBLY * g.norm().max(1.0));
    let ldu = f.ldu.as_ref().map(|p| {
        json!({ "w_plus": rows(&p.w_plus), "y": rows(&p.y), "w_minus": rows(&p.w_minus) })
    });
    Ok(json!({
        "kind": f.kind,
        "g_plus": rows(&f.g_plus),
        "g_minus": rows(&f.g_minus),
        "ldu": ldu,
    }))
}

fn compare(args: &CompareArgs, seed: u64, checks: &mut Checks) -> Result<Value, CliError> {
    let chain = chain_from_args(&args.chain, seed)?;
    let (system, time) = match args.kind {
        KindArg::Qr => (FlowSystem::Toda, args.steps.t_end),
        // dL/dt = [R₊(2L), L] runs the propagator of H = ½ tr L² backwards at double speed.
        KindArg::Ldu => (FlowSystem::TodaCartan, -2.0 * args.steps.t_end),
    };
    let traj = lax_trajectory(system, &chain, &args.steps)?;
    let l0 = &traj.states[0];
    let p = propagate(l0, &PolynomialObservable::trace_power(1), time, SplitKind::from(args.kind))?;
    let rk4 = traj.last().expect("non-empty trajectory").matrix();
    let exact = p.state.matrix();
    checks.add("max_abs_difference", (&rk4 - &exact).amax(), tol::SOLVER_AGREEMENT);
    checks.add("conjugation_paths", p.discrepancy, tol::CONJUGATION_PATHS);
    checks.add("projection_defect", p.projection_defect, tol::PROJECTION);
    Ok(json!({
        "system": format!("{:?}", args.system),
        "kind": p.factors.kind,
        "t_end": args.steps.t_end,
        "dt": args.steps.dt,
        "initial": chain,
        "rk4": rows(&rk4),
        "factorisation": rows(&exact),
        "factor_residual": p.factors.residual,
    }))
}

fn dump_chains(times: &[f64], states: &[TodaChain]) -> Value {
    Value::Array(
        times
            .iter()
            .zip(states)
            .map(|(t, s)| json!({ "t": t, "a": s.a, "b": s.b }))
            .collect(),
    )
}

fn toda(args: &TodaArgs, seed: u64, checks: &mut Checks) -> Result<Value, CliError> {
    match args.variant {
        TodaVariant::Open => {
            let chain = chain_from_args(&args.chain, seed)?;
            let alg = toda_algebra(&chain)?;
            let sys = open_toda_lax(&alg)?;
            let d = sys.rhs(&lax_from_flaschka(&chain, &alg)?)?.matrix();
            checks.add("flaschka_vs_lax_rhs", rhs_gap(&chain, &d), tol::RHS_AGREEMENT);
            let traj = lax_trajectory(FlowSystem::Toda, &chain, &args.steps)?;
            conservation_checks(checks, &traj)?;
            Ok(json!({ "variant": "open", "states": dump_chains(&traj.times, &chains(&traj)?) }))
        }
        TodaVariant::Cartan => {
            let coords = cartan_coords(args)?;
            let chain = cartan_to_flaschka(&coords)?;
            checks.add(
                "orbit_agreement",
                (coords.orbit_matrix()? - chain.lax_matrix()).amax(),
                tol::ORBIT_AGREEMENT,
            );
            let traj = lax_trajectory(FlowSystem::TodaCartan, &chain, &args.steps)?;
            let via_cartan = chains(&traj)?;
            let (_, direct) = integrate_flaschka(&chain, &config(&args.steps))?;
            let (x, y) = (via_cartan.last().unwrap(), direct.last().unwrap());
            let gap = x.a.iter().chain(&x.b).zip(y.a.iter().chain(&y.b)).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            checks.add("cartan_vs_flaschka_endpoint", gap, tol::PIPELINE_AGREEMENT);
            conservation_checks(checks, &traj)?;
            Ok(json!({
                "variant": "cartan",
                "w": coords.w(),
                "z": coords.z(),
                "states": dump_chains(&traj.times, &via_cartan),
            }))
        }
        TodaVariant::Periodic => {
            let lat = lattice_from_args(args, seed)?;
            let n = lat.n_sites();
            let l = bm_lax_matrix(&lat);
            let upper = band_matrix(&vec![0.0; n], &lat.b, &vec![1.0; n]);
            let (da, db) = bm_rhs(&lat);
            let dense = &upper * &l - &l * &upper;
            checks.add(
                "band_vs_dense_commutator",
                (dense - band_matrix(&da, &db, &vec![0.0; n])).amax(),
                tol::RHS_AGREEMENT,
            );
            let (times, states) = integrate_bm(&lat, &config(&args.steps))?;
            let traces: Vec<Vec<f64>> = states
                .iter()
                .map(|s| {
                    let m = bm_lax_matrix(s);
                    (1..=3).map(|k| m.pow(k).trace()).collect()
                })
                .collect();
            for k in 0..3 {
                let series: Vec<Vec<f64>> = traces.iter().map(|t| vec![t[k]]).collect();
                drift_check(checks, &format!("trace_power_{}_drift", k + 1), &series, &times, tol::CONSERVATION);
            }
            let dump: Vec<Value> = times
                .iter()
                .zip(&states)
                .map(|(t, s)| json!({ "t": t, "a": s.a, "b": s.b }))
                .collect();
            Ok(json!({ "variant": "periodic", "sites": n, "states": dump }))
        }
    }
}

fn rhs_gap(chain: &TodaChain, d: &DMatrix<f64>) -> f64 {
    let (da, db) = toda_rhs(chain);
    let diag = da.iter().enumerate().map(|(i, v)| (d[(i, i)] - v).abs());
    let off = db
        .iter()
        .enumerate()
        .flat_map(|(i, v)| [(d[(i, i + 1)] - v).abs(), (d[(i + 1, i)] - v).abs()]);
    diag.chain(off).fold(0.0, f64::max)
}

fn cartan_coords(args: &TodaArgs) -> Result<CartanCoordinates, CliError> {
    let eta = match (&args.eta, args.chain.n) {
        (Some(e), _) => e.clone(),
        (None, Some(n)) => vec![1.0; n + 1],
        (None, None) => return Err(CliError::Usage("cartan variant needs --eta or --n".into())),
    };
    if eta.len() < 2 {
        return Err(CliError::Usage("--eta needs at least two entries".into()));
    }
    let n = eta.len() - 1;
    let side = |v: &Option<Vec<f64>>, flag: &str| -> Result<Vec<f64>, CliError> {
        match v {
            Some(v) if v.len() != n => Err(CliError::Usage(format!("{flag} needs {n} entries"))),
            Some(v) => Ok(v.clone()),
            None => Ok(vec![0.0; n]),
        }
    };
    let (op, om) = (side(&args.omega_plus, "--omega-plus")?, side(&args.omega_minus, "--omega-minus")?);
    let mut wp = DMatrix::zeros(n + 1, n + 1);
    let mut wm = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        wp[(i, i + 1)] = op[i];
        wm[(i + 1, i)] = om[i];
    }
    Ok(CartanCoordinates::new(eta, wp, wm)?)
}

fn lattice_from_args(args: &TodaArgs, seed: u64) -> Result<ShiftLattice, CliError> {
    match (&args.chain.a, &args.chain.b, args.sites) {
        (Some(a), Some(b), _) => Ok(ShiftLattice::new(a.clone(), b.clone())?),
        (None, None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
            let b = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Ok(ShiftLattice::new(a, b)?)
        }
        _ => Err(CliError::Usage("periodic variant needs --a and --b, or --sites".into())),
    }
}

fn algebra(args: &AlgebraArgs, scale: f64, checks: &mut Checks) -> Result<Value, CliError> {
    let alg = load_algebra(&args.algebra, scale)?;
    let sc = alg.structure_constants();
    checks.add("commutator_consistency", alg.commutator_consistency(), tol::CLOSURE);
    checks.add("structure_antisymmetry", sc.antisymmetry_residual(), tol::ANTISYMMETRY);
    checks.add("structure_jacobi", sc.jacobi_residual(), tol::STRUCTURE_JACOBI);
    let mut data = json!({
        "name": alg.name(),
        "dim": alg.dim(),
        "matrix_size": alg.matrix_size(),
    });
    if args.dump_structure {
        data["structure_constants"] = json!(sc.to_nested());
    }
    Ok(data)
}
