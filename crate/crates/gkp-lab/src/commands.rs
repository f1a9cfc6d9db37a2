//! Subcommand implementations.

use crate::svg::heatmap;
use crate::{
    ChannelCoeffsArgs, Command, CompileArgs, CvShadowArgs, LabError, LabResult, LatticeMvtArgs, ShadowEstimateArgs,
    ShadowRunArgs, TwirlVizArgs,
};
use gkp_shadows::gkp_channels::{
    click_coefficients, heterodyne_coefficients, heterodyne_p0_bound, heterodyne_shell_probs, invert_depolarizing,
    parity_fidelity_bound, ClickQuadrature,
};
use gkp_shadows::logical_shadows::{
    decode_records, estimate_logical_observable, pointer_decoder, run_shadow_protocol, sample_budget_hkp,
};
use gkp_shadows::random_lattice::{
    ball_indicator, cv_shadow_budget, cv_shadow_run, mvt_check, sample_cv_plan, WignerMode, ENUMERATION_BUDGET,
};
use gkp_shadows::symplectic::{compile_symplectic, ModSymplecticMatrix, COMPILE_LENGTH_CONSTANT};
use gkp_shadows::twirl::{NuSigma, RandomWalkTwirl};
use gkp_shadows::{GkpCode, LogicalPauliVector, ShadowRecord, StateModel, TwirlSpec};
use nalgebra::DMatrix;
use serde_json::{json, Value};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub(crate) fn dispatch(cmd: &Command) -> LabResult<()> {
    match cmd {
        Command::ChannelCoeffs(a) => channel_coeffs(cmd, a),
        Command::ShadowRun(a) => shadow_run(cmd, a),
        Command::ShadowEstimate(a) => shadow_estimate(cmd, a),
        Command::CvShadow(a) => cv_shadow(cmd, a),
        Command::LatticeMvt(a) => lattice_mvt(cmd, a),
        Command::CompileSymplectic(a) => compile(cmd, a),
        Command::TwirlViz(a) => twirl_viz(cmd, a),
    }
}

/// Code version, resolved configuration and numerical tolerances of a run.
fn manifest(cmd: &Command, tolerances: Value) -> LabResult<Value> {
    Ok(json!({
        "tool": "gkp-lab",
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(cmd)?,
        "tolerances": tolerances,
    }))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Prints the report and, with `out`, writes it and a sibling manifest file.
fn emit(report: Value, manifest: &Value, out: Option<&Path>) -> LabResult<()> {
    let mut doc = json!({ "manifest": manifest });
    if let (Value::Object(d), Value::Object(r)) = (&mut doc, report) {
        d.extend(r);
    }
    let text = serde_json::to_string_pretty(&doc)?;
    if let Some(path) = out {
        std::fs::write(path, format!("{text}\n"))?;
        std::fs::write(manifest_path(path), format!("{}\n", serde_json::to_string_pretty(manifest)?))?;
    }
    println!("{text}");
    Ok(())
}

fn invalid(msg: impl Into<String>) -> LabError {
    LabError::Invalid(msg.into())
}

fn channel_coeffs(cmd: &Command, a: &ChannelCoeffsArgs) -> LabResult<()> {
    let code = GkpCode::from_name(&a.code)?;
    let (report, tolerances) = match a.povm.as_str() {
        "heterodyne" => {
            let coeffs = heterodyne_coefficients(&code)?;
            let shells = heterodyne_shell_probs(&code, a.samples, a.seed)?;
            let bound = heterodyne_p0_bound(&code).ok();
            (
                json!({ "coefficients": coeffs, "shells": shells, "p0_series_bound": bound }),
                json!({ "p0_series_terms": 40 }),
            )
        }
        "click" => {
            let c = click_coefficients(&code, ClickQuadrature { order: a.quadrature_order })?;
            (
                json!({ "coefficients": c.coeffs, "theta": c.theta, "click": c }),
                json!({ "quadrature_order": a.quadrature_order }),
            )
        }
        "parity" => {
            let b = parity_fidelity_bound(&code, a.sigma)?;
            (json!({ "parity_bound": b }), json!({}))
        }
        other => return Err(invalid(format!("unknown povm '{other}' (heterodyne, click, parity)"))),
    };
    emit(report, &manifest(cmd, tolerances)?, a.out.as_deref())
}

fn shadow_run(cmd: &Command, a: &ShadowRunArgs) -> LabResult<()> {
    if a.povm != "heterodyne" {
        return Err(invalid(format!("povm '{}' does not produce pointer records; use heterodyne", a.povm)));
    }
    let code = GkpCode::from_name(&a.code)?;
    let state = StateModel::from_name(&a.state)?;
    let twirl = TwirlSpec::parse(&a.twirl)?;
    let n_total = match a.n_total {
        Some(n) => n,
        None => {
            let (n, k) = sample_budget_hkp(a.epsilon, a.delta, 1, &[2.0])?;
            n * k
        }
    };
    let records = run_shadow_protocol(&state, &code, n_total, &twirl, a.seed)?;
    let manifest = manifest(cmd, json!({ "n_total": n_total }))?;
    let mut w = BufWriter::new(std::fs::File::create(&a.out)?);
    writeln!(w, "{}", serde_json::to_string(&json!({ "manifest": manifest }))?)?;
    for r in &records {
        writeln!(w, "{}", serde_json::to_string(&r.to_json())?)?;
    }
    w.flush()?;
    std::fs::write(manifest_path(&a.out), format!("{}\n", serde_json::to_string_pretty(&manifest)?))?;
    println!("{}", serde_json::to_string_pretty(&json!({ "records": n_total, "out": a.out }))?);
    Ok(())
}

/// Reads a record file, returning the header manifest (if any) and records.
fn read_records(path: &Path) -> LabResult<(Option<Value>, Vec<ShadowRecord>)> {
    let file = std::fs::File::open(path)
        .map_err(|e| invalid(format!("cannot open records {}: {e}", path.display())))?;
    let mut header = None;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&line).map_err(|e| invalid(format!("line {}: {e}", i + 1)))?;
        if let Some(m) = v.get("manifest") {
            header = Some(m.clone());
        } else {
            records.push(ShadowRecord::from_json(&v)?);
        }
    }
    if records.is_empty() {
        return Err(invalid(format!("{} holds no records", path.display())));
    }
    Ok((header, records))
}

fn shadow_estimate(cmd: &Command, a: &ShadowEstimateArgs) -> LabResult<()> {
    let (header, records) = read_records(&a.records)?;
    let stored = |key: &str| header.as_ref().and_then(|h| h["config"].get(key).cloned());
    let code_name = match &a.code {
        Some(c) => c.clone(),
        None => stored("code")
            .and_then(|v| v.as_str().map(String::from))
            .ok_or_else(|| invalid("record file has no code; pass --code"))?,
    };
    let epsilon = a.epsilon.or_else(|| stored("epsilon").and_then(|v| v.as_f64())).unwrap_or(0.1);
    let delta = a.delta.or_else(|| stored("delta").and_then(|v| v.as_f64())).unwrap_or(0.05);
    let code = GkpCode::from_name(&code_name)?;
    let coeffs = heterodyne_coefficients(&code)?;
    let decoded = decode_records(&pointer_decoder(&code)?, &records)?;
    let observables = a
        .observable
        .iter()
        .map(|s| LogicalPauliVector::parse_observable(s))
        .collect::<gkp_shadows::Result<Vec<_>>>()?;
    let mut estimates = Vec::new();
    for (label, o) in a.observable.iter().zip(&observables) {
        let report = estimate_logical_observable(&decoded, o, &coeffs, epsilon, delta, observables.len())?;
        estimates.push(json!({ "observable": label, "report": report }));
    }
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["n", "observable", "running_mean"])?;
        for (label, o) in a.observable.iter().zip(&observables) {
            let mut acc = 0.0;
            let mut next = 1usize;
            for (i, d) in decoded.iter().enumerate() {
                acc += o.dot(&LogicalPauliVector::new(invert_depolarizing(&coeffs, &d.entries)?));
                if i + 1 == next || i + 1 == decoded.len() {
                    w.write_record([(i + 1).to_string(), label.clone(), format!("{}", acc / (i + 1) as f64)])?;
                    next *= 2;
                }
            }
        }
        w.flush()?;
    }
    let report = json!({
        "records": records.len(),
        "coefficients": coeffs,
        "record_manifest": header,
        "estimates": estimates,
    });
    emit(report, &manifest(cmd, json!({ "epsilon": epsilon, "delta": delta }))?, a.out.as_deref())
}

fn cv_shadow(cmd: &Command, a: &CvShadowArgs) -> LabResult<()> {
    let state = StateModel::from_name(&a.state)?;
    let observables = a
        .observable
        .iter()
        .map(|s| StateModel::from_name(s))
        .collect::<gkp_shadows::Result<Vec<_>>>()?;
    let mode = match a.mode.as_str() {
        "oracle" => WignerMode::Oracle,
        "parity" => WignerMode::Parity { reps: a.parity_reps },
        other => return Err(invalid(format!("unknown mode '{other}' (oracle, parity)"))),
    };
    let max_norm = observables.iter().map(|g| g.overlap(g)).fold(0.0, f64::max);
    let budget = cv_shadow_budget(state.n(), a.sigma, a.eps, a.delta, observables.len(), max_norm)?;
    let plan = sample_cv_plan(budget, a.seed)?;
    let report = cv_shadow_run(&state, &observables, &plan, a.delta, a.eps, mode, a.seed)?;
    emit(
        json!({ "report": report }),
        &manifest(cmd, json!({ "enumeration_budget": ENUMERATION_BUDGET }))?,
        a.out.as_deref(),
    )
}

fn lattice_mvt(cmd: &Command, a: &LatticeMvtArgs) -> LabResult<()> {
    let (kind, arg) = a.function.split_once(':').ok_or_else(|| invalid("--f expects ball:R or gaussian:s"))?;
    let x: f64 = arg.parse().map_err(|_| invalid(format!("bad parameter in '{}'", a.function)))?;
    if !(x > 0.0) {
        return Err(invalid("test-function parameter must be positive"));
    }
    let check = match kind {
        "ball" => {
            let (f, integral) = ball_indicator(x);
            mvt_check(&f, x, integral, a.samples, a.seed)?
        }
        "gaussian" => {
            let f = move |v: &[f64]| (-(v[0] * v[0] + v[1] * v[1]) / (2.0 * x * x)).exp();
            let integral = 2.0 * std::f64::consts::PI * x * x;
            mvt_check(&f, x * 80f64.sqrt(), integral, a.samples, a.seed)?
        }
        other => return Err(invalid(format!("unknown test function '{other}'"))),
    };
    emit(
        json!({ "mvt": check }),
        &manifest(cmd, json!({ "enumeration_budget": ENUMERATION_BUDGET }))?,
        a.out.as_deref(),
    )
}

fn compile(cmd: &Command, a: &CompileArgs) -> LabResult<()> {
    let k = 2 * a.n;
    let entries = a
        .matrix
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| invalid("--matrix expects comma-separated integers"))?;
    if a.n == 0 || entries.len() != k * k {
        return Err(invalid(format!("--matrix needs {} entries for n = {}", k * k, a.n)));
    }
    let u = ModSymplecticMatrix::new(DMatrix::from_row_slice(k, k, &entries), a.d)?;
    let seq = compile_symplectic(&u)?;
    let verified = seq.product(a.n, a.d)? == u;
    let report = json!({
        "sequence": seq,
        "length": seq.len(),
        "length_bound": COMPILE_LENGTH_CONSTANT * a.d as usize * a.n * a.n,
        "verified": verified,
    });
    emit(report, &manifest(cmd, json!({ "length_constant": COMPILE_LENGTH_CONSTANT }))?, a.out.as_deref())
}

fn twirl_viz(cmd: &Command, a: &TwirlVizArgs) -> LabResult<()> {
    if a.grid == 0 || !(a.extent > 0.0) {
        return Err(invalid("--grid and --extent must be positive"));
    }
    let code = GkpCode::from_name(&a.code)?;
    if code.n != 1 {
        return Err(invalid("twirl-viz plots single-mode codes"));
    }
    let nu: Box<dyn Fn(&[f64]) -> f64> = match TwirlSpec::parse(&a.twirl)? {
        TwirlSpec::Walk { m } => {
            let w = RandomWalkTwirl::for_code(&code, m);
            Box::new(move |x| w.characteristic(x))
        }
        TwirlSpec::Gaussian { sigma } => {
            let n = NuSigma::new(&code, sigma)?;
            Box::new(move |x| n.characteristic(x))
        }
        TwirlSpec::None => return Err(invalid("twirl 'none' has nothing to plot")),
    };
    let h = 2.0 * a.extent / a.grid as f64;
    let values: Vec<Vec<f64>> = (0..a.grid)
        .map(|row| {
            let p = a.extent - (row as f64 + 0.5) * h;
            (0..a.grid).map(|col| nu(&[-a.extent + (col as f64 + 0.5) * h, p])).collect()
        })
        .collect();
    let title = format!("nu for the {} code, {}", a.code, a.twirl);
    std::fs::write(&a.out, heatmap(&values, a.extent, &title))?;
    let (lo, hi) = values.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    emit(json!({ "svg": a.out, "min": lo, "max": hi }), &manifest(cmd, json!({}))?, None)
}
