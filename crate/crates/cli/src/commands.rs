use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use affine_intertwiners::fusion_sl2::{
    check_doubly_infinite, check_finite, check_mixed, dense_fusion_check, FusionQuery, FusionVerdict,
};
use affine_intertwiners::g_modules::{hom_space, GHom, ModuleKind, TensorModule, WeightModule};
use affine_intertwiners::kz_engine::{
    build_prefix, build_prefix_contragredient, candidate_diagnostics, kz_residual, obstruction_scan,
    singular_candidate, target_conformal_weight, tensor_vector_json, verify_commcomp, IntertwinerPrefix,
    PrefixTarget, ScanOptions,
};
use affine_intertwiners::lie_core::{AlgebraConfig, LieAlgebra};
use affine_intertwiners::{Level, Scalar};
use rayon::prelude::*;
use serde_json::json;

use crate::report::Outcome;
use crate::{
    AlgebraCmd, BatchArgs, CandidateArgs, Command, FusionArgs, KzArgs, EXIT_MALFORMED, EXIT_OBSTRUCTED, EXIT_OK,
    EXIT_UNKNOWN,
};

type CmdResult<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn run(command: &Command) -> Outcome {
    let result = match command {
        Command::Algebra { action: AlgebraCmd::Validate { source } } => algebra_validate(source),
        Command::Fusion(a) => fusion(a),
        Command::Kz(a) => kz(a),
        Command::Candidate(a) => candidate(a),
        Command::Batch(a) => batch(a),
    };
    result.unwrap_or_else(Outcome::failure)
}

fn load_algebra(source: &str) -> CmdResult<(Arc<LieAlgebra>, serde_json::Value)> {
    let config = match source {
        "builtin:sl2" | "sl2" => AlgebraConfig::sl2(),
        path => AlgebraConfig::load(Path::new(path)).map_err(err)?,
    };
    let embedded = serde_json::to_value(&config).map_err(err)?;
    let alg = LieAlgebra::from_config(config).map_err(err)?;
    Ok((Arc::new(alg), embedded))
}

fn parse_level(s: &str) -> CmdResult<Level> {
    s.parse().map_err(|e| format!("bad level {s:?}: {e}"))
}

fn exact_level(s: &str, what: &str) -> CmdResult<Scalar> {
    match parse_level(s)? {
        Level::Exact(l) => Ok(l),
        Level::Generic => Err(format!("{what} needs an exact level")),
    }
}

fn scalar(s: &str) -> CmdResult<Scalar> {
    s.parse().map_err(|e| format!("bad number {s:?}: {e}"))
}

fn module(alg: &Arc<LieAlgebra>, descriptor: &str) -> CmdResult<WeightModule> {
    let kind: ModuleKind = descriptor.parse().map_err(err)?;
    WeightModule::new(alg.clone(), kind).map_err(err)
}

/// A descriptor, or an sl2 weight read as `finite:λ` when natural and
/// `hw:λ` otherwise.
fn target_module(alg: &Arc<LieAlgebra>, desc: &str) -> CmdResult<WeightModule> {
    if let Ok(kind) = desc.parse::<ModuleKind>() {
        return WeightModule::new(alg.clone(), kind).map_err(err);
    }
    let lambda = scalar(desc)?;
    let kind = match lambda.to_i64() {
        Some(p) if lambda.is_natural() => ModuleKind::Finite { p: p as u32 },
        _ => ModuleKind::HighestWeight { lambda },
    };
    WeightModule::new(alg.clone(), kind).map_err(err)
}

fn verdict_exit(v: &FusionVerdict) -> u8 {
    match v {
        FusionVerdict::Unknown { .. } => EXIT_UNKNOWN,
        _ => EXIT_OK,
    }
}

fn verdict_summary(v: &FusionVerdict) -> String {
    let mut s = format!("verdict: {}\n", v.name());
    match v {
        FusionVerdict::Zero { reason } => {
            let _ = writeln!(s, "  reason: {reason}");
        }
        _ => {
            for c in v.checked() {
                let mark = if c.degree.is_some() { "  witness" } else { "  checked" };
                let _ = write!(s, "{mark} m={} value={}", c.m, c.value);
                if let Some(n) = c.degree {
                    let _ = write!(s, " degree N={n}");
                }
                s.push('\n');
            }
        }
    }
    s
}

fn fusion_verdict(a: &FusionArgs) -> CmdResult<(FusionVerdict, serde_json::Value)> {
    let level = parse_level(&a.level)?;
    if let Some(v) = &a.finite {
        let query = json!({ "kind": "finite", "p": v[0], "q": v[1], "r": v[2] });
        return Ok((check_finite(&level, v[0], v[1], v[2]).map_err(err)?, query));
    }
    if let Some(v) = &a.mixed {
        let p: u32 = v[0].parse().map_err(|_| format!("bad p {:?}", v[0]))?;
        let (lambda, mu) = (scalar(&v[1])?, scalar(&v[2])?);
        let query = json!({ "kind": "mixed", "p": p, "lambda": lambda, "mu": mu });
        return Ok((check_mixed(&level, p, &lambda, &mu).map_err(err)?, query));
    }
    if let Some(v) = &a.highest {
        let (l1, l2, l3) = (scalar(&v[0])?, scalar(&v[1])?, scalar(&v[2])?);
        let query = json!({ "kind": "highest_weight", "lambda1": l1, "lambda2": l2, "lambda3": l3 });
        return Ok((check_doubly_infinite(&level, &l1, &l2, &l3).map_err(err)?, query));
    }
    if let Some(v) = &a.dense {
        let (lambda, delta) = (scalar(&v[0])?, scalar(&v[1])?);
        let target = v.get(2).map(|s| scalar(s)).transpose()?;
        let query = json!({ "kind": "dense", "lambda": lambda, "delta": delta, "target_delta": target });
        return Ok((dense_fusion_check(&level, &lambda, &delta, target.as_ref()).map_err(err)?, query));
    }
    if let Some(v) = &a.modules {
        let q = FusionQuery { level, u1: v[0].clone(), u2: v[1].clone(), u3: v[2].clone() };
        let query = json!({ "kind": "modules", "u1": q.u1, "u2": q.u2, "u3": q.u3 });
        return Ok((q.evaluate().map_err(err)?, query));
    }
    Err("give one of --finite, --mixed, --highest, --dense, --modules".into())
}

fn fusion(a: &FusionArgs) -> CmdResult<Outcome> {
    let (verdict, query) = fusion_verdict(a)?;
    Ok(Outcome {
        exit_code: verdict_exit(&verdict),
        result: json!({ "level": a.level, "query": query, "verdict": verdict }),
        algebra: None,
        summary: verdict_summary(&verdict),
        error: None,
    })
}

fn algebra_validate(source: &str) -> CmdResult<Outcome> {
    let (alg, embedded) = load_algebra(source)?;
    let report = alg.validate().map_err(err)?;
    let ok = report.antisymmetry
        && report.jacobi
        && report.form_symmetric
        && report.form_nondegenerate
        && report.form_invariant;
    let summary = format!(
        "{}: dim {}, h^vee {}, adjoint Casimir {}; {}\n",
        report.name,
        report.dim,
        report.dual_coxeter,
        report.adjoint_casimir,
        if ok { "valid" } else { "INVALID" }
    );
    Ok(Outcome {
        exit_code: if ok { EXIT_OK } else { EXIT_MALFORMED },
        result: serde_json::to_value(&report).map_err(err)?,
        algebra: Some(embedded),
        summary,
        error: None,
    })
}

fn window(desc: &Option<Vec<String>>) -> CmdResult<Option<Vec<Scalar>>> {
    desc.as_ref().map(|ws| ws.iter().map(|w| scalar(w)).collect()).transpose()
}

fn seed(tensor: &Arc<TensorModule>, target: &WeightModule, index: usize, window: Option<&[Scalar]>) -> CmdResult<(GHom, usize)> {
    let mut homs = hom_space(tensor, &Arc::new(target.clone()), window).map_err(err)?;
    let dim = homs.len();
    if dim == 0 {
        return Err(format!("Hom_g({}, {}) is zero", tensor.describe(), target.describe()));
    }
    if index >= dim {
        return Err(format!("--hom {index} out of range: the hom space has dimension {dim}"));
    }
    Ok((homs.swap_remove(index), dim))
}

fn verification_json(p: &IntertwinerPrefix) -> CmdResult<serde_json::Value> {
    let v = verify_commcomp(p).map_err(err)?;
    let residual = kz_residual(p).map_err(err)?;
    let counterexample = v.counterexample.map(|c| {
        json!({ "generator": c.generator, "n": c.n, "m": c.m, "pair": [c.pair.0, c.pair.1] })
    });
    Ok(json!({ "commutator": v.holds, "counterexample": counterexample, "kz_residual": residual }))
}

fn kz(a: &KzArgs) -> CmdResult<Outcome> {
    let (alg, embedded) = load_algebra(&a.algebra)?;
    let level = exact_level(&a.level, "kz")?;
    let u1 = module(&alg, &a.u1)?;
    let u2 = module(&alg, &a.u2)?;
    let (contragredient, desc) = match a.target.split_once(':') {
        Some(("verma", rest)) => (false, rest),
        Some(("contragredient", rest)) => (true, rest),
        _ => return Err(format!("target {:?} must be verma:X or contragredient:X", a.target)),
    };
    let target = target_module(&alg, desc)?;
    let tensor = Arc::new(TensorModule::of(u1, u2).map_err(err)?);
    let win = window(&a.window)?;
    let (f, dim) = seed(&tensor, &target, a.hom, win.as_deref())?;
    let prefix = if contragredient {
        build_prefix_contragredient(&f, &level, a.degree, win.as_deref())
    } else {
        build_prefix(&f, &level, a.degree, win.as_deref())
    }
    .map_err(err)?;
    let verification = verification_json(&prefix)?;
    let obstructed = prefix.obstruction().is_some();
    let mut summary = format!(
        "{} -> {} at level {}: Y_0..Y_{} built",
        tensor.describe(),
        prefix.target().describe(),
        level,
        prefix.built_degrees() as i64 - 1
    );
    if let Some(o) = prefix.obstruction() {
        let _ = write!(summary, "; obstructed at N={} (eigenvalue {})", o.degree, o.eigenvalue);
    }
    let _ = writeln!(
        summary,
        "\ncommutator check: {}, KZ residual: {}",
        verification["commutator"], verification["kz_residual"]
    );
    Ok(Outcome {
        exit_code: if obstructed { EXIT_OBSTRUCTED } else { EXIT_OK },
        result: json!({
            "hom_dimension": dim,
            "seed": f.to_json(),
            "prefix": prefix.to_json().map_err(err)?,
            "verification": verification,
        }),
        algebra: Some(embedded),
        summary,
        error: None,
    })
}

fn candidate_modules(a: &CandidateArgs, alg: &Arc<LieAlgebra>) -> CmdResult<(WeightModule, WeightModule, WeightModule)> {
    let pick = |p: Option<u32>, u: &Option<String>| -> CmdResult<WeightModule> {
        match (p, u) {
            (_, Some(d)) => module(alg, d),
            (Some(p), None) => module(alg, &format!("finite:{p}")),
            (None, None) => Err("missing module".into()),
        }
    };
    Ok((pick(a.p, &a.u1)?, pick(a.q, &a.u2)?, pick(a.r, &a.u3)?))
}

fn candidate(a: &CandidateArgs) -> CmdResult<Outcome> {
    let (alg, embedded) = load_algebra(&a.algebra)?;
    let level = parse_level(&a.level)?;
    let Level::Exact(l) = &level else {
        return Err("no obstruction: the level is generic".into());
    };
    let (u1, u2, u3) = candidate_modules(a, &alg)?;
    let tensor = Arc::new(TensorModule::of(u1, u2).map_err(err)?);
    let h3 = target_conformal_weight(&u3, l).map_err(err)?;
    let opts = ScanOptions { max_degree: Some(a.max_degree), weights: None };
    let scan = obstruction_scan(&tensor, &level, &h3, &opts).map_err(err)?;
    let Some(first) = scan.first() else {
        return Err(format!("no obstruction up to degree {}", a.max_degree));
    };
    let n = first.degree;
    let (f, _) = seed(&tensor, &u3, a.hom, None)?;
    let prefix = build_prefix(&f, l, n, None).map_err(err)?;
    let obs = prefix
        .obstruction()
        .cloned()
        .ok_or_else(|| format!("the recursion is not obstructed at degree {n}"))?;
    let PrefixTarget::Verma(target) = prefix.target() else {
        unreachable!("build_prefix targets a Verma module")
    };
    let mut candidates = Vec::new();
    let mut all_zero = true;
    let mut summary = format!(
        "first obstruction at N={} (eigenvalue {}), conformal weight {}\n",
        obs.degree,
        obs.eigenvalue,
        &h3 + Scalar::from_int(obs.degree as i64)
    );
    for block in &obs.eigenvectors {
        for v in &block.vectors {
            let cand = singular_candidate(&prefix, v).map_err(err)?;
            let diag = candidate_diagnostics(target, &cand).map_err(err)?;
            all_zero &= diag.is_zero;
            let _ = writeln!(
                summary,
                "  weight {}: is_zero={} in_radical={} annihilated_by_positive_modes={}",
                block.weight, diag.is_zero, diag.in_radical, diag.annihilated_by_positive_modes
            );
            candidates.push(json!({
                "weight": block.weight,
                "eigenvector": tensor_vector_json(v),
                "vector": target.vector_json(&cand),
                "diagnostics": diag,
            }));
        }
    }
    let _ = writeln!(summary, "all candidates zero: {all_zero}");
    Ok(Outcome {
        exit_code: EXIT_OK,
        result: json!({
            "h3": h3,
            "degree": obs.degree,
            "eigenvalue": obs.eigenvalue,
            "conformal_weight": &h3 + Scalar::from_int(obs.degree as i64),
            "obstruction_scan": scan.to_json(),
            "is_zero": all_zero,
            "candidates": candidates,
        }),
        algebra: Some(embedded),
        summary,
        error: None,
    })
}

fn batch(a: &BatchArgs) -> CmdResult<Outcome> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| format!("{}: {e}", a.input.display()))?;
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#')).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs).build().map_err(err)?;
    let rows: Vec<(serde_json::Value, u8)> = pool.install(|| {
        lines
            .par_iter()
            .map(|&(i, line)| {
                let parsed: Result<FusionQuery, String> = serde_json::from_str(line).map_err(err);
                match parsed.and_then(|q| q.evaluate().map(|v| (q, v)).map_err(err)) {
                    Ok((q, v)) => {
                        let code = verdict_exit(&v);
                        (json!({ "line": i + 1, "query": q, "verdict": v }), code)
                    }
                    Err(e) => (json!({ "line": i + 1, "input": line, "error": e }), EXIT_MALFORMED),
                }
            })
            .collect()
    });
    let failed = rows.iter().filter(|(_, c)| *c == EXIT_MALFORMED).count();
    let unknown = rows.iter().filter(|(_, c)| *c == EXIT_UNKNOWN).count();
    let mut summary = String::new();
    for (row, _) in &rows {
        let _ = writeln!(summary, "{}", serde_json::to_string(row).map_err(err)?);
    }
    let exit_code = if failed > 0 {
        EXIT_MALFORMED
    } else if unknown > 0 {
        EXIT_UNKNOWN
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        exit_code,
        result: json!({
            "queries": rows.len(),
            "failed": failed,
            "unknown": unknown,
            "results": rows.into_iter().map(|(r, _)| r).collect::<Vec<_>>(),
        }),
        algebra: None,
        summary,
        error: None,
    })
}
