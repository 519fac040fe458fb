use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use homflow::bochner::{build_bochner, mixed_term_audit, positive_direction, BochnerData};
use homflow::catalog;
use homflow::curvature::{ricci_oracle, ricci_tensor};
use homflow::flow::output::{write_plot_data, write_trajectory_csv, VerdictReport};
use homflow::flow::{extinction_bound, integrate, FlowOptions, FlowResult, Verdict};
use homflow::io::PresentationDoc;
use homflow::presentation::effectiveness_kernel;
use homflow::tol::{JACOBI_TOL, ORACLE_TOL, TIME_TOL_REL};
use homflow::{Error, Metric, Presentation, Subspace};

use crate::report::{emit, rows, vec};
use crate::source::{
    load_metric, load_raw, load_space, parse_vectors, resolve_ideal, Failure, Space, EXIT_NUMERICAL, EXIT_OK,
    EXIT_VIOLATED,
};
use crate::{BochnerArgs, CheckArgs, FlowArgs, RicciArgs};

type Outcome = Result<u8, Failure>;

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::invalid(format!("cannot create {}: {e}", path.display())))
}

pub fn list() -> Outcome {
    for name in catalog::list() {
        let e = catalog::get(name)?;
        let p = &e.presentation;
        println!(
            "{name:<20} dim g {:<2} dim h {:<2} dim m {:<2} {:<20} {}",
            p.dim_g(),
            p.dim_h(),
            p.dim_m(),
            serde_json::to_value(e.expected).expect("serializable").as_str().unwrap_or_default(),
            e.notes
        );
    }
    Ok(EXIT_OK)
}

pub fn export(name: &str, out: Option<&Path>) -> Outcome {
    let entry = catalog::get(name)?;
    let text = serde_json::to_string_pretty(&PresentationDoc::from_entry(&entry)).expect("serializable");
    match out {
        Some(path) => write_text(path, &(text + "\n"))?,
        None => println!("{text}"),
    }
    Ok(EXIT_OK)
}

pub fn check(args: &CheckArgs) -> Outcome {
    let (name, raw) = load_raw(&args.space)?;
    let algebra = raw.algebra.clone();
    let n = algebra.dim();
    let scale = 1.0 + algebra.max_structure();
    let jacobi = algebra.jacobi_residual();
    let jacobi_ok = jacobi <= JACOBI_TOL * scale * scale;
    let mut passed = jacobi_ok;
    let mut report = json!({
        "space": name,
        "dim": n,
        "jacobi_residual": jacobi,
        "jacobi_ok": jacobi_ok,
    });

    if jacobi_ok {
        let kernel = if algebra.is_subalgebra(&raw.isotropy) <= homflow::tol::IDEAL_TOL {
            Some(effectiveness_kernel(&algebra, &raw.isotropy))
        } else {
            None
        };
        report["effectiveness_kernel"] = kernel.as_ref().map_or(Value::Null, |k| json!(k.vectors()));
        let isotropy = raw.isotropy.clone();
        match Presentation::new(algebra.clone(), isotropy, raw.background.clone()) {
            Ok(p) => {
                report["presentation"] = json!({
                    "valid": true,
                    "dim_h": p.dim_h(),
                    "dim_m": p.dim_m(),
                    "reductivity_residual": p.reductivity_residual(),
                    "skewness_defect": p.skewness_defect(),
                    "unimodularity_defect": vec(&algebra.unimodularity_defect()),
                });
            }
            Err(e) => {
                passed = false;
                report["presentation"] = json!({ "valid": false, "error": e.to_string() });
            }
        }
        let ideal = if args.ideal.ideal.is_empty() { raw.compact_ideal.clone() } else {
            Some(Subspace::new(n, &parse_vectors(&args.ideal.ideal, n)?)?)
        };
        if let Some(k) = ideal {
            let residual = algebra.is_ideal(&k);
            let cert = algebra.is_compact_semisimple(&k);
            let ok = residual <= homflow::tol::IDEAL_TOL && cert.compact_semisimple;
            passed &= ok;
            report["ideal"] = json!({
                "dim": k.dim(),
                "ideal_residual": residual,
                "compact_semisimple": cert.compact_semisimple,
                "subalgebra_residual": cert.subalgebra_residual,
                "killing_eigenvalues": cert.eigenvalues,
                "passed": ok,
            });
        }
    }
    report["passed"] = json!(passed);
    emit(&report, args.format);
    Ok(if passed { EXIT_OK } else { EXIT_VIOLATED })
}

fn ricci_json(p: &Presentation, g: &Metric) -> Value {
    let r = ricci_tensor(p, g);
    let mut v = json!({
        "tensor": rows(&r.tensor),
        "operator_eigenvalues": vec(&r.operator_eigenvalues(g)),
        "scalar": r.scalar,
        "mean_curvature": vec(&r.mean_curvature),
    });
    if let Some(t) = &r.terms {
        v["terms"] = json!({
            "killing": rows(&t.killing),
            "derivation": rows(&t.derivation),
            "squares": rows(&t.squares),
            "mean_curvature": rows(&t.mean_curvature),
        });
    }
    v
}

fn oracle_gap(p: &Presentation, g: &Metric) -> Result<f64, Failure> {
    let fast = ricci_tensor(p, g).tensor;
    let slow = ricci_oracle(p, g).map_err(|e| Failure::numerical(e.to_string()))?.tensor;
    Ok((&fast - &slow).amax() / (1.0 + fast.amax()))
}

pub fn ricci(args: &RicciArgs) -> Outcome {
    let space = load_space(&args.space)?;
    let p = &space.presentation;
    let g = load_metric(&space, &args.metric)?;
    let mut report = json!({ "space": space.name, "metric": rows(g.matrix()) });
    report["ricci"] = ricci_json(p, &g);
    let mut code = EXIT_OK;
    if args.verify {
        let mut worst = oracle_gap(p, &g)?;
        for s in 0..args.verify_count {
            let seed = args.metric.seed.wrapping_add(s);
            worst = worst.max(oracle_gap(p, &catalog::random_metric_for(p, seed))?);
        }
        let ok = worst <= ORACLE_TOL;
        if !ok {
            code = EXIT_VIOLATED;
        }
        report["verify"] = json!({ "metrics": args.verify_count + 1, "max_relative_gap": worst, "passed": ok });
    }
    emit(&report, args.format);
    Ok(code)
}

pub fn bochner(args: &BochnerArgs) -> Outcome {
    let space = load_space(&args.space)?;
    let p = &space.presentation;
    let g = load_metric(&space, &args.metric)?;
    let k = resolve_ideal(&space, &args.ideal)?
        .ok_or_else(|| Failure::invalid("no compact ideal: pass --ideal or --auto"))?;
    let audit = mixed_term_audit(p, &g, &k)?;
    let mut report = json!({
        "space": space.name,
        "metric": rows(g.matrix()),
        "audit": {
            "mean_term": audit.mean_term,
            "cross_squares": audit.cross_squares,
            "transverse_norms": audit.transverse_norms,
            "mixed_term": audit.mixed_term,
            "passed": audit.passed,
        },
    });
    let code = match positive_direction(p, &g, &k) {
        Ok(pd) => {
            report["fiber_dim"] = json!(pd.data.fiber_dim());
            report["fiber_eigenvalues"] = json!(vec(&pd.data.eigenvalues));
            report["killing_bound"] = json!(pd.data.killing_bound);
            report["direction"] = json!(vec(&pd.direction));
            report["direction_ambient"] = json!(vec(&pd.direction_ambient));
            report["ric"] = json!(pd.ric_value);
            report["bound"] = json!(pd.bound);
            report["terms"] = json!({
                "killing": pd.terms.killing,
                "derivation": pd.terms.derivation,
                "squares": pd.terms.squares,
                "mean_curvature": pd.terms.mean_curvature,
            });
            report["bound_holds"] = json!(true);
            if audit.passed { EXIT_OK } else { EXIT_VIOLATED }
        }
        Err(Error::BoundViolated { ric, bound }) => {
            report["ric"] = json!(ric);
            report["bound"] = json!(bound);
            report["bound_holds"] = json!(false);
            EXIT_VIOLATED
        }
        Err(e) => return Err(e.into()),
    };
    emit(&report, args.format);
    Ok(code)
}

fn options(args: &FlowArgs) -> Result<FlowOptions, Failure> {
    let opts = FlowOptions {
        t_max: args.t_max,
        rel_tol: args.rel_tol,
        abs_tol: args.abs_tol,
        sample_dt: args.sample_dt,
        extinction_eps: args.extinction_eps,
        max_steps: args.max_steps,
    };
    opts.validate()?;
    Ok(opts)
}

struct RunSummary {
    report: VerdictReport,
    code: u8,
}

fn summarize(space: &str, seed: Option<u64>, r: &FlowResult, bochner: Option<(&BochnerData, f64)>) -> RunSummary {
    let (t_bound, b) = match bochner {
        Some((bd, t)) => (Some(t), Some(bd.killing_bound)),
        None => (None, None),
    };
    let within_bound = t_bound.map(|tb| matches!(r.verdict, Verdict::Extinct { t } if t <= tb * (1.0 + TIME_TOL_REL)));
    let mut code = EXIT_OK;
    if matches!(r.verdict, Verdict::StepFailure { .. }) {
        code = EXIT_NUMERICAL;
    } else if within_bound == Some(false) || !r.slope_violations.is_empty() || !r.scalar_violations.is_empty() {
        code = EXIT_VIOLATED;
    }
    let report = VerdictReport {
        space: space.to_string(),
        seed,
        verdict: r.verdict,
        extinction_bound: t_bound,
        killing_bound: b,
        within_bound,
        slope_violations: r.slope_violations.len(),
        scalar_violations: r.scalar_violations.len(),
        accepted_steps: r.accepted,
        rejected_steps: r.rejected,
        max_equivariance_defect: r.max_equivariance_defect,
        failure: r.failure.clone(),
    };
    RunSummary { report, code }
}

fn run_one(space: &Space, ideal: Option<&Subspace>, g0: &Metric, opts: &FlowOptions) -> Result<(FlowResult, Option<(BochnerData, f64)>), Failure> {
    let p = &space.presentation;
    let bochner = match ideal {
        Some(k) => {
            let bd = build_bochner(p, g0, k)?;
            let tb = extinction_bound(&bd, g0);
            Some((bd, tb))
        }
        None => None,
    };
    let r = integrate(p, g0, opts, bochner.as_ref().map(|(bd, _)| bd))
        .map_err(|e| Failure::numerical(e.to_string()))?;
    Ok((r, bochner))
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("verdict.json")
}

pub fn flow(args: &FlowArgs) -> Outcome {
    let space = load_space(&args.space)?;
    let opts = options(args)?;
    let ideal = resolve_ideal(&space, &args.ideal)?;
    if let Some(n) = args.sweep {
        return sweep(args, &space, ideal.as_ref(), &opts, n);
    }
    let g0 = load_metric(&space, &args.metric)?;
    let (r, bochner) = run_one(&space, ideal.as_ref(), &g0, &opts)?;
    let seed = (args.metric.metric == "random").then_some(args.metric.seed);
    let summary = summarize(&space.name, seed, &r, bochner.as_ref().map(|(bd, tb)| (bd, *tb)));
    let verdict_json = serde_json::to_string_pretty(&summary.report).expect("serializable") + "\n";
    if let Some(out) = &args.out {
        write_trajectory_csv(create(out)?, &r)?;
        write_text(&sidecar_path(out), &verdict_json)?;
    }
    if let Some(path) = &args.emit_plot_data {
        write_plot_data(create(path)?, &r, bochner.as_ref().map(|(bd, _)| bd.killing_bound))?;
    }
    emit(&serde_json::to_value(&summary.report).expect("serializable"), args.format);
    Ok(summary.code)
}

fn sweep(args: &FlowArgs, space: &Space, ideal: Option<&Subspace>, opts: &FlowOptions, n: u64) -> Outcome {
    let p = &space.presentation;
    let runs: Vec<Result<RunSummary, Failure>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let seed = args.metric.seed.wrapping_add(i);
            let g0 = catalog::random_metric_for(p, seed);
            let (r, bochner) = run_one(space, ideal, &g0, opts)?;
            Ok(summarize(&space.name, Some(seed), &r, bochner.as_ref().map(|(bd, tb)| (bd, *tb))))
        })
        .collect();
    let runs: Vec<RunSummary> = runs.into_iter().collect::<Result<_, _>>()?;

    let extinct = runs.iter().filter(|r| matches!(r.report.verdict, Verdict::Extinct { .. })).count();
    let within = runs.iter().filter(|r| r.report.within_bound == Some(true)).count();
    let slope_clean = runs.iter().filter(|r| r.report.slope_violations == 0).count();
    let max_ratio = runs
        .iter()
        .filter_map(|r| Some(r.report.verdict.extinction_time()? / r.report.extinction_bound?))
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let code = runs.iter().map(|r| r.code).max().unwrap_or(EXIT_OK);
    let report = json!({
        "space": space.name,
        "runs": n,
        "first_seed": args.metric.seed,
        "has_bound": ideal.is_some(),
        "extinct": extinct,
        "within_bound": within,
        "slope_clean": slope_clean,
        "max_extinction_ratio": max_ratio,
        "results": runs.iter().map(|r| &r.report).collect::<Vec<_>>(),
    });
    if let Some(out) = &args.out {
        write_text(out, &(serde_json::to_string_pretty(&report).expect("serializable") + "\n"))?;
    }
    let mut shown = report.clone();
    if args.format == crate::Format::Text {
        shown.as_object_mut().expect("object").remove("results");
    }
    emit(&shown, args.format);
    Ok(code)
}
