use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use branchcut::cut::{self, Badness, CutError, Plane, ReachabilityVerdict, RootPortrait};
use branchcut::export;
use branchcut::hem::{self, HemError, Network, SnbpEstimate, SolveReport};
use branchcut::kernel::fmt_real;
use branchcut::pade::{self, PadeApproximant, PadeError};
use branchcut::roots;
use branchcut::series::{self, ExpansionPoint, LogRatioSpec, PowerSeries, RationalFunction, SeriesError};
use branchcut::{BigComplex, PrecisionContext};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig, SpecSource};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input files.
    Input(String),
    /// An approximation error hit the working-precision floor.
    PrecisionFloor(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::PrecisionFloor(_) => 4,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::PrecisionFloor(m) => write!(f, "{m} (hint: raise --bits)"),
            CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Parse { .. } | SeriesError::InvalidSpec(_) | SeriesError::RootAtOrigin => {
                CliError::Input(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<CutError> for CliError {
    fn from(e: CutError) -> Self {
        match e {
            CutError::PrecisionFloor { .. } => CliError::PrecisionFloor(e.to_string()),
            CutError::InvalidArgument(m) => CliError::Input(m),
            CutError::Series(s) => s.into(),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<PadeError> for CliError {
    fn from(e: PadeError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<HemError> for CliError {
    fn from(e: HemError) -> Self {
        match e {
            HemError::Parse { .. } | HemError::InvalidNetwork(_) | HemError::InvalidArgument(_) => {
                CliError::Input(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

/// Result of a command: the JSON report and whether it carries a
/// nonconvergence verdict.
pub struct Outcome {
    pub report: Value,
    pub nonconvergent: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// A test function: a logarithmic ratio or a rational function.
enum Function {
    Log(LogRatioSpec),
    Rational(RationalFunction),
}

impl Function {
    fn load(src: &SpecSource, ctx: PrecisionContext) -> Result<Self, CliError> {
        match src {
            SpecSource::Case(c) => Ok(Function::Log(LogRatioSpec::case(*c, ctx))),
            SpecSource::Segment => Ok(Function::Log(LogRatioSpec::unit_segment(ctx))),
            SpecSource::File(path) => {
                let text = read(path)?;
                let rational = serde_json::from_str::<Value>(&text)
                    .ok()
                    .and_then(|v| v.as_object().map(|o| o.contains_key("expansion")))
                    .unwrap_or(false);
                let context = |e: SeriesError| CliError::from(e).with_path(path);
                if rational {
                    RationalFunction::from_json(&text, ctx).map(Function::Rational).map_err(context)
                } else {
                    LogRatioSpec::from_json(&text, ctx).map(Function::Log).map_err(context)
                }
            }
        }
    }

    /// Series through order `n` at `expansion`.
    fn series(&self, expansion: ExpansionPoint, n: usize, ctx: PrecisionContext) -> Result<PowerSeries, CliError> {
        match self {
            Function::Log(spec) => Ok(match expansion {
                ExpansionPoint::Infinity => series::expand_at_infinity(spec, n, ctx)?,
                ExpansionPoint::Zero => series::expand_at_zero(spec, n, ctx)?,
            }),
            Function::Rational(r) if r.expansion() == expansion => Ok(r.series(n, ctx)?),
            Function::Rational(r) => Err(CliError::Input(format!(
                "rational spec is given at {}, not {expansion}",
                r.expansion()
            ))),
        }
    }

    fn default_expansion(&self) -> ExpansionPoint {
        match self {
            Function::Log(_) => ExpansionPoint::Infinity,
            Function::Rational(r) => r.expansion(),
        }
    }

    fn eval(&self, z: &BigComplex) -> Result<BigComplex, SeriesError> {
        match self {
            Function::Log(spec) => series::eval_reference(spec, z),
            Function::Rational(r) => r.eval(z),
        }
    }

    /// Branch points, or poles of a rational function, in the `z` plane.
    fn singularities(&self, ctx: PrecisionContext) -> Vec<BigComplex> {
        match self {
            Function::Log(spec) => spec.num_roots().iter().chain(spec.den_roots()).cloned().collect(),
            Function::Rational(r) => {
                let poles = roots::roots(r.den(), ctx, roots::default_tol(ctx))
                    .map(|rs| rs.roots)
                    .unwrap_or_default();
                match r.expansion() {
                    ExpansionPoint::Zero => poles,
                    ExpansionPoint::Infinity => poles.iter().filter_map(|t| t.recip().ok()).collect(),
                }
            }
        }
    }
}

impl CliError {
    fn with_path(self, path: &Path) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            other => other,
        }
    }
}

/// `[m/m+1]`, rebuilt at a smaller denominator degree when degenerate.
fn near_diagonal(series: &PowerSeries, m: usize) -> Result<PadeApproximant, CliError> {
    Ok(pade::build_reducing(series, m, m + 1)?)
}

fn filtered_portrait(pa: &PadeApproximant, plane: Plane) -> Result<(RootPortrait, Vec<cut::Doublet>), CliError> {
    let p = cut::portrait(pa, plane, roots::default_tol(pa.ctx()))?;
    Ok(cut::froissart_filter(&p, cut::default_pair_tol(&p)))
}

fn key(x: f64) -> String {
    format!("{x}")
}

fn write_portrait(
    out: &Path,
    stem: &str,
    clean: &RootPortrait,
    doublets: &[cut::Doublet],
    title: &str,
) -> Result<Vec<PathBuf>, CliError> {
    Ok(vec![
        write(out, &format!("{stem}.csv"), &export::portrait_csv(clean, doublets))?,
        write(out, &format!("{stem}.svg"), &export::portrait_svg(clean, doublets, title))?,
    ])
}

fn need_out(cfg: &RunConfig) -> Result<&Path, CliError> {
    cfg.out
        .as_deref()
        .ok_or_else(|| CliError::Input("--out is required for commands that write portraits".into()))
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate().map_err(CliError::Input)?;
    let ctx = PrecisionContext::new(cfg.bits).map_err(|e| CliError::Input(e.to_string()))?;
    let mut outcome = match &cfg.command {
        Command::Case { case, degree, band } => {
            let out = need_out(cfg)?;
            let spec = LogRatioSpec::case(*case, ctx);
            let s = series::expand_at_infinity(&spec, 2 * degree + 1, ctx)?;
            let pa = near_diagonal(&s, *degree)?;
            let (clean, doublets) = filtered_portrait(&pa, Plane::InverseAlpha)?;
            let extent = cut::real_axis_extent(&clean, *band);
            let mut targets = vec![0.0];
            targets.extend(spec.real_branch_points());
            let reach: BTreeMap<String, ReachabilityVerdict> = targets
                .iter()
                .map(|&t| (key(t), cut::reachability(&clean, t, *band)))
                .collect();
            let stem = format!("case_{case}_{degree}");
            let title = format!("Case {case}, [{}/{}] at infinity, inverse-alpha plane", pa.l(), pa.m());
            let files = write_portrait(out, &stem, &clean, &doublets, &title)?;
            Outcome {
                report: json!({
                    "case": case.to_string(),
                    "degree": degree,
                    "built": [pa.l(), pa.m()],
                    "plane": Plane::InverseAlpha,
                    "band": band,
                    "real_axis_extent": extent,
                    "doublets": doublets.len(),
                    "poles": clean.poles.len(),
                    "zeros": clean.zeros.len(),
                    "excluded_at_infinity": clean.excluded_at_infinity,
                    "min_abs_im_pole": min_abs_im(&clean),
                    "reachability": reach,
                    "files": files,
                }),
                nonconvergent: false,
            }
        }
        Command::Logfn {
            spec,
            expansion,
            degree,
            plane,
            band,
        } => {
            let out = need_out(cfg)?;
            let f = Function::load(spec, ctx)?;
            let s = f.series(*expansion, 2 * degree + 1, ctx)?;
            let pa = near_diagonal(&s, *degree)?;
            let (clean, doublets) = filtered_portrait(&pa, *plane)?;
            let ks = if cut::poles_on_real_axis(&clean) {
                cut::equilibrium_check(&clean).ok()
            } else {
                None
            };
            let stem = format!("logfn_{}_{expansion}_{degree}_{plane}", spec.label());
            let title = format!("{}, [{}/{}] at {expansion}, {plane} plane", spec.label(), pa.l(), pa.m());
            let files = write_portrait(out, &stem, &clean, &doublets, &title)?;
            Outcome {
                report: json!({
                    "spec": spec,
                    "expansion": expansion,
                    "degree": degree,
                    "built": [pa.l(), pa.m()],
                    "plane": plane,
                    "max_abs_im": clean.max_abs_im(),
                    "max_abs_re": max_abs_re(&clean),
                    "real_axis_extent": cut::real_axis_extent(&clean, *band),
                    "segment_detected": ks.is_some(),
                    "ks_distance": ks,
                    "doublets": doublets.len(),
                    "poles": clean.poles.len(),
                    "zeros": clean.zeros.len(),
                    "excluded_at_infinity": clean.excluded_at_infinity,
                    "files": files,
                }),
                nonconvergent: false,
            }
        }
        Command::Convergence {
            spec,
            point,
            degrees,
            capacity,
        } => {
            let f = Function::load(spec, ctx)?;
            let top = *degrees.last().expect("validated");
            let s = f.series(f.default_expansion(), 2 * top + 8, ctx)?;
            let z = ctx.complex(point[0], point[1]);
            let report = cut::convergence_factor_for(&s, |z| f.eval(z), &z, degrees, *capacity)?;
            Outcome {
                report: json!({ "spec": spec, "convergence": report }),
                nonconvergent: false,
            }
        }
        Command::Badness {
            spec,
            rect,
            grid,
            eps,
            degrees,
        } => {
            let f = Function::load(spec, ctx)?;
            let top = *degrees.last().expect("validated");
            let s = f.series(f.default_expansion(), 2 * top + 1, ctx)?;
            let sing = f.singularities(ctx);
            let rows: Vec<Badness> = degrees
                .par_iter()
                .map(|&m| -> Result<Badness, CliError> {
                    let pa = near_diagonal(&s, m)?;
                    Ok(cut::capacity_badness_for(|z| f.eval(z), &sing, &pa, *rect, *grid, *eps)?)
                })
                .collect::<Result<_, _>>()?;
            let monotone = rows.windows(2).all(|w| w[1].area <= w[0].area);
            let table: Vec<Value> = degrees
                .iter()
                .zip(&rows)
                .map(|(m, b)| {
                    let mut v = to_json(b);
                    v["degree"] = json!(m);
                    v
                })
                .collect();
            Outcome {
                report: json!({
                    "spec": spec,
                    "rect": rect,
                    "grid": grid,
                    "eps": eps,
                    "table": table,
                    "non_increasing": monotone,
                }),
                nonconvergent: false,
            }
        }
        Command::Hem {
            network,
            alpha,
            max_m,
            tol,
        } => {
            let net = load_network(network, ctx)?;
            let sol = hem::solve(&net, *alpha, *max_m, *tol, ctx)?;
            let volts = sol.voltages.as_ref().map(|v| voltage_table(&net, v));
            let mismatch = match &sol.voltages {
                Some(v) => Some(hem::mismatch(&net, v, *alpha)?),
                None => None,
            };
            Outcome {
                nonconvergent: !sol.converged(),
                report: json!({
                    "verdict": sol.report.verdict,
                    "alpha": alpha,
                    (if sol.converged() { "voltages" } else { "last_voltages" }): volts,
                    "mismatch": mismatch,
                    "trace": trace(&sol.report),
                    "note": (!sol.converged()).then_some(
                        "approximants did not settle; for this embedding that signals no solution only \
                         when no branch-cut junction blocks the real axis short of alpha"
                    ),
                }),
            }
        }
        Command::Snbp {
            network,
            max_m,
            horizon,
        } => {
            let net = load_network(network, ctx)?;
            match hem::snbp_estimate(&net, *max_m, *horizon, ctx) {
                Ok(est) => Outcome {
                    report: snbp_report(&est),
                    nonconvergent: false,
                },
                Err(HemError::NoSnbp { horizon }) => Outcome {
                    report: json!({
                        "status": "no_snbp",
                        "message": format!("no SNBP detected below horizon {horizon}"),
                        "horizon": horizon,
                    }),
                    nonconvergent: false,
                },
                Err(e) => return Err(e.into()),
            }
        }
    };
    let mut report = json!({ "config": cfg, "bits": cfg.bits });
    if let (Value::Object(dst), Value::Object(src)) = (&mut report, outcome.report.take()) {
        dst.extend(src);
    }
    if let Some(out) = &cfg.out {
        let name = format!("{}.json", report_stem(cfg));
        let path = write(out, &name, &(serde_json::to_string_pretty(&report).expect("json") + "\n"))?;
        report["report_file"] = json!(path);
    }
    outcome.report = report;
    Ok(outcome)
}

fn report_stem(cfg: &RunConfig) -> String {
    match &cfg.command {
        Command::Case { case, degree, .. } => format!("case_{case}_{degree}"),
        Command::Logfn {
            spec,
            expansion,
            degree,
            plane,
            ..
        } => format!("logfn_{}_{expansion}_{degree}_{plane}", spec.label()),
        Command::Convergence { spec, .. } => format!("convergence_{}", spec.label()),
        Command::Badness { spec, .. } => format!("badness_{}", spec.label()),
        Command::Hem { network, .. } => format!("hem_{}", file_label(network)),
        Command::Snbp { network, .. } => format!("snbp_{}", file_label(network)),
    }
}

fn file_label(p: &Path) -> String {
    p.file_stem().map_or("network".into(), |s| s.to_string_lossy().into_owned())
}

fn load_network(path: &Path, ctx: PrecisionContext) -> Result<Network, CliError> {
    let text = read(path)?;
    Network::from_json(&text, ctx).map_err(|e| CliError::from(e).with_path(path))
}

fn min_abs_im(p: &RootPortrait) -> Option<f64> {
    p.poles.iter().map(|r| r.im().to_f64().abs()).reduce(f64::min)
}

fn max_abs_re(p: &RootPortrait) -> f64 {
    p.poles
        .iter()
        .chain(&p.zeros)
        .map(|r| r.re().to_f64().abs())
        .fold(0.0, f64::max)
}

fn voltage_table(net: &Network, volts: &[BigComplex]) -> Vec<Value> {
    net.buses()
        .iter()
        .zip(volts)
        .map(|(b, v)| {
            json!({
                "bus": b.id,
                "re": fmt_real(v.re(), 30),
                "im": fmt_real(v.im(), 30),
                "abs": v.abs_f64(),
            })
        })
        .collect()
}

fn trace(r: &SolveReport) -> Value {
    // JSON has no infinity; unavailable differences are written as null
    let finite = |xs: &[f64]| -> Vec<Option<f64>> { xs.iter().map(|&x| x.is_finite().then_some(x)).collect() };
    json!({
        "degrees": r.degrees,
        "differences": finite(&r.differences),
        "mismatches": finite(&r.mismatches),
        "tol": r.tol,
        "embedding": r.embedding,
    })
}

fn snbp_report(est: &SnbpEstimate) -> Value {
    json!({
        "status": if est.is_stable() { "stable" } else { "unstable" },
        "alpha_star": est.alpha_star,
        "spread": est.spread,
        "degrees": est.degrees,
        "estimates": est.estimates,
        "bus": est.bus,
    })
}
