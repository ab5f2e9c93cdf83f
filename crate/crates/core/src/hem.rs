//! Holomorphic-embedding power flow for networks of PQ buses and one slack.
//!
//! The classical embedding keeps the slack at 1 and scales every injection and
//! shunt by `alpha`:
//!
//! ```text
//! sum_k Y_ik V_k(a) + a y_i V_i(a) = a conj(S_i) / conj(V_i(conj a))
//! ```
//!
//! where `Y` is assembled from the series branches only, so `V = 1` solves
//! the problem at `a = 0`. The conjugate voltage is carried by the reflected
//! reciprocal series `W = 1/V`, whose conjugate-argument series has
//! coefficients `conj(W[n])`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cut::{self, CutError, Plane};
use crate::kernel::{BigComplex, KernelError, PrecisionContext};
use crate::pade::{self, PadeError};
use crate::roots;
use crate::series::{ExpansionPoint, PowerSeries, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HemError {
    #[error("network file, line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("transfer admittance matrix is singular; the network is degenerate")]
    DegenerateNetwork,
    #[error("voltage at bus {bus} is zero")]
    SingularEvaluation { bus: String },
    #[error("series holds orders 0..={have}; cannot extend to order {requested}")]
    OrderMismatch { have: usize, requested: usize },
    #[error("no SNBP detected below horizon {horizon}")]
    NoSnbp { horizon: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Pade(#[from] PadeError),
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BusKind {
    Slack,
    Pq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: String,
    pub kind: BusKind,
    /// Complex power injection, negative for load.
    pub s: BigComplex,
    pub y_shunt: BigComplex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub y_series: BigComplex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    buses: Vec<Bus>,
    branches: Vec<Branch>,
    slack: usize,
    ctx: PrecisionContext,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    buses: Vec<BusRecord>,
    branches: Vec<BranchRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BusRecord {
    id: BusId,
    kind: BusKind,
    #[serde(default)]
    s: Option<[Scalar; 2]>,
    #[serde(default)]
    y_shunt: Option<[Scalar; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchRecord {
    from: BusId,
    to: BusId,
    y_series: [Scalar; 2],
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BusId {
    Number(serde_json::Number),
    Text(String),
}

impl BusId {
    fn key(&self) -> String {
        match self {
            BusId::Number(n) => n.to_string(),
            BusId::Text(s) => s.clone(),
        }
    }
}

impl Network {
    /// Checks for exactly one slack bus, unique ids, valid branch ends and a
    /// connected graph.
    pub fn new(buses: Vec<Bus>, branches: Vec<Branch>, ctx: PrecisionContext) -> Result<Self, HemError> {
        let slacks: Vec<usize> = (0..buses.len()).filter(|&i| buses[i].kind == BusKind::Slack).collect();
        if slacks.len() != 1 {
            return Err(HemError::InvalidNetwork(format!(
                "exactly one slack bus required, found {}",
                slacks.len()
            )));
        }
        let mut seen = HashMap::new();
        for (i, b) in buses.iter().enumerate() {
            if seen.insert(b.id.clone(), i).is_some() {
                return Err(HemError::InvalidNetwork(format!("duplicate bus id {:?}", b.id)));
            }
        }
        let mut adj = vec![Vec::new(); buses.len()];
        for br in &branches {
            if br.from >= buses.len() || br.to >= buses.len() {
                return Err(HemError::InvalidNetwork("branch refers to a missing bus".into()));
            }
            if br.from == br.to {
                return Err(HemError::InvalidNetwork(format!("branch loops on bus {:?}", buses[br.from].id)));
            }
            adj[br.from].push(br.to);
            adj[br.to].push(br.from);
        }
        let mut reached = vec![false; buses.len()];
        let mut queue = VecDeque::from([slacks[0]]);
        reached[slacks[0]] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                if !reached[j] {
                    reached[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if let Some(i) = reached.iter().position(|r| !r) {
            return Err(HemError::InvalidNetwork(format!(
                "bus {:?} is not connected to the slack",
                buses[i].id
            )));
        }
        let buses = buses
            .into_iter()
            .map(|b| Bus {
                s: b.s.with_prec(ctx.bits()),
                y_shunt: b.y_shunt.with_prec(ctx.bits()),
                ..b
            })
            .collect();
        let branches = branches
            .into_iter()
            .map(|b| Branch {
                y_series: b.y_series.with_prec(ctx.bits()),
                ..b
            })
            .collect();
        Ok(Network {
            buses,
            branches,
            slack: slacks[0],
            ctx,
        })
    }

    /// Parses `{"buses": [{"id", "kind", "s", "y_shunt"}], "branches":
    /// [{"from", "to", "y_series"}]}`. Complex values are `[re, im]` pairs of
    /// numbers or decimal strings; `s` and `y_shunt` default to zero.
    pub fn from_json(text: &str, ctx: PrecisionContext) -> Result<Self, HemError> {
        let file: NetworkFile = serde_json::from_str(text).map_err(|e| HemError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let value = |v: &Option<[Scalar; 2]>| -> Result<BigComplex, HemError> {
            match v {
                Some([re, im]) => Ok(ctx.parse(&re.text(), &im.text())?),
                None => Ok(ctx.zero()),
            }
        };
        let mut index = HashMap::new();
        let mut buses = Vec::with_capacity(file.buses.len());
        for (i, b) in file.buses.iter().enumerate() {
            index.insert(b.id.key(), i);
            buses.push(Bus {
                id: b.id.key(),
                kind: b.kind,
                s: value(&b.s)?,
                y_shunt: value(&b.y_shunt)?,
            });
        }
        let lookup = |id: &BusId| {
            index
                .get(&id.key())
                .copied()
                .ok_or_else(|| HemError::InvalidNetwork(format!("branch refers to unknown bus {:?}", id.key())))
        };
        let mut branches = Vec::with_capacity(file.branches.len());
        for br in &file.branches {
            let [re, im] = &br.y_series;
            branches.push(Branch {
                from: lookup(&br.from)?,
                to: lookup(&br.to)?,
                y_series: ctx.parse(&re.text(), &im.text())?,
            });
        }
        Network::new(buses, branches, ctx)
    }

    /// Slack bus "1" joined to PQ bus "2" by one branch.
    pub fn two_bus(y_series: BigComplex, s: BigComplex, ctx: PrecisionContext) -> Self {
        let buses = vec![
            Bus {
                id: "1".into(),
                kind: BusKind::Slack,
                s: ctx.zero(),
                y_shunt: ctx.zero(),
            },
            Bus {
                id: "2".into(),
                kind: BusKind::Pq,
                s,
                y_shunt: ctx.zero(),
            },
        ];
        let branches = vec![Branch { from: 0, to: 1, y_series }];
        Network::new(buses, branches, ctx).expect("two-bus network is valid")
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn slack(&self) -> usize {
        self.slack
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn pq_buses(&self) -> Vec<usize> {
        (0..self.buses.len()).filter(|&i| i != self.slack).collect()
    }

    /// Nodal admittance matrix of the series branches (shunts excluded).
    pub fn admittance(&self) -> Vec<Vec<BigComplex>> {
        let n = self.buses.len();
        let mut y = vec![vec![self.ctx.zero(); n]; n];
        for br in &self.branches {
            let (f, t) = (br.from, br.to);
            y[f][f] = &y[f][f] + &br.y_series;
            y[t][t] = &y[t][t] + &br.y_series;
            y[f][t] = &y[f][t] - &br.y_series;
            y[t][f] = &y[t][f] - &br.y_series;
        }
        y
    }

    /// The network with every injection and admittance conjugated.
    pub fn conjugated(&self) -> Network {
        Network {
            buses: self
                .buses
                .iter()
                .map(|b| Bus {
                    s: b.s.conj(),
                    y_shunt: b.y_shunt.conj(),
                    ..b.clone()
                })
                .collect(),
            branches: self
                .branches
                .iter()
                .map(|b| Branch {
                    y_series: b.y_series.conj(),
                    ..b.clone()
                })
                .collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Embedding {
    /// Flat germ; injections and shunts scaled by `alpha`; slack held at 1.
    Classical,
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("classical")
    }
}

/// Per-bus voltage series `V` and reciprocal series `W = 1/V`, indexed
/// `[bus][order]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoltageSeries {
    v: Vec<Vec<BigComplex>>,
    w: Vec<Vec<BigComplex>>,
    embedding: Embedding,
    ctx: PrecisionContext,
}

impl VoltageSeries {
    /// Highest order held.
    pub fn order(&self) -> usize {
        self.v[0].len() - 1
    }

    pub fn v(&self, bus: usize) -> &[BigComplex] {
        &self.v[bus]
    }

    pub fn w(&self, bus: usize) -> &[BigComplex] {
        &self.w[bus]
    }

    pub fn embedding(&self) -> Embedding {
        self.embedding
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn bus_series(&self, bus: usize) -> PowerSeries {
        PowerSeries::new(ExpansionPoint::Zero, self.v[bus].clone(), self.ctx).expect("germ is present")
    }

    /// Largest `|sum_m V[n-m] W[m] - delta_n0|` over buses at order `n`.
    pub fn convolution_residual(&self, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, w) in self.v.iter().zip(&self.w) {
            let mut s = self.ctx.zero();
            for m in 0..=n {
                s = &s + &(&v[n - m] * &w[m]);
            }
            if n == 0 {
                s = &s - &self.ctx.one();
            }
            worst = worst.max(s.abs_f64());
        }
        worst
    }
}

pub fn build_germ(net: &Network, ctx: PrecisionContext) -> VoltageSeries {
    let n = net.buses().len();
    VoltageSeries {
        v: vec![vec![ctx.one()]; n],
        w: vec![vec![ctx.one()]; n],
        embedding: Embedding::Classical,
        ctx,
    }
}

/// Appends order `n`, which must be one past the highest order held.
pub fn extend(net: &Network, vs: &VoltageSeries, n: usize) -> Result<VoltageSeries, HemError> {
    if n == 0 || n != vs.order() + 1 {
        return Err(HemError::OrderMismatch {
            have: vs.order(),
            requested: n,
        });
    }
    let ctx = vs.ctx;
    let pq = net.pq_buses();
    let y = net.admittance();
    let mut a: Vec<Vec<BigComplex>> = pq
        .iter()
        .map(|&i| pq.iter().map(|&k| y[i][k].with_prec(ctx.bits())).collect())
        .collect();
    let mut rhs: Vec<BigComplex> = pq
        .iter()
        .map(|&i| {
            let bus = &net.buses()[i];
            let inj = &bus.s.conj().with_prec(ctx.bits()) * &vs.w[i][n - 1].conj();
            &inj - &(&bus.y_shunt.with_prec(ctx.bits()) * &vs.v[i][n - 1])
        })
        .collect();
    let x = pade::gauss_full_pivot(&mut a, &mut rhs, ctx).ok_or(HemError::DegenerateNetwork)?;

    let mut out = vs.clone();
    out.v[net.slack()].push(ctx.zero());
    for (&i, xi) in pq.iter().zip(x) {
        out.v[i].push(xi);
    }
    for bus in 0..out.v.len() {
        // W[0] = 1 since V[0] = 1
        let mut s = ctx.zero();
        for m in 0..n {
            s = &s - &(&out.w[bus][m] * &out.v[bus][n - m]);
        }
        out.w[bus].push(s);
    }
    Ok(out)
}

/// Series through order `n`.
pub fn series_to_order(net: &Network, n: usize, ctx: PrecisionContext) -> Result<VoltageSeries, HemError> {
    let mut vs = build_germ(net, ctx);
    for k in 1..=n {
        vs = extend(net, &vs, k)?;
    }
    Ok(vs)
}

/// Largest residual `|conj(V_i) (sum_k Y_ik V_k + a y_i V_i) - a conj(S_i)|`
/// over the PQ buses.
pub fn mismatch(net: &Network, volts: &[BigComplex], alpha: f64) -> Result<f64, HemError> {
    if volts.len() != net.buses().len() {
        return Err(HemError::InvalidArgument(format!(
            "{} voltages for {} buses",
            volts.len(),
            net.buses().len()
        )));
    }
    let ctx = volts[0].ctx();
    for (b, v) in net.buses().iter().zip(volts) {
        if v.is_zero() {
            return Err(HemError::SingularEvaluation { bus: b.id.clone() });
        }
    }
    let y = net.admittance();
    let a = ctx.float(alpha);
    let mut worst: f64 = 0.0;
    for i in net.pq_buses() {
        let bus = &net.buses()[i];
        let mut current = bus.y_shunt.with_prec(ctx.bits()).scale(&a);
        current = &current * &volts[i];
        for (k, vk) in volts.iter().enumerate() {
            current = &current + &(&y[i][k] * vk);
        }
        let r = &(&volts[i].conj() * &current) - &bus.s.conj().with_prec(ctx.bits()).scale(&a);
        worst = worst.max(r.abs_f64());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Nonconvergent,
}

/// Error-versus-degree trace of a solve. `differences[j]` is the largest
/// change in any bus voltage between `degrees[j-1]` and `degrees[j]`
/// (infinite when an evaluation failed or for the first degree).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub alpha: f64,
    pub tol: f64,
    pub degrees: Vec<usize>,
    pub differences: Vec<f64>,
    pub mismatches: Vec<f64>,
    pub verdict: Verdict,
    pub embedding: Embedding,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Voltages at the last degree tried; only trustworthy when converged.
    pub voltages: Option<Vec<BigComplex>>,
    pub report: SolveReport,
}

impl Solution {
    pub fn converged(&self) -> bool {
        self.report.verdict == Verdict::Converged
    }
}

/// Evaluates `[m/m+1]` of every bus series at `alpha` for `m = 1..=max_m`
/// and stops once successive values differ by less than `tol` and the
/// mismatch is below `tol`. Divergence of the approximants is reported as a
/// nonconvergent verdict; it points to insolvability only for this
/// embedding and only when no branch-cut junction blocks the real axis
/// short of `alpha`.
pub fn solve(net: &Network, alpha: f64, max_m: usize, tol: f64, ctx: PrecisionContext) -> Result<Solution, HemError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(HemError::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    if max_m == 0 {
        return Err(HemError::InvalidArgument("max_m must be at least 1".into()));
    }
    let vs = series_to_order(net, 2 * max_m + 1, ctx)?;
    let a = ctx.real(alpha);
    let mut report = SolveReport {
        alpha,
        tol,
        degrees: Vec::new(),
        differences: Vec::new(),
        mismatches: Vec::new(),
        verdict: Verdict::Nonconvergent,
        embedding: vs.embedding(),
    };
    let mut previous: Option<Vec<BigComplex>> = None;
    let mut last = None;
    for m in 1..=max_m {
        let volts = evaluate_at(&vs, m, &a);
        report.degrees.push(m);
        let (diff, mis) = match &volts {
            Some(v) => {
                let diff = previous.as_ref().map_or(f64::INFINITY, |p| {
                    p.iter().zip(v).map(|(x, y)| (x - y).abs_f64()).fold(0.0, f64::max)
                });
                let mis = mismatch(net, v, alpha).unwrap_or(f64::INFINITY);
                (diff, mis)
            }
            None => (f64::INFINITY, f64::INFINITY),
        };
        report.differences.push(diff);
        report.mismatches.push(mis);
        previous = volts.clone();
        if volts.is_some() {
            last = volts;
        }
        if diff < tol && mis < tol {
            report.verdict = Verdict::Converged;
            break;
        }
    }
    Ok(Solution {
        voltages: last,
        report,
    })
}

/// `[m/m+1]` of each bus series at `alpha`; `None` if any evaluation fails.
fn evaluate_at(vs: &VoltageSeries, m: usize, alpha: &BigComplex) -> Option<Vec<BigComplex>> {
    (0..vs.v.len())
        .map(|bus| {
            let s = PowerSeries::new(ExpansionPoint::Zero, vs.v[bus][..=2 * m + 1].to_vec(), vs.ctx).ok()?;
            let pa = pade::build_reducing(&s, m, m + 1).ok()?;
            pa.evaluate(alpha).ok()
        })
        .collect()
}

/// Half-width of the band around the positive real axis in which a pole
/// counts as real.
pub const SNBP_BAND: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnbpEstimate {
    /// Smallest positive real pole at the highest degree.
    pub alpha_star: f64,
    /// `(max - min) / min` of the estimates over the last three degrees.
    pub spread: f64,
    pub degrees: Vec<usize>,
    pub estimates: Vec<f64>,
    /// Bus whose series produced `alpha_star`.
    pub bus: String,
}

impl SnbpEstimate {
    pub fn is_stable(&self) -> bool {
        self.spread < 0.05
    }
}

/// Smallest positive real pole of the Froissart-filtered `[m/m+1]` over all
/// PQ bus series, for `m = max_m - 2, max_m - 1, max_m`.
pub fn snbp_estimate(net: &Network, max_m: usize, horizon: f64, ctx: PrecisionContext) -> Result<SnbpEstimate, HemError> {
    if max_m < 10 {
        return Err(HemError::InvalidArgument(format!("max_m must be at least 10, got {max_m}")));
    }
    let vs = series_to_order(net, 2 * max_m + 1, ctx)?;
    let degrees: Vec<usize> = (max_m - 2..=max_m).collect();
    let mut estimates = Vec::with_capacity(3);
    let mut bus_of_last = String::new();
    for &m in &degrees {
        let mut best: Option<(f64, usize)> = None;
        for bus in net.pq_buses() {
            if let Some(x) = smallest_real_pole(&vs, bus, m, horizon)? {
                if best.map_or(true, |(b, _)| x < b) {
                    best = Some((x, bus));
                }
            }
        }
        let (x, bus) = best.ok_or(HemError::NoSnbp { horizon })?;
        estimates.push(x);
        bus_of_last = net.buses()[bus].id.clone();
    }
    let lo = estimates.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SnbpEstimate {
        alpha_star: *estimates.last().expect("three degrees"),
        spread: (hi - lo) / lo,
        degrees,
        estimates,
        bus: bus_of_last,
    })
}

fn smallest_real_pole(vs: &VoltageSeries, bus: usize, m: usize, horizon: f64) -> Result<Option<f64>, HemError> {
    let s = PowerSeries::new(ExpansionPoint::Zero, vs.v[bus][..=2 * m + 1].to_vec(), vs.ctx)
        .expect("germ is present");
    let pa = pade::build_reducing(&s, m, m + 1)?;
    let p = cut::portrait(&pa, Plane::Alpha, roots::default_tol(vs.ctx))?;
    let (clean, _) = cut::froissart_filter(&p, cut::default_pair_tol(&p));
    Ok(clean
        .poles
        .iter()
        .filter(|r| r.im().to_f64().abs() < SNBP_BAND)
        .map(|r| r.re().to_f64())
        .filter(|&x| x > 0.0 && x < horizon)
        .fold(None, |best: Option<f64>, x| Some(best.map_or(x, |b| b.min(x)))))
}

/// Closed form `(1 + sqrt(1 + 4 a S / y)) / 2` of the two-bus problem with a
/// real load `S` and a real branch admittance `y`.
pub fn two_bus_voltage(y_series: f64, s: f64, alpha: f64, ctx: PrecisionContext) -> BigComplex {
    let disc = Float::with_val(ctx.bits(), 1) + ctx.float(4.0 * s) * ctx.float(alpha) / ctx.float(y_series);
    let root = BigComplex::from_real(disc).sqrt();
    (&ctx.one() + &root).scale(&ctx.float(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn two_bus(s: f64) -> Network {
        let c = ctx();
        Network::two_bus(c.real(10.0), c.real(s), c)
    }

    #[test]
    fn germ_is_flat() {
        let c = ctx();
        let net = two_bus(-1.0);
        let vs = build_germ(&net, c);
        assert_eq!(vs.order(), 0);
        assert_eq!(vs.v(0), &[c.one()]);
        assert_eq!(vs.v(1), &[c.one()]);
        assert_eq!(mismatch(&net, &[c.one(), c.one()], 0.0).unwrap(), 0.0);
    }

    #[test]
    fn two_bus_leading_coefficients() {
        let vs = series_to_order(&two_bus(-1.0), 4, ctx()).unwrap();
        let got: Vec<f64> = vs.v(1).iter().map(|c| c.re().to_f64()).collect();
        for (g, want) in got[1..].iter().zip([-0.1, -0.01, -0.002, -0.0005]) {
            assert!((g - want).abs() < 1e-15, "{g} vs {want}");
        }
        assert!(vs.v(0)[1..].iter().all(BigComplex::is_zero));
    }

    #[test]
    fn extend_rejects_wrong_order() {
        let net = two_bus(-1.0);
        let vs = build_germ(&net, ctx());
        assert_eq!(
            extend(&net, &vs, 2),
            Err(HemError::OrderMismatch { have: 0, requested: 2 })
        );
    }

    #[test]
    fn unloaded_network_stays_flat() {
        let vs = series_to_order(&two_bus(0.0), 6, ctx()).unwrap();
        assert!(vs.v(1)[1..].iter().all(BigComplex::is_zero));
    }

    #[test]
    fn flat_voltage_mismatch_is_the_load() {
        let c = ctx();
        let m = mismatch(&two_bus(-1.0), &[c.one(), c.one()], 1.0).unwrap();
        assert!((m - 1.0).abs() < 1e-30);
    }

    #[test]
    fn closed_form_has_tiny_mismatch() {
        let c = ctx();
        let v2 = two_bus_voltage(10.0, -1.0, 1.0, c);
        assert!(mismatch(&two_bus(-1.0), &[c.one(), v2], 1.0).unwrap() < 1e-30);
    }

    #[test]
    fn zero_voltage_is_an_error() {
        let c = ctx();
        assert!(matches!(
            mismatch(&two_bus(-1.0), &[c.one(), c.zero()], 1.0),
            Err(HemError::SingularEvaluation { .. })
        ));
    }

    #[test]
    fn network_validation() {
        let c = ctx();
        let two_slacks = r#"{"buses": [{"id": 1, "kind": "slack"}, {"id": 2, "kind": "slack"}],
            "branches": [{"from": 1, "to": 2, "y_series": [10, 0]}]}"#;
        assert!(matches!(Network::from_json(two_slacks, c), Err(HemError::InvalidNetwork(_))));
        let island = r#"{"buses": [{"id": 1, "kind": "slack"}, {"id": 2, "kind": "pq", "s": [-1, 0]}],
            "branches": []}"#;
        assert!(matches!(Network::from_json(island, c), Err(HemError::InvalidNetwork(_))));
        let unknown = r#"{"buses": [{"id": 1, "kind": "slack", "v": 1}], "branches": []}"#;
        assert!(matches!(Network::from_json(unknown, c), Err(HemError::Parse { .. })));
        let ok = r#"{"buses": [{"id": "a", "kind": "slack"}, {"id": "b", "kind": "pq", "s": ["-1", "0"]}],
            "branches": [{"from": "a", "to": "b", "y_series": [10, 0]}]}"#;
        let net = Network::from_json(ok, c).unwrap();
        assert_eq!(net.pq_buses(), vec![1]);
        assert_eq!(net, {
            let mut n = two_bus(-1.0);
            n.buses[0].id = "a".into();
            n.buses[1].id = "b".into();
            n
        });
    }

    #[test]
    fn two_bus_solve_and_divergence() {
        let c = ctx();
        let net = two_bus(-1.0);
        let sol = solve(&net, 1.0, 30, 1e-12, c).unwrap();
        assert!(sol.converged());
        let v2 = sol.voltages.unwrap()[1].to_c64();
        assert!((v2.re - (1.0 + 0.6f64.sqrt()) / 2.0).abs() < 1e-12 && v2.im.abs() < 1e-12);

        let bad = solve(&net, 2.6, 30, 1e-12, c).unwrap();
        assert_eq!(bad.report.verdict, Verdict::Nonconvergent);
        assert_eq!(bad.report.degrees.len(), 30);
    }

    #[test]
    fn snbp_of_two_bus() {
        let est = snbp_estimate(&two_bus(-1.0), 30, 100.0, ctx()).unwrap();
        assert!((est.alpha_star - 2.5).abs() < 0.125, "{est:?}");
        assert!(est.is_stable());
        assert_eq!(
            snbp_estimate(&two_bus(0.0), 12, 1e6, ctx()),
            Err(HemError::NoSnbp { horizon: 1e6 })
        );
    }
}
