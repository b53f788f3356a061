//! Seeded batch runs and their machine-readable reports.
//!
//! Every run is a pure function of its configuration: tuples come from
//! per-index substreams of the master seed and results are listed in sample
//! order, so the same configuration always yields the same bytes.
//!
//! A [`ReportEnvelope`] serializes to a JSON object with exactly the keys
//! `command`, `seed`, `config`, `results`, `summary`, `version`. The CSV form
//! has the header `section,path,value`: one row per JSON leaf, where
//! `section` is the top-level key, `path` the JSON pointer of the leaf inside
//! that section (empty for scalar sections) and `value` the leaf as JSON text.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::certifier::{
    certify_complex_region, certify_interval, extend_by_symmetry, GridConfig, ScalarFunction,
    DEFAULT_DELTA_COMPLEX, DEFAULT_DELTA_REAL,
};
use crate::cochain::{empirical_sup_defect, Cochain, Domain};
use crate::error::{Error, Result};
use crate::flags::{triple_ratio, Flag3};
use crate::hyperbolic_boundary::{
    cartan_invariant, projective_from_circle, restrict_to_h3, ComplexBoundaryPoint, RealBoundaryPoint,
};
use crate::projective::{cross_ratio, Field};
use crate::sampling::{
    sample_generic, ComplexBoundarySampler, Coordinates, FlagSampler, RealBoundarySampler, SampledBatch,
};
use crate::volume::{tetrahedron_volume, vol2, vol3_sphere, LobachevskyEvaluator};

pub const CSV_HEADER: [&str; 3] = ["section", "path", "value"];
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_ESCAPE_HIGH: f64 = 1e3;
pub const DEFAULT_ESCAPE_LOW: f64 = 1e-3;
pub const DEFAULT_COCYCLE_THRESHOLD: f64 = 1e-7;

/// Boundary model a sampler draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `∂H²_ℝ = S¹`.
    S1,
    /// `∂Hⁿ_ℝ = S^{n−1}`.
    Sn(usize),
    /// `∂Hⁿ_ℂ = S^{2n−1}`.
    ComplexHyperbolic(usize),
    /// Full flags in ℝ³.
    Flags3,
}

impl Model {
    /// Parses `s1`, `sn`, `complex-hyperbolic` or `flags3` with dimension `n`.
    pub fn parse(name: &str, n: usize) -> Result<Self> {
        match name {
            "s1" => Ok(Model::S1),
            "sn" if n >= 2 => Ok(Model::Sn(n)),
            "complex-hyperbolic" | "complex_hyperbolic" if n >= 1 => Ok(Model::ComplexHyperbolic(n)),
            "flags3" => Ok(Model::Flags3),
            "sn" | "complex-hyperbolic" | "complex_hyperbolic" => {
                Err(Error::InvalidConfig(format!("dimension {n} is too small for {name}")))
            }
            _ => Err(Error::InvalidConfig(format!("unknown model `{name}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub model: Model,
    pub tuple_size: usize,
    pub count: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl SamplerConfig {
    pub fn new(model: Model, tuple_size: usize, count: usize, seed: u64) -> Self {
        Self {
            model,
            tuple_size,
            count,
            seed,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("count must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if !(2..=16).contains(&self.tuple_size) {
            return Err(Error::InvalidConfig(format!(
                "tuple size {} outside 2..=16",
                self.tuple_size
            )));
        }
        Ok(())
    }

    fn echo(&self) -> Value {
        json!({
            "model": self.model,
            "tuple_size": self.tuple_size,
            "count": self.count,
            "tolerances": { "genericity": self.tolerance },
        })
    }
}

/// Generic tuples of one model.
#[derive(Clone, Debug, PartialEq)]
pub enum Tuples {
    Real(Vec<Vec<RealBoundaryPoint>>),
    Complex(Vec<Vec<ComplexBoundaryPoint>>),
    Flags(Vec<Vec<Flag3>>),
}

impl Tuples {
    pub fn len(&self) -> usize {
        match self {
            Tuples::Real(t) => t.len(),
            Tuples::Complex(t) => t.len(),
            Tuples::Flags(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coordinates(&self) -> Vec<Vec<Vec<f64>>> {
        fn coords<P: Coordinates>(t: &[Vec<P>]) -> Vec<Vec<Vec<f64>>> {
            t.iter().map(|tuple| tuple.iter().map(Coordinates::coordinates).collect()).collect()
        }
        match self {
            Tuples::Real(t) => coords(t),
            Tuples::Complex(t) => coords(t),
            Tuples::Flags(t) => coords(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TupleSample {
    pub tuples: Tuples,
    pub draws: usize,
}

impl TupleSample {
    pub fn acceptance_rate(&self) -> f64 {
        self.tuples.len() as f64 / self.draws.max(1) as f64
    }
}

/// `count` generic tuples for the configured model, deterministic in the seed.
pub fn sample_tuples(config: &SamplerConfig) -> Result<TupleSample> {
    config.validate()?;
    let (k, n, seed, tol) = (config.tuple_size, config.count, config.seed, config.tolerance);
    fn wrap<P>(b: SampledBatch<P>, f: impl FnOnce(Vec<Vec<P>>) -> Tuples) -> TupleSample {
        TupleSample {
            draws: b.draws,
            tuples: f(b.tuples),
        }
    }
    Ok(match config.model {
        Model::S1 => wrap(sample_generic(&RealBoundarySampler { dim: 2, tol }, k, n, seed)?, Tuples::Real),
        Model::Sn(d) => wrap(sample_generic(&RealBoundarySampler { dim: d, tol }, k, n, seed)?, Tuples::Real),
        Model::ComplexHyperbolic(d) => wrap(
            sample_generic(&ComplexBoundarySampler { dim: d, tol }, k, n, seed)?,
            Tuples::Complex,
        ),
        Model::Flags3 => wrap(sample_generic(&FlagSampler { tol }, k, n, seed)?, Tuples::Flags),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    /// `Vol₂/π ∈ {±1}` of a triple in `S¹`.
    OrientationClass,
    /// Cartan's angular invariant of a triple in `∂Hⁿ_ℂ`.
    Cartan,
    /// Triple ratio of a generic flag triple.
    TripleRatio,
    /// Cross ratio of a 4-tuple: real on `S¹`, oriented slice of `∂H³` otherwise.
    CrossRatio,
    /// Ideal tetrahedron volume of a 4-tuple in `∂Hⁿ_ℝ`, `n ≥ 3`.
    Vol3,
}

impl FromStr for Invariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "orientation_class" => Ok(Invariant::OrientationClass),
            "cartan" => Ok(Invariant::Cartan),
            "triple_ratio" => Ok(Invariant::TripleRatio),
            "cross_ratio" => Ok(Invariant::CrossRatio),
            "vol3" => Ok(Invariant::Vol3),
            _ => Err(Error::UnknownInvariant(s.to_string())),
        }
    }
}

impl Invariant {
    pub fn name(&self) -> &'static str {
        match self {
            Invariant::OrientationClass => "orientation_class",
            Invariant::Cartan => "cartan",
            Invariant::TripleRatio => "triple_ratio",
            Invariant::CrossRatio => "cross_ratio",
            Invariant::Vol3 => "vol3",
        }
    }

    /// Names of the components of each value.
    pub fn components(&self) -> &'static [&'static str] {
        match self {
            Invariant::CrossRatio => &["re", "im"],
            _ => &["value"],
        }
    }

    fn check(&self, config: &SamplerConfig) -> Result<()> {
        let (size, ok) = match self {
            Invariant::OrientationClass => (3, config.model == Model::S1),
            Invariant::Cartan => (3, matches!(config.model, Model::ComplexHyperbolic(_))),
            Invariant::TripleRatio => (3, config.model == Model::Flags3),
            Invariant::CrossRatio => (4, matches!(config.model, Model::S1 | Model::Sn(3..))),
            Invariant::Vol3 => (4, matches!(config.model, Model::Sn(3..))),
        };
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "{} is not defined on {:?}",
                self.name(),
                config.model
            )));
        }
        if config.tuple_size != size {
            return Err(Error::InvalidConfig(format!("{} takes {size}-tuples", self.name())));
        }
        Ok(())
    }

    /// Values in sample order.
    pub fn evaluate(&self, tuples: &Tuples) -> Result<Vec<Vec<f64>>> {
        let lob = LobachevskyEvaluator::fast();
        match (self, tuples) {
            (Invariant::OrientationClass, Tuples::Real(t)) => t
                .par_iter()
                .map(|x| Ok(vec![vol2(&x[0], &x[1], &x[2])? / PI]))
                .collect(),
            (Invariant::Cartan, Tuples::Complex(t)) => t
                .par_iter()
                .map(|x| Ok(vec![cartan_invariant(&x[0], &x[1], &x[2])?]))
                .collect(),
            (Invariant::TripleRatio, Tuples::Flags(t)) => {
                t.par_iter().map(|x| Ok(vec![triple_ratio(&x[0], &x[1], &x[2])?])).collect()
            }
            (Invariant::CrossRatio, Tuples::Real(t)) => t
                .par_iter()
                .map(|x| {
                    let z = if x[0].dim() == 2 {
                        let p = |i: usize| projective_from_circle(&x[i]);
                        cross_ratio(&p(0)?, &p(1)?, &p(2)?, &p(3)?)?
                    } else {
                        restrict_to_h3([&x[0], &x[1], &x[2], &x[3]])?.oriented()?.cross_ratio()?
                    };
                    let z = z
                        .finite()
                        .ok_or_else(|| Error::DegenerateTuple("cross ratio at infinity".into()))?;
                    Ok(vec![z.re, z.im])
                })
                .collect(),
            (Invariant::Vol3, Tuples::Real(t)) => t
                .par_iter()
                .map(|x| {
                    if x[0].dim() == 3 {
                        return Ok(vec![vol3_sphere([&x[0], &x[1], &x[2], &x[3]])?]);
                    }
                    let z = restrict_to_h3([&x[0], &x[1], &x[2], &x[3]])?
                        .oriented()?
                        .cross_ratio()?
                        .finite()
                        .ok_or_else(|| Error::DegenerateTuple("cross ratio at infinity".into()))?;
                    Ok(vec![tetrahedron_volume(z, &lob)])
                })
                .collect(),
            _ => Err(Error::InvalidConfig(format!("{} does not apply to these tuples", self.name()))),
        }
    }
}

/// The uniform result of every command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportEnvelope {
    pub command: String,
    pub seed: u64,
    /// Configuration echo; always holds a `tolerances` object.
    pub config: Value,
    pub results: Value,
    pub summary: Value,
    pub version: String,
}

impl ReportEnvelope {
    pub fn new(command: &str, seed: u64, config: Value, results: Value, summary: Value) -> Self {
        Self {
            command: command.to_string(),
            seed,
            config,
            results,
            summary,
            version: VERSION.to_string(),
        }
    }

    /// `summary.passed`, false when absent.
    pub fn passed(&self) -> bool {
        self.summary.get("passed").and_then(Value::as_bool).unwrap_or(false)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::InvalidConfig(format!("unknown format `{s}`"))),
        }
    }
}

fn escape_pointer(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn unescape_pointer(seg: &str) -> String {
    seg.replace("~1", "/").replace("~0", "~")
}

fn flatten(section: &str, value: &Value, path: String, rows: &mut Vec<[String; 3]>) {
    match value {
        Value::Object(m) if !m.is_empty() => {
            for (k, v) in m {
                flatten(section, v, format!("{path}/{}", escape_pointer(k)), rows);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, v) in a.iter().enumerate() {
                flatten(section, v, format!("{path}/{i}"), rows);
            }
        }
        leaf => rows.push([section.to_string(), path, leaf.to_string()]),
    }
}

/// Rows of the CSV form, header excluded.
pub fn csv_rows(env: &ReportEnvelope) -> Vec<[String; 3]> {
    let mut rows = Vec::new();
    let v = serde_json::to_value(env).expect("envelope is plain data");
    for key in ["command", "seed", "config", "results", "summary", "version"] {
        flatten(key, &v[key], String::new(), &mut rows);
    }
    rows
}

/// Inserts `leaf` at a JSON pointer, creating arrays for all-digit segments
/// and objects otherwise.
fn insert(root: &mut Value, pointer: &str, leaf: Value) -> Result<()> {
    if pointer.is_empty() {
        *root = leaf;
        return Ok(());
    }
    let segs: Vec<&str> = pointer
        .strip_prefix('/')
        .ok_or_else(|| Error::InvalidConfig(format!("bad path `{pointer}`")))?
        .split('/')
        .collect();
    let mut cur = root;
    for (i, seg) in segs.iter().enumerate() {
        let last = i + 1 == segs.len();
        let is_index = !seg.is_empty() && seg.bytes().all(|b| b.is_ascii_digit());
        if cur.is_null() {
            *cur = if is_index { Value::Array(Vec::new()) } else { Value::Object(Map::new()) };
        }
        let slot = match cur {
            Value::Array(a) if is_index => {
                let idx: usize = seg.parse().map_err(|_| Error::InvalidConfig(format!("bad index `{seg}`")))?;
                if a.len() <= idx {
                    a.resize(idx + 1, Value::Null);
                }
                &mut a[idx]
            }
            Value::Object(m) => m.entry(unescape_pointer(seg)).or_insert(Value::Null),
            _ => return Err(Error::InvalidConfig(format!("conflicting path `{pointer}`"))),
        };
        if last {
            *slot = leaf;
            return Ok(());
        }
        cur = slot;
    }
    Ok(())
}

pub fn write_report(env: &ReportEnvelope, format: ReportFormat, out: impl Write) -> Result<()> {
    let mut out = BufWriter::new(out);
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, env)?;
            out.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(CSV_HEADER)?;
            for row in csv_rows(env) {
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes the report to `path`, or to standard output when `path` is `None`.
pub fn emit_report(env: &ReportEnvelope, format: ReportFormat, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => write_report(env, format, File::create(p)?),
        None => write_report(env, format, io::stdout().lock()),
    }
}

pub fn parse_report(input: impl Read, format: ReportFormat) -> Result<ReportEnvelope> {
    match format {
        ReportFormat::Json => Ok(serde_json::from_reader(input)?),
        ReportFormat::Csv => {
            let mut r = csv::Reader::from_reader(input);
            if r.headers()?.iter().ne(CSV_HEADER) {
                return Err(Error::InvalidConfig("CSV header does not match section,path,value".into()));
            }
            let mut root = Map::new();
            for rec in r.records() {
                let rec = rec?;
                let leaf: Value = serde_json::from_str(&rec[2])?;
                let entry = root.entry(rec[0].to_string()).or_insert(Value::Null);
                insert(entry, &rec[1], leaf)?;
            }
            Ok(serde_json::from_value(Value::Object(root))?)
        }
    }
}

pub fn read_report(path: &Path, format: ReportFormat) -> Result<ReportEnvelope> {
    parse_report(File::open(path)?, format)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// `sample`: the tuples themselves, as coordinate lists.
pub fn run_sample(config: &SamplerConfig) -> Result<ReportEnvelope> {
    let sample = sample_tuples(config)?;
    let results: Vec<Value> = sample
        .tuples
        .coordinates()
        .into_iter()
        .enumerate()
        .map(|(i, t)| json!({ "index": i, "points": t }))
        .collect();
    Ok(ReportEnvelope::new(
        "sample",
        config.seed,
        config.echo(),
        Value::Array(results),
        json!({
            "tuples": sample.tuples.len(),
            "draws": sample.draws,
            "acceptance_rate": sample.acceptance_rate(),
            "passed": true,
        }),
    ))
}

/// `invariant`: one invariant evaluated on every sampled tuple.
pub fn run_invariant(config: &SamplerConfig, invariant: Invariant) -> Result<ReportEnvelope> {
    invariant.check(config)?;
    let sample = sample_tuples(config)?;
    let values = invariant.evaluate(&sample.tuples)?;
    let comps = invariant.components();
    let results: Vec<Value> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut m = Map::new();
            m.insert("index".into(), json!(i));
            for (name, x) in comps.iter().zip(v) {
                m.insert((*name).into(), finite_or_null(*x));
            }
            Value::Object(m)
        })
        .collect();
    let mut stats = Map::new();
    for (c, name) in comps.iter().enumerate() {
        let col: Vec<f64> = values.iter().map(|v| v[c]).collect();
        stats.insert(
            (*name).into(),
            json!({
                "min": finite_or_null(col.iter().copied().fold(f64::INFINITY, f64::min)),
                "max": finite_or_null(col.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            }),
        );
    }
    let mut cfg = config.echo();
    cfg["invariant"] = json!(invariant.name());
    Ok(ReportEnvelope::new(
        "invariant",
        config.seed,
        cfg,
        Value::Array(results),
        json!({ "samples": values.len(), "draws": sample.draws, "statistics": stats, "passed": true }),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub bins: usize,
    /// `|T|` above this counts as escaping to infinity.
    pub escape_high: f64,
    /// `|T|` below this counts as escaping to 0.
    pub escape_low: f64,
    /// Slack on the reference interval `[−π/2, π/2]`.
    pub range_slack: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            bins: 20,
            escape_high: DEFAULT_ESCAPE_HIGH,
            escape_low: DEFAULT_ESCAPE_LOW,
            range_slack: 1e-10,
        }
    }
}

fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Value {
    let bins = bins.max(1);
    let mut counts = vec![0usize; bins];
    let width = (hi - lo) / bins as f64;
    for &v in values {
        let b = if width > 0.0 { ((v - lo) / width).floor() } else { 0.0 };
        counts[(b.max(0.0) as usize).min(bins - 1)] += 1;
    }
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    json!({ "edges": edges, "counts": counts })
}

fn quantiles(values: &[f64]) -> Value {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let mut m = Map::new();
    for (name, q) in [("q01", 0.01), ("q25", 0.25), ("q50", 0.5), ("q75", 0.75), ("q99", 0.99)] {
        m.insert(name.into(), json!(v[((n - 1) as f64 * q).round() as usize]));
    }
    Value::Object(m)
}

/// Range of one invariant over sampled generic tuples, with a verdict on
/// whether the values stay in a compact reference set.
pub fn compactness_probe(config: &SamplerConfig, invariant: &str, probe: &ProbeConfig) -> Result<ReportEnvelope> {
    let inv: Invariant = invariant.parse()?;
    if !matches!(inv, Invariant::OrientationClass | Invariant::Cartan | Invariant::TripleRatio) {
        return Err(Error::UnknownInvariant(invariant.to_string()));
    }
    inv.check(config)?;
    if !(probe.escape_low > 0.0 && probe.escape_high > probe.escape_low) {
        return Err(Error::InvalidConfig("escape thresholds must satisfy 0 < low < high".into()));
    }
    let sample = sample_tuples(config)?;
    let values: Vec<f64> = inv.evaluate(&sample.tuples)?.into_iter().map(|v| v[0]).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut results = Map::new();
    let mut summary = Map::new();
    let verdict = match inv {
        Invariant::OrientationClass => {
            let plus = values.iter().filter(|&&v| v > 0.0).count();
            let minus = values.len() - plus;
            let classes = [plus, minus].iter().filter(|&&c| c > 0).count();
            results.insert("class_counts".into(), json!({ "+1": plus, "-1": minus }));
            summary.insert("classes".into(), json!(classes));
            "bounded-range"
        }
        Invariant::Cartan => {
            let half = PI / 2.0;
            results.insert("histogram".into(), histogram(&values, -half, half, probe.bins));
            summary.insert("reference_set".into(), json!([-half, half]));
            let inside = values.iter().all(|v| v.abs() <= half + probe.range_slack);
            if inside {
                "bounded-range"
            } else {
                "escape-detected"
            }
        }
        _ => {
            let logs: Vec<f64> = values.iter().map(|t| t.abs().log10()).collect();
            let lmin = logs.iter().copied().fold(f64::INFINITY, f64::min);
            let lmax = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            results.insert("histogram_log10_abs".into(), histogram(&logs, lmin, lmax, probe.bins));
            let above = values.iter().filter(|t| t.abs() > probe.escape_high).count();
            let below = values.iter().filter(|t| t.abs() < probe.escape_low).count();
            let negative = values.iter().filter(|t| **t < 0.0).count();
            summary.insert("observed_above_high".into(), json!(above));
            summary.insert("observed_below_low".into(), json!(below));
            summary.insert("negative".into(), json!(negative));
            summary.insert(
                "min_abs".into(),
                json!(values.iter().map(|t| t.abs()).fold(f64::INFINITY, f64::min)),
            );
            summary.insert("max_abs".into(), json!(values.iter().map(|t| t.abs()).fold(0.0, f64::max)));
            if above > 0 || below > 0 {
                "escape-detected"
            } else {
                "bounded-range"
            }
        }
    };
    results.insert("quantiles".into(), quantiles(&values));
    summary.insert("verdict".into(), json!(verdict));
    summary.insert("samples".into(), json!(values.len()));
    summary.insert("min".into(), json!(min));
    summary.insert("max".into(), json!(max));
    summary.insert("escape_high".into(), json!(probe.escape_high));
    summary.insert("escape_low".into(), json!(probe.escape_low));
    summary.insert("draws".into(), json!(sample.draws));
    summary.insert("passed".into(), json!(true));

    let mut cfg = config.echo();
    cfg["invariant"] = json!(inv.name());
    cfg["bins"] = json!(probe.bins);
    cfg["tolerances"]["escape_high"] = json!(probe.escape_high);
    cfg["tolerances"]["escape_low"] = json!(probe.escape_low);
    cfg["tolerances"]["range_slack"] = json!(probe.range_slack);
    Ok(ReportEnvelope::new(
        "probe-config-space",
        config.seed,
        cfg,
        Value::Object(results),
        Value::Object(summary),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeCocycle {
    /// On triples of `S¹`.
    Vol2,
    /// On 4-tuples of `S² = ∂H³`.
    Vol3,
}

impl FromStr for VolumeCocycle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vol2" => Ok(VolumeCocycle::Vol2),
            "vol3" => Ok(VolumeCocycle::Vol3),
            _ => Err(Error::InvalidConfig(format!("unknown cocycle `{s}`"))),
        }
    }
}

/// `verify-cocycle`: empirical `sup |δ Vol|` against `threshold`.
pub fn run_verify_cocycle(
    cocycle: VolumeCocycle,
    count: usize,
    seed: u64,
    tolerance: f64,
    threshold: f64,
) -> Result<ReportEnvelope> {
    let (name, report) = match cocycle {
        VolumeCocycle::Vol2 => {
            let f = Cochain::new(3, Domain::Circle, |x: &[RealBoundaryPoint]| vol2(&x[0], &x[1], &x[2]))
                .declare_alternating();
            let r = empirical_sup_defect(&f, &RealBoundarySampler { dim: 2, tol: tolerance }, count, seed)?;
            ("vol2", (r.sup_abs, r.argmax_index, r.argmax_tuple.iter().map(Coordinates::coordinates).collect::<Vec<_>>(), r.draws))
        }
        VolumeCocycle::Vol3 => {
            let f = Cochain::new(4, Domain::RealBoundary(3), |x: &[RealBoundaryPoint]| {
                vol3_sphere([&x[0], &x[1], &x[2], &x[3]])
            })
            .declare_alternating();
            let r = empirical_sup_defect(&f, &RealBoundarySampler { dim: 3, tol: tolerance }, count, seed)?;
            ("vol3", (r.sup_abs, r.argmax_index, r.argmax_tuple.iter().map(Coordinates::coordinates).collect::<Vec<_>>(), r.draws))
        }
    };
    let (sup, argmax, witness, draws) = report;
    let passed = sup <= threshold;
    Ok(ReportEnvelope::new(
        "verify-cocycle",
        seed,
        json!({
            "cocycle": name,
            "count": count,
            "tolerances": { "genericity": tolerance, "defect_threshold": threshold },
        }),
        json!({ "sup_abs_defect": sup, "argmax_index": argmax, "argmax_tuple": witness }),
        json!({ "samples": count, "draws": draws, "sup_abs_defect": sup, "threshold": threshold, "passed": passed }),
    ))
}

/// Functions offered by `certify-bound`.
pub const NAMED_FUNCTIONS: [&str; 7] = ["vol3", "zero", "constant", "identity", "log-modulus", "pole", "bump"];

/// `F` by name: `vol3` is the slice `Vol₃(∞, 0, 1, z)`, `bump` an
/// alternating real function built from a narrow bump at 3, `pole` is
/// `1/(1 − x)`.
pub fn named_function(name: &str, field: Field) -> Result<ScalarFunction> {
    let lob = LobachevskyEvaluator::fast();
    let f = match name {
        "vol3" => ScalarFunction::new("vol3", field, move |z: Complex64| {
            Ok(if z.im == 0.0 { 0.0 } else { tetrahedron_volume(z, &lob) })
        })
        .declare_alternating(),
        "zero" => ScalarFunction::new("zero", field, |_| Ok(0.0)).declare_alternating(),
        "constant" => ScalarFunction::new("constant", field, |_| Ok(1.0)),
        "identity" => ScalarFunction::new("identity", field, |z: Complex64| Ok(z.re)),
        "log-modulus" => ScalarFunction::new("log-modulus", field, |z: Complex64| Ok(z.norm().ln())),
        "pole" => ScalarFunction::new("pole", field, |z: Complex64| Ok((1.0 / (1.0 - z)).re)),
        "bump" if field == Field::Real => {
            let g = |x: f64| if x.is_finite() { (-((x - 3.0) / 0.15).powi(2)).exp() } else { 0.0 };
            ScalarFunction::real("bump", move |x| {
                g(x) - g(1.0 - x) - g(1.0 / x) + g(1.0 / (1.0 - x)) + g((x - 1.0) / x) - g(x / (x - 1.0))
            })
            .declare_alternating()
        }
        "bump" => return Err(Error::InvalidConfig("bump is a real function".into())),
        _ => return Err(Error::InvalidConfig(format!("unknown function `{name}`"))),
    };
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub function: String,
    pub field: Field,
    pub delta: Option<f64>,
    pub grid: GridConfig,
    /// Extend the certificate near 1 to the whole line by symmetry.
    pub extend: bool,
}

impl CertifyConfig {
    pub fn new(function: &str, field: Field) -> Self {
        Self {
            function: function.to_string(),
            field,
            delta: None,
            grid: GridConfig::default(),
            extend: false,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(match self.field {
            Field::Real => DEFAULT_DELTA_REAL,
            Field::Complex => DEFAULT_DELTA_COMPLEX,
        })
    }
}

/// `certify-bound`: a full certificate, or the refusal and its reason.
pub fn run_certify(config: &CertifyConfig, seed: u64) -> Result<ReportEnvelope> {
    let f = named_function(&config.function, config.field)?;
    let delta = config.delta();
    let issued = match config.field {
        Field::Real => certify_interval(&f, delta, &config.grid),
        Field::Complex => certify_complex_region(&f, delta, &config.grid),
    }
    .and_then(|c| if config.extend { extend_by_symmetry(&c, &f) } else { Ok(c) });
    let cfg = json!({
        "function": config.function,
        "field": config.field,
        "delta": delta,
        "grid": config.grid,
        "extend": config.extend,
        "tolerances": {
            "blowup_threshold": config.grid.blowup_threshold,
            "max_doublings": config.grid.max_doublings,
        },
    });
    let (results, summary) = match issued {
        Ok(cert) => (
            json!({ "status": "certified", "certificate": cert }),
            json!({
                "certified_bound": cert.certified_bound,
                "constant_c": cert.constant_c(),
                "k_max": cert.k_max,
                "passed": true,
            }),
        ),
        Err(e @ (Error::UnboundedDefect { .. } | Error::IterationOverflow(_) | Error::MissingAlternation)) => (
            json!({ "status": "refused", "reason": e.to_string() }),
            json!({ "passed": false }),
        ),
        Err(e) => return Err(e),
    };
    Ok(ReportEnvelope::new("certify-bound", seed, cfg, results, summary))
}
