//! Scenario files: a plain `key=value` format with `[section]` headers.
//!
//! ```text
//! schema=1
//! mode=krasnoselskij        # krasnoselskij | picard | local | asymptotic
//! b=0.5                     # number or auto
//! theta=estimate            # number or estimate
//! x0=0,0
//!
//! [space]
//! kind=cross2               # cross2 | gram
//!
//! [map]
//! kind=reflection
//! w=2,0
//! ```
//!
//! Nested maps use dotted sections (`[map.inner]`). Top-level defaults:
//! `witnesses=basis`, `tol=1e-10`, `max_iter=10000`, `seed=0`, `n=1`.
//! `[sampling]` defaults: `count=100000`, `eps_dep=1e-8` (relative to the
//! region scale), `region=-10,10`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::analyzer::{SamplingConfig, SamplingRegion};
use crate::error::{Error, Result};
use crate::mapping::{averaged, iterated, Region, SelfMap};
use crate::solver::Domain;
use crate::space::{SpaceElement, TwoNormKind, TwoNormSpace, WitnessSet};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Krasnoselskij,
    Picard,
    Local,
    Asymptotic,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Krasnoselskij => "krasnoselskij",
            Mode::Picard => "picard",
            Mode::Local => "local",
            Mode::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BSpec {
    Value(f64),
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaSpec {
    Value(f64),
    Estimate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessSpec {
    Basis,
    Explicit(Vec<Vec<f64>>),
}

/// Plain-data description of a [`SelfMap`].
#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Reflection { w: Vec<f64> },
    ScalarAffine { c: f64, t: Vec<f64> },
    Piecewise { u: Vec<f64>, half_width: f64 },
    Averaged { lambda: f64, inner: Box<MapSpec> },
    Iterated { n: usize, inner: Box<MapSpec> },
}

impl MapSpec {
    pub fn build(&self) -> Result<SelfMap> {
        Ok(match self {
            MapSpec::Reflection { w } => SelfMap::reflection(SpaceElement::new(w.clone())?),
            MapSpec::ScalarAffine { c, t } => SelfMap::scalar_affine(*c, SpaceElement::new(t.clone())?)?,
            MapSpec::Piecewise { u, half_width } => SelfMap::piecewise(
                Region::OutsideCube {
                    half_width: *half_width,
                },
                SpaceElement::new(u.clone())?,
            )?,
            MapSpec::Averaged { lambda, inner } => averaged(inner.build()?, *lambda)?,
            MapSpec::Iterated { n, inner } => iterated(inner.build()?, *n)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainShape {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball {
        u: Vec<f64>,
        center: Vec<f64>,
        radius: f64,
        closed: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub shape: DomainShape,
    pub beta: Option<f64>,
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        let domain = match &self.shape {
            DomainShape::Box { lo, hi } => Domain::boxed(lo.clone(), hi.clone())?,
            DomainShape::Ball {
                u,
                center,
                radius,
                closed,
            } => Domain::ball(
                SpaceElement::new(u.clone())?,
                SpaceElement::new(center.clone())?,
                *radius,
                *closed,
            )?,
        };
        match self.beta {
            Some(beta) => domain.with_beta(beta),
            None => Ok(domain),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSpec {
    pub u: Vec<f64>,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingSpec {
    pub count: usize,
    /// Multiplied by the region scale to get the absolute threshold.
    pub eps_dep: f64,
    pub region: (f64, f64),
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            count: 100_000,
            eps_dep: 1e-8,
            region: (-10.0, 10.0),
        }
    }
}

impl SamplingSpec {
    pub fn build(&self, seed: u64) -> Result<SamplingConfig> {
        let region = SamplingRegion::new(self.region.0, self.region.1)?;
        let mut cfg = SamplingConfig::new(region, self.count, seed);
        cfg.eps_dep = self.eps_dep * region.scale();
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub space: TwoNormSpace,
    pub map: MapSpec,
    pub mode: Mode,
    pub b: BSpec,
    pub theta: ThetaSpec,
    /// Iterate count for asymptotic mode.
    pub n: usize,
    pub x0: Vec<f64>,
    pub witnesses: WitnessSpec,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub domain: Option<DomainSpec>,
    pub local: Option<LocalSpec>,
    pub sampling: SamplingSpec,
}

impl ScenarioConfig {
    pub fn witness_set(&self) -> Result<WitnessSet> {
        let n = self.space.dimension();
        match &self.witnesses {
            WitnessSpec::Basis => Ok(WitnessSet::standard_basis(n)),
            WitnessSpec::Explicit(list) => WitnessSet::new(
                n,
                list.iter()
                    .map(|c| SpaceElement::new(c.clone()))
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }

    pub fn x0_element(&self) -> Result<SpaceElement> {
        SpaceElement::new(self.x0.clone())
    }

    /// Checks cross-field invariants; [`parse_scenario_str`] calls this.
    pub fn validate(&self) -> Result<()> {
        let dim = self.space.dimension();
        let check_dim = |field: &str, v: &[f64]| -> Result<()> {
            if v.len() != dim {
                return Err(Error::scenario(
                    field,
                    format!("expected {dim} coordinates, got {}", v.len()),
                ));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::scenario(field, "coordinates must be finite"));
            }
            Ok(())
        };
        check_dim("x0", &self.x0)?;
        validate_map(&self.map, "map", dim)?;
        self.map.build().map_err(|e| Error::scenario("map", e.to_string()))?;
        if let WitnessSpec::Explicit(list) = &self.witnesses {
            for w in list {
                check_dim("witnesses", w)?;
            }
        }
        self.witness_set()
            .map_err(|e| Error::scenario("witnesses", e.to_string()))?;

        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::scenario("tol", "must be positive"));
        }
        if self.max_iter < 1 {
            return Err(Error::scenario("max_iter", "must be >= 1"));
        }
        if self.n < 1 {
            return Err(Error::scenario("n", "must be >= 1"));
        }
        if self.n != 1 && self.mode != Mode::Asymptotic {
            return Err(Error::scenario("n", "only asymptotic mode takes an iterate count"));
        }
        match self.b {
            BSpec::Value(b) if !(b >= 0.0) || !b.is_finite() => {
                return Err(Error::scenario("b", "must be a finite number >= 0"));
            }
            BSpec::Auto if self.theta != ThetaSpec::Estimate => {
                return Err(Error::scenario("b", "b=auto requires theta=estimate"));
            }
            _ => {}
        }
        if let ThetaSpec::Value(t) = self.theta {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::scenario("theta", "must be a finite number >= 0"));
            }
        }
        if self.mode == Mode::Picard {
            if let BSpec::Value(b) = self.b {
                if b != 0.0 {
                    return Err(Error::scenario("b", "picard mode requires b=0 or b=auto"));
                }
            }
        }
        match (&self.local, self.mode) {
            (None, Mode::Local) => {
                return Err(Error::scenario("local", "mode=local requires a [local] block"));
            }
            (Some(_), mode) if mode != Mode::Local => {
                return Err(Error::scenario("local", "[local] block is only used by mode=local"));
            }
            (Some(local), _) => {
                check_dim("local.u", &local.u)?;
                if !(local.r > 0.0) || !local.r.is_finite() {
                    return Err(Error::scenario("local.r", "must be positive"));
                }
            }
            _ => {}
        }
        if let Some(domain) = &self.domain {
            match &domain.shape {
                DomainShape::Box { lo, hi } => {
                    check_dim("domain.lo", lo)?;
                    check_dim("domain.hi", hi)?;
                }
                DomainShape::Ball { u, center, .. } => {
                    check_dim("domain.u", u)?;
                    check_dim("domain.center", center)?;
                }
            }
            domain
                .build()
                .map_err(|e| Error::scenario("domain", e.to_string()))?;
        }
        let s = &self.sampling;
        if s.count < 1 {
            return Err(Error::scenario("sampling.count", "must be >= 1"));
        }
        if !(s.eps_dep > 0.0) || !s.eps_dep.is_finite() {
            return Err(Error::scenario("sampling.eps_dep", "must be positive"));
        }
        SamplingRegion::new(s.region.0, s.region.1)
            .map_err(|e| Error::scenario("sampling.region", e.to_string()))?;
        Ok(())
    }
}

fn validate_map(map: &MapSpec, path: &str, dim: usize) -> Result<()> {
    let vector = |name: &str, v: &[f64]| -> Result<()> {
        if v.len() != dim {
            return Err(Error::scenario(
                format!("{path}.{name}"),
                format!("expected {dim} coordinates, got {}", v.len()),
            ));
        }
        Ok(())
    };
    match map {
        MapSpec::Reflection { w } => vector("w", w),
        MapSpec::ScalarAffine { t, .. } => vector("t", t),
        MapSpec::Piecewise { u, .. } => vector("u", u),
        MapSpec::Averaged { inner, .. } | MapSpec::Iterated { inner, .. } => {
            validate_map(inner, &format!("{path}.inner"), dim)
        }
    }
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario_str(&text)
}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

/// One section's entries; tracks which keys have been consumed.
struct Section {
    name: String,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn path(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.name)
        }
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }

    fn require(&mut self, key: &str) -> Result<(String, usize)> {
        self.take(key)
            .ok_or_else(|| Error::scenario(self.path(key), "missing required field"))
    }

    fn parse_with<T>(&mut self, key: &str, default: Option<T>, parse: impl Fn(&str) -> Option<T>, what: &str) -> Result<T> {
        match self.take(key) {
            Some((value, line)) => parse(&value).ok_or_else(|| {
                Error::scenario(self.path(key), format!("line {line}: expected {what}, got `{value}`"))
            }),
            None => default.ok_or_else(|| Error::scenario(self.path(key), "missing required field")),
        }
    }

    fn real(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        self.parse_with(key, default, parse_f64, "a number")
    }

    fn int<T: std::str::FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T> {
        self.parse_with(key, default, |s| s.parse().ok(), "a nonnegative integer")
    }

    fn vector(&mut self, key: &str) -> Result<Vec<f64>> {
        self.parse_with(key, None, parse_vector, "a comma-separated list of numbers")
    }

    fn finish(&self) -> Result<()> {
        if let Some((key, entry)) = self.entries.iter().find(|(_, e)| !e.used) {
            return Err(Error::scenario(self.path(key), format!("line {}: unknown field", entry.line)));
        }
        Ok(())
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_vector(s: &str) -> Option<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

pub fn parse_scenario_str(text: &str) -> Result<ScenarioConfig> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current = String::new();
    let mut saw_schema = false;
    sections.insert(
        String::new(),
        Section {
            name: String::new(),
            entries: BTreeMap::new(),
        },
    );

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if !saw_schema {
            match line.split_once('=') {
                Some(("schema", v)) if v.trim() == SCHEMA_VERSION.to_string() => {
                    saw_schema = true;
                    continue;
                }
                Some(("schema", v)) => {
                    return Err(Error::scenario(
                        "schema",
                        format!("unsupported schema version `{}`", v.trim()),
                    ));
                }
                _ => return Err(Error::scenario("schema", "first line must be `schema=1`")),
            }
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if sections.contains_key(&name) {
                return Err(Error::scenario(name, format!("line {line_no}: duplicate section")));
            }
            sections.insert(
                name.clone(),
                Section {
                    name: name.clone(),
                    entries: BTreeMap::new(),
                },
            );
            current = name;
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::scenario(current.clone(), format!("line {line_no}: expected `key=value`, got `{line}`"))
        })?;
        let section = sections.get_mut(&current).unwrap();
        let key = key.trim().to_string();
        if section.entries.contains_key(&key) {
            return Err(Error::scenario(section.path(&key), format!("line {line_no}: duplicate field")));
        }
        section.entries.insert(
            key,
            Entry {
                value: value.trim().to_string(),
                line: line_no,
                used: false,
            },
        );
    }
    if !saw_schema {
        return Err(Error::scenario("schema", "missing `schema=1` header"));
    }

    let mut take_section = |name: &str| sections.remove(name);
    let mut top = take_section("").unwrap();

    let mode = match top.require("mode")?.0.as_str() {
        "krasnoselskij" => Mode::Krasnoselskij,
        "picard" => Mode::Picard,
        "local" => Mode::Local,
        "asymptotic" => Mode::Asymptotic,
        other => return Err(Error::scenario("mode", format!("unknown mode `{other}`"))),
    };
    let b = match top.take("b") {
        None => return Err(Error::scenario("b", "missing required field")),
        Some((v, _)) if v == "auto" => BSpec::Auto,
        Some((v, line)) => BSpec::Value(parse_f64(&v).ok_or_else(|| {
            Error::scenario("b", format!("line {line}: expected a number or `auto`, got `{v}`"))
        })?),
    };
    let theta = match top.take("theta") {
        None => ThetaSpec::Estimate,
        Some((v, _)) if v == "estimate" => ThetaSpec::Estimate,
        Some((v, line)) => ThetaSpec::Value(parse_f64(&v).ok_or_else(|| {
            Error::scenario("theta", format!("line {line}: expected a number or `estimate`, got `{v}`"))
        })?),
    };
    let n = top.int("n", Some(1usize))?;
    let x0 = top.vector("x0")?;
    let witnesses = match top.take("witnesses") {
        None => WitnessSpec::Basis,
        Some((v, _)) if v == "basis" => WitnessSpec::Basis,
        Some((v, line)) => WitnessSpec::Explicit(
            v.split(';')
                .map(parse_vector)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| {
                    Error::scenario(
                        "witnesses",
                        format!("line {line}: expected `basis` or `;`-separated coordinate lists"),
                    )
                })?,
        ),
    };
    let tol = top.real("tol", Some(1e-10))?;
    let max_iter = top.int("max_iter", Some(10_000usize))?;
    let seed = top.int("seed", Some(0u64))?;
    top.finish()?;

    let mut space_section = take_section("space").ok_or_else(|| Error::scenario("space", "missing [space] block"))?;
    let space = match space_section.require("kind")?.0.as_str() {
        "cross2" => {
            let dim = space_section.int("dimension", Some(2usize))?;
            TwoNormSpace::new(TwoNormKind::Cross2, dim).map_err(|e| Error::scenario("space.dimension", e.to_string()))?
        }
        "gram" => {
            let dim = space_section.int::<usize>("dimension", None)?;
            TwoNormSpace::gram(dim).map_err(|e| Error::scenario("space.dimension", e.to_string()))?
        }
        other => return Err(Error::scenario("space.kind", format!("unknown space kind `{other}`"))),
    };
    space_section.finish()?;

    let map = parse_map(&mut take_section, "map")?;

    let domain = match take_section("domain") {
        None => None,
        Some(mut s) => {
            let shape = match s.require("kind")?.0.as_str() {
                "box" => DomainShape::Box {
                    lo: s.vector("lo")?,
                    hi: s.vector("hi")?,
                },
                "ball" => DomainShape::Ball {
                    u: s.vector("u")?,
                    center: s.vector("center")?,
                    radius: s.real("radius", None)?,
                    closed: s.parse_with(
                        "closed",
                        Some(true),
                        |v| match v {
                            "true" => Some(true),
                            "false" => Some(false),
                            _ => None,
                        },
                        "true or false",
                    )?,
                },
                other => return Err(Error::scenario("domain.kind", format!("unknown domain kind `{other}`"))),
            };
            let beta = match s.take("beta") {
                None => None,
                Some((v, line)) => Some(parse_f64(&v).ok_or_else(|| {
                    Error::scenario("domain.beta", format!("line {line}: expected a number, got `{v}`"))
                })?),
            };
            s.finish()?;
            Some(DomainSpec { shape, beta })
        }
    };

    let local = match take_section("local") {
        None => None,
        Some(mut s) => {
            let local = LocalSpec {
                u: s.vector("u")?,
                r: s.real("r", None)?,
            };
            s.finish()?;
            Some(local)
        }
    };

    let defaults = SamplingSpec::default();
    let sampling = match take_section("sampling") {
        None => defaults,
        Some(mut s) => {
            let count = s.int("count", Some(defaults.count))?;
            let eps_dep = s.real("eps_dep", Some(defaults.eps_dep))?;
            let region = match s.take("region") {
                None => defaults.region,
                Some((v, line)) => match parse_vector(&v).as_deref() {
                    Some([lo, hi]) => (*lo, *hi),
                    _ => {
                        return Err(Error::scenario(
                            "sampling.region",
                            format!("line {line}: expected `lo,hi`, got `{v}`"),
                        ))
                    }
                },
            };
            s.finish()?;
            SamplingSpec { count, eps_dep, region }
        }
    };

    if let Some(name) = sections.keys().next() {
        return Err(Error::scenario(name.clone(), "unknown section"));
    }

    let cfg = ScenarioConfig {
        space,
        map,
        mode,
        b,
        theta,
        n,
        x0,
        witnesses,
        tol,
        max_iter,
        seed,
        domain,
        local,
        sampling,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_map(take_section: &mut impl FnMut(&str) -> Option<Section>, name: &str) -> Result<MapSpec> {
    let mut s = take_section(name).ok_or_else(|| Error::scenario(name, format!("missing [{name}] block")))?;
    let inner_name = format!("{name}.inner");
    let map = match s.require("kind")?.0.as_str() {
        "reflection" => MapSpec::Reflection { w: s.vector("w")? },
        "scalar_affine" => MapSpec::ScalarAffine {
            c: s.real("c", None)?,
            t: s.vector("t")?,
        },
        "piecewise" => MapSpec::Piecewise {
            u: s.vector("u")?,
            half_width: s.real("half_width", Some(2.0))?,
        },
        "averaged" => {
            let lambda = s.real("lambda", None)?;
            s.finish()?;
            return Ok(MapSpec::Averaged {
                lambda,
                inner: Box::new(parse_map(take_section, &inner_name)?),
            });
        }
        "iterated" => {
            let n = s.int("n", None)?;
            s.finish()?;
            return Ok(MapSpec::Iterated {
                n,
                inner: Box::new(parse_map(take_section, &inner_name)?),
            });
        }
        other => return Err(Error::scenario(format!("{name}.kind"), format!("unknown map kind `{other}`"))),
    };
    s.finish()?;
    Ok(map)
}

/// Shortest representation that parses back to the same `f64`.
fn fmt_real(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn fmt_vector(v: &[f64]) -> String {
    v.iter().map(|c| fmt_real(*c)).collect::<Vec<_>>().join(",")
}

/// Renders a config in canonical form; `parse_scenario_str` reads it back to
/// an equal config.
pub fn write_scenario(cfg: &ScenarioConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema={SCHEMA_VERSION}");
    let _ = writeln!(out, "mode={}", cfg.mode.as_str());
    let _ = writeln!(
        out,
        "b={}",
        match cfg.b {
            BSpec::Auto => "auto".to_string(),
            BSpec::Value(v) => fmt_real(v),
        }
    );
    let _ = writeln!(
        out,
        "theta={}",
        match cfg.theta {
            ThetaSpec::Estimate => "estimate".to_string(),
            ThetaSpec::Value(v) => fmt_real(v),
        }
    );
    if cfg.mode == Mode::Asymptotic {
        let _ = writeln!(out, "n={}", cfg.n);
    }
    let _ = writeln!(out, "x0={}", fmt_vector(&cfg.x0));
    let _ = writeln!(
        out,
        "witnesses={}",
        match &cfg.witnesses {
            WitnessSpec::Basis => "basis".to_string(),
            WitnessSpec::Explicit(list) => list.iter().map(|w| fmt_vector(w)).collect::<Vec<_>>().join(";"),
        }
    );
    let _ = writeln!(out, "tol={}", fmt_real(cfg.tol));
    let _ = writeln!(out, "max_iter={}", cfg.max_iter);
    let _ = writeln!(out, "seed={}", cfg.seed);

    let _ = writeln!(out, "\n[space]");
    match cfg.space.kind() {
        TwoNormKind::Cross2 => {
            let _ = writeln!(out, "kind=cross2");
        }
        TwoNormKind::GramN => {
            let _ = writeln!(out, "kind=gram\ndimension={}", cfg.space.dimension());
        }
    }

    write_map(&mut out, &cfg.map, "map");

    if let Some(domain) = &cfg.domain {
        let _ = writeln!(out, "\n[domain]");
        match &domain.shape {
            DomainShape::Box { lo, hi } => {
                let _ = writeln!(out, "kind=box\nlo={}\nhi={}", fmt_vector(lo), fmt_vector(hi));
            }
            DomainShape::Ball {
                u,
                center,
                radius,
                closed,
            } => {
                let _ = writeln!(
                    out,
                    "kind=ball\nu={}\ncenter={}\nradius={}\nclosed={closed}",
                    fmt_vector(u),
                    fmt_vector(center),
                    fmt_real(*radius)
                );
            }
        }
        if let Some(beta) = domain.beta {
            let _ = writeln!(out, "beta={}", fmt_real(beta));
        }
    }
    if let Some(local) = &cfg.local {
        let _ = writeln!(out, "\n[local]\nu={}\nr={}", fmt_vector(&local.u), fmt_real(local.r));
    }
    let s = &cfg.sampling;
    let _ = writeln!(
        out,
        "\n[sampling]\ncount={}\neps_dep={}\nregion={},{}",
        s.count,
        fmt_real(s.eps_dep),
        fmt_real(s.region.0),
        fmt_real(s.region.1)
    );
    out
}

fn write_map(out: &mut String, map: &MapSpec, name: &str) {
    let _ = writeln!(out, "\n[{name}]");
    let inner_name = format!("{name}.inner");
    match map {
        MapSpec::Reflection { w } => {
            let _ = writeln!(out, "kind=reflection\nw={}", fmt_vector(w));
        }
        MapSpec::ScalarAffine { c, t } => {
            let _ = writeln!(out, "kind=scalar_affine\nc={}\nt={}", fmt_real(*c), fmt_vector(t));
        }
        MapSpec::Piecewise { u, half_width } => {
            let _ = writeln!(out, "kind=piecewise\nu={}\nhalf_width={}", fmt_vector(u), fmt_real(*half_width));
        }
        MapSpec::Averaged { lambda, inner } => {
            let _ = writeln!(out, "kind=averaged\nlambda={}", fmt_real(*lambda));
            write_map(out, inner, &inner_name);
        }
        MapSpec::Iterated { n, inner } => {
            let _ = writeln!(out, "kind=iterated\nn={n}");
            write_map(out, inner, &inner_name);
        }
    }
}
