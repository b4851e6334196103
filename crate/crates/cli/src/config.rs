//! Job configuration files and their JSON building blocks.
//!
//! Matrices use `{"rows": r, "re": [...], "im": [...]}` in row-major order;
//! `im` may be omitted for real matrices. Scalars are a number or a
//! `[re, im]` pair.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use triplehyp::harness::{desk_scalar, IntegralOptions, Tolerances};
use triplehyp::{Complex64, Family, ParamSet, SeriesControl, SquareMatrix, TriplePoint, Variant};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<SquareMatrix> {
        let n = self.rows * self.rows;
        if self.re.len() != n || !(self.im.is_empty() || self.im.len() == n) {
            bail!("matrix with {} rows needs {n} entries in re (and im, if given)", self.rows);
        }
        let im = if self.im.is_empty() { vec![0.0; n] } else { self.im.clone() };
        Ok(SquareMatrix::from_parts(self.rows, &self.re, &im)?)
    }

    pub fn from_matrix(m: &SquareMatrix) -> Self {
        MatrixJson {
            rows: m.order(),
            re: m.entries().iter().map(|c| c.re).collect(),
            im: m.entries().iter().map(|c| c.im).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Real(f64),
    Pair([f64; 2]),
}

impl ScalarJson {
    pub fn value(self) -> Complex64 {
        match self {
            ScalarJson::Real(re) => Complex64::new(re, 0.0),
            ScalarJson::Pair([re, im]) => Complex64::new(re, im),
        }
    }

    pub fn exact(z: Complex64) -> Self {
        ScalarJson::Pair([z.re, z.im])
    }

    /// Parses `0.1` or `[0.1, -0.2]`.
    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_str(s).with_context(|| format!("expected a number or [re, im], got {s:?}"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    #[serde(rename = "A")]
    pub a: Option<MatrixJson>,
    #[serde(rename = "B")]
    pub b: Option<MatrixJson>,
    #[serde(rename = "Bp", alias = "B'")]
    pub bp: Option<MatrixJson>,
    #[serde(rename = "C")]
    pub c: Option<MatrixJson>,
    #[serde(rename = "Cp", alias = "C'", skip_serializing_if = "Option::is_none")]
    pub cp: Option<MatrixJson>,
    #[serde(rename = "Cpp", alias = "C''", skip_serializing_if = "Option::is_none")]
    pub cpp: Option<MatrixJson>,
}

impl ParamsJson {
    pub fn from_params(p: &ParamSet) -> Self {
        ParamsJson {
            a: Some(MatrixJson::from_matrix(&p.a)),
            b: Some(MatrixJson::from_matrix(&p.b)),
            bp: Some(MatrixJson::from_matrix(&p.bp)),
            c: Some(MatrixJson::from_matrix(&p.c)),
            cp: p.cp.as_ref().map(MatrixJson::from_matrix),
            cpp: p.cpp.as_ref().map(MatrixJson::from_matrix),
        }
    }

    fn to_params(&self, family: Family, x: f64) -> Result<ParamSet> {
        let get = |m: &Option<MatrixJson>, name: &str| -> Result<SquareMatrix> {
            m.as_ref().with_context(|| format!("{family} needs parameter {name}"))?.to_matrix()
        };
        let (a, b, bp, c) = (get(&self.a, "A")?, get(&self.b, "B")?, get(&self.bp, "Bp")?, get(&self.c, "C")?);
        let p = match family {
            Family::HA => ParamSet::ha(a, b, bp, c, get(&self.cp, "Cp")?, x)?,
            Family::HB => ParamSet::hb(a, b, bp, c, get(&self.cp, "Cp")?, get(&self.cpp, "Cpp")?, x)?,
            Family::HC => ParamSet::hc(a, b, bp, c, x)?,
        };
        Ok(p)
    }
}

/// A real range: `count` evenly spaced values from `start` to `stop`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeJson {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl RangeJson {
    /// Parses `start:stop:count`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            bail!("expected start:stop:count, got {s:?}");
        };
        Ok(RangeJson {
            start: start.trim().parse().with_context(|| format!("bad range start in {s:?}"))?,
            stop: stop.trim().parse().with_context(|| format!("bad range stop in {s:?}"))?,
            count: count.trim().parse().with_context(|| format!("bad range count in {s:?}"))?,
        })
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            bail!("grid ranges must be non-empty");
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.start + step * i as f64).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisJson {
    Fixed(ScalarJson),
    Range(RangeJson),
}

impl AxisJson {
    pub fn parse(s: &str) -> Result<Self> {
        if s.contains(':') {
            Ok(AxisJson::Range(RangeJson::parse(s)?))
        } else {
            Ok(AxisJson::Fixed(ScalarJson::parse(s)?))
        }
    }

    fn values(&self) -> Result<Vec<Complex64>> {
        match self {
            AxisJson::Fixed(z) => Ok(vec![z.value()]),
            AxisJson::Range(r) => Ok(r.values()?.into_iter().map(|v| Complex64::new(v, 0.0)).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridJson {
    pub z1: AxisJson,
    pub z2: AxisJson,
    pub z3: AxisJson,
}

impl GridJson {
    /// Points in row-major order, `z3` varying fastest.
    pub fn points(&self) -> Result<Vec<TriplePoint>> {
        let (a, b, c) = (self.z1.values()?, self.z2.values()?, self.z3.values()?);
        let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
        for &z1 in &a {
            for &z2 in &b {
                for &z3 in &c {
                    out.push(TriplePoint::new(z1, z2, z3));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub max_terms_per_index: Option<usize>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub stagnation_layers: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuadratureJson {
    pub nodes_2d: Option<usize>,
    pub nodes_3d: Option<usize>,
    pub rel_tol_2d: Option<f64>,
    pub rel_tol_3d: Option<f64>,
}

/// Everything a run can be configured with. Unknown fields are ignored, so
/// an output record is itself a valid configuration for its point.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default)]
pub struct JobConfig {
    pub command: Option<String>,
    pub family: Option<String>,
    pub variant: Option<String>,
    pub x: Option<f64>,
    pub params: Option<ParamsJson>,
    /// A single point.
    pub z: Option<[ScalarJson; 3]>,
    pub points: Option<Vec<[ScalarJson; 3]>>,
    pub grid: Option<GridJson>,
    pub series: Option<SeriesJson>,
    pub quadrature: Option<QuadratureJson>,
    /// Uniform verification tolerance.
    pub tolerance: Option<f64>,
    /// Per-identity verification tolerances, keyed by field name.
    pub tolerances: Option<BTreeMap<String, f64>>,
    pub identities: Option<Vec<String>>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn check_command(&self, command: &str) -> Result<()> {
        match &self.command {
            Some(c) if c != command => bail!("config is for `{c}`, not `{command}`"),
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> Result<Family> {
        let name = self.family.as_deref().unwrap_or("HA");
        Family::parse(name).with_context(|| format!("unknown family {name:?}"))
    }

    pub fn variant(&self) -> Result<Variant> {
        match self.variant.as_deref().unwrap_or("upper") {
            "lower" => Ok(Variant::Lower),
            "upper" => Ok(Variant::Upper),
            "complete" => Ok(Variant::Complete),
            other => bail!("unknown variant {other:?} (lower, upper, complete)"),
        }
    }

    /// Parameters from the config, or the scalar desk set when none are given.
    pub fn param_set(&self) -> Result<ParamSet> {
        let family = self.family()?;
        let x = self.x.unwrap_or(1.0);
        match &self.params {
            Some(p) => p.to_params(family, x),
            None => Ok(desk_scalar(family, x)?),
        }
    }

    pub fn points(&self) -> Result<Vec<TriplePoint>> {
        let conv = |z: &[ScalarJson; 3]| TriplePoint::new(z[0].value(), z[1].value(), z[2].value());
        let mut out: Vec<TriplePoint> = self.z.iter().map(conv).collect();
        if let Some(points) = &self.points {
            out.extend(points.iter().map(conv));
        }
        Ok(out)
    }

    pub fn series_control(&self) -> Result<SeriesControl> {
        let mut ctl = SeriesControl::default();
        if let Some(s) = &self.series {
            ctl.max_terms_per_index = s.max_terms_per_index.unwrap_or(ctl.max_terms_per_index);
            ctl.abs_tol = s.abs_tol.unwrap_or(ctl.abs_tol);
            ctl.rel_tol = s.rel_tol.unwrap_or(ctl.rel_tol);
            ctl.stagnation_layers = s.stagnation_layers.unwrap_or(ctl.stagnation_layers);
        }
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn integral_options(&self) -> IntegralOptions {
        let mut o = IntegralOptions::default();
        if let Some(q) = &self.quadrature {
            o.nodes_2d = q.nodes_2d.unwrap_or(o.nodes_2d);
            o.nodes_3d = q.nodes_3d.unwrap_or(o.nodes_3d);
            o.rel_tol_2d = q.rel_tol_2d.unwrap_or(o.rel_tol_2d);
            o.rel_tol_3d = q.rel_tol_3d.unwrap_or(o.rel_tol_3d);
        }
        o
    }

    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut t = self.tolerance.map_or_else(Tolerances::default, Tolerances::uniform);
        for (name, &v) in self.tolerances.iter().flatten() {
            let slot = match name.as_str() {
                "decomposition" => &mut t.decomposition,
                "pde" => &mut t.pde,
                "double_integral" => &mut t.double_integral,
                "triple_integral" => &mut t.triple_integral,
                "corollary" => &mut t.corollary,
                "reduction" => &mut t.reduction,
                "recursion" => &mut t.recursion,
                "recurrence" => &mut t.recurrence,
                "derivative" => &mut t.derivative,
                "reindexing" => &mut t.reindexing,
                "degeneration" => &mut t.degeneration,
                other => bail!("unknown tolerance key {other:?}"),
            };
            *slot = v;
        }
        Ok(t)
    }
}
