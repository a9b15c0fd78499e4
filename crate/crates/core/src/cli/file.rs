//! Scenario files and raster masks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Dyadic, Scale};
use crate::minimize::Variant;
use crate::scenarios::{build_named, Scenario};
use crate::space::{build_grid, glue, Chart, GridSpec, Space};
use crate::vertex_set::VertexSet;

pub const FILE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<Builtin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<Custom>,
    /// Power-of-two denominator of stored quantities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_scale: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Builtin {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridEntry {
    pub cols: usize,
    pub rows: usize,
    pub h: f64,
    /// One density for the whole grid, or one per cell in row-major order.
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Custom {
    pub grids: Vec<GridEntry>,
    /// `(grid, row, col, mass)`.
    #[serde(default)]
    pub atoms: Vec<(usize, usize, usize, f64)>,
    /// Groups of `(grid, row, col)` cells identified to one vertex.
    #[serde(default)]
    pub gluings: Vec<Vec<(usize, usize, usize)>>,
    /// Per grid, run lengths over the row-major cells, alternating outside
    /// and inside and starting outside.
    pub omega: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

/// Scale requested by the environment, if any.
pub fn env_scale() -> Result<Option<Scale>> {
    match std::env::var("PERIMIN_SCALE") {
        Ok(s) => {
            let d: u64 = s
                .trim()
                .parse()
                .map_err(|_| Error::CapacityScale(format!("PERIMIN_SCALE={s} is not an integer")))?;
            Ok(Some(Scale::from_denominator(d)?))
        }
        Err(_) => Ok(None),
    }
}

pub fn decode_rle(runs: &[usize], len: usize) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(len);
    for (i, &r) in runs.iter().enumerate() {
        out.extend(std::iter::repeat(i % 2 == 1).take(r));
    }
    if out.len() != len {
        return Err(malformed(format!("omega mask covers {} cells, grid has {len}", out.len())));
    }
    Ok(out)
}

pub fn encode_rle(cells: &[bool]) -> Vec<usize> {
    let mut runs = vec![0];
    let mut inside = false;
    for &c in cells {
        if c != inside {
            runs.push(0);
            inside = c;
        }
        *runs.last_mut().expect("nonempty") += 1;
    }
    runs
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: ScenarioFile = serde_json::from_str(text).map_err(|e| malformed(format!("scenario file: {e}")))?;
        if f.version != FILE_VERSION {
            return Err(malformed(format!("unsupported scenario version {}", f.version)));
        }
        if f.builtin.is_some() == f.custom.is_some() {
            return Err(malformed("a scenario needs exactly one of builtin or custom"));
        }
        Ok(f)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
        ScenarioFile::parse(&text)
    }

    /// Builds the scenario. `scale` overrides the file's capacity scale.
    pub fn build(&self, scale: Option<Scale>) -> Result<Scenario> {
        let scale = match (scale, self.capacity_scale) {
            (Some(s), _) => Some(s),
            (None, Some(d)) => Some(Scale::from_denominator(d)?),
            (None, None) => None,
        };
        match (&self.builtin, &self.custom) {
            (Some(b), None) => build_named(&b.name, &b.params, scale),
            (None, Some(c)) => c.build(scale.unwrap_or_default()),
            _ => Err(malformed("a scenario needs exactly one of builtin or custom")),
        }
    }
}

impl Custom {
    fn build(&self, scale: Scale) -> Result<Scenario> {
        if self.grids.is_empty() {
            return Err(malformed("custom scenario has no grids"));
        }
        if self.omega.len() != self.grids.len() {
            return Err(malformed("omega needs one mask per grid"));
        }
        let mut spaces = Vec::with_capacity(self.grids.len());
        for g in &self.grids {
            let cells = g.cols * g.rows;
            let weights = match g.weights.len() {
                1 => vec![g.weights[0]; cells],
                n if n == cells => g.weights.clone(),
                n => return Err(malformed(format!("grid has {cells} cells but {n} weights"))),
            };
            if !(g.h.is_finite() && g.h > 0.0) {
                return Err(malformed("grid spacing must be positive"));
            }
            spaces.push(build_grid(
                &GridSpec {
                    cols: g.cols,
                    rows: g.rows,
                    h: g.h,
                    weights,
                    origin: (0.0, 0.0),
                },
                scale,
            )?);
        }
        let cell = |(grid, row, col): (usize, usize, usize)| -> Result<(usize, usize)> {
            let g = self
                .grids
                .get(grid)
                .ok_or_else(|| malformed(format!("no grid {grid}")))?;
            if row >= g.rows || col >= g.cols {
                return Err(malformed(format!("cell ({row}, {col}) is outside grid {grid}")));
            }
            Ok((grid, row * g.cols + col))
        };
        let groups = self
            .gluings
            .iter()
            .map(|grp| grp.iter().map(|&c| cell(c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let mut space = glue(&spaces, &groups)?;
        for &(grid, row, col, mass) in &self.atoms {
            cell((grid, row, col))?;
            let v = space.charts()[grid].vertex(col, row);
            space = space.add_atom(v, mass)?;
        }
        let mut omega = space.empty_set();
        for (grid, runs) in self.omega.iter().enumerate() {
            let chart = &space.charts()[grid];
            for (i, inside) in decode_rle(runs, chart.cols * chart.rows)?.into_iter().enumerate() {
                if inside {
                    omega.insert(chart.vertices[i]);
                }
            }
        }
        let lambda = match self.lambda {
            Some(l) => dyadic_ceil(l, scale)?,
            None => Dyadic::ONE,
        };
        let mut params = BTreeMap::new();
        params.insert("grids".into(), self.grids.len() as f64);
        Ok(Scenario {
            name: "custom".into(),
            space,
            omega,
            lambda,
            variant: self.variant.unwrap_or(Variant::InsideOnly),
            params,
        })
    }
}

/// Parses `3`, `0.25`, `1e-2` or `1/4`.
pub fn parse_quantity(text: &str) -> Result<f64> {
    let bad = || malformed(format!("cannot read {text:?} as a number"));
    let x = match text.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            p / q
        }
        None => text.trim().parse().map_err(|_| bad())?,
    };
    if !x.is_finite() || x < 0.0 {
        return Err(malformed(format!("{text:?} must be finite and nonnegative")));
    }
    Ok(x)
}

fn to_scale(x: f64, scale: Scale, round: fn(f64) -> f64) -> Result<Dyadic> {
    let y = round(x * scale.denominator() as f64);
    if !(y.is_finite() && y >= 0.0 && y < 2f64.powi(62)) {
        return Err(Error::CapacityScale(format!("{x} does not fit the capacity scale")));
    }
    Ok(Dyadic::new(y as i128, scale.bits()).reduced())
}

/// Smallest scale value at or above `x`.
pub fn dyadic_ceil(x: f64, scale: Scale) -> Result<Dyadic> {
    to_scale(x, scale, f64::ceil)
}

/// Largest scale value at or below `x`.
pub fn dyadic_floor(x: f64, scale: Scale) -> Result<Dyadic> {
    to_scale(x, scale, f64::floor)
}

/// Plain ASCII PGM of one chart: 255 inside, 0 outside, top row first.
pub fn mask_pgm(chart: &Chart, set: &VertexSet) -> String {
    let mut out = format!("P2\n{} {}\n255\n", chart.cols, chart.rows);
    for r in (0..chart.rows).rev() {
        let row: Vec<&str> = (0..chart.cols)
            .map(|c| if set.contains(chart.vertex(c, r)) { "255" } else { "0" })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Reads a PGM written by [`mask_pgm`] back into the chart's vertices.
pub fn read_mask_pgm(text: &str, chart: &Chart, into: &mut VertexSet) -> Result<()> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    if tokens.next() != Some("P2") {
        return Err(malformed("mask is not a plain PGM"));
    }
    let mut next_num = || -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| malformed("mask ends early"))?
            .parse()
            .map_err(|_| malformed("mask has a non-numeric entry"))
    };
    let (cols, rows, maxval) = (next_num()?, next_num()?, next_num()?);
    if cols != chart.cols || rows != chart.rows {
        return Err(malformed(format!(
            "mask is {cols}x{rows}, chart is {}x{}",
            chart.cols, chart.rows
        )));
    }
    if maxval == 0 {
        return Err(malformed("mask maxval must be positive"));
    }
    for r in (0..rows).rev() {
        for c in 0..cols {
            if next_num()? > maxval / 2 {
                into.insert(chart.vertex(c, r));
            }
        }
    }
    Ok(())
}

/// Reads one mask per chart, in chart order, and unions them.
pub fn read_masks(space: &Space, paths: &[std::path::PathBuf]) -> Result<VertexSet> {
    if paths.len() > space.charts().len() {
        return Err(malformed(format!(
            "{} masks given for {} charts",
            paths.len(),
            space.charts().len()
        )));
    }
    let mut set = space.empty_set();
    for (chart, path) in space.charts().iter().zip(paths) {
        let text = std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
        read_mask_pgm(&text, chart, &mut set)?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rle_round_trip() {
        let cells = [false, true, true, false, false, true];
        let runs = encode_rle(&cells);
        assert_eq!(runs, vec![1, 2, 2, 1]);
        assert_eq!(decode_rle(&runs, 6).unwrap(), cells);
        assert!(decode_rle(&runs, 7).is_err());
        assert_eq!(encode_rle(&[true]), vec![0, 1]);
    }

    #[test]
    fn quantities() {
        assert_eq!(parse_quantity("1/4").unwrap(), 0.25);
        assert_eq!(parse_quantity(" 2 ").unwrap(), 2.0);
        assert!(parse_quantity("-1").is_err());
        assert!(parse_quantity("x").is_err());
        let s = Scale::new(4).unwrap();
        assert_eq!(dyadic_ceil(0.1, s).unwrap(), Dyadic::new(2, 4));
        assert_eq!(dyadic_floor(0.1, s).unwrap(), Dyadic::new(1, 4));
    }

    #[test]
    fn custom_file_builds() {
        let text = r#"{"version":1,"custom":{"grids":[{"cols":3,"rows":2,"h":1.0,"weights":[1.0]}],
            "atoms":[[0,1,2,0.5]],"omega":[[1,4,1]]}}"#;
        let s = ScenarioFile::parse(text).unwrap().build(None).unwrap();
        assert_eq!(s.space.vertex_count(), 6);
        assert_eq!(s.omega.to_vec(), vec![1, 2, 3, 4]);
        assert_eq!(s.space.measure(5), Dyadic::new(3, 1));
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(ScenarioFile::parse(r#"{"version":2,"builtin":{"name":"interval"}}"#).is_err());
        assert!(ScenarioFile::parse(r#"{"version":1}"#).is_err());
        assert!(ScenarioFile::parse("{").is_err());
        let bad_mask = r#"{"version":1,"custom":{"grids":[{"cols":2,"rows":2,"h":1.0,"weights":[1.0]}],"omega":[[1,1]]}}"#;
        assert!(ScenarioFile::parse(bad_mask).unwrap().build(None).is_err());
    }

    #[test]
    fn pgm_round_trip() {
        let s = ScenarioFile::parse(r#"{"version":1,"builtin":{"name":"square","params":{"n":5,"h":0.25}}}"#)
            .unwrap()
            .build(None)
            .unwrap();
        let chart = &s.space.charts()[0];
        let text = mask_pgm(chart, &s.omega);
        let mut back = s.space.empty_set();
        read_mask_pgm(&text, chart, &mut back).unwrap();
        assert_eq!(back, s.omega);
    }
}
