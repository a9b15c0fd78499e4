//! Example spaces with their claim checkers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::{Dyadic, Scale};
use crate::minimize::Variant;
use crate::space::Space;
use crate::vertex_set::VertexSet;

pub mod fat_cantor;
pub mod interval;
pub mod john;
pub mod square;
pub mod triangles_atoms;
pub mod tripod;

pub use fat_cantor::FatCantor;
pub use interval::IntervalExample;
pub use john::{john_probe, JohnReport};
pub use square::SquareControl;
pub use triangles_atoms::TrianglesAtoms;
pub use tripod::Tripod;

/// A space, a domain in it and the default functional parameters.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub space: Space,
    pub omega: VertexSet,
    pub lambda: Dyadic,
    pub variant: Variant,
    pub params: BTreeMap<String, f64>,
}

pub const BUILTIN_NAMES: [&str; 5] = ["interval", "fat_cantor", "triangles_atoms", "tripod", "square"];

/// Scale fine enough to store the mass of a `finest × finest` cell of
/// density down to `finest` with some headroom.
pub fn scale_for(finest: f64, scale: Option<Scale>) -> Result<Scale> {
    if let Some(s) = scale {
        return Ok(s);
    }
    let bits = (-finest.log2()).ceil().max(0.0) as u32;
    Scale::new((3 * bits + 4).clamp(16, 40))
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn int_param(params: &BTreeMap<String, f64>, key: &str, default: usize) -> Result<usize> {
    let v = param(params, key, default as f64);
    if v < 0.0 || v.fract() != 0.0 || v > 1e6 {
        return Err(Error::Precondition(format!("parameter {key} must be a small nonnegative integer")));
    }
    Ok(v as usize)
}

fn dyadic_param(params: &BTreeMap<String, f64>, key: &str, default: f64) -> Result<Dyadic> {
    let v = param(params, key, default);
    let s = Scale::new(40)?;
    Ok(s.value(s.quantize(v)?).reduced())
}

/// Builds a named example from loose numeric parameters.
pub fn build_named(name: &str, params: &BTreeMap<String, f64>, scale: Option<Scale>) -> Result<Scenario> {
    match name {
        "interval" => Ok(IntervalExample::new(false)?.scenario()),
        "fat_cantor" => {
            let level = int_param(params, "level", 4)?;
            Ok(FatCantor::new(level, scale)?.scenario())
        }
        "triangles_atoms" => {
            let n_max = int_param(params, "n_max", 3)?;
            let h = param(params, "h", 1.0 / 256.0);
            let lambda = dyadic_param(params, "lambda", 4.0)?;
            Ok(TrianglesAtoms::new(n_max, h, lambda, scale)?.scenario())
        }
        "tripod" => {
            let k_max = int_param(params, "k_max", 2)?;
            let h = param(params, "h", 1.0 / 128.0);
            let lambda = dyadic_param(params, "lambda", 1.0)?;
            Ok(Tripod::new(k_max, h, scale)?.scenario(lambda))
        }
        "square" => {
            let n = int_param(params, "n", 64)?;
            let h = param(params, "h", 1.0 / 16.0);
            let lambda = dyadic_param(params, "lambda", 2.0)?;
            Ok(SquareControl::new(n, h, scale)?.scenario(lambda))
        }
        other => Err(Error::Precondition(format!(
            "unknown scenario {other:?}; expected one of {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}
