//! File formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are flat row-major
//! lists of them. Elements are `{"blocks": [block, …]}` with the signature
//! inferred from the block lengths, maps are
//! `{"dom": [..], "cod": [..], "coeffs": [..]}`, states are
//! `{"densities": [block, …]}`, measures are
//! `{"atoms": [{"weight": w, "state": …}]}`, distributions are
//! `{"weights": [..]}` and functions are `{"cod_size": m, "table": [..]}`.
//! Stochastic matrices are headerless CSV, one row per line.
//!
//! Reading separates malformed input ([`FormatError::Syntax`]) from well
//! formed input that violates an invariant ([`FormatError::Invalid`]).

use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraSignature, Effect, Element};
use crate::error::Error;
use crate::linalg::ComplexMatrix;
use crate::maps::LinMap;
use crate::monads::{Dist, FunctionMap, KleisliMap};
use crate::states::{FinMeasure, State};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("syntax: {0}")]
    Syntax(String),
    #[error("{0}")]
    Invalid(#[from] Error),
}

pub type FormatResult<T> = std::result::Result<T, FormatError>;

type Pair = [f64; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementJson {
    blocks: Vec<Vec<Pair>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapJson {
    dom: Vec<usize>,
    cod: Vec<usize>,
    coeffs: Vec<Pair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    densities: Vec<Vec<Pair>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomJson {
    weight: f64,
    state: StateJson,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureJson {
    atoms: Vec<AtomJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistJson {
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dom_size: Option<usize>,
    cod_size: usize,
    table: Vec<usize>,
}

fn from_json<T: DeserializeOwned>(text: &str) -> FormatResult<T> {
    serde_json::from_str(text).map_err(|e| FormatError::Syntax(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serialises")
}

fn pairs(values: &[Complex64]) -> Vec<Pair> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn complexes(values: &[Pair]) -> Vec<Complex64> {
    values.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn square_block(values: &[Pair]) -> FormatResult<ComplexMatrix> {
    let n = (values.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != values.len() {
        return Err(Error::InvalidSignature(format!("block with {} entries is not square", values.len())).into());
    }
    Ok(ComplexMatrix::new(n, n, complexes(values))?)
}

fn blocks(raw: &[Vec<Pair>]) -> FormatResult<Vec<ComplexMatrix>> {
    raw.iter().map(|b| square_block(b)).collect()
}

pub fn read_file(path: &Path) -> FormatResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| FormatError::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn parse_element(text: &str) -> FormatResult<Element> {
    let raw: ElementJson = from_json(text)?;
    Ok(Element::from_blocks(blocks(&raw.blocks)?)?)
}

pub fn parse_effect(text: &str) -> FormatResult<Effect> {
    Ok(Effect::new(parse_element(text)?)?)
}

pub fn element_to_json(x: &Element) -> String {
    to_json(&ElementJson { blocks: x.blocks().iter().map(|b| pairs(b.as_slice())).collect() })
}

pub fn parse_map(text: &str) -> FormatResult<LinMap> {
    let raw: MapJson = from_json(text)?;
    let dom = AlgebraSignature::new(raw.dom)?;
    let cod = AlgebraSignature::new(raw.cod)?;
    let coeffs = ComplexMatrix::new(cod.dim(), dom.dim(), complexes(&raw.coeffs)).map_err(|_| {
        Error::ShapeMismatch(format!("{} coefficients for a {}x{} map", raw.coeffs.len(), cod.dim(), dom.dim()))
    })?;
    Ok(LinMap::new(dom, cod, coeffs)?)
}

pub fn map_to_json(f: &LinMap) -> String {
    to_json(&MapJson {
        dom: f.dom().blocks().to_vec(),
        cod: f.cod().blocks().to_vec(),
        coeffs: pairs(f.coeffs().as_slice()),
    })
}

fn state_from_raw(raw: &StateJson) -> FormatResult<State> {
    let densities = blocks(&raw.densities)?;
    let sig = AlgebraSignature::new(densities.iter().map(ComplexMatrix::rows).collect())?;
    Ok(State::new(sig, densities)?)
}

fn state_raw(s: &State) -> StateJson {
    StateJson { densities: s.densities().iter().map(|b| pairs(b.as_slice())).collect() }
}

pub fn parse_state(text: &str) -> FormatResult<State> {
    state_from_raw(&from_json(text)?)
}

pub fn state_to_json(s: &State) -> String {
    to_json(&state_raw(s))
}

pub fn states_to_json(states: &[State]) -> String {
    to_json(&states.iter().map(state_raw).collect::<Vec<_>>())
}

pub fn parse_measure(text: &str) -> FormatResult<FinMeasure> {
    let raw: MeasureJson = from_json(text)?;
    let atoms =
        raw.atoms.iter().map(|a| Ok((a.weight, state_from_raw(&a.state)?))).collect::<FormatResult<Vec<_>>>()?;
    Ok(FinMeasure::new(atoms)?)
}

pub fn measure_to_json(mu: &FinMeasure) -> String {
    to_json(&MeasureJson {
        atoms: mu.atoms().iter().map(|(w, s)| AtomJson { weight: *w, state: state_raw(s) }).collect(),
    })
}

pub fn parse_dist(text: &str) -> FormatResult<Dist> {
    let raw: DistJson = from_json(text)?;
    Ok(Dist::new(raw.weights)?)
}

pub fn dist_to_json(d: &Dist) -> String {
    to_json(&DistJson { weights: d.weights().to_vec() })
}

pub fn parse_function(text: &str) -> FormatResult<FunctionMap> {
    let raw: FunctionJson = from_json(text)?;
    if let Some(n) = raw.dom_size {
        if n != raw.table.len() {
            return Err(Error::SizeMismatch(format!("dom_size {n} with a table of {}", raw.table.len())).into());
        }
    }
    Ok(FunctionMap::new(raw.cod_size, raw.table)?)
}

pub fn function_to_json(f: &FunctionMap) -> String {
    to_json(&FunctionJson { dom_size: Some(f.dom_size()), cod_size: f.cod_size(), table: f.table().to_vec() })
}

/// Reads a headerless CSV stochastic matrix.
pub fn parse_kernel_csv(text: &str) -> FormatResult<KleisliMap> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| FormatError::Syntax(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| field.parse::<f64>().map_err(|e| FormatError::Syntax(format!("{field:?}: {e}"))))
            .collect::<FormatResult<Vec<f64>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(FormatError::Syntax("empty matrix".into()));
    }
    let m = rows[0].len();
    if rows.iter().any(|r| r.len() != m) {
        return Err(FormatError::Syntax("ragged rows".into()));
    }
    Ok(KleisliMap::new(n, m, rows.concat())?)
}

pub fn kernel_to_csv(k: &KleisliMap) -> String {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for i in 0..k.dom_size() {
        let row: Vec<String> = (0..k.cod_size()).map(|j| k.entry(i, j).to_string()).collect();
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ascii output")
}
