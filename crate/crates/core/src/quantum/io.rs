//! JSON state files.
//!
//! A cq state is written as
//! `{"layout":[["X",4],["B",2]], "probs":[...], "states":[[[re,im],...],...]}`
//! with each conditional state a row-major list of `[re, im]` pairs. A general
//! density operator uses `{"layout":[...], "matrix":[[re,im],...]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMat};

use super::cq::CqState;
use super::layout::SystemLayout;
use super::state::DensityOperator;

#[derive(Serialize, Deserialize)]
struct CqFile {
    layout: SystemLayout,
    probs: Vec<f64>,
    states: Vec<Option<Vec<[f64; 2]>>>,
}

#[derive(Serialize, Deserialize)]
struct DensityFile {
    layout: SystemLayout,
    matrix: Vec<[f64; 2]>,
}

/// Either kind of state file.
#[derive(Clone, Debug)]
pub enum StateFile {
    Cq(CqState),
    Density(DensityOperator),
}

impl StateFile {
    pub fn density(&self) -> DensityOperator {
        match self {
            StateFile::Cq(cq) => cq.embed(),
            StateFile::Density(d) => d.clone(),
        }
    }

    pub fn cq(&self) -> Result<CqState> {
        match self {
            StateFile::Cq(cq) => Ok(cq.clone()),
            StateFile::Density(d) => CqState::from_density(d),
        }
    }
}

fn to_pairs(m: &CMat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            let z = m[(r, col)];
            out.push([z.re, z.im]);
        }
    }
    out
}

fn from_pairs(pairs: &[[f64; 2]], d: usize) -> Result<CMat> {
    if pairs.len() != d * d {
        return Err(Error::invariant(
            "matrix entries match layout dimension",
            format!("{} entries for dimension {d}", pairs.len()),
        ));
    }
    Ok(CMat::from_fn(d, d, |r, col| {
        let [re, im] = pairs[r * d + col];
        c(re, im)
    }))
}

pub fn cq_to_json(cq: &CqState) -> Result<String> {
    let mut states = vec![None; cq.alphabet_size()];
    for (i, &x) in cq.symbols().iter().enumerate() {
        states[x] = Some(to_pairs(cq.states()[i].matrix()));
    }
    let mut probs = vec![0.0; cq.alphabet_size()];
    for (i, &x) in cq.symbols().iter().enumerate() {
        probs[x] = cq.probs()[i];
    }
    let file = CqFile {
        layout: cq.layout(),
        probs,
        states,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn density_to_json(rho: &DensityOperator) -> Result<String> {
    let file = DensityFile {
        layout: rho.layout().clone(),
        matrix: to_pairs(rho.matrix()),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn cq_from_json(s: &str) -> Result<CqState> {
    let file: CqFile = serde_json::from_str(s)?;
    cq_from_file(file)
}

fn cq_from_file(file: CqFile) -> Result<CqState> {
    let (x_label, nx) = file
        .layout
        .factors()
        .first()
        .cloned()
        .ok_or_else(|| Error::Layout("cq layout needs a classical first factor".into()))?;
    if file.probs.len() != nx || file.states.len() != nx {
        return Err(Error::invariant(
            "probs and states match alphabet size",
            format!(
                "|X| = {nx}, {} probs, {} states",
                file.probs.len(),
                file.states.len()
            ),
        ));
    }
    let side = file.layout.complement(&[&x_label])?;
    let d = side.dim();
    let mut mats = Vec::with_capacity(nx);
    for (x, s) in file.states.iter().enumerate() {
        match s {
            Some(pairs) => mats.push(from_pairs(pairs, d)?),
            None if file.probs[x] == 0.0 => mats.push(CMat::identity(d, d) / c(d as f64, 0.0)),
            None => {
                return Err(Error::invariant(
                    "conditional state present for every p_x > 0",
                    format!("symbol {x} has no state"),
                ))
            }
        }
    }
    CqState::with_label(&x_label, &file.probs, mats, side)
}

pub fn density_from_json(s: &str) -> Result<DensityOperator> {
    let file: DensityFile = serde_json::from_str(s)?;
    let d = file.layout.dim();
    DensityOperator::new(from_pairs(&file.matrix, d)?, file.layout)
}

/// Parse either kind of state file (a `probs` key selects the cq form).
pub fn state_from_json(s: &str) -> Result<StateFile> {
    let v: serde_json::Value = serde_json::from_str(s)?;
    if v.get("probs").is_some() {
        Ok(StateFile::Cq(cq_from_file(serde_json::from_value(v)?)?))
    } else {
        let file: DensityFile = serde_json::from_value(v)?;
        let d = file.layout.dim();
        Ok(StateFile::Density(DensityOperator::new(
            from_pairs(&file.matrix, d)?,
            file.layout,
        )?))
    }
}

pub fn read_state(path: &Path) -> Result<StateFile> {
    state_from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cr;

    #[test]
    fn cq_json_round_trip() {
        let b = SystemLayout::single("B", 2).unwrap();
        let phi0 = CMat::from_row_slice(2, 2, &[cr(0.6), c(0.1, 0.2), c(0.1, -0.2), cr(0.4)]);
        let cq = CqState::new(&[0.3, 0.0, 0.7], vec![phi0.clone(), phi0.clone(), CMat::identity(2, 2) * cr(0.5)], b)
            .unwrap();
        let s = cq_to_json(&cq).unwrap();
        let back = cq_from_json(&s).unwrap();
        assert_eq!(back.symbols(), cq.symbols());
        assert_eq!(back.probs(), cq.probs());
        assert_eq!(back.states()[0].matrix(), cq.states()[0].matrix());
    }

    #[test]
    fn reader_names_failed_invariant() {
        let s = r#"{"layout":[["X",2],["B",1]],"probs":[0.5,0.6],"states":[[[1,0]],[[1,0]]]}"#;
        let err = cq_from_json(s).unwrap_err().to_string();
        assert!(err.contains("sum to 1"), "{err}");
        let s = r#"{"layout":[["A",2]],"matrix":[[1,0],[0,0],[0,0],[-0.5,0]]}"#;
        let err = density_from_json(s).unwrap_err().to_string();
        assert!(err.contains("eigenvalues"), "{err}");
    }
}
