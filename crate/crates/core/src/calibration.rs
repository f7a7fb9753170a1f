//! Versioned orientation table for the arc cycles.
//!
//! The straight-arc determination of `√P` fixes each arc integral only up to
//! the orientation of the lifted cycle. Those orientations are calibrated once
//! against the reference period matrices at `s = 2 − √3` and frozen in
//! `data/orientation_calibration.toml`. The file's SHA-256 is pinned below so
//! an edited table is refused instead of silently changing every period matrix.

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::periods::{self, CyclePlan, HyperellipticCurve, Layout};
use crate::quadrature::QuadConfig;
use crate::siegel::ComplexMatrix;

/// Contents of the shipped table.
pub const CALIBRATION_TOML: &str = include_str!("../data/orientation_calibration.toml");

/// SHA-256 of [`CALIBRATION_TOML`].
pub const CALIBRATION_SHA256: &str =
    "8db0799281e6954cbbf5a8683342fbd3dd285ebdd087d2190c33bb930de5a4bc";

/// Orientation signs for one layout.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct LayoutSigns {
    /// 1-based arc on which `√P` is taken real positive.
    pub reference_arc: usize,
    /// One `±1` per finite arc, in chain order.
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct CalibrationTable {
    pub version: u32,
    pub real_mcurve_genus2: LayoutSigns,
    pub cover_genus3: LayoutSigns,
    pub elliptic: LayoutSigns,
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl CalibrationTable {
    pub fn parse(text: &str) -> Result<Self> {
        let table: Self = toml::from_str(text).map_err(|e| Error::Calibration(e.to_string()))?;
        for (layout, s) in [
            (Layout::RealMCurveGenus2, &table.real_mcurve_genus2),
            (Layout::CoverGenus3, &table.cover_genus3),
            (Layout::Elliptic, &table.elliptic),
        ] {
            if s.signs.iter().any(|&v| v != 1 && v != -1) {
                return Err(Error::Calibration(format!("{layout}: signs must be ±1")));
            }
            if s.reference_arc == 0 || s.reference_arc > s.signs.len() {
                return Err(Error::Calibration(format!(
                    "{layout}: reference arc out of range"
                )));
            }
        }
        Ok(table)
    }

    /// Parses `text` after checking it against `expected_sha256`.
    pub fn verified(text: &str, expected_sha256: &str) -> Result<Self> {
        let actual = sha256_hex(text);
        if actual != expected_sha256 {
            return Err(Error::Calibration(format!(
                "orientation table hash {actual} does not match the recorded {expected_sha256}"
            )));
        }
        Self::parse(text)
    }

    /// The table compiled into the crate.
    pub fn shipped() -> Result<Self> {
        Self::verified(CALIBRATION_TOML, CALIBRATION_SHA256)
    }

    pub fn signs(&self, layout: Layout) -> &LayoutSigns {
        match layout {
            Layout::RealMCurveGenus2 => &self.real_mcurve_genus2,
            Layout::CoverGenus3 => &self.cover_genus3,
            Layout::Elliptic => &self.elliptic,
        }
    }
}

/// Outcome of an orientation search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub signs: Vec<i8>,
    /// `max |AB⁻¹ − target|` for the best sign vector.
    pub residual: f64,
    /// Sign vectors (up to global sign) within `accept` of the target.
    pub matches: usize,
}

/// Finds the orientation signs reproducing `target` for `curve`.
///
/// Arcs that the basis does not use keep sign `+1`. Vectors are enumerated
/// with the first used arc fixed to `+1`, since a global flip leaves `AB⁻¹`
/// unchanged.
pub fn search_orientations(
    curve: &HyperellipticCurve,
    layout: Layout,
    reference_arc: usize,
    target: &ComplexMatrix,
    quad: &QuadConfig,
    accept: f64,
) -> Result<SearchResult> {
    let n_arcs = match layout {
        Layout::RealMCurveGenus2 => 4,
        Layout::CoverGenus3 => 7,
        Layout::Elliptic => 2,
    };
    let base = LayoutSigns {
        reference_arc,
        signs: vec![1; n_arcs],
    };
    let plan: CyclePlan = periods::build_cycles_with(curve, layout, &base)?;
    let (arcs, level) = periods::signed_arc_integrals(curve, &plan, quad)?;
    let used: Vec<usize> = (0..n_arcs).filter(|&j| arcs[j].is_some()).collect();

    let mut best: Option<(f64, Vec<i8>)> = None;
    let mut matches = 0;
    for mask in 0..(1u32 << (used.len() - 1)) {
        let mut signs = vec![1i8; n_arcs];
        for (bit, &j) in used.iter().enumerate().skip(1) {
            if mask >> (bit - 1) & 1 == 1 {
                signs[j] = -1;
            }
        }
        let flipped: Vec<_> = arcs
            .iter()
            .zip(&signs)
            .map(|(a, &s)| {
                a.as_ref()
                    .map(|v| v.iter().map(|x| x * f64::from(s)).collect())
            })
            .collect();
        let Ok(z) = periods::assemble(&plan, &flipped, level).and_then(|p| p.ratio()) else {
            continue;
        };
        let residual = z.max_abs_diff(target);
        if residual <= accept {
            matches += 1;
        }
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, signs));
        }
    }
    let (residual, signs) =
        best.ok_or_else(|| Error::Calibration("no invertible B for any orientation".into()))?;
    Ok(SearchResult {
        signs,
        residual,
        matches,
    })
}
