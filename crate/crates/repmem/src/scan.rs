//! Numeric coefficient extraction, parameter-space scans, and hardware
//! presets.
//!
//! The coefficient extractor recovers the exact first-order gate-error
//! coefficients of a one-cycle circuit by running the simulator with a
//! full-strength depolarizing fault after one gate at a time: each channel is
//! affine in its own error probability, so the drop measured at p = 1 is the
//! first-order slope with no finite-difference error.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{self, ClosedFormParams};
use crate::channels::NoiseParams;
use crate::circuits::{
    average_fidelity, average_fidelity_single_fault, build_cycle, ArityClass, CodeKind,
    Decomposition, ProtocolSpec, Segment,
};
use crate::{Error, Result};

/// Exact first-order coefficients (f1, f2) of the fidelity drop of one
/// phase-flip cycle, from the single-faulty-gate method: the one-qubit (f1)
/// and two-qubit (f2) sums of F(clean) - F(only gate g fully depolarized).
pub fn extract_linear_coefficients(
    decomposition: Decomposition,
    p: &ClosedFormParams,
) -> Result<(f64, f64)> {
    if decomposition == Decomposition::Ideal {
        // No gate decomposition to attribute coefficients to.
        return Ok((0.0, 0.0));
    }
    let spec = ProtocolSpec {
        code: CodeKind::PhaseFlip,
        n: 3,
        decomposition,
        cycles: 1,
        reset: true,
        noise: NoiseParams::new(p.t1, p.t2star, 0.0, 0.0)?,
        t_tot: p.t,
    };
    let cycle = build_cycle(spec.code, spec.n, spec.decomposition)?;
    let classes: Vec<ArityClass> = cycle
        .segments
        .iter()
        .flat_map(|s| match s {
            Segment::Gates(gs) => gs
                .iter()
                .filter(|g| g.arity_class != ArityClass::Noiseless)
                .map(|g| g.arity_class)
                .collect::<Vec<_>>(),
            _ => Vec::new(),
        })
        .collect();
    let clean = average_fidelity(&spec)?;
    let drops: Vec<(ArityClass, f64)> = classes
        .par_iter()
        .enumerate()
        .map(|(idx, &class)| {
            let f = average_fidelity_single_fault(&spec, idx)?;
            Ok((class, clean - f))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut f1 = 0.0;
    let mut f2 = 0.0;
    for (class, drop) in drops {
        match class {
            ArityClass::OneQubit => f1 += drop,
            ArityClass::TwoQubit => f2 += drop,
            ArityClass::Noiseless => {}
        }
    }
    Ok((f1, f2))
}

/// One cell of a two-parameter scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanCell {
    pub a: f64,
    pub b: f64,
    pub opt: usize,
    pub f_best: f64,
    pub f_idle: f64,
}

/// A rectangular scan over two named axes; cells are stored row-major in the
/// first axis.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub axis_a: (String, Vec<f64>),
    pub axis_b: (String, Vec<f64>),
    /// Column name of the per-cell optimum (code size or cycle count).
    pub opt_name: String,
    pub cells: Vec<ScanCell>,
}

impl ScanResult {
    pub fn cell(&self, ia: usize, ib: usize) -> &ScanCell {
        &self.cells[ia * self.axis_b.1.len() + ib]
    }

    /// CSV with the exact headers consumed by the plotting scripts;
    /// floating-point cells carry 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "{},{},{},f_best,f_idle\n",
            self.axis_a.0, self.axis_b.0, self.opt_name
        );
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                crate::fmt_sig12(c.a),
                crate::fmt_sig12(c.b),
                c.opt,
                crate::fmt_sig12(c.f_best),
                crate::fmt_sig12(c.f_idle)
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "axes": {
                self.axis_a.0.clone(): self.axis_a.1,
                self.axis_b.0.clone(): self.axis_b.1,
            },
            "cells": self.cells.iter().map(|c| {
                serde_json::json!({
                    self.axis_a.0.clone(): c.a,
                    self.axis_b.0.clone(): c.b,
                    self.opt_name.clone(): c.opt,
                    "f_best": c.f_best,
                    "f_idle": c.f_idle,
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Logarithmically spaced grid, endpoints included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Default grids for the optimal-code-size map: T1/T2* in 0.5..100 and
/// t/T2* in 0.01..3, 40 points each, n up to 9.
pub fn default_fig3_grids() -> (Vec<f64>, Vec<f64>) {
    (log_grid(0.5, 100.0, 40), log_grid(0.01, 3.0, 40))
}

/// Default grids for the optimal-cycle-count map: T1/T2* in 2..100 and
/// p2 in 1e-4..1e-1, 30 points each, up to 8 cycles.
pub fn default_fig4_grids() -> (Vec<f64>, Vec<f64>) {
    (log_grid(2.0, 100.0, 30), log_grid(1e-4, 1e-1, 30))
}

/// Optimal phase-flip code size after one cycle, on a (T1, t) grid in units
/// of T2*. Gate errors are zero; everything comes from the closed forms.
pub fn scan_fig3(t1_grid: &[f64], t_grid: &[f64], n_max: usize) -> Result<ScanResult> {
    if t1_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::EmptyGrid("fig3 grids must be non-empty".into()));
    }
    let cells: Vec<ScanCell> = t1_grid
        .par_iter()
        .flat_map(|&t1| {
            t_grid
                .par_iter()
                .map(move |&t| {
                    let p = ClosedFormParams::new(t1, 1.0, t)?;
                    let (n_opt, f_best) = analytic::optimal_code_size(&p, n_max)?;
                    Ok(ScanCell {
                        a: t1,
                        b: t,
                        opt: n_opt,
                        f_best,
                        f_idle: analytic::f_idle(&p),
                    })
                })
                .collect::<Vec<Result<ScanCell>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        axis_a: ("t1_over_t2star".into(), t1_grid.to_vec()),
        axis_b: ("t_over_t2star".into(), t_grid.to_vec()),
        opt_name: "n_opt".into(),
        cells,
    })
}

/// Optimal number of reset error-correction cycles for a three-qubit
/// phase-flip memory with faulty two-qubit gates (p1 = 0), on a (T1, p2)
/// grid. The fidelity of every N in 1..=n_max comes from full simulation;
/// opt = 0 marks cells where the idle qubit wins. Ties break toward
/// smaller N.
pub fn scan_fig4(
    t_tot: f64,
    t1_grid: &[f64],
    p2_grid: &[f64],
    n_max: usize,
    decomposition: Decomposition,
) -> Result<ScanResult> {
    if t1_grid.is_empty() || p2_grid.is_empty() {
        return Err(Error::EmptyGrid("fig4 grids must be non-empty".into()));
    }
    if n_max < 1 {
        return Err(Error::InvalidCycleCount);
    }
    let cells: Vec<ScanCell> = t1_grid
        .par_iter()
        .flat_map(|&t1| {
            p2_grid
                .par_iter()
                .map(move |&p2| {
                    let params = ClosedFormParams::new(t1, 1.0, t_tot)?;
                    let f_idle = analytic::f_idle(&params);
                    let mut best_n = 0usize;
                    let mut best_f = f_idle;
                    for n_cycles in 1..=n_max {
                        let spec = ProtocolSpec {
                            code: CodeKind::PhaseFlip,
                            n: 3,
                            decomposition,
                            cycles: n_cycles,
                            reset: true,
                            noise: NoiseParams::new(t1, 1.0, 0.0, p2)?,
                            t_tot,
                        };
                        let f = average_fidelity(&spec)?;
                        if f > best_f {
                            best_f = f;
                            best_n = n_cycles;
                        }
                    }
                    Ok(ScanCell {
                        a: t1,
                        b: p2,
                        opt: best_n,
                        f_best: best_f,
                        f_idle,
                    })
                })
                .collect::<Vec<Result<ScanCell>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        axis_a: ("t1_over_t2star".into(), t1_grid.to_vec()),
        axis_b: ("p2".into(), p2_grid.to_vec()),
        opt_name: "n_cycles_opt".into(),
        cells,
    })
}

/// Coherence times of one hardware platform, all in microseconds.
#[derive(Debug, Clone, Serialize)]
pub struct HardwarePreset {
    pub name: String,
    pub t1_us: f64,
    pub t2_us: Option<f64>,
    pub t2star_us: Option<f64>,
    pub t2hahn_us: Option<f64>,
}

/// Bundled presets covering the superconducting and semiconductor platforms
/// discussed alongside the break-even analysis.
pub const BUNDLED_PRESETS: &str = include_str!("../presets.txt");

pub fn bundled_presets() -> Vec<HardwarePreset> {
    load_presets(BUNDLED_PRESETS).expect("bundled preset file is well-formed")
}

/// Parses a preset file: one `name|T1|T2|T2*|T2Hahn` record per line, all in
/// microseconds, `-` for absent values, `#` starting a comment. A value may
/// be a `lo-hi` range, which parses to its midpoint.
pub fn load_presets(text: &str) -> Result<Vec<HardwarePreset>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::PresetParse {
                line: lineno + 1,
                msg: format!("expected 5 |-separated fields, found {}", fields.len()),
            });
        }
        let parse_opt = |field: &str, name: &str| -> Result<Option<f64>> {
            if field == "-" {
                return Ok(None);
            }
            let value = if let Some((lo, hi)) = field.split_once('-') {
                let lo: f64 = lo.trim().parse().map_err(|_| Error::PresetParse {
                    line: lineno + 1,
                    msg: format!("field {name}: bad range start {lo:?}"),
                })?;
                let hi: f64 = hi.trim().parse().map_err(|_| Error::PresetParse {
                    line: lineno + 1,
                    msg: format!("field {name}: bad range end {hi:?}"),
                })?;
                (lo + hi) / 2.0
            } else {
                field.parse().map_err(|_| Error::PresetParse {
                    line: lineno + 1,
                    msg: format!("field {name}: cannot parse {field:?}"),
                })?
            };
            if value <= 0.0 {
                return Err(Error::PresetParse {
                    line: lineno + 1,
                    msg: format!("field {name}: must be positive"),
                });
            }
            Ok(Some(value))
        };
        let name = fields[0].to_string();
        if name.is_empty() {
            return Err(Error::PresetParse {
                line: lineno + 1,
                msg: "empty preset name".into(),
            });
        }
        let t1_us = parse_opt(fields[1], "t1")?.ok_or_else(|| Error::PresetParse {
            line: lineno + 1,
            msg: "field t1: required".into(),
        })?;
        let preset = HardwarePreset {
            name,
            t1_us,
            t2_us: parse_opt(fields[2], "t2")?,
            t2star_us: parse_opt(fields[3], "t2star")?,
            t2hahn_us: parse_opt(fields[4], "t2hahn")?,
        };
        if preset.t2star_us.is_none() && preset.t2hahn_us.is_none() {
            return Err(Error::PresetParse {
                line: lineno + 1,
                msg: "at least one of t2star/t2hahn must be present".into(),
            });
        }
        // Cross-check 1/T2 = 1/T2* + 1/(2 T1) when all three are tabulated;
        // 15% slack absorbs the rounding of published values.
        if let (Some(t2), Some(t2star)) = (preset.t2_us, preset.t2star_us) {
            let t2_pred = 1.0 / (1.0 / t2star + 1.0 / (2.0 * preset.t1_us));
            if (t2_pred - t2).abs() / t2 > 0.15 {
                return Err(Error::PresetParse {
                    line: lineno + 1,
                    msg: format!(
                        "times violate 1/T2 = 1/T2* + 1/(2T1): tabulated {t2}, derived {t2_pred:.1}"
                    ),
                });
            }
        }
        out.push(preset);
    }
    Ok(out)
}
