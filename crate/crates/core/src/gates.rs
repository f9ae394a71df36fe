//! Flat gate sequences for the composite drive and their text form.
//!
//! A step `(G, t)` stands for `exp(-i t G)` with `G` either `H(λ)` or
//! `∂λH(λ)`; steps are listed in time order. The text form is one step per
//! line, `EXPH <angle>` or `EXPDH <angle>`, with `#` comment lines.

use std::fmt::Write as _;

use crate::eigen::eigendecompose;
use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, UnitaryMatrix};
use crate::schedule::AngleSchedule;

/// Order in which the `k` factors of the composite product are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductOrder {
    /// `k = -K` acts first, `k = +K` last (leftmost).
    #[default]
    Ascending,
    /// `k = +K` acts first, `k = -K` last.
    Descending,
}

impl ProductOrder {
    pub fn name(self) -> &'static str {
        match self {
            ProductOrder::Ascending => "ascending",
            ProductOrder::Descending => "descending",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ascending" => Some(ProductOrder::Ascending),
            "descending" => Some(ProductOrder::Descending),
            _ => None,
        }
    }

    /// Nonzero `k` in application order.
    pub fn indices(self, k_max: usize) -> Vec<i64> {
        let k = k_max as i64;
        let mut ks: Vec<i64> = (-k..=k).filter(|&i| i != 0).collect();
        if self == ProductOrder::Descending {
            ks.reverse();
        }
        ks
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    H,
    DH,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateStep {
    pub generator: Generator,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSequence {
    pub steps: Vec<GateStep>,
    pub merged: bool,
    pub order: ProductOrder,
}

/// Unmerged sequence: each factor `e^{iθH} e^{-iφ/2 ∂H} e^{-iθH}` becomes
/// `(H, θ) (DH, φ/2) (H, -θ)` in time order.
pub fn gate_sequence(sched: &AngleSchedule, merge: bool, order: ProductOrder) -> GateSequence {
    let mut steps = Vec::with_capacity(6 * sched.k());
    for k in order.indices(sched.k()) {
        let p = sched.pair(k).expect("index within schedule");
        steps.push(GateStep { generator: Generator::H, angle: p.theta });
        steps.push(GateStep { generator: Generator::DH, angle: 0.5 * p.phi });
        steps.push(GateStep { generator: Generator::H, angle: -p.theta });
    }
    let seq = GateSequence { steps, merged: false, order };
    if merge {
        seq.merged()
    } else {
        seq
    }
}

impl GateSequence {
    /// Combines each run of adjacent `H` rotations into one.
    pub fn merged(&self) -> GateSequence {
        let mut steps: Vec<GateStep> = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            match steps.last_mut() {
                Some(last) if last.generator == Generator::H && s.generator == Generator::H => {
                    last.angle += s.angle;
                }
                _ => steps.push(*s),
            }
        }
        GateSequence { steps, merged: true, order: self.order }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `Σ ||G|| |t|` over the steps.
    pub fn cost(&self, h_norm: f64, dh_norm: f64) -> f64 {
        self.steps
            .iter()
            .map(|s| match s.generator {
                Generator::H => h_norm * s.angle.abs(),
                Generator::DH => dh_norm * s.angle.abs(),
            })
            .sum()
    }

    /// Multiplies out the sequence; later steps act on the left.
    pub fn replay(&self, h: &HermitianOperator, dh: &HermitianOperator) -> Result<UnitaryMatrix> {
        if h.dim() != dh.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), found: dh.dim() });
        }
        let hs = eigendecompose(h)?;
        let ds = eigendecompose(dh)?;
        let mut u = UnitaryMatrix::identity(h.dim()).into_matrix();
        for s in &self.steps {
            let g = match s.generator {
                Generator::H => hs.propagator(s.angle),
                Generator::DH => ds.propagator(s.angle),
            };
            u = g.matrix() * u;
        }
        Ok(UnitaryMatrix::from_unitary_unchecked(u))
    }

    /// Text form; `header` lines are emitted as `# ` comments first.
    pub fn to_ir(&self, header: &[String]) -> String {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        for s in &self.steps {
            let tag = match s.generator {
                Generator::H => "EXPH",
                Generator::DH => "EXPDH",
            };
            let _ = writeln!(out, "{tag} {}", crate::table::format_number(s.angle));
        }
        out
    }

    /// Parses the text form. Comment metadata is not interpreted except for
    /// an `ordering = <name>` or `merged = <bool>` entry.
    pub fn parse_ir(text: &str) -> Result<GateSequence> {
        let mut steps = Vec::new();
        let mut merged = false;
        let mut order = ProductOrder::Ascending;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    match k.trim() {
                        "ordering" => {
                            order = ProductOrder::parse(v.trim()).ok_or_else(|| Error::GateIr {
                                line: lineno,
                                message: format!("unknown ordering {:?}", v.trim()),
                            })?;
                        }
                        "merged" => merged = v.trim() == "true",
                        _ => {}
                    }
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap_or_default();
            let generator = match tag {
                "EXPH" => Generator::H,
                "EXPDH" => Generator::DH,
                other => {
                    return Err(Error::GateIr {
                        line: lineno,
                        message: format!("unknown instruction {other:?}"),
                    })
                }
            };
            let angle: f64 = parts
                .next()
                .ok_or_else(|| Error::GateIr { line: lineno, message: "missing angle".into() })?
                .parse()
                .map_err(|e| Error::GateIr { line: lineno, message: format!("bad angle: {e}") })?;
            if parts.next().is_some() {
                return Err(Error::GateIr { line: lineno, message: "trailing tokens".into() });
            }
            steps.push(GateStep { generator, angle });
        }
        Ok(GateSequence { steps, merged, order })
    }
}
