//! Exploratory grid scan of the positivity condition on the gradient
//! coefficient when `A(d phi, d phi)` does not vanish.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// `steps` equally spaced values from `min` to `max` inclusive. Zero steps
/// give no values, one step gives `[min]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl LinRange {
    pub fn fixed(v: f64) -> Self {
        Self { min: v, max: v, steps: 1 }
    }

    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.min],
            s => (0..s)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (s - 1) as f64)
                .collect(),
        }
    }

    fn validate(&self, name: &str, nonneg: bool) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(LabError::InvalidConstants(format!(
                "range {name} = [{}, {}] is not an ordered finite interval",
                self.min, self.max
            )));
        }
        if nonneg && self.min < 0.0 {
            return Err(LabError::InvalidConstants(format!("range {name} must be >= 0")));
        }
        Ok(())
    }
}

/// Scan ranges. `c1`, `c2`, `kappa2`, `c4` and `target_radius` describe the
/// geometry; `d1` and the deltas are the free parameters being searched.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeasibilityScan {
    pub c1: LinRange,
    pub c2: LinRange,
    pub kappa2: LinRange,
    pub c4: LinRange,
    #[serde(alias = "R")]
    pub target_radius: LinRange,
    pub d1: LinRange,
    pub delta2: LinRange,
    pub delta3: LinRange,
    pub delta4: LinRange,
    pub delta10: LinRange,
}

impl Default for FeasibilityScan {
    /// The `A = 0` reduction: `kappa2 = 1`, `c4 = 0`, `delta3 = delta10 =
    /// 0.1`, `delta4 = 1`, `R = 0.5`, `d1` from 1 to 5.
    fn default() -> Self {
        Self {
            c1: LinRange::fixed(0.0),
            c2: LinRange::fixed(0.0),
            kappa2: LinRange::fixed(1.0),
            c4: LinRange::fixed(0.0),
            target_radius: LinRange::fixed(0.5),
            d1: LinRange::new(1.0, 5.0, 5),
            delta2: LinRange::fixed(0.0),
            delta3: LinRange::fixed(0.1),
            delta4: LinRange::fixed(1.0),
            delta10: LinRange::fixed(0.1),
        }
    }
}

impl FeasibilityScan {
    fn named(&self) -> [(&'static str, &LinRange, bool); 10] {
        [
            ("c1", &self.c1, true),
            ("c2", &self.c2, true),
            ("kappa2", &self.kappa2, false),
            ("c4", &self.c4, true),
            ("R", &self.target_radius, true),
            ("d1", &self.d1, true),
            ("delta2", &self.delta2, true),
            ("delta3", &self.delta3, true),
            ("delta4", &self.delta4, true),
            ("delta10", &self.delta10, true),
        ]
    }

    /// Every range must be an ordered finite interval; all but `kappa2`
    /// must be non-negative.
    pub fn validate(&self) -> Result<()> {
        for (name, r, nonneg) in self.named() {
            r.validate(name, nonneg)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeasibleTuple {
    pub c1: f64,
    pub c2: f64,
    pub kappa2: f64,
    pub c4: f64,
    pub target_radius: f64,
    pub d1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: f64,
    pub delta10: f64,
    /// `d_tilde`; `-inf` when a constraint other than its sign fails.
    pub margin: f64,
    pub feasible: bool,
}

impl FeasibleTuple {
    fn evaluate(mut self) -> Self {
        let sd = self.d1.sqrt();
        let angle_ok = self.d1 > 0.0 && self.target_radius < FRAC_PI_2 / sd;
        let a_term = if self.c2 == 0.0 {
            Some(0.0)
        } else if self.delta2 > 0.0 {
            Some(self.c2 * self.c2 / self.delta2)
        } else {
            None
        };
        let b_term = if self.c4 == 0.0 {
            Some(0.0)
        } else if self.delta4 > 0.0 {
            Some(self.c4 * self.c4 / self.delta4)
        } else {
            None
        };
        self.margin = match (angle_ok, a_term, b_term) {
            (true, Some(a), Some(b)) => {
                self.d1
                    - (1.0 + self.delta2 + self.delta4) * (self.kappa2 + self.c1 + a + self.delta3 + b)
                    - self.delta10
                    - self.c2 * sd / (sd * self.target_radius).cos()
            }
            _ => f64::NEG_INFINITY,
        };
        self.feasible = self.margin > 0.0;
        self
    }
}

/// Exploratory result; no claim is made outside the scanned box.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub tuples_checked: usize,
    pub feasible_count: usize,
    /// Largest margin among feasible tuples.
    pub best: Option<FeasibleTuple>,
    /// Largest margin among all tuples, feasible or not.
    pub closest: Option<FeasibleTuple>,
}

impl FeasibilityReport {
    pub fn any_feasible(&self) -> bool {
        self.feasible_count > 0
    }
}

/// Full tensor-product scan of
/// `d_tilde = d1 - (1 + delta2 + delta4)(kappa2 + c1 + c2^2/delta2 + delta3 + c4^2/delta4)
/// - delta10 - c2 sqrt(d1) / cos(sqrt(d1) R) > 0` together with
/// `R < pi/(2 sqrt d1)`.
pub fn feasibility_scan(scan: &FeasibilityScan) -> Result<FeasibilityReport> {
    scan.validate()?;
    let named = scan.named();
    let axes: Vec<Vec<f64>> = named.iter().map(|(_, r, _)| r.values()).collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let mut report = FeasibilityReport::default();
    let better = |cur: &Option<FeasibleTuple>, m: f64| cur.is_none_or(|b| m > b.margin);
    let mut v = [0.0; 10];
    for mut idx in 0..total {
        // mixed-radix decode, last axis fastest
        for (slot, axis) in v.iter_mut().zip(&axes).rev() {
            *slot = axis[idx % axis.len()];
            idx /= axis.len();
        }
        let t = FeasibleTuple {
            c1: v[0],
            c2: v[1],
            kappa2: v[2],
            c4: v[3],
            target_radius: v[4],
            d1: v[5],
            delta2: v[6],
            delta3: v[7],
            delta4: v[8],
            delta10: v[9],
            margin: 0.0,
            feasible: false,
        }
        .evaluate();
        report.tuples_checked += 1;
        if better(&report.closest, t.margin) {
            report.closest = Some(t);
        }
        if t.feasible {
            report.feasible_count += 1;
            if better(&report.best, t.margin) {
                report.best = Some(t);
            }
        }
    }
    Ok(report)
}
