//! The constant ledger of the Bochner-type inequality and the gradient
//! estimate.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Laplacian comparison constant for `Delta r^2 <= C_L (1 + r)` on the flat
/// torus, where `Delta r^2 = 4` away from the cut locus.
pub const C_L: f64 = 4.0;

/// Multiplier of the slack tolerance `C (residual + h^2) (1 + sup e)`.
pub const C_SLACK: f64 = 10.0;

/// Primary (user-settable) constants. Missing keys take the round-sphere
/// defaults of [`EstimateInputs::sphere`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateInputs {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: f64,
    pub delta6: f64,
    pub delta7: f64,
    pub delta8: f64,
    pub delta9: f64,
    pub delta10: f64,
    pub m: u32,
}

impl Default for EstimateInputs {
    fn default() -> Self {
        Self::sphere()
    }
}

impl EstimateInputs {
    /// Round sphere on the flat torus: `A = 0`, `nabla R = 0`, `E = 0`,
    /// `|B| <= sqrt 2 |d phi| |psi|^2`, `|F| <= 1/3 |psi|^3`.
    pub fn sphere() -> Self {
        Self {
            kappa1: 0.0,
            kappa2: 1.0,
            kappa3: 1.0,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            c4: SQRT_2,
            c5: 0.0,
            c6: 0.0,
            c7: 0.0,
            c8: 1.0 / 3.0,
            delta2: 0.0,
            delta3: 0.1,
            delta4: 0.5,
            delta6: 1.0 / 3.0,
            delta7: 1.0 / 3.0,
            delta8: 1.0 / 3.0,
            delta9: 0.1,
            delta10: 0.1,
            m: 2,
        }
    }
}

/// Inputs plus every derived constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimateConstants {
    #[serde(flatten)]
    pub inputs: EstimateInputs,
    pub t: f64,
    pub p: f64,
    pub c10: f64,
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub c14: f64,
}

/// `c^2 / delta`, read as `0` when `c = 0` (the branch where the term is
/// absent). A positive `c` with `delta = 0` is rejected.
fn ratio_sq(c: f64, delta: f64, name: &str) -> Result<f64> {
    if c == 0.0 {
        Ok(0.0)
    } else if delta > 0.0 {
        Ok(c * c / delta)
    } else {
        Err(LabError::InvalidConstants(format!(
            "{name} > 0 requires a positive delta"
        )))
    }
}

impl EstimateConstants {
    pub fn sphere() -> Self {
        Self::new(EstimateInputs::sphere()).expect("sphere defaults are valid")
    }

    pub fn new(inputs: EstimateInputs) -> Result<Self> {
        let i = inputs;
        let nonneg = [
            ("kappa1", i.kappa1),
            ("kappa3", i.kappa3),
            ("c1", i.c1),
            ("c2", i.c2),
            ("c3", i.c3),
            ("c4", i.c4),
            ("c5", i.c5),
            ("c6", i.c6),
            ("c7", i.c7),
            ("c8", i.c8),
            ("delta2", i.delta2),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(LabError::InvalidConstants(format!("{name} = {v} must be >= 0")));
            }
        }
        let positive = [
            ("delta3", i.delta3),
            ("delta4", i.delta4),
            ("delta6", i.delta6),
            ("delta7", i.delta7),
            ("delta8", i.delta8),
            ("delta9", i.delta9),
            ("delta10", i.delta10),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(LabError::InvalidConstants(format!("{name} = {v} must be > 0")));
            }
        }
        if !i.kappa2.is_finite() {
            return Err(LabError::InvalidConstants("kappa2 must be finite".into()));
        }
        if i.m == 0 {
            return Err(LabError::InvalidConstants("m must be >= 1".into()));
        }
        let t = i.delta2 + i.delta4;
        if t >= 1.0 {
            return Err(LabError::InvalidConstants(format!(
                "t = delta2 + delta4 = {t} must be < 1"
            )));
        }
        if 2.0 - i.delta4 - i.delta6 - i.delta7 - i.delta8 <= 0.0 {
            return Err(LabError::InvalidConstants(
                "2 - delta4 - delta6 - delta7 - delta8 must be > 0".into(),
            ));
        }
        let p = (1.0 + t) / 2.0;
        let m = i.m as f64;
        let c10 = i.kappa2 + i.c1 + ratio_sq(i.c2, i.delta2, "c2")? + i.delta3 + i.c4 * i.c4 / i.delta4;
        let c11 = i.c3 * i.c3 / (4.0 * i.delta3)
            + i.c4 * i.c4 / (4.0 * i.delta4)
            + i.c5
            + 4.0 * i.c6 * i.c6 / i.delta6
            + m * i.kappa3
            + m * i.c7 * i.c7 / i.delta7;
        let c12 = m * i.c8 * i.c8 / i.delta8;
        Ok(Self {
            inputs,
            t,
            p,
            c10,
            c11,
            c12,
            c13: 2.0 * c10,
            c14: 2.0 * c11 + 2.0 * c12,
        })
    }

    /// Coefficient of `|psi|^2 |nabla psi|^2` in the energy-density inequality.
    pub fn spinor_gradient_coefficient(&self) -> f64 {
        let i = &self.inputs;
        2.0 - i.delta4 - i.delta6 - i.delta7 - i.delta8
    }

    /// `d_tilde = d1 - (1 + delta4)(kappa2 + delta3 + c4^2/delta4) - delta9`
    /// (the `A = 0` branch).
    pub fn dtilde(&self, d1: f64) -> f64 {
        let i = &self.inputs;
        d1 - (1.0 + i.delta4) * (i.kappa2 + i.delta3 + i.c4 * i.c4 / i.delta4) - i.delta9
    }

    /// Smallest `d1` with `dtilde(d1) > 0`.
    pub fn d1_threshold(&self) -> f64 {
        -self.dtilde(0.0)
    }

    /// `L1 = C_L (1 + r)/(a^2 - r^2) + (1 + (1 + t)/(2p)) 4 r^2/(a^2 - r^2)^2
    /// + p (m/2) kappa1`.
    pub fn l1(&self, r: f64, a: f64) -> f64 {
        let w = a * a - r * r;
        let i = &self.inputs;
        C_L * (1.0 + r) / w
            + (1.0 + (1.0 + self.t) / (2.0 * self.p)) * 4.0 * r * r / (w * w)
            + self.p * (i.m as f64 / 2.0) * i.kappa1
    }

    /// `L2 = (1 + delta4)/2 c14 + d1^2 c4^2 / (4 xi^2 delta9) + d1 c6 / xi`.
    pub fn l2(&self, d1: f64, xi: f64) -> f64 {
        let i = &self.inputs;
        (1.0 + i.delta4) / 2.0 * self.c14
            + d1 * d1 * i.c4 * i.c4 / (4.0 * xi * xi * i.delta9)
            + d1 * i.c6 / xi
    }

    /// Re-checks the derived identities exactly.
    pub fn check_identities(&self) -> bool {
        let again = match Self::new(self.inputs) {
            Ok(c) => c,
            Err(_) => return false,
        };
        again == *self
            && self.t == self.inputs.delta2 + self.inputs.delta4
            && self.p == (1.0 + self.t) / 2.0
            && self.c13 == 2.0 * self.c10
            && self.c14 == 2.0 * self.c11 + 2.0 * self.c12
    }
}
