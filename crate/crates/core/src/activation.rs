//! Scalar activations: bipolar sigmoid, hyperbolic activation (tanh), their
//! sum ("hyper-sig") and the logistic sigmoid used inside the recurrent and
//! belief-network models.
//!
//! The checked free functions reject non-finite input. [`ActivationKind::eval`]
//! is the unchecked form used in model inner loops.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    BipolarSigmoid,
    HyperbolicActivation,
    HyperSig,
    LogisticSigmoid,
}

impl ActivationKind {
    pub const ALL: [ActivationKind; 4] = [
        ActivationKind::BipolarSigmoid,
        ActivationKind::HyperbolicActivation,
        ActivationKind::HyperSig,
        ActivationKind::LogisticSigmoid,
    ];

    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            ActivationKind::BipolarSigmoid => bipolar_raw(x),
            ActivationKind::HyperbolicActivation => x.tanh(),
            ActivationKind::HyperSig => hyper_sig_raw(x),
            ActivationKind::LogisticSigmoid => logistic(x),
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            ActivationKind::BipolarSigmoid => bipolar_derivative_raw(x),
            ActivationKind::HyperbolicActivation => tanh_derivative_raw(x),
            ActivationKind::HyperSig => bipolar_derivative_raw(x) + tanh_derivative_raw(x),
            ActivationKind::LogisticSigmoid => {
                let s = logistic(x);
                s * (1.0 - s)
            }
        }
    }

    /// Open interval the activation maps into.
    pub fn range(self) -> (f64, f64) {
        match self {
            ActivationKind::BipolarSigmoid | ActivationKind::HyperbolicActivation => (-1.0, 1.0),
            ActivationKind::HyperSig => (-2.0, 2.0),
            ActivationKind::LogisticSigmoid => (0.0, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::BipolarSigmoid => "bipolar_sigmoid",
            ActivationKind::HyperbolicActivation => "hyperbolic_activation",
            ActivationKind::HyperSig => "hyper_sig",
            ActivationKind::LogisticSigmoid => "logistic_sigmoid",
        }
    }
}

/// Logistic sigmoid, evaluated without overflow for any finite input.
#[inline]
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn bipolar_raw(x: f64) -> f64 {
    -1.0 + 2.0 * logistic(x)
}

#[inline]
fn hyper_sig_raw(x: f64) -> f64 {
    bipolar_raw(x) + x.tanh()
}

#[inline]
fn bipolar_derivative_raw(x: f64) -> f64 {
    let s = logistic(x);
    2.0 * s * (1.0 - s)
}

#[inline]
fn tanh_derivative_raw(x: f64) -> f64 {
    let t = x.tanh();
    1.0 - t * t
}

/// `-1 + 2 / (1 + e^-x)`, values in (-1, 1).
pub fn bipolar_sigmoid(x: f64) -> Result<f64> {
    ensure_finite(x, "activation input")?;
    Ok(bipolar_raw(x))
}

/// `(e^x - e^-x) / (e^x + e^-x)`; identical to `tanh`, which is already
/// sign-stable for large `|x|`.
pub fn hyperbolic_activation(x: f64) -> Result<f64> {
    ensure_finite(x, "activation input")?;
    Ok(x.tanh())
}

/// Hyper-sig: bipolar sigmoid plus hyperbolic activation, values in (-2, 2).
pub fn hyper_sig(x: f64) -> Result<f64> {
    ensure_finite(x, "activation input")?;
    Ok(hyper_sig_raw(x))
}

/// The single-fraction form `(2e^x - 2e^-2x) / (e^x + e^-x + e^-2x + 1)`.
///
/// Numerator and denominator are rescaled by the dominant exponential so
/// the quotient never overflows. Algebraically equal to [`hyper_sig`].
pub fn hyper_sig_rational(x: f64) -> Result<f64> {
    ensure_finite(x, "activation input")?;
    let v = if x >= 0.0 {
        // divide through by e^x
        let a = (-x).exp();
        let a2 = a * a;
        let a3 = a2 * a;
        (2.0 - 2.0 * a3) / (1.0 + a2 + a3 + a)
    } else {
        // multiply through by e^2x
        let b = x.exp();
        let b2 = b * b;
        let b3 = b2 * b;
        (2.0 * b3 - 2.0) / (b3 + b + 1.0 + b2)
    };
    Ok(v)
}

/// Derivative of hyper-sig: `2σ(x)(1-σ(x)) + 1 - tanh²(x)`. Strictly positive.
pub fn hyper_sig_derivative(x: f64) -> Result<f64> {
    ensure_finite(x, "activation input")?;
    Ok(ActivationKind::HyperSig.derivative(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipolar_values() {
        assert_eq!(bipolar_sigmoid(0.0).unwrap(), 0.0);
        // -1 + 2/(1+e^-1), evaluated with mpmath at 30 digits
        assert!((bipolar_sigmoid(1.0).unwrap() - 0.462_117_157_260_009_76).abs() < 1e-15);
        assert!((bipolar_sigmoid(50.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(bipolar_sigmoid(f64::NAN).is_err());
        assert!(bipolar_sigmoid(f64::INFINITY).is_err());
    }

    #[test]
    fn hyperbolic_values() {
        assert_eq!(hyperbolic_activation(0.0).unwrap(), 0.0);
        assert!((hyperbolic_activation(1.0).unwrap() - 0.761_594_155_955_764_9).abs() < 1e-15);
        assert_eq!(hyperbolic_activation(800.0).unwrap(), 1.0);
        assert_eq!(hyperbolic_activation(-800.0).unwrap(), -1.0);
        for x in [0.3, 2.0, 7.5] {
            assert_eq!(hyperbolic_activation(-x).unwrap(), -hyperbolic_activation(x).unwrap());
        }
    }

    #[test]
    fn hyper_sig_values() {
        assert_eq!(hyper_sig(0.0).unwrap(), 0.0);
        assert_eq!(hyper_sig_rational(0.0).unwrap(), 0.0);
        // 0.46211715726000976 + 0.76159415595576489
        assert!((hyper_sig(1.0).unwrap() - 1.223_711_313_215_774_6).abs() < 1e-15);
        assert!((hyper_sig_rational(1.0).unwrap() - 1.223_711_313_215_774_6).abs() < 1e-15);
        assert!((hyper_sig(1000.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((hyper_sig_rational(-1000.0).unwrap() + 2.0).abs() < 1e-15);
        assert!(hyper_sig_rational(1000.0).unwrap().is_finite());
    }

    #[test]
    fn derivative_at_zero_is_one_and_a_half() {
        // BS'(0) = 0.5, tanh'(0) = 1
        assert!((hyper_sig_derivative(0.0).unwrap() - 1.5).abs() < 1e-15);
        for x in [-10.0, -1.0, 0.0, 1.0, 10.0] {
            assert!(hyper_sig_derivative(x).unwrap() > 0.0);
        }
        assert!(hyper_sig_derivative(f64::NAN).is_err());
    }

    #[test]
    fn kinds_dispatch() {
        for kind in ActivationKind::ALL {
            let (lo, hi) = kind.range();
            for x in [-5.0, -0.5, 0.0, 0.5, 5.0] {
                let y = kind.eval(x);
                assert!(y > lo && y < hi, "{} out of range at {x}", kind.name());
            }
        }
        assert_eq!(ActivationKind::LogisticSigmoid.eval(0.0), 0.5);
    }
}
