//! Closed-form integrals for the half advance on prolate ellipsoids.
//!
//! With `a = b^2 - 1` and level `sigma` the half advance is
//!
//! ```text
//! u_max = sigma ∫_sigma^1 (1/f) sqrt((1 + a f^2) / ((1 - f^2)(f^2 - sigma^2))) df
//! ```
//!
//! Substituting `v^2 = (f^2 - sigma^2) a / (1 - sigma^2)` and then
//! `v = sqrt(a) cos t` gives two further forms. All three are evaluated here
//! independently of the general return-map code.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::adaptive;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EllipsoidForm {
    /// Integral in the radius `f`.
    Radius,
    /// After the first substitution, in `v`.
    FirstSubstitution,
    /// After both substitutions, in the angle `t`; the integrand is smooth.
    SecondSubstitution,
}

/// Half of the longitude advance between consecutive equator crossings.
pub fn ellipsoid_half_advance(b: f64, sigma: f64, form: EllipsoidForm, tol: f64) -> Result<f64> {
    if !(b > 1.0) {
        return Err(Error::Precondition(format!("closed forms need a prolate ellipsoid, got b = {b}")));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::LevelOutOfRange { c: sigma, r_e: 1.0 });
    }
    let a = b * b - 1.0;
    let s2 = sigma * sigma;
    let value = match form {
        EllipsoidForm::Radius => {
            // f = m - h cos(tau) absorbs both endpoint singularities.
            let m = 0.5 * (1.0 + sigma);
            let h = 0.5 * (1.0 - sigma);
            adaptive(
                |tau| {
                    let f = m - h * tau.cos();
                    sigma * (1.0 + a * f * f).sqrt() / (f * ((f + sigma) * (1.0 + f)).sqrt())
                },
                0.0,
                PI,
                tol,
                1e-300,
            )?
            .value
        }
        EllipsoidForm::FirstSubstitution => {
            // v = sqrt(a) - w^2 regularizes the endpoint v = sqrt(a).
            let ra = a.sqrt();
            adaptive(
                |w| {
                    let v = ra - w * w;
                    let inner = (1.0 - s2) * v * v + a * s2;
                    let num = 1.0 + a * s2 + (1.0 - s2) * v * v;
                    2.0 * a * sigma * num.sqrt() / (inner * (ra + v).sqrt())
                },
                0.0,
                ra.sqrt(),
                tol,
                1e-300,
            )?
            .value
        }
        EllipsoidForm::SecondSubstitution => adaptive(
            |t| {
                let c2 = t.cos().powi(2);
                let den = a * s2 + (1.0 - s2) * a * c2;
                a * sigma * (1.0 + a * s2 + (1.0 - s2) * a * c2).sqrt() / den
            },
            0.0,
            FRAC_PI_2,
            tol,
            1e-300,
        )?
        .value,
    };
    Ok(value)
}
