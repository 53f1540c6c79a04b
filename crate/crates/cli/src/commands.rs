use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context};
use log::{info, warn};
use rayon::prelude::*;
use serde_json::{json, Value};

use revlink_core::clairaut::{critical_ellipsoid_b, ClairautConfig, ClairautMap, Verdict, VerdictStatus};
use revlink_core::diagram::{equator_curve, lk_lifted_report, oracle_sweep, read_diagram, BigonChoice, MultiCurve, SampleOptions};
use revlink_core::linking::{lk_disjoint_simple, lk_equator_geodesic, lk_two_geodesics, self_linking_density, EquatorOrientation, GeodesicType, HalfInt};
use revlink_core::ode::{dump, integrate, GeodesicState, OdeOptions};
use revlink_core::{Error, ProfileSurface, SurfaceSpec};

use crate::args::{BRange, Format, GlobalArgs, Outer};
use crate::report::{round15, to_value, Body, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NOT_LEFT_HANDED: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

/// What a command produced: the report text and the process exit code.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn outcome(report: Report, format: Format, code: i32) -> Outcome {
    Outcome { text: report.render(format), code }
}

fn config_of(g: &GlobalArgs, extra: Value) -> Value {
    let mut base = to_value(g);
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn clairaut_config(g: &GlobalArgs) -> ClairautConfig {
    ClairautConfig { quad_tol: g.tol, grid_n: g.grid, verdict_tol: g.verdict_tol, ..Default::default() }
}

fn verdict_value(v: &Verdict) -> Value {
    let witness = v.witness.map(|w| {
        json!({
            "type": format!("({},{})", w.p, w.q),
            "c": w.c,
            "closure_residual": w.residual,
            "confirmed": w.confirmed,
            "period_length": w.period_length,
            "crossings_per_period": w.crossings_per_period,
            "turning_s_north": w.turning_s_north,
            "turning_s_south": w.turning_s_south,
        })
    });
    json!({
        "status": format!("{:?}", v.status),
        "sup_mean_delta_u": v.sup_mean_delta_u,
        "margin": v.margin,
        "margin_over_pi": v.margin / PI,
        "asymptotic": v.asymptotic,
        "equator_limit": to_value(&v.equator_limit),
        "witness": witness,
        "tolerances": to_value(&v.tolerances),
    })
}

pub fn analyze(g: &GlobalArgs, command: &str, spec: &SurfaceSpec) -> anyhow::Result<Outcome> {
    let surface = spec.build()?;
    surface.validate(g.grid).into_result()?;
    let curvature = surface.curvature_report(g.grid)?;
    let eq = surface.equator()?;
    let map = ClairautMap::new(&surface, clairaut_config(g))?;
    let mut body = json!({
        "surface": surface.label(),
        "curvature": to_value(&curvature),
        "equator": to_value(&eq),
    });
    let code = match map.left_handed_verdict() {
        Ok(v) => {
            body["verdict"] = verdict_value(&v);
            if let SurfaceSpec::Pinched { eps, .. } = spec {
                let half_width = 2.0 * eps;
                let inside = v.witness.map(|w| w.turning_s_north.abs() <= half_width && w.turning_s_south.abs() <= half_width);
                body["band"] = json!({ "half_width": half_width, "witness_inside": inside });
            }
            match v.status {
                VerdictStatus::LeftHanded => EXIT_OK,
                VerdictStatus::NotLeftHanded => EXIT_NOT_LEFT_HANDED,
            }
        }
        Err(Error::Inconclusive { sup, gap, uncertainty }) => {
            body["verdict"] = json!({ "status": "Inconclusive", "sup_mean_delta_u": sup, "gap": gap, "uncertainty": uncertainty });
            EXIT_INCONCLUSIVE
        }
        Err(e) => return Err(e.into()),
    };
    body["equator_self_linking_density"] = match self_linking_density(&map, eq.r_e) {
        Ok(x) => json!(x),
        Err(e) => {
            warn!("equator self-linking unavailable: {e}");
            Value::Null
        }
    };
    let config = config_of(g, json!({ "surface": spec_text(spec) }));
    Ok(outcome(Report::new(command, config, Body::Record(body)), g.format.unwrap_or(Format::Json), code))
}

fn spec_text(spec: &SurfaceSpec) -> String {
    match spec {
        SurfaceSpec::Sphere => "sphere".into(),
        SurfaceSpec::Ellipsoid { b } => format!("ellipsoid:b={b}"),
        SurfaceSpec::Pinched { delta, eps } => format!("sdelta:delta={delta},eps={eps}"),
        SurfaceSpec::File(p) => format!("file:{}", p.display()),
    }
}

pub fn sweep(g: &GlobalArgs, range: &BRange) -> anyhow::Result<Outcome> {
    let config = clairaut_config(g);
    let rows = range
        .values()
        .par_iter()
        .map(|&b| -> anyhow::Result<Vec<Value>> {
            let surface = ProfileSurface::ellipsoid(b)?;
            let delta = surface.curvature_report(g.grid)?.delta;
            let map = ClairautMap::new(&surface, config)?;
            let limit = map.equator_limit()?.value;
            let verdict = match map.left_handed_verdict() {
                Ok(v) => format!("{:?}", v.status),
                Err(Error::Inconclusive { .. }) => "Inconclusive".into(),
                Err(e) => return Err(e.into()),
            };
            info!("b = {b}: {verdict}");
            Ok(vec![json!(b), json!(delta), json!(limit), json!(verdict)])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let summary = json!({ "rows": rows.len() });
    let config = config_of(g, json!({ "range": { "lo": range.lo, "hi": range.hi, "step": range.step } }));
    let body = Body::Table { columns: vec!["b", "delta", "equator_limit", "verdict"], rows, summary };
    Ok(outcome(Report::new("sweep", config, body), g.format.unwrap_or(Format::Csv), EXIT_OK))
}

pub fn critical_b(g: &GlobalArgs, b_tol: f64) -> anyhow::Result<Outcome> {
    let b = critical_ellipsoid_b(b_tol, &clairaut_config(g))?;
    let decimals = (-b_tol.log10()).ceil().max(0.0) as usize;
    let body = json!({
        "b_critical": format!("{b:.decimals$}"),
        "b_critical_value": b,
        "tolerance": b_tol,
    });
    let config = config_of(g, json!({ "b_tol": b_tol }));
    Ok(outcome(Report::new("critical-b", config, Body::Record(body)), g.format.unwrap_or(Format::Csv), EXIT_OK))
}

/// A `link` operand as given on the command line.
#[derive(Clone, Copy)]
enum Operand {
    Equator(EquatorOrientation),
    Geodesic(GeodesicType),
}

impl std::fmt::Display for Operand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Operand::Equator(e) => write!(f, "e_{e}"),
            Operand::Geodesic(t) => write!(f, "{t}"),
        }
    }
}

fn signed_level(map: &ClairautMap<'_>, t: GeodesicType) -> anyhow::Result<f64> {
    let level = map
        .find_closed_geodesic(t.p().abs(), t.q())?
        .with_context(|| format!("type {t} is not realized on this surface"))?;
    Ok(if t.p() < 0 { -level.c } else { level.c })
}

pub fn link(
    g: &GlobalArgs,
    equators: &[EquatorOrientation],
    types: &[GeodesicType],
    outer: Option<Outer>,
    surface: Option<&SurfaceSpec>,
) -> anyhow::Result<Outcome> {
    let operands: Vec<Operand> = equators.iter().map(|&e| Operand::Equator(e)).chain(types.iter().map(|&t| Operand::Geodesic(t))).collect();
    if operands.len() != 2 {
        return Err(Error::Precondition(format!("link needs exactly two operands among --equator and --type, got {}", operands.len())).into());
    }
    let lk: HalfInt = match (operands[0], operands[1]) {
        (Operand::Equator(a), Operand::Equator(b)) => {
            if a == b {
                return Err(Error::Precondition("the two equator operands must have opposite orientations".into()).into());
            }
            lk_disjoint_simple(false)
        }
        (Operand::Equator(e), Operand::Geodesic(t)) | (Operand::Geodesic(t), Operand::Equator(e)) => lk_equator_geodesic(t, e),
        (Operand::Geodesic(t1), Operand::Geodesic(t2)) => {
            let first_is_outer = match (outer, surface) {
                (Some(o), _) => o == Outer::First,
                (None, Some(spec)) => {
                    let built = spec.build()?;
                    let map = ClairautMap::new(&built, clairaut_config(g))?;
                    let (c1, c2) = (signed_level(&map, t1)?, signed_level(&map, t2)?);
                    if c1.abs() == c2.abs() {
                        return Err(Error::Precondition(format!("{t1} and {t2} lie on the same torus pair")).into());
                    }
                    c1.abs() > c2.abs()
                }
                (None, None) => return Err(Error::Precondition("two geodesics need --outer or --surface".into()).into()),
            };
            if first_is_outer {
                lk_two_geodesics(t1, t2, true)?
            } else {
                lk_two_geodesics(t2, t1, true)?
            }
        }
    };
    let Some(format) = g.format else {
        return Ok(Outcome { text: format!("{lk}\n"), code: EXIT_OK });
    };
    let body = json!({
        "first": operands[0].to_string(),
        "second": operands[1].to_string(),
        "lk": lk.to_string(),
        "lk_halves": lk.halves(),
    });
    let config = config_of(
        g,
        json!({
            "operands": operands.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            "outer": outer.map(|o| format!("{o:?}").to_lowercase()),
            "surface": surface.map(spec_text),
        }),
    );
    Ok(outcome(Report::new("link", config, Body::Record(body)), format, EXIT_OK))
}

pub fn oracle(g: &GlobalArgs, spec: &SurfaceSpec, max_p: i64, max_q: i64, pts_per_swing: usize) -> anyhow::Result<Outcome> {
    if max_p < 0 || max_q < 1 {
        return Err(Error::Precondition(format!("need max-p >= 0 and max-q >= 1, got {max_p} and {max_q}")).into());
    }
    let surface = spec.build()?;
    surface.validate(g.grid).into_result()?;
    let map = ClairautMap::new(&surface, clairaut_config(g))?;
    let opts = SampleOptions { pts_per_swing, ..Default::default() };
    let sweep = oracle_sweep(&map, max_p, max_q, &opts)?;
    let all = sweep.all_match();
    let rows = sweep
        .rows
        .iter()
        .map(|r| vec![json!(r.first.to_string()), json!(r.second.to_string()), json!(r.formula.halves()), json!(r.oracle.halves()), json!(r.matched)])
        .collect();
    let summary = json!({
        "surface": surface.label(),
        "types": sweep.types.iter().map(|(t, c)| format!("{t}@{}", round15(*c))).collect::<Vec<_>>().join(" "),
        "rows": sweep.rows.len(),
        "all_match": all,
    });
    let config = config_of(g, json!({ "surface": spec_text(spec), "max_p": max_p, "max_q": max_q, "pts_per_swing": pts_per_swing }));
    let body = Body::Table { columns: TABLE_COLUMNS.to_vec(), rows, summary };
    let code = if all { EXIT_OK } else { EXIT_MISMATCH };
    Ok(outcome(Report::new("oracle", config, body), g.format.unwrap_or(Format::Csv), code))
}

const TABLE_COLUMNS: [&str; 5] = ["type1", "type2", "lk_halves_formula", "lk_halves_oracle", "match"];

pub fn oracle_diagram(g: &GlobalArgs, path: &Path, t: GeodesicType, eq: EquatorOrientation, pts_per_swing: usize) -> anyhow::Result<Outcome> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let diagram = read_diagram(BufReader::new(file))?;
    let equator = MultiCurve::single(equator_curve(eq, 4 * pts_per_swing)?);
    let formula = lk_equator_geodesic(t, eq);
    let computed = match lk_lifted_report(&equator, &diagram, BigonChoice::default()) {
        Ok(r) => Some(r.lk),
        Err(e) => {
            warn!("diagram pipeline failed on {}: {e}", path.display());
            None
        }
    };
    let matched = computed == Some(formula);
    if !matched {
        eprintln!("oracle mismatch: {}", path.display());
    }
    let row = vec![json!(format!("e{}", if eq.sign() > 0 { '+' } else { '-' })), json!(format!("{},{}", t.p(), t.q())), json!(formula.halves()), json!(computed.map(|x| x.halves())), json!(matched)];
    let summary = json!({ "diagram": path.display().to_string(), "rows": 1, "all_match": matched });
    let config = config_of(g, json!({ "diagram": path.display().to_string(), "type": t.to_string(), "equator": eq.to_string() }));
    let body = Body::Table { columns: TABLE_COLUMNS.to_vec(), rows: vec![row], summary };
    Ok(outcome(Report::new("oracle", config, body), g.format.unwrap_or(Format::Csv), if matched { EXIT_OK } else { EXIT_MISMATCH }))
}

pub fn trace(g: &GlobalArgs, spec: &SurfaceSpec, c: f64, t_max: f64, stride: f64, u0: f64) -> anyhow::Result<Outcome> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        bail!(Error::Precondition(format!("t-max must be positive, got {t_max}")));
    }
    let surface = spec.build()?;
    let eq = surface.equator()?;
    let state0 = GeodesicState::on_equator(&surface, &eq, c, u0)?;
    let opts = OdeOptions::default();
    let samples = dump(&surface, state0, t_max, stride, opts)?;
    let full = integrate(&surface, state0, t_max, opts)?;
    let rows = samples
        .iter()
        .map(|(t, st)| {
            let jet = surface.eval(st.s);
            let (x, y, z) = (jet.f * st.u.cos(), jet.f * st.u.sin(), jet.g);
            [*t, st.u, st.s, st.du, st.ds, x, y, z].iter().map(|v| json!(v)).collect()
        })
        .collect();
    let summary = json!({
        "surface": surface.label(),
        "equator_crossings": full.crossings.len(),
        "clairaut_drift": full.clairaut_drift,
        "speed_drift": full.speed_drift,
    });
    let config = config_of(g, json!({ "surface": spec_text(spec), "c": c, "t_max": t_max, "stride": stride, "u0": u0 }));
    let body = Body::Table { columns: vec!["t", "u", "s", "du", "ds", "x", "y", "z"], rows, summary };
    Ok(outcome(Report::new("trace", config, body), g.format.unwrap_or(Format::Csv), EXIT_OK))
}

/// Exit code for a failed command.
pub fn error_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Validation(_)
            | Error::PoleProximity { .. }
            | Error::NonPositiveCurvature { .. }
            | Error::MultipleCriticalPoints { .. },
        ) => EXIT_VALIDATION,
        Some(Error::Inconclusive { .. }) => EXIT_INCONCLUSIVE,
        Some(
            Error::Parse(_)
            | Error::Format(_)
            | Error::TooFewSamples { .. }
            | Error::InvalidType { .. }
            | Error::LevelOutOfRange { .. }
            | Error::Precondition(_)
            | Error::Io(_),
        ) => EXIT_INVALID,
        // Numerical breakdowns mean the result could not be validated.
        Some(_) => EXIT_VALIDATION,
        None => EXIT_INVALID,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_the_exit_contract() {
        let code = |e: Error| error_code(&anyhow::Error::from(e));
        assert_eq!(code(Error::Inconclusive { sup: 6.0, gap: 0.0, uncertainty: 1e-9 }), EXIT_INCONCLUSIVE);
        assert_eq!(code(Error::Validation("curvature".into())), EXIT_VALIDATION);
        assert_eq!(code(Error::NonConvergence("limit".into())), EXIT_VALIDATION);
        assert_eq!(code(Error::InvalidType { p: 0, q: 2, reason: "meridian" }), EXIT_INVALID);
        assert_eq!(code(Error::Parse("bad".into())), EXIT_INVALID);
        assert_eq!(error_code(&anyhow::anyhow!("plain")), EXIT_INVALID);
    }
}
