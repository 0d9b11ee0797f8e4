//! Subcommand pipelines.

use std::f64::consts::PI;
use std::path::Path;

use nritt::calculus::{
    apply_auto, classify_ritt, classify_sectorial, estimate_calculus_norm, transfer_check, CalculusParams,
    CalculusReport,
};
use nritt::funclass::{Coeff, HoloFn};
use nritt::matrixkit::{NormKind, Operator};
use nritt::multipliers::{carleson_delta, carleson_delta_min, multiplier, ritt_bound_profile, BVSequence};
use nritt::poly::Poly;
use nritt::regions::{default_angle_grid, max_angle, Angle, Region, RegionKind};
use nritt::stochastics::{
    estimate_quadratic_calculus, estimate_r_bound, resolvent_family, RBoundConfig, RadMode, DEFAULT_MC_SAMPLES,
};
use nritt::{Complex64, Error};
use regex::Regex;
use serde::Serialize;
use serde_json::Value;

use crate::report::{
    config_hash, emit, envelope, load_family, load_function, parse_error, read_json, required, Meta, Outcome,
};
use crate::{Command, Common, MultiplierAction, SweepMode};

pub fn run(command: &Command, common: &Common) -> Outcome<()> {
    if !(common.tol.is_finite() && common.tol > 0.0) {
        return Err(parse_error(format!("--tol must be positive, got {}", common.tol)));
    }
    if common.grid == 0 || common.density == 0 {
        return Err(parse_error("--grid and --density must be positive".into()));
    }
    if common.n == 0 {
        return Err(Error::InvalidOrder(0).into());
    }
    let mut inputs: Vec<&Path> = common.input.iter().map(|p| p.as_path()).collect();
    if let Some(f) = &common.function {
        let t = f.trim_start();
        if !(t.starts_with('{') || t.starts_with('[')) {
            inputs.push(Path::new(f));
        }
    }
    if let Command::Carleson { points } = command {
        inputs.push(points);
    }
    let meta = |name| -> Outcome<Meta> {
        Ok(Meta { command: name, config_hash: config_hash(command, common, &inputs)?, seed: common.seed })
    };
    let out = common.out.as_deref();
    match command {
        Command::Classify => emit(out, &envelope(&meta("classify")?, classify_cmd(common)?)?),
        Command::Apply => emit(out, &envelope(&meta("apply")?, apply_cmd(common)?)?),
        Command::Transfer => emit(out, &envelope(&meta("transfer")?, transfer_cmd(common)?)?),
        Command::Sweep { mode, rule, dim } => {
            let m = meta("sweep")?;
            let rows = match mode {
                SweepMode::Calculus => sweep_calculus(common)?,
                SweepMode::Profile => sweep_profile(common, rule, *dim)?,
            };
            let mut text = format!(
                "# nritt {} sweep config_hash={} seed={}\nangle,bound,K_lower,nodes\n",
                nritt::VERSION,
                m.config_hash,
                m.seed
            );
            for r in rows {
                text.push_str(&format!("{},{},{},{}\n", r.angle, r.bound, r.k_lower, r.nodes));
            }
            emit(out, &text)
        }
        Command::Rbound { resolvent_family, max_ops, trials, family_size, climb_steps } => {
            let cfg = RBoundConfig {
                trials: *trials,
                family_size_max: *family_size,
                climb_steps: *climb_steps,
                seed: common.seed,
                mode: RadMode::Exhaustive,
            };
            let result = rbound_cmd(common, *resolvent_family, *max_ops, &cfg)?;
            emit(out, &envelope(&meta("rbound")?, result)?)
        }
        Command::Quadratic { samples } => emit(out, &envelope(&meta("quadratic")?, quadratic_cmd(common, *samples)?)?),
        Command::Multiplier { action: MultiplierAction::Gen { rule, dim, norm } } => {
            let g = sequence_from_rule(rule, *dim)?;
            let op = multiplier(&g, (*norm).into());
            let result = MultiplierReport {
                rule: rule.clone(),
                bv_norm: g.bv_norm(),
                values: g.values().iter().map(|z| z.re).collect(),
                operator: op,
            };
            emit(out, &envelope(&meta("multiplier")?, result)?)
        }
        Command::Carleson { points } => {
            let raw: Vec<Coeff> = read_json(points)?;
            let pts: Vec<Complex64> = raw.into_iter().map(Complex64::from).collect();
            let (delta_min, index) = carleson_delta_min(&pts)?;
            let deltas = (0..pts.len()).map(|j| carleson_delta(&pts, j)).collect::<nritt::Result<Vec<_>>>()?;
            emit(out, &envelope(&meta("carleson")?, CarlesonReport { delta_min, index, deltas })?)
        }
    }
}

/// Reads an operator file; also accepts a report whose `result.operator`
/// holds one, such as the output of `multiplier gen`.
fn load_operator(path: &Path) -> Outcome<Operator> {
    let v: Value = read_json(path)?;
    let v = match v.pointer("/result/operator") {
        Some(inner) => inner.clone(),
        None => v,
    };
    serde_json::from_value(v).map_err(|e| parse_error(format!("{}: {e}", path.display())))
}

fn input_operator(common: &Common) -> Outcome<Operator> {
    load_operator(required(&common.input, "--input")?)
}

fn classify_on(op: &Operator, kind: RegionKind, n: usize, grid: &[Angle], density: usize) -> Outcome<CalculusReport> {
    Ok(match kind {
        RegionKind::NStolz => classify_ritt(op, n, grid, density)?,
        RegionKind::NSector => classify_sectorial(op, n, grid, density)?,
    })
}

/// Type angle of an admissible operator on the default grid.
fn type_angle(op: &Operator, kind: RegionKind, common: &Common) -> Outcome<f64> {
    let grid = default_angle_grid(kind, common.n, common.grid);
    let report = classify_on(op, kind, common.n, &grid, common.density)?;
    if !report.admissible {
        return Err(Error::NotClassifiable(format!(
            "no finite resolvent bound above the type angle {}",
            report.type_angle.value()
        ))
        .into());
    }
    Ok(report.type_angle.value())
}

fn params(common: &Common, kind: RegionKind, alpha: f64) -> Outcome<CalculusParams> {
    let gamma = common.gamma.unwrap_or(0.5 * (alpha + max_angle(kind, common.n)));
    let p = CalculusParams::new(common.n, alpha, gamma, common.tol)?;
    Ok(match common.beta {
        Some(b) => p.with_beta(b)?,
        None => p,
    })
}

fn classify_cmd(common: &Common) -> Outcome<CalculusReport> {
    let op = input_operator(common)?;
    let kind = common.kind.into();
    let grid = default_angle_grid(kind, common.n, common.grid);
    classify_on(&op, kind, common.n, &grid, common.density)
}

#[derive(Serialize)]
struct ApplyReport {
    kind: RegionKind,
    alpha: f64,
    gamma: f64,
    contour_angle: f64,
    nodes: usize,
    operator: Operator,
}

fn apply_cmd(common: &Common) -> Outcome<ApplyReport> {
    let op = input_operator(common)?;
    let f = load_function(required(&common.function, "--function")?)?;
    let kind = common.kind.into();
    let alpha = type_angle(&op, kind, common)?;
    let p = params(common, kind, alpha)?;
    let applied = apply_auto(&op, &f, kind, &p)?;
    Ok(ApplyReport {
        kind,
        alpha,
        gamma: p.gamma.value(),
        contour_angle: applied.contour_angle.value(),
        nodes: applied.nodes,
        operator: applied.operator,
    })
}

#[derive(Serialize)]
struct TransferReport {
    alpha: f64,
    gamma: f64,
    deviation: f64,
    nodes: usize,
    sector_side: Operator,
    stolz_side: Operator,
}

/// `diag(0.5, 0.9)` and `f(z) = z/(1+z)²` unless overridden.
fn transfer_cmd(common: &Common) -> Outcome<TransferReport> {
    let op = match &common.input {
        Some(p) => load_operator(p)?,
        None => Operator::diagonal(&[Complex64::new(0.5, 0.0), Complex64::new(0.9, 0.0)], NormKind::P2),
    };
    let f = match &common.function {
        Some(arg) => load_function(arg)?,
        None => HoloFn::rational(Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[1.0, 2.0, 1.0]))?,
    };
    let alpha = type_angle(&op, RegionKind::NStolz, common)?;
    let p = params(common, RegionKind::NStolz, alpha)?;
    let f = f.fit_sector_certificate(Region::n_sector(common.n, p.gamma.value())?)?;
    let t = transfer_check(&op, &f, &p)?;
    Ok(TransferReport {
        alpha,
        gamma: p.gamma.value(),
        deviation: t.deviation,
        nodes: t.nodes,
        sector_side: t.lhs,
        stolz_side: t.rhs,
    })
}

struct SweepRow {
    angle: f64,
    bound: f64,
    k_lower: f64,
    nodes: usize,
}

/// Calculus-constant estimates on `B_{n,γ}` for `γ` between the type angle
/// and the largest Stolz angle.
fn sweep_calculus(common: &Common) -> Outcome<Vec<SweepRow>> {
    let op = input_operator(common)?;
    let family = load_family(required(&common.function, "--function")?)?;
    let kind = RegionKind::NStolz;
    let alpha = type_angle(&op, kind, common)?;
    let top = max_angle(kind, common.n);
    let count = common.grid;
    let gammas: Vec<f64> = (1..=count).map(|k| alpha + (top - alpha) * k as f64 / (count + 1) as f64).collect();
    let mut angles = vec![Angle::new(alpha)?];
    for &g in &gammas {
        angles.push(Angle::new(g)?);
    }
    let bounds = classify_ritt(&op, common.n, &angles, common.density)?.per_angle;
    let mut rows = Vec::with_capacity(count);
    for (gamma, b) in gammas.into_iter().zip(bounds) {
        let p = CalculusParams::new(common.n, alpha, gamma, common.tol)?;
        let est = estimate_calculus_norm(&op, &family, &p)?;
        rows.push(SweepRow { angle: gamma, bound: b.bound, k_lower: est.k_lower, nodes: est.nodes });
    }
    Ok(rows)
}

/// Unit-circle profile of a multiplier: `bound` is the variation bound and
/// `K_lower` the observed `‖(e^{iθ}−1)R(e^{iθ},T_γ)‖`.
fn sweep_profile(common: &Common, rule: &str, dim: usize) -> Outcome<Vec<SweepRow>> {
    let g = sequence_from_rule(rule, dim)?;
    let thetas: Vec<f64> = (1..=common.grid).map(|k| PI * k as f64 / common.grid as f64).collect();
    let prof = ritt_bound_profile(&g, &thetas, NormKind::P2)?;
    Ok(prof
        .rows
        .into_iter()
        .map(|r| SweepRow { angle: r.theta, bound: r.bound, k_lower: r.actual, nodes: 0 })
        .collect())
}

#[derive(Serialize)]
struct RBoundReport {
    family_size: usize,
    estimate: nritt::stochastics::RBoundEstimate,
}

fn rbound_cmd(common: &Common, from_resolvent: bool, max_ops: usize, cfg: &RBoundConfig) -> Outcome<RBoundReport> {
    let path = required(&common.input, "--input")?;
    let ops = if from_resolvent {
        let op = load_operator(path)?;
        let kind = common.kind.into();
        let alpha = type_angle(&op, kind, common)?;
        let p = params(common, kind, alpha)?;
        let region = Region::new(kind, common.n, p.gamma.value())?;
        resolvent_family(&op, &region, common.density, max_ops)?
    } else {
        let v: Value = read_json(path)?;
        if v.is_array() {
            serde_json::from_value(v).map_err(|e| parse_error(format!("{}: {e}", path.display())))?
        } else {
            vec![load_operator(path)?]
        }
    };
    let estimate = estimate_r_bound(&ops, cfg)?;
    Ok(RBoundReport { family_size: ops.len(), estimate })
}

fn quadratic_cmd(common: &Common, samples: usize) -> Outcome<nritt::stochastics::QuadraticEstimate> {
    let op = input_operator(common)?;
    let family = load_family(required(&common.function, "--function")?)?;
    let kind = common.kind.into();
    let alpha = type_angle(&op, kind, common)?;
    let p = params(common, kind, alpha)?;
    let mode = RadMode::Auto { samples: DEFAULT_MC_SAMPLES, seed: common.seed };
    Ok(estimate_quadratic_calculus(&op, kind, &family, &p, samples, common.seed, mode)?)
}

#[derive(Serialize)]
struct MultiplierReport {
    rule: String,
    bv_norm: f64,
    values: Vec<f64>,
    operator: Operator,
}

#[derive(Serialize)]
struct CarlesonReport {
    delta_min: f64,
    index: usize,
    deltas: Vec<f64>,
}

/// `1-B^-n` (so `γ_m = 1 − B^{−m}`) or `1-C*Q^n` (`γ_m = 1 − C Q^m`).
fn sequence_from_rule(rule: &str, dim: usize) -> Outcome<BVSequence> {
    let num = r"([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)";
    let inverse = Regex::new(&format!(r"^1-{num}\^-n$")).expect("valid pattern");
    let scaled = Regex::new(&format!(r"^1-{num}\*{num}\^n$")).expect("valid pattern");
    let compact: String = rule.chars().filter(|c| !c.is_whitespace()).collect();
    let parse = |s: &str| s.parse::<f64>().map_err(|e| parse_error(format!("rule {rule:?}: {e}")));
    let (c, q) = if let Some(m) = inverse.captures(&compact) {
        let b = parse(&m[1])?;
        if b <= 1.0 {
            return Err(Error::DomainError(format!("base must exceed 1 in {rule:?}")).into());
        }
        (1.0, 1.0 / b)
    } else if let Some(m) = scaled.captures(&compact) {
        (parse(&m[1])?, parse(&m[2])?)
    } else {
        return Err(parse_error(format!("unrecognized rule {rule:?}; expected 1-B^-n or 1-C*Q^n")));
    };
    Ok(BVSequence::geometric(c, q, dim)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_parse() {
        let g = sequence_from_rule("1-2^-n", 4).unwrap();
        let v: Vec<f64> = g.values().iter().map(|z| z.re).collect();
        assert_eq!(v, vec![0.0, 0.5, 0.75, 0.875]);
        let g = sequence_from_rule("1 - 0.5*0.25^n", 2).unwrap();
        assert_eq!(g.values()[1].re, 1.0 - 0.125);
        assert!(matches!(sequence_from_rule("1-n", 2), Err(crate::report::Failure::Input { .. })));
        assert!(matches!(sequence_from_rule("1-2*0.5^n", 2), Err(crate::report::Failure::Domain(_))));
    }
}
