use hoffman_core::calmness::{clm_at, CalmnessReport};
use hoffman_core::geometry::enumerate_vertices;
use hoffman_core::global::{hof_global, hof_global_exhaustive_report};
use hoffman_core::lab::fixtures::staircase;
use hoffman_core::lab::{estimate_moduli, fixture, ModulusEstimate, Schedule};
use hoffman_core::semilocal::{chain_check, hof_at, hof_at_sampling, mc_ratio_sup, refine_ratio_samples};
use hoffman_core::{builtin, hof_global_grid, BoundarySampler, FiniteSystem, Rhs, Sampler, Tolerances};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::input::{finite_problem, load_system, normalized, parse_list, parse_vector_arg, require_rhs};
use crate::report::{envelope, modulus, num, points, subset, vector};
use crate::{Cli, Command, RhsArg, SystemArgs};

struct Problem {
    sys: FiniteSystem,
    b: Option<Rhs>,
}

fn problem(args: &SystemArgs, rhs: Option<&RhsArg>) -> Result<Problem, CliError> {
    let loaded = load_system(&args.system)?;
    let rhs = rhs.and_then(|r| r.rhs.as_deref()).map(parse_vector_arg).transpose()?;
    let (sys, b) = finite_problem(&loaded, args.grid, rhs)?;
    Ok(Problem { sys, b })
}

fn system_args(cmd: &Command) -> Option<&SystemArgs> {
    match cmd {
        Command::Global { sys, .. }
        | Command::At { sys, .. }
        | Command::Calmness { sys, .. }
        | Command::Vertices { sys, .. }
        | Command::Verify { sys, .. } => Some(sys),
        Command::Lab { .. } | Command::GridStudy { .. } => None,
    }
}

pub fn run(cli: &Cli) -> Result<Value, CliError> {
    let mut tol = cli.tolerances()?;
    if cli.dump_normalized {
        let args = system_args(&cli.command)
            .ok_or_else(|| CliError::Usage("--dump-normalized needs a command that reads a system file".into()))?;
        return Ok(normalized(&load_system(&args.system)?));
    }
    match &cli.command {
        Command::Global { sys, exhaustive, cap } => {
            if let Some(cap) = cap {
                tol.subset_cap = *cap;
            }
            let p = problem(sys, None)?;
            let body = global(&p.sys, &tol, *exhaustive)?;
            Ok(envelope("global", None, &tol, body))
        }
        Command::At { sys, rhs } => {
            let p = problem(sys, Some(rhs))?;
            let b = require_rhs(p.b)?;
            let rep = hof_at(&p.sys, &b, &tol)?;
            let candidates: Vec<Value> = rep
                .candidates
                .iter()
                .map(|(v, c)| json!({"point": vector(v), "value": modulus(c.value), "attaining": subset(&c.attaining, &p.sys)}))
                .collect();
            let body = json!({
                "value": modulus(rep.value),
                "attaining_point": vector(&rep.attaining_point),
                "candidates": candidates,
            });
            Ok(envelope("at", None, &tol, body))
        }
        Command::Calmness { sys, rhs, point } => {
            let p = problem(sys, Some(rhs))?;
            let b = require_rhs(p.b)?;
            let x = parse_list(point)?;
            let rep = clm_at(&p.sys, &b, &x, &tol)?;
            Ok(envelope("calmness", None, &tol, calmness(&p.sys, &x, &rep)))
        }
        Command::Vertices { sys, rhs } => {
            let p = problem(sys, Some(rhs))?;
            let b = require_rhs(p.b)?;
            let vs = enumerate_vertices(&p.sys, &b, tol.rank, tol.subset_cap)?;
            Ok(envelope(
                "vertices",
                None,
                &tol,
                json!({"count": vs.len(), "vertices": points(&vs)}),
            ))
        }
        Command::Verify {
            sys,
            rhs,
            samples,
            boundary,
            seed,
            radius,
            refine,
        } => {
            let p = problem(sys, Some(rhs))?;
            let b = require_rhs(p.b)?;
            let body = verify(&p.sys, &b, &tol, *samples, *boundary, *seed, *radius, *refine)?;
            Ok(envelope("verify", Some(*seed), &tol, body))
        }
        Command::Lab {
            fixture: name,
            y_bar,
            branches,
            schedule,
            samples,
            global_samples,
            seed,
            cap,
        } => {
            let mut m = match (name.as_str(), branches) {
                ("staircase", Some(r)) => staircase(*r),
                (_, Some(_)) => return Err(CliError::Usage("--branches applies to the staircase only".into())),
                _ => fixture(name)?,
            };
            if let Some(y) = y_bar {
                let y = parse_list(y)?;
                if y.len() != m.y_bar.len() {
                    return Err(CliError::Usage(format!("--y-bar needs {} entries", m.y_bar.len())));
                }
                m = m.at(y);
            }
            let mut sched = parse_schedule(schedule)?.with_seed(*seed);
            if let Some(s) = samples {
                sched.samples_per_level = *s;
            }
            if let Some(s) = global_samples {
                sched.global_samples = *s;
            }
            if let Some(c) = cap {
                sched = sched.with_cap(*c);
            }
            let est = estimate_moduli(&m, &sched)?;
            let clm: Vec<Value> = est
                .clm
                .iter()
                .map(|(anchor, e)| json!({"anchor": vector(anchor), "estimate": estimate(e)}))
                .collect();
            let body = json!({
                "fixture": est.name,
                "y_bar": vector(&est.y_bar),
                "sup_clm": estimate(&est.sup_clm),
                "uclm": estimate(&est.uclm),
                "uclm_ball": est.uclm_ball.as_ref().map_or(Value::Null, estimate),
                "lipusc": estimate(&est.lipusc),
                "hof": estimate(&est.hof),
                "clm": clm,
                "chain_holds": est.check_chain(1e-9).is_ok(),
                "graph_pairs": est.graph_pairs,
                "skipped": est.skipped,
                "schedule": {
                    "levels": sched.levels(),
                    "samples_per_level": sched.samples_per_level,
                    "global_samples": sched.global_samples,
                    "cap": num(sched.cap),
                },
            });
            Ok(envelope("lab", Some(*seed), &tol, body))
        }
        Command::GridStudy {
            builtin: name,
            steps,
            point,
        } => {
            let csys = builtin(name)?;
            let steps = parse_list(steps)?;
            let x = point.as_deref().map(parse_list).transpose()?;
            let rows = steps
                .iter()
                .map(|&step| -> Result<Value, CliError> {
                    let g = hof_global_grid(&csys, step, &tol)?;
                    let mut row = json!({
                        "step": num(step),
                        "rows": g.rows,
                        "global": modulus(g.value),
                        "subset": subset(&g.report.subset, &g.system),
                    });
                    if let Some(x) = &x {
                        let (_, b) = csys.discretize(&hoffman_core::GridSpec::new(step)?)?;
                        row["calmness"] = modulus(clm_at(&g.system, &b, x, &tol)?.value);
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let body = json!({
                "builtin": name,
                "point": x.as_deref().map_or(Value::Null, vector),
                "steps": rows,
            });
            Ok(envelope("grid-study", None, &tol, body))
        }
    }
}

fn global(sys: &FiniteSystem, tol: &Tolerances, exhaustive: bool) -> Result<Value, CliError> {
    let rep = hof_global(sys, tol)?;
    let (aty, y1) = rep.certificate_norms(sys);
    let routes: serde_json::Map<String, Value> =
        rep.routes.iter().map(|(name, v)| (name.clone(), modulus(*v))).collect();
    let mut body = json!({
        "value": modulus(rep.value),
        "subset": rep.subset.labels(sys),
        "subset_indices": rep.subset.indices(),
        "weights": rep.subset.certificate.as_deref().map_or(Value::Null, vector),
        "certificate": vector(&rep.certificate),
        "certificate_dual_norm": num(aty),
        "certificate_l1_norm": num(y1),
        "routes": routes,
    });
    if exhaustive {
        let ex = hof_global_exhaustive_report(sys, tol.subset_cap)?;
        body["exhaustive"] = json!({
            "value": modulus(ex.value),
            "subset": ex.subset.labels(sys),
            "agrees": ex.value.approx_eq(rep.value, 1e-8),
        });
    }
    Ok(body)
}

fn calmness(sys: &FiniteSystem, x: &[f64], rep: &CalmnessReport) -> Value {
    let family: Vec<Value> = rep.family.members.iter().map(|d| json!(d.labels(sys))).collect();
    let end_set: Vec<Value> = rep.end_set.iter().map(|vs| points(vs)).collect();
    json!({
        "value": modulus(rep.value),
        "point": vector(x),
        "active": rep.family.active.labels(sys),
        "attaining": subset(&rep.attaining, sys),
        "family": family,
        "end_set": end_set,
    })
}

#[allow(clippy::too_many_arguments)]
fn verify(
    sys: &FiniteSystem,
    b: &Rhs,
    tol: &Tolerances,
    samples: usize,
    boundary: usize,
    seed: u64,
    radius: f64,
    refine: usize,
) -> Result<Value, CliError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(CliError::Usage(format!("--radius must be positive, got {radius}")));
    }
    let centers = enumerate_vertices(sys, b, tol.rank, tol.subset_cap)?;
    let outside = if refine == 0 {
        Sampler::VertexNeighborhoods { centers, radius }.draw(samples, seed)?
    } else {
        let initial_count = samples / 5;
        let per_round = (samples - initial_count).checked_div(refine).unwrap_or(0);
        let initial = Sampler::VertexNeighborhoods { centers, radius }.draw(initial_count, seed)?;
        refine_ratio_samples(sys, b, initial, refine, per_round, 10, seed)?
    };
    let bd = BoundarySampler::new(sys, b, tol)?.draw(boundary, seed)?;
    let mc = mc_ratio_sup(sys, b, &outside)?;
    let trace = hof_at_sampling(sys, b, &outside, tol.active)?;
    let chain = chain_check(sys, b, &bd, &outside, tol)?;
    Ok(json!({
        "hof_at": modulus(chain.hof_at),
        "mc_ratio_sup": modulus(mc),
        "hof_at_sampling": {
            "estimate": modulus(trace.estimate),
            "used": trace.used,
            "skipped": trace.skipped,
        },
        "chain": {
            "passed": true,
            "max_vertex_clm": modulus(chain.max_vertex_clm),
            "max_boundary_clm": modulus(chain.max_boundary_clm),
            "boundary_samples": chain.boundary_samples,
            "interior_samples": chain.interior_samples,
        },
        "outside_samples": outside.len(),
        "radius": num(radius),
    }))
}

fn parse_schedule(s: &str) -> Result<Schedule, CliError> {
    if s == "default" {
        return Ok(Schedule::default());
    }
    let levels = s
        .strip_prefix("geometric:")
        .and_then(|k| k.parse::<usize>().ok())
        .filter(|k| *k >= 2)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown schedule `{s}`; use `default` or `geometric:K` with K ≥ 2"
            ))
        })?;
    Ok(Schedule::geometric(levels))
}

fn estimate(e: &ModulusEstimate) -> Value {
    let levels: Vec<Value> = e
        .levels
        .iter()
        .map(|l| {
            json!({
                "radius": num(l.radius),
                "epsilon": l.epsilon.map_or(Value::Null, num),
                "pairs": l.pairs,
                "value": modulus(l.value),
            })
        })
        .collect();
    json!({
        "modulus": modulus(e.modulus()),
        "last": modulus(e.value),
        "peak": modulus(e.peak()),
        "diverged": e.diverged,
        "levels": levels,
    })
}
