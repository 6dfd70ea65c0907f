//! Command execution.

use cstar_fusion::perturbation::{budget_theta_max, random_givens_perturbation};
use cstar_fusion::{block_multiplier_check, oracle, perturbation_check, sample, Error, WeightedFrame};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report;
use crate::resolve::{vector, Context};
use crate::scenario::{CommandName, CommandSpec};

/// Per-command random stream, keyed by the command's position so that
/// filtering with `--only` leaves the remaining results unchanged.
fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn frame<'a>(ctx: &'a Context, c: &CommandSpec) -> &'a WeightedFrame<f64> {
    &ctx.frames[c.frame.as_deref().expect("validated")]
}

fn execute(ctx: &Context, index: usize, c: &CommandSpec) -> Result<Value, Error> {
    let mut rng = stream(ctx.seed, index);
    match c.run {
        CommandName::CheckFrame => {
            let b = frame(ctx, c).bounds();
            Ok(json!({"is_frame": b.is_frame, "c": b.c, "d": b.d}))
        }
        CommandName::Bounds => {
            let f = frame(ctx, c);
            let mut doc = report::bounds(&f.bounds());
            if f.is_frame() {
                let t = f.tightness(<f64 as cstar_fusion::Real>::FRAME_TOL)?;
                doc["tight"] = json!(t.tight);
                doc["parseval"] = json!(t.parseval);
            }
            Ok(doc)
        }
        CommandName::Reconstruct => {
            let f = frame(ctx, c);
            let (x, source) = match &c.vector {
                Some(v) => (vector(&ctx.shape, v, "vector").expect("validated"), "given"),
                None => (sample::vector(&ctx.shape, 1.0, &mut rng), "random"),
            };
            let r = f.reconstruct(&x)?;
            Ok(json!({
                "input": source,
                "x": report::vector(&x),
                "xhat": report::vector(&r.xhat),
                "preimage": report::vector(&r.preimage),
                "rel_error": r.rel_error,
            }))
        }
        CommandName::Tightness => {
            let t = frame(ctx, c).tightness(c.tol.unwrap_or(<f64 as cstar_fusion::Real>::FRAME_TOL))?;
            Ok(report::tightness(&t))
        }
        CommandName::Multiplier => {
            let f = frame(ctx, c);
            let sets = f
                .block_index_sets()
                .ok_or_else(|| Error::InvalidArgument("multiplier check needs block-form submodules".into()))?;
            let m = block_multiplier_check(f.shape(), &sets, &f.weights().rows())?;
            Ok(json!({
                "index_sets": sets,
                "member": m.member,
                "fiber_sums": m.fiber_sums,
                "tight_constant": m.tight_constant.as_ref().map(report::algebra),
                "series_conditions": m.series_conditions,
            }))
        }
        CommandName::Cone => {
            let f = frame(ctx, c);
            let mut doc = json!({});
            if let Some(name) = &c.weights {
                let sum = f.cone_add(&ctx.weights[name])?;
                doc["sum"] = json!({"weights": name, "bounds": report::bounds(&sum.bounds())});
            }
            if let Some(lambda) = c.lambda {
                let scaled = f.cone_scale(lambda)?;
                doc["scaled"] = json!({"lambda": lambda, "bounds": report::bounds(&scaled.bounds())});
            }
            Ok(doc)
        }
        CommandName::Transport => {
            let map = &ctx.maps[c.map.as_deref().expect("validated")];
            let t = map.transport_frame(frame(ctx, c))?;
            let valid = t.frame.submodules().iter().all(|u| u.validate_projection(1e-12));
            Ok(json!({
                "map": c.map,
                "nu": report::algebra(&map.nu()),
                "intrinsic_bounds": report::bounds(&t.intrinsic_bounds()),
                "pullback_bounds": report::bounds(&t.pullback_bounds()),
                "projections_valid": valid,
            }))
        }
        CommandName::Perturb => {
            let name = c.perturbation.as_deref().expect("validated");
            let spec = &ctx.scenario.perturbations[name];
            let f = &ctx.frames[&spec.frame];
            let (ks, theta_max) = if let Some(names) = &spec.candidates {
                (names.iter().map(|n| ctx.submodules[n].clone()).collect(), None)
            } else {
                let theta = match (&spec.random, spec.budget) {
                    (Some(r), _) => r.theta_max,
                    (None, Some(b)) => budget_theta_max(f, b)?,
                    (None, None) => unreachable!("validated"),
                };
                (random_givens_perturbation(f.submodules(), theta, &mut rng), Some(theta))
            };
            let r = perturbation_check(f, &ks, Some(spec.p.unwrap_or(2.0)))?;
            let mut doc = report::perturbation(&r);
            doc["perturbation"] = json!(name);
            doc["frame"] = json!(spec.frame);
            doc["theta_max"] = json!(theta_max);
            Ok(doc)
        }
        CommandName::VerifyOracle => {
            let f = frame(ctx, c);
            let b = f.bounds();
            let dense = oracle::fiber_eigen_bounds(&oracle::flatten_frame_operator(f)?)?;
            let deviation = oracle::spectral_deviation(f)?;
            let samples = c.samples.unwrap_or(1000);
            let s = oracle::brute_force_frame_check(f, &b, samples, &mut rng)?;
            Ok(json!({
                "oracle_spectra": dense.iter().map(|e| json!({"lambda_min": e.lambda_min, "lambda_max": e.lambda_max})).collect::<Vec<_>>(),
                "max_spectral_deviation": deviation,
                "spectra_agree": deviation <= 1e-10,
                "samples": s.samples,
                "sampling_passed": s.passed,
                "violations": s.violations,
                "observed_min": s.observed_min,
                "observed_max": s.observed_max,
            }))
        }
    }
}

/// Runs the (optionally filtered) command list. Returns the report and
/// whether any command errored.
pub fn run(ctx: &Context, only: Option<CommandName>) -> (Value, bool) {
    let mut results = Vec::new();
    let mut errored = false;
    for (i, c) in ctx.scenario.commands.iter().enumerate() {
        if only.is_some_and(|o| o != c.run) {
            continue;
        }
        let mut entry = json!({"index": i, "command": c.run.as_str()});
        match execute(ctx, i, c) {
            Ok(result) => {
                entry["status"] = json!("ok");
                entry["result"] = result;
            }
            Err(e) => {
                errored = true;
                entry["status"] = json!("error");
                entry["error"] = json!({"kind": e.name(), "message": e.to_string()});
            }
        }
        if let Some(f) = &c.frame {
            entry["frame"] = json!(f);
        }
        results.push(entry);
    }
    let doc = json!({
        "version": report::VERSION,
        "seed": ctx.seed,
        "scenario": serde_json::to_value(&ctx.scenario).expect("scenario is serializable"),
        "filter": only.map(|o| o.as_str()),
        "results": results,
    });
    (doc, errored)
}
