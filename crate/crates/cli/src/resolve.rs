//! Turns a parsed scenario into library objects, checking every reference.

use std::collections::BTreeMap;
use std::fmt;

use cstar_fusion::{
    givens, CMatrix, FiberScalar, ModuleShape, ModuleVector, OrthoMap, Quaternion, Rotation, ScalarKind, Submodule,
    WeightSequence, WeightedFrame,
};
use num_complex::Complex;

use crate::scenario::{CommandName, CommandSpec, RotationSpec, Scalar, Scenario, SubmoduleSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

fn invalid<T>(location: impl Into<String>, message: impl fmt::Display) -> Result<T, ValidationError> {
    Err(ValidationError {
        location: location.into(),
        message: message.to_string(),
    })
}

pub struct Context {
    pub scenario: Scenario,
    pub seed: u64,
    pub shape: ModuleShape,
    pub submodules: BTreeMap<String, Submodule<f64>>,
    pub weights: BTreeMap<String, WeightSequence<f64>>,
    pub frames: BTreeMap<String, WeightedFrame<f64>>,
    pub maps: BTreeMap<String, OrthoMap<f64>>,
}

pub fn scalar(kind: ScalarKind, s: &Scalar, at: &str) -> Result<FiberScalar<f64>, ValidationError> {
    let v = match (*s, kind) {
        (Scalar::Real(r), _) => FiberScalar::real(kind, r),
        (Scalar::Complex([re, im]), ScalarKind::Complex) => FiberScalar::complex(re, im),
        (Scalar::Complex([w, x]), ScalarKind::Quaternion) => FiberScalar::quaternion(w, x, 0.0, 0.0),
        (Scalar::Quaternion([w, x, y, z]), ScalarKind::Quaternion) => FiberScalar::quaternion(w, x, y, z),
        (Scalar::Quaternion(_), ScalarKind::Complex) => return invalid(at, "quaternion scalar in a complex scenario"),
    };
    if !v.is_finite() {
        return invalid(at, "scalar is not finite");
    }
    Ok(v)
}

fn complex(s: &Scalar, at: &str) -> Result<Complex<f64>, ValidationError> {
    match scalar(ScalarKind::Complex, s, at)? {
        FiberScalar::Complex(c) => Ok(c),
        FiberScalar::Quaternion(_) => unreachable!("complex kind yields complex scalars"),
    }
}

pub fn vector(shape: &ModuleShape, fibers: &[Vec<Scalar>], at: &str) -> Result<ModuleVector<f64>, ValidationError> {
    if fibers.len() != shape.fibers() {
        return invalid(
            at,
            format!("{} fibers given, the module has {}", fibers.len(), shape.fibers()),
        );
    }
    let mut out = Vec::with_capacity(fibers.len());
    for (k, f) in fibers.iter().enumerate() {
        let row = f
            .iter()
            .enumerate()
            .map(|(i, s)| scalar(shape.kind(), s, &format!("{at}[{k}][{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(row);
    }
    ModuleVector::new(shape.clone(), out).or_else(|e| invalid(at, e))
}

fn resolve_submodule(
    name: &str,
    specs: &BTreeMap<String, SubmoduleSpec>,
    shape: &ModuleShape,
    done: &mut BTreeMap<String, Submodule<f64>>,
    stack: &mut Vec<String>,
) -> Result<Submodule<f64>, ValidationError> {
    if let Some(s) = done.get(name) {
        return Ok(s.clone());
    }
    let at = format!("submodules.{name}");
    let spec = &specs[name];
    let forms = [spec.blocks.is_some(), spec.span.is_some(), spec.complement.is_some()];
    if forms.iter().filter(|&&f| f).count() != 1 {
        return invalid(at, "give exactly one of `blocks`, `span` or `complement`");
    }
    let sub = if let Some(blocks) = &spec.blocks {
        Submodule::block(shape, blocks).or_else(|e| invalid(&at, e))?
    } else if let Some(span) = &spec.span {
        if shape.kind() == ScalarKind::Quaternion {
            return invalid(at, "quaternion fibers admit only the `blocks` form");
        }
        let mut sets = Vec::with_capacity(span.len());
        for (k, set) in span.iter().enumerate() {
            let mut vs = Vec::with_capacity(set.len());
            for (j, v) in set.iter().enumerate() {
                vs.push(
                    v.iter()
                        .enumerate()
                        .map(|(i, s)| complex(s, &format!("{at}.span[{k}][{j}][{i}]")))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            sets.push(vs);
        }
        if sets.len() != shape.fibers() {
            return invalid(
                at,
                format!("span lists {} fibers, the module has {}", sets.len(), shape.fibers()),
            );
        }
        Submodule::span(shape, &sets).or_else(|e| invalid(&at, e))?
    } else {
        let target = spec.complement.as_deref().expect("one form is set");
        if !specs.contains_key(target) {
            return invalid(format!("{at}.complement"), format!("undefined submodule `{target}`"));
        }
        if stack.iter().any(|s| s == target) {
            return invalid(
                format!("{at}.complement"),
                format!("cyclic reference through `{target}`"),
            );
        }
        stack.push(name.to_string());
        let base = resolve_submodule(target, specs, shape, done, stack)?;
        stack.pop();
        base.complement()
    };
    done.insert(name.to_string(), sub.clone());
    Ok(sub)
}

fn rotation(shape: &ModuleShape, k: usize, spec: &RotationSpec, at: &str) -> Result<Rotation<f64>, ValidationError> {
    let m = shape.dim(k);
    let set = [spec.matrix.is_some(), spec.quaternion.is_some(), spec.givens.is_some()];
    if set.iter().filter(|&&f| f).count() > 1 {
        return invalid(at, "give at most one of `matrix`, `quaternion` or `givens`");
    }
    match shape.kind() {
        ScalarKind::Complex => {
            if spec.quaternion.is_some() {
                return invalid(at, "quaternion rotation in a complex scenario");
            }
            if let Some(rows) = &spec.matrix {
                if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                    return invalid(at, format!("rotation matrix must be {m}x{m}"));
                }
                let mut data = Vec::with_capacity(m * m);
                for (i, r) in rows.iter().enumerate() {
                    for (j, s) in r.iter().enumerate() {
                        data.push(complex(s, &format!("{at}.matrix[{i}][{j}]"))?);
                    }
                }
                let u = CMatrix::from_row_major(m, data).expect("dimensions checked");
                Ok(Rotation::Unitary(u))
            } else if let Some((i, j, angle)) = spec.givens {
                if i >= m || j >= m || i == j {
                    return invalid(
                        at,
                        format!("givens plane ({i}, {j}) is not a pair of distinct indices below {m}"),
                    );
                }
                Ok(Rotation::Unitary(givens(m, i, j, angle)))
            } else {
                Ok(Rotation::Unitary(CMatrix::identity(m)))
            }
        }
        ScalarKind::Quaternion => {
            if spec.matrix.is_some() || spec.givens.is_some() {
                return invalid(at, "quaternion fibers take a `quaternion` rotation");
            }
            let [w, x, y, z] = spec.quaternion.unwrap_or([1.0, 0.0, 0.0, 0.0]);
            Ok(Rotation::Quaternion(Quaternion::new(w, x, y, z)))
        }
    }
}

fn require<'a, T>(
    map: &'a BTreeMap<String, T>,
    name: &Option<String>,
    what: &str,
    at: String,
) -> Result<&'a T, ValidationError> {
    match name {
        None => invalid(at, format!("missing {what} name")),
        Some(n) => map
            .get(n)
            .map_or_else(|| invalid(at, format!("undefined {what} `{n}`")), Ok),
    }
}

fn check_command(ctx: &Context, i: usize, c: &CommandSpec) -> Result<(), ValidationError> {
    let at = |field: &str| format!("commands[{i}].{field}");
    let needs_frame = !matches!(c.run, CommandName::Perturb);
    if needs_frame {
        require(&ctx.frames, &c.frame, "frame", at("frame"))?;
    }
    match c.run {
        CommandName::Reconstruct => {
            if let Some(v) = &c.vector {
                vector(&ctx.shape, v, &at("vector"))?;
            }
        }
        CommandName::Cone => {
            if c.weights.is_none() && c.lambda.is_none() {
                return invalid(at("run"), "cone needs `weights`, `lambda` or both");
            }
            if c.weights.is_some() {
                require(&ctx.weights, &c.weights, "weight set", at("weights"))?;
            }
            if let Some(l) = c.lambda {
                if !(l > 0.0 && l.is_finite()) {
                    return invalid(at("lambda"), "must be positive and finite");
                }
            }
        }
        CommandName::Transport => {
            require(&ctx.maps, &c.map, "map", at("map"))?;
        }
        CommandName::Perturb => {
            require(
                &ctx.scenario.perturbations,
                &c.perturbation,
                "perturbation",
                at("perturbation"),
            )?;
        }
        CommandName::VerifyOracle => {
            if c.samples == Some(0) {
                return invalid(at("samples"), "must be at least 1");
            }
        }
        CommandName::Tightness => {
            if let Some(t) = c.tol {
                if !(t >= 0.0 && t.is_finite()) {
                    return invalid(at("tol"), "must be non-negative and finite");
                }
            }
        }
        CommandName::CheckFrame | CommandName::Bounds | CommandName::Multiplier => {}
    }
    Ok(())
}

pub fn resolve(scenario: Scenario, seed_override: Option<u64>) -> Result<Context, ValidationError> {
    let kind = scenario.algebra.kind;
    let n = scenario.algebra.n;
    if n == 0 {
        return invalid("algebra.N", "the algebra needs at least one fiber");
    }
    let dims = scenario.module.as_ref().map_or_else(|| vec![1; n], |m| m.dims.clone());
    if dims.len() != n {
        return invalid("module.dims", format!("{} dimensions given for N = {n}", dims.len()));
    }
    let shape = ModuleShape::new(kind, dims).or_else(|e| invalid("module.dims", e))?;

    let mut submodules = BTreeMap::new();
    for name in scenario.submodules.keys() {
        resolve_submodule(name, &scenario.submodules, &shape, &mut submodules, &mut Vec::new())?;
    }

    let mut weights = BTreeMap::new();
    for (name, rows) in &scenario.weights {
        let at = format!("weights.{name}");
        if let Some(r) = rows.iter().position(|r| r.len() != n) {
            return invalid(
                format!("{at}[{r}]"),
                format!("{} entries, expected one per fiber ({n})", rows[r].len()),
            );
        }
        weights.insert(
            name.clone(),
            WeightSequence::from_rows(kind, rows).or_else(|e| invalid(&at, e))?,
        );
    }

    let mut frames = BTreeMap::new();
    for (name, spec) in &scenario.frames {
        let at = format!("frames.{name}");
        let subs = spec
            .submodules
            .iter()
            .enumerate()
            .map(|(i, s)| {
                submodules.get(s).cloned().map_or_else(
                    || invalid(format!("{at}.submodules[{i}]"), format!("undefined submodule `{s}`")),
                    Ok,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let w = require(
            &weights,
            &Some(spec.weights.clone()),
            "weight set",
            format!("{at}.weights"),
        )?;
        frames.insert(
            name.clone(),
            WeightedFrame::new(subs, w.clone()).or_else(|e| invalid(&at, e))?,
        );
    }

    let mut maps = BTreeMap::new();
    for (name, spec) in &scenario.maps {
        let at = format!("maps.{name}");
        let rotations = match &spec.rotations {
            None => (0..n)
                .map(|k| rotation(&shape, k, &RotationSpec::default(), &at))
                .collect::<Result<Vec<_>, _>>()?,
            Some(rs) => {
                if rs.len() != n {
                    return invalid(
                        format!("{at}.rotations"),
                        format!("{} rotations for {n} fibers", rs.len()),
                    );
                }
                rs.iter()
                    .enumerate()
                    .map(|(k, r)| rotation(&shape, k, r, &format!("{at}.rotations[{k}]")))
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        maps.insert(
            name.clone(),
            OrthoMap::new(shape.clone(), spec.scales.clone(), rotations).or_else(|e| invalid(&at, e))?,
        );
    }

    for (name, spec) in &scenario.perturbations {
        let at = format!("perturbations.{name}");
        let frame = require(&frames, &Some(spec.frame.clone()), "frame", format!("{at}.frame"))?;
        let forms = [spec.candidates.is_some(), spec.random.is_some(), spec.budget.is_some()];
        if forms.iter().filter(|&&f| f).count() != 1 {
            return invalid(at, "give exactly one of `candidates`, `random` or `budget`");
        }
        if let Some(c) = &spec.candidates {
            if c.len() != frame.len() {
                return invalid(
                    format!("{at}.candidates"),
                    format!("{} candidates for a frame of {} members", c.len(), frame.len()),
                );
            }
            for (i, s) in c.iter().enumerate() {
                if !submodules.contains_key(s) {
                    return invalid(format!("{at}.candidates[{i}]"), format!("undefined submodule `{s}`"));
                }
            }
        }
        if let Some(r) = &spec.random {
            if !(r.theta_max >= 0.0 && r.theta_max.is_finite()) {
                return invalid(format!("{at}.random.theta_max"), "must be non-negative and finite");
            }
        }
        if let Some(b) = spec.budget {
            if !(b > 0.0 && b < 1.0) {
                return invalid(format!("{at}.budget"), "must lie in (0, 1)");
            }
        }
        if let Some(p) = spec.p {
            if !(p > 1.0 && p.is_finite()) {
                return invalid(format!("{at}.p"), "Hölder exponent must lie in (1, ∞)");
            }
        }
    }

    let seed = seed_override.or(scenario.seed).unwrap_or(0);
    let mut ctx = Context {
        scenario,
        seed,
        shape,
        submodules,
        weights,
        frames,
        maps,
    };
    ctx.scenario.seed = Some(seed);
    for (i, c) in ctx.scenario.commands.iter().enumerate() {
        check_command(&ctx, i, c)?;
    }
    Ok(ctx)
}
