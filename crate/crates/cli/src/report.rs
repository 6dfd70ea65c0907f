//! JSON report encoding.

use std::io;

use cstar_fusion::perturbation::{Criterion, PerturbReport};
use cstar_fusion::{AlgebraElement, FiberScalar, FrameBounds, ModuleVector, Tightness};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

pub const VERSION: &str = "cstar-fusion/1";

/// Pretty printing with every float written to 17 significant digits.
struct Fixed17<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for Fixed17<'_> {
    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );

    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
}

pub fn to_string(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("in-memory JSON encoding cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON output is UTF-8")
}

/// A scalar as a bare number when real, else `[re, im]` or `[w, x, y, z]`.
pub fn scalar(s: &FiberScalar<f64>) -> Value {
    if s.imag_norm() == 0.0 {
        return json!(s.re());
    }
    json!(s.components())
}

pub fn algebra(a: &AlgebraElement<f64>) -> Value {
    Value::Array(a.fibers().iter().map(scalar).collect())
}

pub fn vector(x: &ModuleVector<f64>) -> Value {
    Value::Array(
        x.fibers()
            .iter()
            .map(|f| Value::Array(f.iter().map(scalar).collect()))
            .collect(),
    )
}

pub fn bounds(b: &FrameBounds<f64>) -> Value {
    json!({
        "is_frame": b.is_frame,
        "lower": algebra(&b.lower),
        "upper": algebra(&b.upper),
        "c": b.c,
        "d": b.d,
        "lower_inverse_norm_inv": b.lower_inverse_norm_inv(),
        "per_fiber": b.per_fiber.iter().map(|s| json!({"lambda_min": s.lambda_min, "lambda_max": s.lambda_max})).collect::<Vec<_>>(),
    })
}

pub fn tightness(t: &Tightness<f64>) -> Value {
    json!({
        "tight": t.tight,
        "constant": t.constant.as_ref().map(algebra),
        "parseval": t.parseval,
    })
}

fn criterion(c: &Criterion<f64>) -> Value {
    json!({"lhs": c.lhs, "rhs": c.rhs, "holds": c.holds})
}

pub fn perturbation(r: &PerturbReport<f64>) -> Value {
    json!({
        "distances": r.distances,
        "angles": r.angles,
        "ecart_weights": r.ecart_weights,
        "ecart": r.ecart,
        "threshold": r.threshold,
        "guaranteed": r.guaranteed,
        "predicted_lower": r.predicted_lower,
        "predicted_upper": r.predicted_upper,
        "observed": {"is_frame": r.observed.is_frame, "c": r.observed.c, "d": r.observed.d},
        "confirmed": r.confirmed,
        "criteria": {
            "weighted": criterion(&r.criteria.weighted),
            "bounded_weight": criterion(&r.criteria.bounded_weight),
            "holder": r.criteria.holder.as_ref().map(criterion),
            "holder_p": r.criteria.holder_p,
        },
        "criteria_consistent": r.criteria_consistent,
    })
}
