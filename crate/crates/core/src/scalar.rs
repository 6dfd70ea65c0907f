//! Scalar layer: the generic real type, quaternions, and the tagged fiber scalar.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::{Deserialize, Serialize};

/// Real field the whole crate is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative tolerance for positivity, hermiticity and idempotence checks.
    const BASE_TOL: Self;
    /// Relative spectral floor under which a frame operator counts as singular.
    const FRAME_TOL: Self;
    /// Relative drop tolerance for rank decisions in Gram–Schmidt.
    const RANK_TOL: Self;

    /// Converts an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const BASE_TOL: f64 = 1e-12;
    const FRAME_TOL: f64 = 1e-10;
    const RANK_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const BASE_TOL: f32 = 1e-5;
    const FRAME_TOL: f32 = 1e-5;
    const RANK_TOL: f32 = 1e-4;
}

/// The two scalar kinds a fiber may carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Complex,
    Quaternion,
}

impl ScalarKind {
    pub fn name(self) -> &'static str {
        match self {
            ScalarKind::Complex => "complex",
            ScalarKind::Quaternion => "quaternion",
        }
    }

    /// Number of real components per scalar.
    pub fn width(self) -> usize {
        match self {
            ScalarKind::Complex => 2,
            ScalarKind::Quaternion => 4,
        }
    }
}

impl Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A quaternion `w + x i + y j + z k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    pub fn from_complex(c: Complex<T>) -> Self {
        Self::new(c.re, c.im, T::zero(), T::zero())
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> T {
        // hypot chain avoids overflow for large components
        self.w.hypot(self.x).hypot(self.y.hypot(self.z))
    }

    /// Modulus of the vector part `x i + y j + z k`.
    pub fn vector_norm(self) -> T {
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Multiplicative inverse `q̄ / |q|²`; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        let n = self.norm_sqr();
        if n == T::zero() {
            None
        } else {
            Some(self.conj().scale(T::one() / n))
        }
    }

    pub fn normalize(self) -> Option<Self> {
        let n = self.norm();
        if n == T::zero() {
            None
        } else {
            Some(self.scale(T::one() / n))
        }
    }

    pub fn components(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

/// Hamilton product.
pub fn quat_mul<T: Real>(a: Quaternion<T>, b: Quaternion<T>) -> Quaternion<T> {
    Quaternion::new(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        quat_mul(self, rhs)
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.w + rhs.w, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.w - rhs.w, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Real> Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.w, self.x, self.y, self.z)
    }
}

/// One fiber value of the algebra: a complex number or a quaternion.
///
/// Binary operations on mismatched kinds embed the complex operand in ℍ
/// (`a + bi ↦ a + bi + 0j + 0k`); container types reject mixing before
/// that can happen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FiberScalar<T> {
    Complex(Complex<T>),
    Quaternion(Quaternion<T>),
}

impl<T: Real> FiberScalar<T> {
    pub fn kind(&self) -> ScalarKind {
        match self {
            FiberScalar::Complex(_) => ScalarKind::Complex,
            FiberScalar::Quaternion(_) => ScalarKind::Quaternion,
        }
    }

    pub fn real(kind: ScalarKind, v: T) -> Self {
        match kind {
            ScalarKind::Complex => FiberScalar::Complex(Complex::new(v, T::zero())),
            ScalarKind::Quaternion => FiberScalar::Quaternion(Quaternion::real(v)),
        }
    }

    pub fn zero(kind: ScalarKind) -> Self {
        Self::real(kind, T::zero())
    }

    pub fn one(kind: ScalarKind) -> Self {
        Self::real(kind, T::one())
    }

    pub fn complex(re: T, im: T) -> Self {
        FiberScalar::Complex(Complex::new(re, im))
    }

    pub fn quaternion(w: T, x: T, y: T, z: T) -> Self {
        FiberScalar::Quaternion(Quaternion::new(w, x, y, z))
    }

    /// Real part (`w` for quaternions).
    pub fn re(&self) -> T {
        match self {
            FiberScalar::Complex(c) => c.re,
            FiberScalar::Quaternion(q) => q.w,
        }
    }

    /// Modulus of the non-real part.
    pub fn imag_norm(&self) -> T {
        match self {
            FiberScalar::Complex(c) => c.im.abs(),
            FiberScalar::Quaternion(q) => q.vector_norm(),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            FiberScalar::Complex(c) => FiberScalar::Complex(c.conj()),
            FiberScalar::Quaternion(q) => FiberScalar::Quaternion(q.conj()),
        }
    }

    pub fn norm_sqr(&self) -> T {
        match self {
            FiberScalar::Complex(c) => c.norm_sqr(),
            FiberScalar::Quaternion(q) => q.norm_sqr(),
        }
    }

    pub fn abs(&self) -> T {
        match self {
            FiberScalar::Complex(c) => c.norm(),
            FiberScalar::Quaternion(q) => q.norm(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        match self {
            FiberScalar::Complex(c) => FiberScalar::Complex(c * s),
            FiberScalar::Quaternion(q) => FiberScalar::Quaternion(q.scale(s)),
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        match self {
            FiberScalar::Complex(c) => {
                if c.norm_sqr() == T::zero() {
                    None
                } else {
                    Some(FiberScalar::Complex(c.inv()))
                }
            }
            FiberScalar::Quaternion(q) => q.inverse().map(FiberScalar::Quaternion),
        }
    }

    pub fn as_quaternion(&self) -> Quaternion<T> {
        match self {
            FiberScalar::Complex(c) => Quaternion::from_complex(*c),
            FiberScalar::Quaternion(q) => *q,
        }
    }

    /// Complex value, if this is a complex fiber.
    pub fn as_complex(&self) -> Option<Complex<T>> {
        match self {
            FiberScalar::Complex(c) => Some(*c),
            FiberScalar::Quaternion(_) => None,
        }
    }

    /// Real components in wire order: `[re, im]` or `[w, x, y, z]`.
    pub fn components(&self) -> Vec<T> {
        match self {
            FiberScalar::Complex(c) => vec![c.re, c.im],
            FiberScalar::Quaternion(q) => q.components().to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|v| v.is_finite())
    }
}

impl<T: Real> Mul for FiberScalar<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        match (self, rhs) {
            (FiberScalar::Complex(a), FiberScalar::Complex(b)) => FiberScalar::Complex(a * b),
            (a, b) => FiberScalar::Quaternion(a.as_quaternion() * b.as_quaternion()),
        }
    }
}

impl<T: Real> Add for FiberScalar<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (FiberScalar::Complex(a), FiberScalar::Complex(b)) => FiberScalar::Complex(a + b),
            (a, b) => FiberScalar::Quaternion(a.as_quaternion() + b.as_quaternion()),
        }
    }
}

impl<T: Real> Sub for FiberScalar<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        match (self, rhs) {
            (FiberScalar::Complex(a), FiberScalar::Complex(b)) => FiberScalar::Complex(a - b),
            (a, b) => FiberScalar::Quaternion(a.as_quaternion() - b.as_quaternion()),
        }
    }
}

impl<T: Real> Neg for FiberScalar<T> {
    type Output = Self;
    fn neg(self) -> Self {
        match self {
            FiberScalar::Complex(c) => FiberScalar::Complex(-c),
            FiberScalar::Quaternion(q) => FiberScalar::Quaternion(-q),
        }
    }
}

impl<T: Real> Display for FiberScalar<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberScalar::Complex(c) => write!(f, "{c}"),
            FiberScalar::Quaternion(q) => write!(f, "{q}"),
        }
    }
}
