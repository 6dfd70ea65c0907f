//! *-fusion frames over fiberwise Hilbert C*-modules.
//!
//! The algebra is a finite product of copies of `ℂ` or `ℍ` with pointwise
//! operations and the sup norm; the module carries one vector per fiber and
//! an algebra-valued inner product. On top of that the crate provides
//! complemented submodules, weighted frames with their operators and
//! optimal bounds, reconstruction, frame transport through
//! orthogonality-preserving maps, and perturbation analysis via projection
//! distances and subspace angles.
//!
//! All types are generic over the real field (`f32` or `f64`); the `*F64`
//! and `*F32` aliases below fix it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod frame;
pub mod linalg;
pub mod module;
pub mod morphism;
pub mod oracle;
pub mod perturbation;
pub mod sample;
pub mod scalar;
pub mod submodule;

pub use algebra::{AlgebraElement, PositivityClass};
pub use error::{Error, Result};
pub use frame::{
    block_frame, block_multiplier_check, FiberSpectrum, FrameBounds, FrameOperator, MultiplierCheck, Reconstruction,
    Tightness, WeightSequence, WeightedFrame,
};
pub use linalg::CMatrix;
pub use module::{ModuleSequence, ModuleShape, ModuleVector};
pub use morphism::{givens, OrthoMap, Rotation, TransportedFrame};
pub use oracle::{brute_force_frame_check, eigen_bounds, flatten_frame_operator, DenseOperator, EigenBounds};
pub use perturbation::{
    angle, angle_criteria, ball_membership, ecart, perturbation_check, proj_distance, AngleCriteria, PerturbReport,
};
pub use scalar::{quat_mul, FiberScalar, Quaternion, Real, ScalarKind};
pub use submodule::{FiberProjection, Submodule};

pub type QuaternionF64 = Quaternion<f64>;
pub type AlgebraElementF64 = AlgebraElement<f64>;
pub type ModuleVectorF64 = ModuleVector<f64>;
pub type SubmoduleF64 = Submodule<f64>;
pub type WeightedFrameF64 = WeightedFrame<f64>;
pub type OrthoMapF64 = OrthoMap<f64>;

pub type QuaternionF32 = Quaternion<f32>;
pub type AlgebraElementF32 = AlgebraElement<f32>;
pub type ModuleVectorF32 = ModuleVector<f32>;
pub type SubmoduleF32 = Submodule<f32>;
pub type WeightedFrameF32 = WeightedFrame<f32>;
pub type OrthoMapF32 = OrthoMap<f32>;
