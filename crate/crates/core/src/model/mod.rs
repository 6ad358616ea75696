//! Model parameters, equilibrium, delay kernels and the characteristic
//! function of the linearization.

mod characteristic;
mod kernel;
mod params;
mod transforms;

pub use characteristic::{characteristic, CharacteristicPoint, Linearization};
pub(crate) use characteristic::check_delay;
pub use kernel::{gamma_density, gamma_tail, Kernel};
pub use params::{rate_for_equilibrium, ModelParams};
pub use transforms::{even_part, odd_part, transforms, KernelTransforms, TransformPoint};

/// Equilibrium population `n*` of the model.
pub fn equilibrium(params: &ModelParams) -> f64 {
    params.equilibrium()
}
