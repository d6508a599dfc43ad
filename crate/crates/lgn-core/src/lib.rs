//! Exact computations in the quantized character-variety algebra
//! `L_{g,n}(U_{q²}(sl₂))`.

// Index loops mirror the matrix formulas; nested map types are local caches.
#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod coeff_ring;
pub mod corpus;
pub mod etensor;
pub mod holonomy;
pub mod lgn;
mod linalg;
pub mod oq2;
pub mod pbw;
pub mod polymat;
mod render;
pub mod tensor;
pub mod torus;
pub mod vacuum;

pub use coeff_ring::{quantum_integer, specialize, CoeffError, CycloScalar, LaurentScalar, Ring, Scalar};
pub use etensor::ElemTensor;
pub use lgn::{Family, GeneratorId, LgnAlgebra, LgnElement, LgnError, Mode, Surface};
pub use tensor::{State, Tensor, TensorError};
