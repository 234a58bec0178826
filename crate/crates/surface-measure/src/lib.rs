//! Discrete surface-area measures on the unit sphere and resistance
//! functionals `F(D) = ∫ f(n) dν_D(n)` for pluggable pressure laws.

mod law;
mod measure;

pub use law::{
    AreaLaw, ClassicalLaw, LawError, LawRegistry, PressureLaw, RearLaw, TabulatedLaw,
};
pub use measure::{
    eval_functional, measure_linear_combine, measure_of, measure_of_with, Atom,
    DiscreteSurfaceMeasure, MeasureError, Orientation,
};
