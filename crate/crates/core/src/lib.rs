//! Exact computation of Newton polygons, Newton-Puiseux roots, polar
//! quotients and Lojasiewicz gradient exponents of plane curve germs at the
//! origin.

pub mod approx;
pub mod coeff;
pub mod error;
pub mod expr;
pub mod generic;
pub mod invariants;
mod modgcd;
pub mod newton;
pub mod numeric;
pub mod poly;
pub mod puiseux;
pub mod rat;
pub mod roots;
pub mod series;
pub mod squarefree;
pub mod upoly;

pub use approx::{ApproxComplex, NumericContext};
pub use coeff::{Coefficient, GaussRat};
pub use error::{Error, Result};
pub use expr::{format_arc, format_poly, format_univariate, parse_arc, parse_poly};
pub use generic::{GenericConstant, GenericSampler};
pub use invariants::{
    degree_bounds, ell_of_arc, gradient_exponent_complex, gradient_exponent_real,
    intersection_multiplicity, polar_quotients, DegreeBounds, Field, InvariantReport, QuotientSet,
    Route, Settings, Witness,
};
pub use newton::{
    ell_heights, polygon_edges, relative_diagram, NewtonDiagram, NewtonDot, NewtonEdge,
};
pub use numeric::numeric_exponent_estimate;
pub use poly::BivarPoly;
pub use puiseux::{
    approximation, approximation_constant, default_depth, expand_roots, mini_regularize,
    polar_branches, real_polar_branches, slide, slide_to_stability, Branch, BranchSet,
    BranchSource,
};
pub use rat::{ExtRat, Rat};
pub use series::{contact_order, series_order, PuiseuxSeries};
pub use squarefree::squarefree_decompose_x;
