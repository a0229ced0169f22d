//! Characteristic quasipolynomials, their zeros, and stability verdicts.

mod abscissa;
mod lambert;
mod polyroots;
mod quasipoly;
mod roots;
mod sfree;
mod verdict;

pub use abscissa::{spectral_abscissa_bound, AbscissaBound};
pub use lambert::lambert_w;
pub use polyroots::{poly_roots, real_roots_in, squarefree_factors};
pub use quasipoly::{char_quasipoly, DelayType, QuasiPoly};
pub use roots::{spectrum_in_region, AbscissaEstimate, Region, Root, SpectrumReport};
pub use sfree::{row_compression, strangeness_free_check, StrangenessFreeForm};
pub use verdict::{
    commutative_block_abscissas, match_block_triple, stability_verdict, BlockAbscissa, BlockTripleForm, Evidence,
    StabilityKind, StabilityVerdict, LEFT_MARGIN,
};
