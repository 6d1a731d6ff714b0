//! Spectra for rational frequencies: the discriminant, bands and gaps, gap
//! labels, the gap-size and product bounds, butterfly tiles and atomic
//! density-of-states measures.

mod bands;
mod butterfly;
mod discriminant;
mod gaps;

pub use bands::{band_edges, band_edges_with_tolerance, Band, BandList, DEFAULT_EDGE_TOLERANCE};
pub use butterfly::{butterfly, dos_atoms, DosAtoms, Tile};
pub use discriminant::{
    bloch_matrix, discriminant, discriminant_at, discriminant_spread, lambda_pow, periodic_potential,
};
pub use gaps::{cey_product_check, gap_bound_check, gap_catalog, nearest_label, CeyReport, Gap, GapBoundRow};
