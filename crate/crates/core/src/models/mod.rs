//! Hamiltonians, the HELIA ansatz, the poly-DLA split and the
//! phase-classification dataset.

mod ansatz;
mod dataset;
mod hamiltonians;
mod observable;
mod split;

pub use ansatz::{build_helia, yz_linear_layers, HeliaAnsatz};
pub use dataset::{label_for, make_phase_dataset, PhaseDataset, PhaseSample, Split};
pub use hamiltonians::{
    heisenberg_bond_alt, ltfim_hamiltonian, tfim_hamiltonian, tfim_unit, xy_hamiltonian, DlaFamily,
};
pub use observable::{load_observable, Observable};
pub use split::{split_by_basis, split_poly_dla, PolyDlaSplit};
