"""Physics modules: basis, Hamiltonians, spectra, observables, dynamics, band theory, sweeps."""
