"""Full CI spectra of two trapped ultracold atoms interacting through a
Morse potential, expanded over Cartesian Gaussian-type orbitals, with a
quasi-exact radial reference solver for validation."""

__version__ = "0.1.0"
