//! Quantum-kernel active learning for materials search.
//!
//! The crate implements the full decision loop of a kernel-based active-learning
//! agent on a noise-free statevector emulator:
//!
//! * [`qsim`] — a minimal statevector simulator and the data-encoding circuit
//!   families used to map feature vectors to quantum states,
//! * [`kernels`] — classical (RBF, DotProduct+White) and quantum (fidelity,
//!   projected) kernels with Gram-matrix construction and validation,
//! * [`regress`] — ε-SVR on precomputed kernels, Gaussian process regression
//!   with the analytic posterior, resampling-based uncertainty and grid search,
//! * [`descriptors`] — perovskite composition descriptors, spin-multiplicity
//!   and inverse-distance structure descriptors, standard scaling and PCA,
//! * [`acquire`] — expected improvement, confidence bounds, exploitation and
//!   batch selection,
//! * [`campaign`] — the dataset-driven active-learning loop with multi-run
//!   aggregation, kernel density estimation and synthetic benchmark datasets.
//!
//! The crate is `no_std` (with `alloc`); all operations are pure functions on
//! immutable inputs and are safe to call from many threads concurrently. File
//! and process handling live in the companion CLI crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod acquire;
pub mod campaign;
pub mod descriptors;
pub mod kernels;
pub mod linalg;
pub mod qsim;
pub mod regress;
