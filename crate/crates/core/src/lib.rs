//! Pseudo-spectral solver for the modified Leray-α model on the periodic
//! 3-torus, with Sobolev-ladder and turbulence-bound diagnostics.

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

pub mod diagnostics;
pub mod fft;
pub mod field;
pub mod forcing;
pub mod grid;
pub mod initial;
pub mod io;
pub mod integrator;
pub mod model;
pub mod norms;
pub mod oracle;
pub mod run;
pub mod spectral;
pub mod verify;
