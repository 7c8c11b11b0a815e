//! Quantum-optics experiment design toolkit: setup model, component library,
//! retrieval, simulators, the design pipeline and report bundles.

pub mod bundled;
pub mod cli;
pub mod experiments;
pub mod optical_model;
pub mod pipeline;
pub mod report;
pub mod retrieval;
pub mod rng;
pub mod toolbox;
