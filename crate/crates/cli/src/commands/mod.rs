pub mod coherence_demo;
pub mod distribution;
pub mod engine;
pub mod sweep;
pub mod verify;
