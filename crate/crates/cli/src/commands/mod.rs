pub mod cat;
pub mod estimate;
pub mod evolve;
pub mod hologram;
pub mod spectrum;
pub mod sweep;
pub mod trajectories;
