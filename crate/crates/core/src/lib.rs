pub mod numkernel;
pub mod models;
pub mod priors;
pub mod expansions;
pub mod exact;
pub mod mtsim;
pub mod analysis;
