//! Energy-aware HVAC set-point control: a lumped building simulator, a neural
//! thermal-comfort predictor, and DDPG plus tabular/DQN baseline agents.

pub mod numerics;
pub mod comfort;
pub mod envsim;
pub mod agents;
pub mod harness;
