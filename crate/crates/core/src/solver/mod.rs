//! Quasi-bound states above one or two walls and their time evolution.

pub mod grid;
pub mod packet;
pub mod states;

pub use grid::HeightGrid;
pub use packet::{evolve, evolve_amplitudes, project, sudden_transition, synthesize, Transition, WavePacket};
pub use states::{
    absorber_widths, apply_wall_scattering_length, bounce_frequency, solve_single_wall, solve_two_wall, wall_slope, wkb_barrier,
    QuasiBoundState, StateSet, Walls,
};
