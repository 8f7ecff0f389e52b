//! Homotopy-invariant oracles and the direct-limit experiments built on them.

pub mod components;
pub mod palais;
pub mod pi1;
pub mod winding;

pub use components::{
    nested_model, pi0_report, random_component_model, ComponentModel, Pi0Report, SampleGraph,
    StepComponents,
};
pub use palais::{
    palais_experiment, punctured_slab_input, punctured_slab_model, two_ball_input, two_ball_model,
    ConvexLoops, FundamentalGroupComparison, PalaisInput, PalaisReport,
};
pub use pi1::{
    annulus_homotopy, circle_loop, default_probes, default_step_loops, injectivity_leg,
    perturb_loop, pi1_directlimit_experiment, punctured_model, surjectivity_leg, InjectivityReport,
    Pi1Config, Pi1Report, ProbeReport, StepLoop, WindingColimit,
};
pub use winding::{
    loop_to_map, perimeter_parameter, polygon_domain, trace_loop, winding_number, LoopModel,
};
