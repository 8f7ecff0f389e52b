//! Simultaneous and individual approximation of maps into filtered spaces.

pub mod individual;
pub mod neighborhood;
pub mod theta;
pub mod verify;

pub use individual::{
    individual_approximation, HomotopyRecord, HomotopyRecordFile, IndividualConfig, PushMap,
    PushedPoint, SliceReport,
};
pub use neighborhood::{
    CompactSet, Constraint, MembershipReport, NeighborhoodFile, NeighborhoodSpec,
};
pub use theta::{
    simultaneous_approximation, ChartAssignment, EngineConfig, LevelReport,
    SimultaneousApproximation, ThetaEvaluator,
};
pub use verify::{
    verify_theta_properties, PropertyCheck, SamplingPlan, ThetaPropertyReport, TwinBump,
};
