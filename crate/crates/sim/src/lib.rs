//! Planar floating-base articulated-chain simulation.
//!
//! The robot is a serial chain of `n_joints` revolute links hanging off a
//! 3-DoF floating base (x, z, pitch). Joints are PD-position controlled at
//! 500 Hz with a 50 Hz command interface, ground contact is a spring-damper
//! penalty at designated foot links, and all physics parameters can be
//! domain-randomized.

mod dynamics;
mod filter;
mod kinematics;
mod linalg;
mod model;
mod observe;
mod randomize;
mod state;

pub use dynamics::{pd_torque, step, step_pd_filtered, SimError, CONTROL_DT, GRAVITY, SUBSTEPS, SUBSTEP_DT};
pub use filter::{lowpass_beta, FilterError, FilterPlacement, LowPass};
pub use kinematics::{forward_kinematics, link_poses, link_velocities, to_base_frame, LinkPose, LinkVel};
pub use model::{ContactParams, ModelError, RobotModel};
pub use observe::{observe, ProprioObs};
pub use randomize::{apply_push, randomize_model, PushScheduler, RandomizationConfig};
pub use state::SimState;
