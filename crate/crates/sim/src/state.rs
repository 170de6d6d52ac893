use serde::{Deserialize, Serialize};

use crate::model::RobotModel;

/// Full simulation state. One instance per environment; all fields are plain
/// data so snapshots serialize exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub base_pos: [f64; 2],
    pub base_pitch: f64,
    pub base_lin_vel: [f64; 2],
    pub base_ang_vel: f64,
    pub q: Vec<f64>,
    pub qd: Vec<f64>,
    pub prev_q_target: Vec<f64>,
    /// Normal contact force per foot link, N (>= 0).
    pub contact_force: Vec<f64>,
    pub sim_time: f64,
}

impl SimState {
    /// Rest state: base at the nominal standing height, chain extended.
    pub fn rest(model: &RobotModel) -> Self {
        let n = model.n_joints;
        SimState {
            base_pos: [0.0, model.nominal_height()],
            base_pitch: 0.0,
            base_lin_vel: [0.0, 0.0],
            base_ang_vel: 0.0,
            q: vec![0.0; n],
            qd: vec![0.0; n],
            prev_q_target: vec![0.0; n],
            contact_force: vec![0.0; model.n_feet()],
            sim_time: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.base_pos.iter().all(|v| v.is_finite())
            && self.base_pitch.is_finite()
            && self.base_lin_vel.iter().all(|v| v.is_finite())
            && self.base_ang_vel.is_finite()
            && self.q.iter().all(|v| v.is_finite())
            && self.qd.iter().all(|v| v.is_finite())
            && self.prev_q_target.iter().all(|v| v.is_finite())
            && self.contact_force.iter().all(|v| v.is_finite())
    }
}
