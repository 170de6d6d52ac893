use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("n_joints must be >= 1")]
    NoJoints,
    #[error("field {0} must have one entry per joint")]
    BadLength(&'static str),
    #[error("field {0} must be strictly positive")]
    NonPositive(&'static str),
    #[error("lower/upper joint indices must partition 0..n_joints")]
    BadPartition,
    #[error("link index {0} out of range")]
    BadLinkIndex(usize),
}

/// Ground-contact penalty parameters (normal spring-damper, Coulomb-capped
/// tangential damping).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactParams {
    pub stiffness: f64,
    pub damping: f64,
    pub tangential_damping: f64,
}

impl Default for ContactParams {
    fn default() -> Self {
        ContactParams { stiffness: 5000.0, damping: 50.0, tangential_damping: 50.0 }
    }
}

/// Physical and control parameters of the planar chain.
///
/// The chain attaches at the base origin and extends along the base-frame
/// "down" axis in the zero configuration; foot links are the designated
/// contact links (the chain end by default), the shoulder link is the mid
/// link used by the termination rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotModel {
    pub n_joints: usize,
    pub link_length: Vec<f64>,
    pub link_mass: Vec<f64>,
    pub base_mass: f64,
    pub base_inertia: f64,
    /// Base (torso) centre of mass offset in the base frame.
    pub base_com: [f64; 2],
    /// Ground Coulomb friction coefficient.
    pub nominal_friction: f64,
    /// Viscous joint friction loss per joint.
    pub joint_friction: Vec<f64>,
    pub armature: Vec<f64>,
    pub q_soft: Vec<f64>,
    pub qd_limit: Vec<f64>,
    pub torque_limit: Vec<f64>,
    pub kp: Vec<f64>,
    pub kd: Vec<f64>,
    pub lower_joint_indices: Vec<usize>,
    pub upper_joint_indices: Vec<usize>,
    pub foot_link_indices: Vec<usize>,
    pub shoulder_link_index: usize,
    pub contact: ContactParams,
    /// Pins the floating base; used by pendulum-style configurations.
    pub base_fixed: bool,
}

impl RobotModel {
    /// Default chain with `n` joints: 0.3 m / 1 kg links, foot at the chain
    /// end, shoulder at the middle, lower joints = first half.
    pub fn with_joints(n: usize) -> Self {
        let half = n.div_ceil(2);
        RobotModel {
            n_joints: n,
            link_length: vec![0.3; n],
            link_mass: vec![1.0; n],
            base_mass: 4.0,
            base_inertia: 0.05,
            base_com: [0.0, 0.0],
            nominal_friction: 1.0,
            joint_friction: vec![0.05; n],
            armature: vec![0.01; n],
            q_soft: vec![2.9; n],
            qd_limit: vec![20.0; n],
            torque_limit: vec![60.0; n],
            kp: vec![40.0; n],
            kd: vec![2.0; n],
            lower_joint_indices: (0..half).collect(),
            upper_joint_indices: (half..n).collect(),
            foot_link_indices: vec![n - 1],
            shoulder_link_index: n / 2,
            contact: ContactParams::default(),
            base_fixed: false,
        }
    }

    pub fn dof(&self) -> usize {
        3 + self.n_joints
    }

    pub fn n_feet(&self) -> usize {
        self.foot_link_indices.len()
    }

    /// Base height with the chain fully extended and the foot on the ground.
    pub fn nominal_height(&self) -> f64 {
        self.link_length.iter().sum()
    }

    /// Rod inertia of link `i` about its own centre of mass.
    pub fn link_inertia(&self, i: usize) -> f64 {
        self.link_mass[i] * self.link_length[i] * self.link_length[i] / 12.0
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.n_joints;
        if n < 1 {
            return Err(ModelError::NoJoints);
        }
        let per_joint: [(&'static str, &Vec<f64>); 8] = [
            ("link_length", &self.link_length),
            ("link_mass", &self.link_mass),
            ("joint_friction", &self.joint_friction),
            ("armature", &self.armature),
            ("q_soft", &self.q_soft),
            ("qd_limit", &self.qd_limit),
            ("torque_limit", &self.torque_limit),
            ("kp", &self.kp),
        ];
        for (name, v) in per_joint {
            if v.len() != n {
                return Err(ModelError::BadLength(name));
            }
        }
        if self.kd.len() != n {
            return Err(ModelError::BadLength("kd"));
        }
        let strictly_positive: [(&'static str, &Vec<f64>); 7] = [
            ("link_length", &self.link_length),
            ("link_mass", &self.link_mass),
            ("q_soft", &self.q_soft),
            ("qd_limit", &self.qd_limit),
            ("torque_limit", &self.torque_limit),
            ("kp", &self.kp),
            ("armature", &self.armature),
        ];
        for (name, v) in strictly_positive {
            if v.iter().any(|&x| x <= 0.0) {
                return Err(ModelError::NonPositive(name));
            }
        }
        if self.base_mass <= 0.0 {
            return Err(ModelError::NonPositive("base_mass"));
        }
        if self.base_inertia <= 0.0 {
            return Err(ModelError::NonPositive("base_inertia"));
        }
        if self.nominal_friction <= 0.0 {
            return Err(ModelError::NonPositive("nominal_friction"));
        }
        if self.contact.stiffness <= 0.0 || self.contact.damping <= 0.0 {
            return Err(ModelError::NonPositive("contact"));
        }
        let mut seen = vec![false; n];
        for &i in self.lower_joint_indices.iter().chain(&self.upper_joint_indices) {
            if i >= n || seen[i] {
                return Err(ModelError::BadPartition);
            }
            seen[i] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(ModelError::BadPartition);
        }
        for &i in &self.foot_link_indices {
            if i >= n {
                return Err(ModelError::BadLinkIndex(i));
            }
        }
        if self.shoulder_link_index >= n {
            return Err(ModelError::BadLinkIndex(self.shoulder_link_index));
        }
        Ok(())
    }
}

impl Default for RobotModel {
    fn default() -> Self {
        RobotModel::with_joints(5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_model_is_valid() {
        assert_eq!(RobotModel::default().validate(), Ok(()));
        assert_eq!(RobotModel::with_joints(1).validate(), Ok(()));
    }

    #[test]
    fn rejects_bad_partition() {
        let mut m = RobotModel::with_joints(3);
        m.lower_joint_indices = vec![0, 1];
        m.upper_joint_indices = vec![1, 2];
        assert_eq!(m.validate(), Err(ModelError::BadPartition));
        m.upper_joint_indices = vec![2];
        m.lower_joint_indices = vec![0];
        assert_eq!(m.validate(), Err(ModelError::BadPartition));
    }

    #[test]
    fn rejects_non_positive_parameters() {
        let mut m = RobotModel::with_joints(2);
        m.link_mass[1] = 0.0;
        assert_eq!(m.validate(), Err(ModelError::NonPositive("link_mass")));
    }
}
