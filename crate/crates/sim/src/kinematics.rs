use crate::model::RobotModel;
use crate::state::SimState;

/// World-frame pose of one body: position in metres, absolute angle in rad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPose {
    pub pos: [f64; 2],
    pub angle: f64,
}

/// World-frame velocity of one body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkVel {
    pub lin: [f64; 2],
    pub ang: f64,
}

/// Chain direction at absolute angle `theta`: points along base-frame "down"
/// in the zero configuration.
#[inline]
pub(crate) fn chain_dir(theta: f64) -> [f64; 2] {
    [theta.sin(), -theta.cos()]
}

/// Derivative of `chain_dir` with respect to the angle.
#[inline]
pub(crate) fn chain_dir_tangent(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

/// World-frame poses from raw coordinates: entry 0 is the base, entry `i+1`
/// is the distal end of link `i` with that link's absolute angle.
pub fn link_poses(base_pos: [f64; 2], base_pitch: f64, q: &[f64], model: &RobotModel) -> Vec<LinkPose> {
    let mut out = Vec::with_capacity(model.n_joints + 1);
    out.push(LinkPose { pos: base_pos, angle: base_pitch });
    let mut pos = base_pos;
    let mut theta = base_pitch;
    for (i, &qi) in q.iter().enumerate() {
        theta += qi;
        let d = chain_dir(theta);
        pos = [pos[0] + model.link_length[i] * d[0], pos[1] + model.link_length[i] * d[1]];
        out.push(LinkPose { pos, angle: theta });
    }
    out
}

/// World-frame poses of the base and every link for a simulation state.
pub fn forward_kinematics(state: &SimState, model: &RobotModel) -> Vec<LinkPose> {
    link_poses(state.base_pos, state.base_pitch, &state.q, model)
}

/// World-frame velocities matching `link_poses` indexing (entry 0 = base,
/// entry `i+1` = distal end of link `i`).
pub fn link_velocities(
    base_pitch: f64,
    base_lin_vel: [f64; 2],
    base_ang_vel: f64,
    q: &[f64],
    qd: &[f64],
    model: &RobotModel,
) -> Vec<LinkVel> {
    let mut out = Vec::with_capacity(model.n_joints + 1);
    out.push(LinkVel { lin: base_lin_vel, ang: base_ang_vel });
    let mut vel = base_lin_vel;
    let mut theta = base_pitch;
    let mut omega = base_ang_vel;
    for i in 0..model.n_joints {
        theta += q[i];
        omega += qd[i];
        let t = chain_dir_tangent(theta);
        let l = model.link_length[i];
        vel = [vel[0] + l * t[0] * omega, vel[1] + l * t[1] * omega];
        out.push(LinkVel { lin: vel, ang: omega });
    }
    out
}

/// Express a world-frame point in the frame anchored at `origin` with
/// rotation `pitch`.
pub fn to_base_frame(origin: [f64; 2], pitch: f64, point: [f64; 2]) -> [f64; 2] {
    let dx = point[0] - origin[0];
    let dz = point[1] - origin[1];
    let (s, c) = pitch.sin_cos();
    [c * dx + s * dz, -s * dx + c * dz]
}

/// Rotate a world-frame vector into a frame with rotation `pitch`.
pub fn world_to_frame(pitch: f64, v: [f64; 2]) -> [f64; 2] {
    let (s, c) = pitch.sin_cos();
    [c * v[0] + s * v[1], -s * v[0] + c * v[1]]
}

/// Rotate a frame-local vector into the world.
pub fn frame_to_world(pitch: f64, v: [f64; 2]) -> [f64; 2] {
    let (s, c) = pitch.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use tracklab_rng::Rng;

    #[test]
    fn zero_configuration_is_colinear() {
        let model = RobotModel::with_joints(4);
        let q = vec![0.0; 4];
        let poses = link_poses([0.0, 0.0], 0.0, &q, &model);
        for (i, p) in poses.iter().enumerate() {
            assert!((p.pos[0]).abs() < 1e-15);
            let expect_z = -(i as f64) * 0.3;
            assert!((p.pos[1] - expect_z).abs() < 1e-12, "link {i}: {:?}", p.pos);
            assert_eq!(p.angle, 0.0);
        }
    }

    #[test]
    fn translation_equivariance() {
        let model = RobotModel::with_joints(3);
        let mut rng = Rng::seed_from(1);
        for _ in 0..20 {
            let q: Vec<f64> = (0..3).map(|_| rng.uniform(-1.5, 1.5)).collect();
            let pitch = rng.uniform(-1.0, 1.0);
            let a = link_poses([0.0, 0.0], pitch, &q, &model);
            let b = link_poses([1.0, 0.0], pitch, &q, &model);
            for (pa, pb) in a.iter().zip(&b) {
                assert!((pb.pos[0] - pa.pos[0] - 1.0).abs() < 1e-12);
                assert!((pb.pos[1] - pa.pos[1]).abs() < 1e-12);
                assert_eq!(pa.angle, pb.angle);
            }
        }
    }

    #[test]
    fn rotation_equivariance_about_base() {
        let model = RobotModel::with_joints(3);
        let mut rng = Rng::seed_from(2);
        for _ in 0..20 {
            let q: Vec<f64> = (0..3).map(|_| rng.uniform(-1.5, 1.5)).collect();
            let dpitch = rng.uniform(-2.0, 2.0);
            let a = link_poses([0.0, 0.0], 0.0, &q, &model);
            let b = link_poses([0.0, 0.0], dpitch, &q, &model);
            let (s, c) = dpitch.sin_cos();
            for (pa, pb) in a.iter().zip(&b) {
                let rx = c * pa.pos[0] - s * pa.pos[1];
                let rz = s * pa.pos[0] + c * pa.pos[1];
                assert!((pb.pos[0] - rx).abs() < 1e-12);
                assert!((pb.pos[1] - rz).abs() < 1e-12);
                assert!((pb.angle - pa.angle - dpitch).abs() < 1e-12);
            }
        }
    }

    /// Independent trigonometric oracle: accumulate each joint rotation as an
    /// explicit 2x2 rotation composition.
    #[test]
    fn matches_rotation_composition_oracle() {
        let model = RobotModel::with_joints(3);
        let mut rng = Rng::seed_from(3);
        for _ in 0..50 {
            let q: Vec<f64> = (0..3).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let pitch = rng.uniform(-2.0, 2.0);
            let base = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
            let poses = link_poses(base, pitch, &q, &model);

            // Oracle: rotate the local "down" axis by the running rotation
            // matrix product and integrate positions.
            let mut rot = [[pitch.cos(), -pitch.sin()], [pitch.sin(), pitch.cos()]];
            let mut pos = base;
            for i in 0..3 {
                let (s, c) = q[i].sin_cos();
                let r = [[c, -s], [s, c]];
                rot = [
                    [rot[0][0] * r[0][0] + rot[0][1] * r[1][0], rot[0][0] * r[0][1] + rot[0][1] * r[1][1]],
                    [rot[1][0] * r[0][0] + rot[1][1] * r[1][0], rot[1][0] * r[0][1] + rot[1][1] * r[1][1]],
                ];
                let down = [-rot[0][1], -rot[1][1]];
                pos = [pos[0] + 0.3 * down[0], pos[1] + 0.3 * down[1]];
                assert!((poses[i + 1].pos[0] - pos[0]).abs() < 1e-12);
                assert!((poses[i + 1].pos[1] - pos[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn velocities_match_finite_difference_of_positions() {
        let model = RobotModel::with_joints(4);
        let mut rng = Rng::seed_from(4);
        let q: Vec<f64> = (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let qd: Vec<f64> = (0..4).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let pitch = 0.3;
        let omega = 0.7;
        let base_v = [0.4, -0.2];
        let vels = link_velocities(pitch, base_v, omega, &q, &qd, &model);

        let h = 1e-7;
        let q_plus: Vec<f64> = q.iter().zip(&qd).map(|(a, b)| a + h * b).collect();
        let q_minus: Vec<f64> = q.iter().zip(&qd).map(|(a, b)| a - h * b).collect();
        let p_plus = link_poses(
            [base_v[0] * h, base_v[1] * h],
            pitch + omega * h,
            &q_plus,
            &model,
        );
        let p_minus = link_poses(
            [-base_v[0] * h, -base_v[1] * h],
            pitch - omega * h,
            &q_minus,
            &model,
        );
        for i in 0..5 {
            let fd = [
                (p_plus[i].pos[0] - p_minus[i].pos[0]) / (2.0 * h),
                (p_plus[i].pos[1] - p_minus[i].pos[1]) / (2.0 * h),
            ];
            assert!((vels[i].lin[0] - fd[0]).abs() < 1e-6, "link {i}");
            assert!((vels[i].lin[1] - fd[1]).abs() < 1e-6, "link {i}");
        }
    }

    #[test]
    fn frame_transforms_round_trip() {
        let v = [0.3, -0.8];
        let w = frame_to_world(0.9, world_to_frame(0.9, v));
        assert!((w[0] - v[0]).abs() < 1e-14);
        assert!((w[1] - v[1]).abs() < 1e-14);
    }
}
