use thiserror::Error;

use crate::filter::LowPass;
use crate::kinematics::{chain_dir, chain_dir_tangent};
use crate::linalg::solve_spd;
use crate::model::RobotModel;
use crate::state::SimState;

/// Inner integration substeps per control step (500 Hz PD under a 50 Hz
/// command interface).
pub const SUBSTEPS: usize = 10;
pub const SUBSTEP_DT: f64 = 0.002;
pub const CONTROL_DT: f64 = SUBSTEPS as f64 * SUBSTEP_DT;
pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("non-finite state after substep {substep}")]
    Divergence { substep: usize },
    #[error("q_target contains non-finite values")]
    NonFiniteTarget,
    #[error("q_target length {got} does not match n_joints {want}")]
    TargetLength { got: usize, want: usize },
}

/// PD control law with torque clamping, evaluated per joint.
pub fn pd_torque(q_target: &[f64], q: &[f64], qd: &[f64], model: &RobotModel, tau: &mut [f64]) {
    for k in 0..model.n_joints {
        let raw = model.kp[k] * (q_target[k] - q[k]) - model.kd[k] * qd[k];
        tau[k] = raw.clamp(-model.torque_limit[k], model.torque_limit[k]);
    }
}

/// Scratch buffers reused across the substeps of one control step.
struct Scratch {
    theta: Vec<f64>,
    omega: Vec<f64>,
    tang: Vec<[f64; 2]>,
    dir: Vec<[f64; 2]>,
    acols: Vec<[f64; 2]>,
    mass: Vec<f64>,
    rhs: Vec<f64>,
    tau: Vec<f64>,
}

impl Scratch {
    fn new(model: &RobotModel) -> Self {
        let n = model.n_joints;
        let dim = model.dof();
        Scratch {
            theta: vec![0.0; n],
            omega: vec![0.0; n],
            tang: vec![[0.0; 2]; n],
            dir: vec![[0.0; 2]; n],
            acols: vec![[0.0; 2]; n + 1],
            mass: vec![0.0; dim * dim],
            rhs: vec![0.0; dim],
            tau: vec![0.0; n],
        }
    }
}

/// Joint-space mass matrix (row-major, `dof x dof`) for the current
/// configuration; includes armature on the joint diagonal.
pub fn mass_matrix(state: &SimState, model: &RobotModel) -> Vec<f64> {
    let mut scratch = Scratch::new(model);
    chain_geometry(state, model, &mut scratch);
    let dim = model.dof();
    let mut m = vec![0.0; dim * dim];
    assemble_mass(state, model, &mut scratch, &mut m);
    m
}

fn chain_geometry(state: &SimState, model: &RobotModel, s: &mut Scratch) {
    let mut theta = state.base_pitch;
    let mut omega = state.base_ang_vel;
    for i in 0..model.n_joints {
        theta += state.q[i];
        omega += state.qd[i];
        s.theta[i] = theta;
        s.omega[i] = omega;
        s.tang[i] = chain_dir_tangent(theta);
        s.dir[i] = chain_dir(theta);
    }
}

/// Angle-derivative columns for the centre of mass of link `i`:
/// `acols[0]` is the pitch column, `acols[k+1]` the column of joint `k`.
fn com_angle_columns(i: usize, model: &RobotModel, s: &mut Scratch) {
    let n = model.n_joints;
    let half = 0.5 * model.link_length[i];
    let mut acc = [half * s.tang[i][0], half * s.tang[i][1]];
    for c in (i + 2)..=n {
        s.acols[c] = [0.0, 0.0];
    }
    s.acols[i + 1] = acc;
    for k in (0..i).rev() {
        let l = model.link_length[k];
        acc = [acc[0] + l * s.tang[k][0], acc[1] + l * s.tang[k][1]];
        s.acols[k + 1] = acc;
    }
    s.acols[0] = acc;
}

/// Angle-derivative columns for the distal end of link `i` (contact point).
fn point_angle_columns(i: usize, model: &RobotModel, s: &mut Scratch) {
    let n = model.n_joints;
    let l_i = model.link_length[i];
    let mut acc = [l_i * s.tang[i][0], l_i * s.tang[i][1]];
    for c in (i + 2)..=n {
        s.acols[c] = [0.0, 0.0];
    }
    s.acols[i + 1] = acc;
    for k in (0..i).rev() {
        let l = model.link_length[k];
        acc = [acc[0] + l * s.tang[k][0], acc[1] + l * s.tang[k][1]];
        s.acols[k + 1] = acc;
    }
    s.acols[0] = acc;
}

fn base_com_column(state: &SimState, model: &RobotModel) -> [f64; 2] {
    let (sp, cp) = state.base_pitch.sin_cos();
    let c0 = model.base_com;
    // d/dpitch of R(pitch) * c0
    [-sp * c0[0] - cp * c0[1], cp * c0[0] - sp * c0[1]]
}

fn assemble_mass(state: &SimState, model: &RobotModel, s: &mut Scratch, m: &mut [f64]) {
    let n = model.n_joints;
    let dim = model.dof();
    m.fill(0.0);

    // Base body.
    let ab = base_com_column(state, model);
    let mb = model.base_mass;
    m[0] += mb;
    m[dim + 1] += mb;
    m[2] += mb * ab[0];
    m[dim + 2] += mb * ab[1];
    m[2 * dim + 2] += mb * (ab[0] * ab[0] + ab[1] * ab[1]) + model.base_inertia;

    for i in 0..n {
        com_angle_columns(i, model, s);
        let mi = model.link_mass[i];
        let ii = model.link_inertia(i);
        m[0] += mi;
        m[dim + 1] += mi;
        for c in 0..=n {
            let a = s.acols[c];
            m[2 + c] += mi * a[0];
            m[dim + 2 + c] += mi * a[1];
        }
        // Angle-angle inertia: COM translation plus rotational inertia over
        // the active angle set {pitch, q_0..q_i}.
        for c in 0..=(i + 1) {
            let ac = s.acols[c];
            for cc in c..=n {
                let acc2 = s.acols[cc];
                let mut v = mi * (ac[0] * acc2[0] + ac[1] * acc2[1]);
                if cc <= i + 1 {
                    v += ii;
                }
                m[(2 + c) * dim + 2 + cc] += v;
            }
        }
    }
    for k in 0..n {
        m[(3 + k) * dim + 3 + k] += model.armature[k];
    }
    // Mirror the upper triangle.
    for r in 0..dim {
        for c in (r + 1)..dim {
            m[c * dim + r] = m[r * dim + c];
        }
    }
}

fn assemble_forces(state: &SimState, model: &RobotModel, tau: &[f64], s: &mut Scratch, contact_out: &mut [f64]) {
    let n = model.n_joints;
    s.rhs.fill(0.0);

    // Base gravity and centripetal term (only when the COM is offset).
    let mb = model.base_mass;
    s.rhs[1] -= mb * GRAVITY;
    let ab = base_com_column(state, model);
    s.rhs[2] -= mb * GRAVITY * ab[1];
    if model.base_com != [0.0, 0.0] {
        let (sp, cp) = state.base_pitch.sin_cos();
        let w0 = state.base_ang_vel;
        let rc = [
            cp * model.base_com[0] - sp * model.base_com[1],
            sp * model.base_com[0] + cp * model.base_com[1],
        ];
        let a0 = [-rc[0] * w0 * w0, -rc[1] * w0 * w0];
        s.rhs[0] -= mb * a0[0];
        s.rhs[1] -= mb * a0[1];
        s.rhs[2] -= mb * (ab[0] * a0[0] + ab[1] * a0[1]);
    }

    // Links: gravity plus velocity-product acceleration through each COM
    // Jacobian. `prefix` accumulates sum_{j<i} L_j * (-dir_j) * w_j^2.
    let mut prefix = [0.0, 0.0];
    for i in 0..n {
        com_angle_columns(i, model, s);
        let mi = model.link_mass[i];
        let w = s.omega[i];
        let half = 0.5 * model.link_length[i];
        let a0 = [
            prefix[0] - half * s.dir[i][0] * w * w,
            prefix[1] - half * s.dir[i][1] * w * w,
        ];
        s.rhs[1] -= mi * GRAVITY;
        s.rhs[0] -= mi * a0[0];
        s.rhs[1] -= mi * a0[1];
        for c in 0..=n {
            let a = s.acols[c];
            s.rhs[2 + c] -= mi * (GRAVITY * a[1] + a0[0] * a[0] + a0[1] * a[1]);
        }
        let l = model.link_length[i];
        prefix = [prefix[0] - l * s.dir[i][0] * w * w, prefix[1] - l * s.dir[i][1] * w * w];
    }

    // Actuation and viscous joint friction.
    for k in 0..n {
        s.rhs[3 + k] += tau[k] - model.joint_friction[k] * state.qd[k];
    }

    // Penalty ground contact at each foot link's distal end.
    for (fi, &f) in model.foot_link_indices.iter().enumerate() {
        contact_out[fi] = 0.0;
        // Contact point position and velocity.
        let mut p = state.base_pos;
        let mut v = state.base_lin_vel;
        for j in 0..=f {
            let l = model.link_length[j];
            p = [p[0] + l * s.dir[j][0], p[1] + l * s.dir[j][1]];
            v = [v[0] + l * s.tang[j][0] * s.omega[j], v[1] + l * s.tang[j][1] * s.omega[j]];
        }
        if p[1] >= 0.0 {
            continue;
        }
        let pen = -p[1];
        let fn_ = (model.contact.stiffness * pen - model.contact.damping * v[1]).max(0.0);
        if fn_ == 0.0 {
            continue;
        }
        let cap = model.nominal_friction * fn_;
        let ft = (-model.contact.tangential_damping * v[0]).clamp(-cap, cap);
        contact_out[fi] = fn_;

        point_angle_columns(f, model, s);
        s.rhs[0] += ft;
        s.rhs[1] += fn_;
        for c in 0..=n {
            let a = s.acols[c];
            s.rhs[2 + c] += a[0] * ft + a[1] * fn_;
        }
    }
}

fn substep(state: &mut SimState, q_target: &[f64], model: &RobotModel, s: &mut Scratch) -> bool {
    let n = model.n_joints;
    let dim = model.dof();

    chain_geometry(state, model, s);
    pd_torque(q_target, &state.q, &state.qd, model, &mut s.tau);
    let mut contact = vec![0.0; model.n_feet()];
    // Split tau out to satisfy the borrow checker.
    let tau = std::mem::take(&mut s.tau);
    assemble_forces(state, model, &tau, s, &mut contact);
    s.tau = tau;
    assemble_mass(state, model, s, &mut s.mass.clone());
    // assemble_mass writes into a buffer; redo into s.mass without clone.
    let mut mass = std::mem::take(&mut s.mass);
    assemble_mass(state, model, s, &mut mass);

    let ok = if model.base_fixed {
        state.base_lin_vel = [0.0, 0.0];
        state.base_ang_vel = 0.0;
        // Reduced joint-block solve.
        let mut mj = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                mj[r * n + c] = mass[(3 + r) * dim + 3 + c];
            }
        }
        let mut rj: Vec<f64> = s.rhs[3..].to_vec();
        let ok = solve_spd(&mut mj, &mut rj, n);
        if ok {
            for k in 0..n {
                state.qd[k] += SUBSTEP_DT * rj[k];
                state.q[k] += SUBSTEP_DT * state.qd[k];
            }
        }
        ok
    } else {
        let mut rhs = s.rhs.clone();
        let ok = solve_spd(&mut mass, &mut rhs, dim);
        if ok {
            state.base_lin_vel[0] += SUBSTEP_DT * rhs[0];
            state.base_lin_vel[1] += SUBSTEP_DT * rhs[1];
            state.base_ang_vel += SUBSTEP_DT * rhs[2];
            for k in 0..n {
                state.qd[k] += SUBSTEP_DT * rhs[3 + k];
            }
            state.base_pos[0] += SUBSTEP_DT * state.base_lin_vel[0];
            state.base_pos[1] += SUBSTEP_DT * state.base_lin_vel[1];
            state.base_pitch += SUBSTEP_DT * state.base_ang_vel;
            for k in 0..n {
                state.q[k] += SUBSTEP_DT * state.qd[k];
            }
        }
        ok
    };
    s.mass = mass;
    state.contact_force.copy_from_slice(&contact);
    ok && state.is_finite()
}

fn check_target(q_target: &[f64], model: &RobotModel) -> Result<(), SimError> {
    if q_target.len() != model.n_joints {
        return Err(SimError::TargetLength { got: q_target.len(), want: model.n_joints });
    }
    if q_target.iter().any(|v| !v.is_finite()) {
        return Err(SimError::NonFiniteTarget);
    }
    Ok(())
}

/// Advance one 20 ms control step: ten 500 Hz PD substeps under a held joint
/// target, then record the target as `prev_q_target`.
pub fn step(state: &mut SimState, q_target: &[f64], model: &RobotModel) -> Result<(), SimError> {
    check_target(q_target, model)?;
    let mut scratch = Scratch::new(model);
    for sub in 0..SUBSTEPS {
        if !substep(state, q_target, model, &mut scratch) {
            return Err(SimError::Divergence { substep: sub });
        }
    }
    state.prev_q_target.copy_from_slice(q_target);
    state.sim_time += CONTROL_DT;
    Ok(())
}

/// Variant with the action low-pass running at the 500 Hz PD rate on the
/// held command. `prev_q_target` still records the raw command.
pub fn step_pd_filtered(
    state: &mut SimState,
    q_target: &[f64],
    model: &RobotModel,
    filter: &mut LowPass,
) -> Result<(), SimError> {
    check_target(q_target, model)?;
    let mut scratch = Scratch::new(model);
    for sub in 0..SUBSTEPS {
        let filtered = filter.apply(q_target);
        if !substep(state, &filtered, model, &mut scratch) {
            return Err(SimError::Divergence { substep: sub });
        }
    }
    state.prev_q_target.copy_from_slice(q_target);
    state.sim_time += CONTROL_DT;
    Ok(())
}

/// Advance one control step under direct joint torques (no PD law). Used by
/// the physics conservation checks.
pub fn step_with_torque(state: &mut SimState, tau: &[f64], model: &RobotModel) -> Result<(), SimError> {
    assert_eq!(tau.len(), model.n_joints);
    let mut scratch = Scratch::new(model);
    let n = model.n_joints;
    let dim = model.dof();
    for sub in 0..SUBSTEPS {
        chain_geometry(state, model, &mut scratch);
        let mut contact = vec![0.0; model.n_feet()];
        assemble_forces(state, model, tau, &mut scratch, &mut contact);
        let mut mass = vec![0.0; dim * dim];
        assemble_mass(state, model, &mut scratch, &mut mass);
        let ok = if model.base_fixed {
            state.base_lin_vel = [0.0, 0.0];
            state.base_ang_vel = 0.0;
            let mut mj = vec![0.0; n * n];
            for r in 0..n {
                for c in 0..n {
                    mj[r * n + c] = mass[(3 + r) * dim + 3 + c];
                }
            }
            let mut rj: Vec<f64> = scratch.rhs[3..].to_vec();
            let ok = solve_spd(&mut mj, &mut rj, n);
            if ok {
                for k in 0..n {
                    state.qd[k] += SUBSTEP_DT * rj[k];
                    state.q[k] += SUBSTEP_DT * state.qd[k];
                }
            }
            ok
        } else {
            let mut rhs = scratch.rhs.clone();
            let ok = solve_spd(&mut mass, &mut rhs, dim);
            if ok {
                state.base_lin_vel[0] += SUBSTEP_DT * rhs[0];
                state.base_lin_vel[1] += SUBSTEP_DT * rhs[1];
                state.base_ang_vel += SUBSTEP_DT * rhs[2];
                for k in 0..n {
                    state.qd[k] += SUBSTEP_DT * rhs[3 + k];
                }
                state.base_pos[0] += SUBSTEP_DT * state.base_lin_vel[0];
                state.base_pos[1] += SUBSTEP_DT * state.base_lin_vel[1];
                state.base_pitch += SUBSTEP_DT * state.base_ang_vel;
                for k in 0..n {
                    state.q[k] += SUBSTEP_DT * state.qd[k];
                }
            }
            ok
        };
        state.contact_force.copy_from_slice(&contact);
        if !ok || !state.is_finite() {
            return Err(SimError::Divergence { substep: sub });
        }
    }
    state.sim_time += CONTROL_DT;
    Ok(())
}
