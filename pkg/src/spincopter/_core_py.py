"""Pure-Python physics kernel: reference implementation and import fallback.

Mirrors spincopter._core (Cython) operation for operation so both backends
produce bit-identical trajectories (the extension is compiled with FP
contraction off for the same reason).

State vector layout (13 floats, fixed so logs are reproducible):

    [0:3]   position, world frame (m)
    [3:6]   velocity, world frame (m/s)
    [6:10]  orientation quaternion body->world (w, x, y, z), unit norm
    [10:13] angular velocity, body frame (rad/s)

Each propeller thrusts along body +z and carries half of its unit's lumped
rotor-drag matrix diag(D_h, D_h, D_v) acting on the local air velocity
v_i = R^T v + omega x l_i (a bicopter unit is a pair of propellers).
"""

import math

BACKEND = "python"


def _deriv(s, thr, pos, dlt, n, m, g, i_xx, i_yy, i_zz, c, d_h, d_v, out):
    vx = s[3]
    vy = s[4]
    vz = s[5]
    qw = s[6]
    qx = s[7]
    qy = s[8]
    qz = s[9]
    wx = s[10]
    wy = s[11]
    wz = s[12]

    # rotation matrix body->world from the (unit) quaternion
    r00 = 1.0 - 2.0 * (qy * qy + qz * qz)
    r01 = 2.0 * (qx * qy - qw * qz)
    r02 = 2.0 * (qx * qz + qw * qy)
    r10 = 2.0 * (qx * qy + qw * qz)
    r11 = 1.0 - 2.0 * (qx * qx + qz * qz)
    r12 = 2.0 * (qy * qz - qw * qx)
    r20 = 2.0 * (qx * qz - qw * qy)
    r21 = 2.0 * (qy * qz + qw * qx)
    r22 = 1.0 - 2.0 * (qx * qx + qy * qy)

    # world velocity seen in the body frame
    ux = r00 * vx + r10 * vy + r20 * vz
    uy = r01 * vx + r11 * vy + r21 * vz
    uz = r02 * vx + r12 * vy + r22 * vz

    fbx = 0.0
    fby = 0.0
    fbz = 0.0
    tx = 0.0
    ty = 0.0
    tz = 0.0
    for i in range(n):
        lx = pos[3 * i]
        ly = pos[3 * i + 1]
        lz = pos[3 * i + 2]
        f = thr[i]
        # local air velocity at the propeller
        ax = ux + (wy * lz - wz * ly)
        ay = uy + (wz * lx - wx * lz)
        az = uz + (wx * ly - wy * lx)
        # half of the unit's lumped drag per propeller
        gx = -0.5 * d_h * ax
        gy = -0.5 * d_h * ay
        gz = -0.5 * d_v * az
        fbx += gx
        fby += gy
        fbz += f + gz
        # thrust moment + shaft yaw torque + drag moment
        tx += ly * f + (ly * gz - lz * gy)
        ty += -lx * f + (lz * gx - lx * gz)
        tz += dlt[i] * c * f + (lx * gy - ly * gx)

    out[0] = vx
    out[1] = vy
    out[2] = vz
    out[3] = (r00 * fbx + r01 * fby + r02 * fbz) / m
    out[4] = (r10 * fbx + r11 * fby + r12 * fbz) / m
    out[5] = (r20 * fbx + r21 * fby + r22 * fbz) / m - g
    out[6] = 0.5 * (-qx * wx - qy * wy - qz * wz)
    out[7] = 0.5 * (qw * wx + qy * wz - qz * wy)
    out[8] = 0.5 * (qw * wy - qx * wz + qz * wx)
    out[9] = 0.5 * (qw * wz + qx * wy - qy * wx)
    out[10] = (tx - (i_zz - i_yy) * wy * wz) / i_xx
    out[11] = (ty - (i_xx - i_zz) * wx * wz) / i_yy
    out[12] = (tz - (i_yy - i_xx) * wx * wy) / i_zz


def derivative(state, thrusts, prop_pos, prop_delta, m, g, i_xx, i_yy, i_zz, c, d_h, d_v, out):
    """Time derivative of the 13-state under fixed propeller thrusts."""
    s = [float(x) for x in state]
    thr = [float(x) for x in thrusts]
    pos = [float(x) for x in prop_pos]
    dlt = [float(x) for x in prop_delta]
    res = [0.0] * 13
    _deriv(s, thr, pos, dlt, len(thr), m, g, i_xx, i_yy, i_zz, c, d_h, d_v, res)
    for i in range(13):
        out[i] = res[i]
    return 0


def advance(
    state,
    thrust_cmd,
    thrust_act,
    prop_pos,
    prop_delta,
    m,
    g,
    i_xx,
    i_yy,
    i_zz,
    c,
    d_h,
    d_v,
    motor_tc,
    dt,
    n_steps,
    ground,
):
    """Advance the plant n_steps of RK4 at fixed commanded thrusts.

    state and thrust_act are updated in place. Commanded thrusts pass through
    a first-order motor lag when motor_tc > 0 (exact discretization, thrust
    held constant within each step). When ground is true the z = 0 plane
    supports the vehicle. Returns 0, or 1 if the state went non-finite.
    """
    s = [float(x) for x in state]
    thr = [float(x) for x in thrust_cmd]
    pos = [float(x) for x in prop_pos]
    dlt = [float(x) for x in prop_delta]
    n = len(thr)
    fa = [float(x) for x in thrust_act]
    k1 = [0.0] * 13
    k2 = [0.0] * 13
    k3 = [0.0] * 13
    k4 = [0.0] * 13
    tmp = [0.0] * 13

    alpha = 0.0
    if motor_tc > 0.0:
        alpha = 1.0 - math.exp(-dt / motor_tc)

    for _ in range(n_steps):
        if motor_tc > 0.0:
            for i in range(n):
                fa[i] += alpha * (thr[i] - fa[i])
        else:
            for i in range(n):
                fa[i] = thr[i]

        _deriv(s, fa, pos, dlt, n, m, g, i_xx, i_yy, i_zz, c, d_h, d_v, k1)
        for i in range(13):
            tmp[i] = s[i] + 0.5 * dt * k1[i]
        _deriv(tmp, fa, pos, dlt, n, m, g, i_xx, i_yy, i_zz, c, d_h, d_v, k2)
        for i in range(13):
            tmp[i] = s[i] + 0.5 * dt * k2[i]
        _deriv(tmp, fa, pos, dlt, n, m, g, i_xx, i_yy, i_zz, c, d_h, d_v, k3)
        for i in range(13):
            tmp[i] = s[i] + dt * k3[i]
        _deriv(tmp, fa, pos, dlt, n, m, g, i_xx, i_yy, i_zz, c, d_h, d_v, k4)
        for i in range(13):
            s[i] = s[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])

        # renormalize so the orientation stays on SO(3) over long rollouts
        qn = math.sqrt(s[6] * s[6] + s[7] * s[7] + s[8] * s[8] + s[9] * s[9])
        s[6] = s[6] / qn
        s[7] = s[7] / qn
        s[8] = s[8] / qn
        s[9] = s[9] / qn

        if ground and s[2] < 0.0:
            s[2] = 0.0
            if s[5] < 0.0:
                s[5] = 0.0

    ok = True
    for i in range(13):
        if not math.isfinite(s[i]):
            ok = False
        state[i] = s[i]
    for i in range(n):
        thrust_act[i] = fa[i]
    return 0 if ok else 1
