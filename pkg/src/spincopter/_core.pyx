# cython: boundscheck=False, wraparound=False, cdivision=False
"""Compiled physics kernel. Same operations, in the same order, as
spincopter._core_py, so the two backends produce bit-identical trajectories.
See _core_py for the state layout and model description.
"""

from libc.math cimport exp, isfinite, sqrt

BACKEND = "compiled"


cdef void _deriv(double* s, double* thr, double* pos, double* dlt, int n,
                 double m, double g, double i_xx, double i_yy, double i_zz,
                 double c, double d_h, double d_v, double* out) noexcept nogil:
    cdef double vx = s[3]
    cdef double vy = s[4]
    cdef double vz = s[5]
    cdef double qw = s[6]
    cdef double qx = s[7]
    cdef double qy = s[8]
    cdef double qz = s[9]
    cdef double wx = s[10]
    cdef double wy = s[11]
    cdef double wz = s[12]

    cdef double r00 = 1.0 - 2.0 * (qy * qy + qz * qz)
    cdef double r01 = 2.0 * (qx * qy - qw * qz)
    cdef double r02 = 2.0 * (qx * qz + qw * qy)
    cdef double r10 = 2.0 * (qx * qy + qw * qz)
    cdef double r11 = 1.0 - 2.0 * (qx * qx + qz * qz)
    cdef double r12 = 2.0 * (qy * qz - qw * qx)
    cdef double r20 = 2.0 * (qx * qz - qw * qy)
    cdef double r21 = 2.0 * (qy * qz + qw * qx)
    cdef double r22 = 1.0 - 2.0 * (qx * qx + qy * qy)

    cdef double ux = r00 * vx + r10 * vy + r20 * vz
    cdef double uy = r01 * vx + r11 * vy + r21 * vz
    cdef double uz = r02 * vx + r12 * vy + r22 * vz

    cdef double fbx = 0.0
    cdef double fby = 0.0
    cdef double fbz = 0.0
    cdef double tx = 0.0
    cdef double ty = 0.0
    cdef double tz = 0.0
    cdef int i
    cdef double lx, ly, lz, f, ax, ay, az, gx, gy, gz
    for i in range(n):
        lx = pos[3 * i]
        ly = pos[3 * i + 1]
        lz = pos[3 * i + 2]
        f = thr[i]
        ax = ux + (wy * lz - wz * ly)
        ay = uy + (wz * lx - wx * lz)
        az = uz + (wx * ly - wy * lx)
        gx = -0.5 * d_h * ax
        gy = -0.5 * d_h * ay
        gz = -0.5 * d_v * az
        fbx += gx
        fby += gy
        fbz += f + gz
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


def derivative(double[::1] state, double[::1] thrusts, double[::1] prop_pos,
               double[::1] prop_delta, double m, double g, double i_xx,
               double i_yy, double i_zz, double c, double d_h, double d_v, double[::1] out):
    """Time derivative of the 13-state under fixed propeller thrusts."""
    _deriv(&state[0], &thrusts[0], &prop_pos[0], &prop_delta[0],
           prop_delta.shape[0], m, g, i_xx, i_yy, i_zz, c, d_h, d_v, &out[0])
    return 0


def advance(double[::1] state, double[::1] thrust_cmd, double[::1] thrust_act,
            double[::1] prop_pos, double[::1] prop_delta,
            double m, double g, double i_xx, double i_yy, double i_zz,
            double c, double d_h, double d_v,
            double motor_tc, double dt, int n_steps, bint ground):
    """Advance the plant n_steps of RK4 at fixed commanded thrusts.

    In-place update of state and thrust_act; see _core_py.advance.
    """
    cdef double s[13]
    cdef double k1[13]
    cdef double k2[13]
    cdef double k3[13]
    cdef double k4[13]
    cdef double tmp[13]
    cdef double thr[8]
    cdef double fa[8]
    cdef double pos[24]
    cdef double dlt[8]
    cdef int n = thrust_cmd.shape[0]
    cdef int i, step
    cdef double alpha = 0.0
    cdef double qn
    cdef bint ok = True

    if n > 8:
        raise ValueError("kernel supports at most 8 propellers")

    for i in range(13):
        s[i] = state[i]
    for i in range(n):
        thr[i] = thrust_cmd[i]
        fa[i] = thrust_act[i]
        dlt[i] = prop_delta[i]
    for i in range(3 * n):
        pos[i] = prop_pos[i]

    if motor_tc > 0.0:
        alpha = 1.0 - exp(-dt / motor_tc)

    with nogil:
        for step in range(n_steps):
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

            qn = sqrt(s[6] * s[6] + s[7] * s[7] + s[8] * s[8] + s[9] * s[9])
            s[6] = s[6] / qn
            s[7] = s[7] / qn
            s[8] = s[8] / qn
            s[9] = s[9] / qn

            if ground and s[2] < 0.0:
                s[2] = 0.0
                if s[5] < 0.0:
                    s[5] = 0.0

    for i in range(13):
        if not isfinite(s[i]):
            ok = False
        state[i] = s[i]
    for i in range(n):
        thrust_act[i] = fa[i]
    return 0 if ok else 1
