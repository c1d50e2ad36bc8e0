# cython: language_level=3
# cython: boundscheck=False
# cython: cdivision=True
"""Scalar quaternion kernel, compiled backend.

Mirror of _quatpy.py: same functions, same operation order, so results
match the pure backend bit for bit.
"""

from libc.math cimport sqrt, sin, cos, atan2

BACKEND = "compiled"

RENORM_EVERY = 16


def qmul(p, q):
    cdef double pw = p[0], px = p[1], py = p[2], pz = p[3]
    cdef double qw = q[0], qx = q[1], qy = q[2], qz = q[3]
    return (
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    )


def qconj(q):
    return (q[0], -q[1], -q[2], -q[3])


def qnormalize(q):
    cdef double w = q[0], x = q[1], y = q[2], z = q[3]
    cdef double n = sqrt(w * w + x * x + y * y + z * z)
    return (w / n, x / n, y / n, z / n)


def qexp(v):
    cdef double a = v[0], b = v[1], c = v[2]
    cdef double r = sqrt(a * a + b * b + c * c)
    cdef double s
    if r == 0.0:
        return (1.0, 0.0, 0.0, 0.0)
    s = sin(r) / r
    return (cos(r), a * s, b * s, c * s)


def qlog(q):
    cdef double w = q[0], x = q[1], y = q[2], z = q[3]
    cdef double s = sqrt(x * x + y * y + z * z)
    cdef double f
    if s == 0.0:
        return (0.0, 0.0, 0.0)
    f = atan2(s, w) / s
    return (x * f, y * f, z * f)


cdef inline void _mul4(double* o, double pw, double px, double py, double pz,
                       double qw, double qx, double qy, double qz):
    o[0] = pw * qw - px * qx - py * qy - pz * qz
    o[1] = pw * qx + px * qw + py * qz - pz * qy
    o[2] = pw * qy - px * qz + py * qw + pz * qx
    o[3] = pw * qz + px * qy - py * qx + pz * qw


def qrot(g, v):
    cdef double gw = g[0], gx = g[1], gy = g[2], gz = g[3]
    cdef double t[4]
    cdef double r[4]
    _mul4(t, gw, gx, gy, gz, 0.0, v[0], v[1], v[2])
    _mul4(r, t[0], t[1], t[2], t[3], gw, -gx, -gy, -gz)
    return (r[1], r[2], r[3])


def qcomm(p, q):
    cdef double pw = p[0], px = p[1], py = p[2], pz = p[3]
    cdef double qw = q[0], qx = q[1], qy = q[2], qz = q[3]
    cdef double a[4]
    cdef double b[4]
    cdef double o[4]
    _mul4(a, pw, px, py, pz, qw, qx, qy, qz)
    _mul4(b, pw, -px, -py, -pz, qw, -qx, -qy, -qz)
    _mul4(o, a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3])
    return (o[0], o[1], o[2], o[3])


def qprod(qs):
    cdef double aw = 1.0, ax = 0.0, ay = 0.0, az = 0.0
    cdef double o[4]
    cdef double n
    cdef int count = 0
    for q in qs:
        _mul4(o, aw, ax, ay, az, q[0], q[1], q[2], q[3])
        aw, ax, ay, az = o[0], o[1], o[2], o[3]
        count += 1
        if count % RENORM_EVERY == 0:
            n = sqrt(aw * aw + ax * ax + ay * ay + az * az)
            aw /= n
            ax /= n
            ay /= n
            az /= n
    return (aw, ax, ay, az)
