# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernels; operation order matches _score_py exactly."""

BACKEND = "cython"


cdef inline double _evidence_at(double[::1] values, double[::1] confs,
                                Py_ssize_t j, double eps, bint clamp) nogil:
    cdef Py_ssize_t p = values.shape[0]
    cdef double target = values[j]
    cdef double acc = 0.0
    cdef double diff
    cdef Py_ssize_t k
    for k in range(p):
        if k == j:
            continue
        diff = values[k] - target
        if diff < 0.0:
            diff = -diff
        if diff <= eps:
            acc += confs[k]
        else:
            acc -= confs[k]
    cdef double ev = acc / (p - 1)
    if clamp:
        if ev < 0.0:
            ev = 0.0
        elif ev > 1.0:
            ev = 1.0
    return ev


cdef inline double _row_contribution(double[::1] values, double[::1] confs,
                                     double t_min, double t_max,
                                     double d_max, double d_min,
                                     double eps, bint clamp) nogil:
    cdef Py_ssize_t p = values.shape[0]
    cdef double total = 0.0
    cdef double v, d
    cdef Py_ssize_t j
    for j in range(p):
        v = values[j]
        d = d_max if (t_min < v and v < t_max) else d_min
        total += d * confs[j] * _evidence_at(values, confs, j, eps, clamp)
    return total


def evidence_at(double[::1] values, double[::1] confs, Py_ssize_t j,
                double eps, bint clamp):
    return _evidence_at(values, confs, j, eps, clamp)


def row_contribution(double[::1] values, double[::1] confs,
                     double t_min, double t_max, double d_max, double d_min,
                     double eps, bint clamp):
    return _row_contribution(values, confs, t_min, t_max, d_max, d_min, eps, clamp)


def trust_step_raw(double prev, double[::1] values, double[::1] confs,
                   double gamma, double d_max, double d_min,
                   double t_min, double t_max, double eps, bint clamp):
    cdef Py_ssize_t p = values.shape[0]
    cdef double row = _row_contribution(values, confs, t_min, t_max,
                                        d_max, d_min, eps, clamp)
    return gamma * prev + ((1.0 - gamma) / p) * row


def trust_batch_raw(double[:, ::1] values2d, double[:, ::1] confs2d,
                    double gamma, double d_max, double d_min,
                    double t_min, double t_max, double eps, bint clamp):
    cdef Py_ssize_t o = values2d.shape[0]
    if o == 0:
        return 0.0
    cdef Py_ssize_t p = values2d.shape[1]
    cdef double acc = 0.0
    cdef double w = 1.0
    cdef Py_ssize_t i
    for i in range(o - 1, -1, -1):
        acc += w * _row_contribution(values2d[i], confs2d[i], t_min, t_max,
                                     d_max, d_min, eps, clamp)
        w *= gamma
    return ((1.0 - gamma) / p) * acc
