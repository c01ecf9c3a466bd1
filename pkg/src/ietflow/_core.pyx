# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the floating-point hot loops.

Contract mirrors ietflow._core_py: top-order interval tables (cumulative
right endpoints, translations, roof constants) plus bottom-order tables for
the inverse map.  The alphabet is tiny, so interval lookup is a linear scan.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log

cnp.import_array()

IMPLEMENTATION = "cython"

cdef double _TINY = 1e-300


cdef inline Py_ssize_t _find(const double* rights, Py_ssize_t d, double x) nogil:
    cdef Py_ssize_t i
    for i in range(d - 1):
        if x < rights[i]:
            return i
    return d - 1


cdef inline double _roof(const double* rights, const double* lefts,
                         double c0, const double* cp, const double* cm,
                         Py_ssize_t d, double x) nogil:
    cdef Py_ssize_t i = _find(rights, d, x)
    cdef double dl = x - lefts[i]
    cdef double dr = rights[i] - x
    cdef double out = c0
    if dl < _TINY:
        dl = _TINY
    if dr < _TINY:
        dr = _TINY
    if cp[i] != 0.0:
        out -= cp[i] * log(dl)
    if cm[i] != 0.0:
        out -= cm[i] * log(dr)
    return out


cdef inline double _roof_deriv(const double* rights, const double* lefts,
                               double c0, const double* cp, const double* cm,
                               Py_ssize_t d, double x) nogil:
    cdef Py_ssize_t i = _find(rights, d, x)
    cdef double dl = x - lefts[i]
    cdef double dr = rights[i] - x
    cdef double out = 0.0
    if dl < _TINY:
        dl = _TINY
    if dr < _TINY:
        dr = _TINY
    if cp[i] != 0.0:
        out -= cp[i] / dl
    if cm[i] != 0.0:
        out += cm[i] / dr
    return out


def iet_apply(cnp.ndarray[double, ndim=1] rights,
              cnp.ndarray[double, ndim=1] trans,
              cnp.ndarray[double, ndim=1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = rights.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t k
    cdef const double* r = &rights[0]
    cdef const double* t = &trans[0]
    for k in range(n):
        out[k] = x[k] + t[_find(r, d, x[k])]
    return out


def iet_apply_inverse(cnp.ndarray[double, ndim=1] rights_b,
                      cnp.ndarray[double, ndim=1] trans_b,
                      cnp.ndarray[double, ndim=1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = rights_b.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t k
    cdef const double* r = &rights_b[0]
    cdef const double* t = &trans_b[0]
    for k in range(n):
        out[k] = x[k] - t[_find(r, d, x[k])]
    return out


def iet_iterate(cnp.ndarray[double, ndim=1] rights,
                cnp.ndarray[double, ndim=1] trans,
                cnp.ndarray[double, ndim=1] rights_b,
                cnp.ndarray[double, ndim=1] trans_b,
                x, long n):
    cdef cnp.ndarray[double, ndim=1] cur = np.array(x, dtype=np.float64)
    cdef Py_ssize_t m = cur.shape[0]
    cdef Py_ssize_t d = rights.shape[0]
    cdef const double* rt = &rights[0]
    cdef const double* tt = &trans[0]
    cdef const double* rb = &rights_b[0]
    cdef const double* tb = &trans_b[0]
    cdef Py_ssize_t k
    cdef long i
    cdef double v
    with nogil:
        for k in range(m):
            v = cur[k]
            if n >= 0:
                for i in range(n):
                    v = v + tt[_find(rt, d, v)]
            else:
                for i in range(-n):
                    v = v - tb[_find(rb, d, v)]
            cur[k] = v
    return cur


def roof_values(cnp.ndarray[double, ndim=1] rights,
                cnp.ndarray[double, ndim=1] lefts,
                double c0,
                cnp.ndarray[double, ndim=1] cp,
                cnp.ndarray[double, ndim=1] cm,
                cnp.ndarray[double, ndim=1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = rights.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t k
    for k in range(n):
        out[k] = _roof(&rights[0], &lefts[0], c0, &cp[0], &cm[0], d, x[k])
    return out


def roof_derivatives(cnp.ndarray[double, ndim=1] rights,
                     cnp.ndarray[double, ndim=1] lefts,
                     double c0,
                     cnp.ndarray[double, ndim=1] cp,
                     cnp.ndarray[double, ndim=1] cm,
                     cnp.ndarray[double, ndim=1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = rights.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t k
    for k in range(n):
        out[k] = _roof_deriv(&rights[0], &lefts[0], c0, &cp[0], &cm[0], d, x[k])
    return out


def birkhoff_sums(cnp.ndarray[double, ndim=1] rights,
                  cnp.ndarray[double, ndim=1] trans,
                  cnp.ndarray[double, ndim=1] rights_b,
                  cnp.ndarray[double, ndim=1] trans_b,
                  cnp.ndarray[double, ndim=1] lefts,
                  double c0,
                  cnp.ndarray[double, ndim=1] cp,
                  cnp.ndarray[double, ndim=1] cm,
                  x0, long r, bint derivative=False):
    cdef cnp.ndarray[double, ndim=1] x = np.array(x0, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = rights.shape[0]
    cdef cnp.ndarray[double, ndim=1] acc = np.zeros(n, dtype=np.float64)
    cdef const double* rt = &rights[0]
    cdef const double* tt = &trans[0]
    cdef const double* rb = &rights_b[0]
    cdef const double* tb = &trans_b[0]
    cdef const double* lf = &lefts[0]
    cdef const double* cpp = &cp[0]
    cdef const double* cmp_ = &cm[0]
    cdef Py_ssize_t k
    cdef long i
    cdef double v, s
    with nogil:
        for k in range(n):
            v = x[k]
            s = 0.0
            if r >= 0:
                for i in range(r):
                    if derivative:
                        s += _roof_deriv(rt, lf, c0, cpp, cmp_, d, v)
                    else:
                        s += _roof(rt, lf, c0, cpp, cmp_, d, v)
                    v = v + tt[_find(rt, d, v)]
                acc[k] = s
            else:
                for i in range(-r):
                    v = v - tb[_find(rb, d, v)]
                    if derivative:
                        s += _roof_deriv(rt, lf, c0, cpp, cmp_, d, v)
                    else:
                        s += _roof(rt, lf, c0, cpp, cmp_, d, v)
                acc[k] = -s
    return acc


def flow_points(cnp.ndarray[double, ndim=1] rights,
                cnp.ndarray[double, ndim=1] trans,
                cnp.ndarray[double, ndim=1] rights_b,
                cnp.ndarray[double, ndim=1] trans_b,
                cnp.ndarray[double, ndim=1] lefts,
                double c0,
                cnp.ndarray[double, ndim=1] cp,
                cnp.ndarray[double, ndim=1] cm,
                x, y, double t, long max_steps=1000000):
    cdef cnp.ndarray[double, ndim=1] xv = np.array(x, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] sv = np.array(y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t d = rights.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] steps = np.zeros(n, dtype=np.int64)
    cdef const double* rt = &rights[0]
    cdef const double* tt = &trans[0]
    cdef const double* rb = &rights_b[0]
    cdef const double* tb = &trans_b[0]
    cdef const double* lf = &lefts[0]
    cdef const double* cpp = &cp[0]
    cdef const double* cmp_ = &cm[0]
    cdef Py_ssize_t k
    cdef long cnt
    cdef double v, s, f
    cdef bint overflow = False
    with nogil:
        for k in range(n):
            v = xv[k]
            s = sv[k] + t
            cnt = 0
            if s >= 0:
                while True:
                    f = _roof(rt, lf, c0, cpp, cmp_, d, v)
                    if s < f:
                        break
                    s -= f
                    v = v + tt[_find(rt, d, v)]
                    cnt += 1
                    if cnt > max_steps:
                        overflow = True
                        break
            else:
                while s < 0:
                    v = v - tb[_find(rb, d, v)]
                    s += _roof(rt, lf, c0, cpp, cmp_, d, v)
                    cnt -= 1
                    if -cnt > max_steps:
                        overflow = True
                        break
            xv[k] = v
            sv[k] = s
            steps[k] = cnt
            if overflow:
                break
    if overflow:
        raise RuntimeError("flow advance exceeded %d steps" % max_steps)
    return xv, sv, steps


def min_orbit_distance(cnp.ndarray[double, ndim=1] rights,
                       cnp.ndarray[double, ndim=1] trans,
                       cnp.ndarray[double, ndim=1] rights_b,
                       cnp.ndarray[double, ndim=1] trans_b,
                       double x, long n,
                       cnp.ndarray[double, ndim=1] points):
    cdef Py_ssize_t d = rights.shape[0]
    cdef Py_ssize_t m = points.shape[0]
    cdef const double* rt = &rights[0]
    cdef const double* tt = &trans[0]
    cdef const double* rb = &rights_b[0]
    cdef const double* tb = &trans_b[0]
    cdef const double* pts = &points[0]
    cdef double best = 1e308
    cdef double cur = x
    cdef double dist
    cdef long i
    cdef Py_ssize_t j
    with nogil:
        if n >= 0:
            for i in range(n):
                for j in range(m):
                    dist = cur - pts[j]
                    if dist < 0:
                        dist = -dist
                    if dist < best:
                        best = dist
                cur = cur + tt[_find(rt, d, cur)]
        else:
            for i in range(-n):
                cur = cur - tb[_find(rb, d, cur)]
                for j in range(m):
                    dist = cur - pts[j]
                    if dist < 0:
                        dist = -dist
                    if dist < best:
                        best = dist
    return best
