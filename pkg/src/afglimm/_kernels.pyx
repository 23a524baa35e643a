# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled closure kernels; see _kernels_py for the reference versions."""

from libc.stdlib cimport malloc, free


def reach(const long long[:] ptr, const long long[:] idx, seed):
    cdef bytearray out = bytearray(seed)
    cdef unsigned char[:] m = out
    cdef Py_ssize_t n = m.shape[0]
    cdef long long *stack = <long long *> malloc((n + 1) * sizeof(long long))
    cdef Py_ssize_t top = 0, v, w, e
    if stack == NULL:
        raise MemoryError()
    try:
        for v in range(n):
            if m[v]:
                stack[top] = v
                top += 1
        while top:
            top -= 1
            v = stack[top]
            for e in range(ptr[v], ptr[v + 1]):
                w = idx[e]
                if not m[w]:
                    m[w] = 1
                    stack[top] = w
                    top += 1
    finally:
        free(stack)
    return out


def greatest_fixpoint(const long long[:] child_ptr, const long long[:] child_idx,
                      const long long[:] parent_ptr, const long long[:] parent_idx,
                      excluded):
    cdef const unsigned char[:] ex = excluded
    cdef Py_ssize_t n = ex.shape[0]
    cdef bytearray out = bytearray(n)
    cdef unsigned char[:] m = out
    cdef long long *stack = <long long *> malloc((n + 1) * sizeof(long long))
    cdef Py_ssize_t top = 0, v, u, e
    if stack == NULL:
        raise MemoryError()
    try:
        for v in range(n):
            if ex[v]:
                stack[top] = v
                top += 1
            else:
                m[v] = 1
        while top:
            top -= 1
            v = stack[top]
            for e in range(parent_ptr[v], parent_ptr[v + 1]):
                u = parent_idx[e]
                if m[u]:
                    m[u] = 0
                    stack[top] = u
                    top += 1
    finally:
        free(stack)
    return out


def saturate(const long long[:] child_ptr, const long long[:] child_idx,
             members, Py_ssize_t final_start):
    cdef bytearray out = bytearray(members)
    cdef unsigned char[:] m = out
    cdef Py_ssize_t v, e, lo, hi
    cdef bint full
    for v in range(final_start - 1, -1, -1):
        if m[v]:
            continue
        lo = child_ptr[v]
        hi = child_ptr[v + 1]
        if lo == hi:
            continue
        full = True
        for e in range(lo, hi):
            if not m[child_idx[e]]:
                full = False
                break
        if full:
            m[v] = 1
    return out


def ideal_violation(const long long[:] child_ptr, const long long[:] child_idx,
                    members, Py_ssize_t final_start):
    cdef const unsigned char[:] m = members
    cdef Py_ssize_t v, e, lo, hi
    cdef bint full
    for v in range(final_start):
        lo = child_ptr[v]
        hi = child_ptr[v + 1]
        if m[v]:
            for e in range(lo, hi):
                if not m[child_idx[e]]:
                    return v, 1
        elif lo < hi:
            full = True
            for e in range(lo, hi):
                if not m[child_idx[e]]:
                    full = False
                    break
            if full:
                return v, 2
    return -1, 0
