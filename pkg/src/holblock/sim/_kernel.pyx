# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled slot loops.  Keep in lockstep with ``_kernel_py.py``."""

from libc.stdint cimport int64_t, int8_t

ctypedef int64_t i64

cdef enum:
    T = 0
    HEAD = 1
    SIZE = 2
    LASTDEP = 3
    NEXTID = 4
    MAXQ = 5
    TRACE_N = 6
    PHASE = 7
    LANE0 = 8
    LANE1 = 12
    STASH = 16
    REM = 23

cdef enum:
    A_WAIT = 0
    A_DEP = 1
    A_X = 2
    A_X2 = 3
    A_QSUM = 4
    A_QSLOTS = 5
    A_EPOCHS = 6
    A_BLOCKED = 7
    A_IDLE = 8
    A_ARRIVALS = 9


cdef struct Sinks:
    i64* acc
    i64* hist
    i64 nh
    i64* cls_wait
    i64* cls_dep
    i64* batch_wait
    i64* batch_dep
    i64 nb
    i64* trace
    i64 ntrace
    i64 warmup
    i64 horizon


cdef inline void _record(Sinks* k, i64* state, i64 vid, i64 cls, i64 comm,
                         i64 elig, i64 start, i64 dep) nogil:
    cdef i64 x = dep - start + 1
    cdef i64 wait = start - elig
    cdef i64 j = state[TRACE_N]
    cdef i64 b
    if j < k.ntrace:
        k.trace[j * 7 + 0] = vid
        k.trace[j * 7 + 1] = cls
        k.trace[j * 7 + 2] = comm
        k.trace[j * 7 + 3] = elig - 1
        k.trace[j * 7 + 4] = start
        k.trace[j * 7 + 5] = dep
        k.trace[j * 7 + 6] = x
        state[TRACE_N] = j + 1
    if dep < k.warmup:
        return
    k.acc[A_WAIT] += wait
    k.acc[A_DEP] += 1
    k.acc[A_X] += x
    k.acc[A_X2] += x * x
    if x < k.nh:
        k.hist[x] += 1
    else:
        k.hist[k.nh - 1] += 1
    k.cls_wait[cls] += wait
    k.cls_dep[cls] += 1
    b = (dep - k.warmup) * k.nb // (k.horizon - k.warmup)
    if b >= k.nb:
        b = k.nb - 1
    k.batch_wait[b] += wait
    k.batch_dep[b] += 1


cdef inline void _enqueue(i64* state, i64 n, i64 vi, const int8_t[:] v_cls, const int8_t[:] v_comm,
                          i64[:] ring_elig, int8_t[:] ring_cls, int8_t[:] ring_comm,
                          i64[:] ring_id, i64 t) nogil:
    cdef i64 cap = ring_elig.shape[0]
    cdef i64 head = state[HEAD]
    cdef i64 size = state[SIZE]
    cdef i64 vid = state[NEXTID]
    cdef i64 j, pos
    for j in range(n):
        pos = (head + size) % cap
        ring_elig[pos] = t + 1
        ring_cls[pos] = v_cls[vi + j]
        ring_comm[pos] = v_comm[vi + j]
        ring_id[pos] = vid
        vid += 1
        size += 1
    state[SIZE] = size
    state[NEXTID] = vid
    if size > state[MAXQ]:
        state[MAXQ] = size


cdef Sinks _sinks(i64[::1] acc, i64[::1] hist, i64[::1] cls_wait, i64[::1] cls_dep,
                  i64[::1] batch_wait, i64[::1] batch_dep, i64[:, ::1] trace,
                  i64 warmup, i64 horizon):
    cdef Sinks k
    k.acc = &acc[0]
    k.hist = &hist[0]
    k.nh = hist.shape[0]
    k.cls_wait = &cls_wait[0]
    k.cls_dep = &cls_dep[0]
    k.batch_wait = &batch_wait[0]
    k.batch_dep = &batch_dep[0]
    k.nb = batch_wait.shape[0]
    k.ntrace = trace.shape[0]
    k.trace = &trace[0, 0] if trace.shape[0] > 0 else NULL
    k.warmup = warmup
    k.horizon = horizon
    return k


def run_model1(i64[::1] state, i64[::1] acc, i64[::1] hist, i64[::1] cls_wait, i64[::1] cls_dep,
               i64[::1] batch_wait, i64[::1] batch_dep, i64[:, ::1] trace,
               const i64[:] n_arr, const int8_t[:] v_cls, const int8_t[:] v_comm,
               const int8_t[:] phase_idx,
               i64[:] ring_elig, int8_t[:] ring_cls, int8_t[:] ring_comm, i64[:] ring_id,
               i64 warmup, i64 horizon):
    cdef Sinks k = _sinks(acc, hist, cls_wait, cls_dep, batch_wait, batch_dep, trace, warmup, horizon)
    cdef i64* st = &state[0]
    cdef i64 cap = ring_elig.shape[0]
    cdef i64 vi = 0
    cdef i64 t = st[T]
    cdef i64 s, size, head, c, elig, start, n
    with nogil:
        for s in range(n_arr.shape[0]):
            size = st[SIZE]
            if t >= warmup:
                k.acc[A_QSUM] += size
                k.acc[A_QSLOTS] += 1
            if size > 0:
                head = st[HEAD]
                c = ring_cls[head]
                if ring_comm[head] or phase_idx[s] == c:
                    elig = ring_elig[head]
                    start = st[LASTDEP] + 1
                    if elig > start:
                        start = elig
                    _record(&k, st, ring_id[head], c, ring_comm[head], elig, start, t)
                    st[LASTDEP] = t
                    st[HEAD] = (head + 1) % cap
                    st[SIZE] = size - 1
            n = n_arr[s]
            if n > 0:
                if t >= warmup:
                    k.acc[A_ARRIVALS] += n
                _enqueue(st, n, vi, v_cls, v_comm, ring_elig, ring_cls, ring_comm, ring_id, t)
                vi += n
            t += 1
    st[T] = t


cdef inline void _advance(i64* st, i64[:] ring_elig, int8_t[:] ring_cls, int8_t[:] ring_comm,
                          i64[:] ring_id) nogil:
    cdef i64 cap = ring_elig.shape[0]
    cdef i64 head, base
    while st[SIZE] > 0:
        head = st[HEAD]
        base = LANE1 if ring_cls[head] else LANE0
        if st[base]:
            return
        st[base] = 1
        st[base + 1] = ring_elig[head]
        st[base + 2] = ring_comm[head]
        st[base + 3] = ring_id[head]
        st[HEAD] = (head + 1) % cap
        st[SIZE] -= 1


def run_model2(i64[::1] state, i64[::1] acc, i64[::1] hist, i64[::1] cls_wait, i64[::1] cls_dep,
               i64[::1] batch_wait, i64[::1] batch_dep, i64[:, ::1] trace,
               const i64[:] n_arr, const int8_t[:] v_cls, const int8_t[:] v_comm,
               const int8_t[:] phase_idx,
               i64[:] ring_elig, int8_t[:] ring_cls, int8_t[:] ring_comm, i64[:] ring_id,
               i64 warmup, i64 horizon):
    cdef Sinks k = _sinks(acc, hist, cls_wait, cls_dep, batch_wait, batch_dep, trace, warmup, horizon)
    cdef i64* st = &state[0]
    cdef i64 vi = 0
    cdef i64 t = st[T]
    cdef i64 s, occ0, occ1, second, phase, base, elig, dep, n, lanes
    cdef bint departs, blocked
    with nogil:
        for s in range(n_arr.shape[0]):
            _advance(st, ring_elig, ring_cls, ring_comm, ring_id)
            occ0 = st[LANE0]
            occ1 = st[LANE1]
            if st[REM] == 0:
                if occ0 and occ1:
                    if st[SIZE] > 0 and ring_comm[st[HEAD]]:
                        phase = ring_cls[st[HEAD]]
                    else:
                        phase = phase_idx[s]
                elif occ0:
                    phase = 0
                elif occ1:
                    phase = 1
                else:
                    phase = -1
                st[PHASE] = phase
                if phase >= 0:
                    st[REM] = 2
                    if t >= warmup:
                        k.acc[A_EPOCHS] += 1
                elif t >= warmup:
                    k.acc[A_IDLE] += 1
            second = st[REM] == 1
            phase = st[PHASE]
            base = LANE1 if phase == 1 else LANE0
            departs = phase >= 0 and st[base] != 0
            blocked = second and phase >= 0 and not departs and st[SIZE] > 0
            if t >= warmup:
                k.acc[A_QSUM] += st[SIZE] + occ0 + occ1 + (1 if blocked else 0)
                k.acc[A_QSLOTS] += 1
                if blocked and t - 1 >= warmup:
                    k.acc[A_BLOCKED] += 1
            if second and st[STASH]:
                dep = st[STASH + 5]
                _record(&k, st, st[STASH + 4], st[STASH + 2], st[STASH + 3], st[STASH + 1],
                        dep, dep + 1 if blocked else dep)
                st[STASH] = 0
            if departs:
                elig = st[base + 1]
                if second:
                    _record(&k, st, st[base + 3], phase, st[base + 2], elig, t, t)
                else:
                    st[STASH] = 1
                    st[STASH + 1] = elig
                    st[STASH + 2] = phase
                    st[STASH + 3] = st[base + 2]
                    st[STASH + 4] = st[base + 3]
                    st[STASH + 5] = t
                st[base] = 0
                st[LASTDEP] = t
                _advance(st, ring_elig, ring_cls, ring_comm, ring_id)
            n = n_arr[s]
            if n > 0:
                if t >= warmup:
                    k.acc[A_ARRIVALS] += n
                _enqueue(st, n, vi, v_cls, v_comm, ring_elig, ring_cls, ring_comm, ring_id, t)
                vi += n
            lanes = st[LANE0] + st[LANE1] + st[SIZE]
            if lanes > st[MAXQ]:
                st[MAXQ] = lanes
            if st[REM] > 0:
                st[REM] -= 1
            t += 1
    st[T] = t
