"""Pure-Python slot loops.  Mirrors ``_kernel.pyx`` statement for statement.

Both kernels consume pre-drawn random arrays for one chunk of slots and
mutate the state/accumulator arrays in place, so a run is bit-identical
whichever backend executes it.
"""

# state slots
T, HEAD, SIZE, LASTDEP, NEXTID, MAXQ, TRACE_N = 0, 1, 2, 3, 4, 5, 6
PHASE = 7
LANE = (8, 12)            # occupied flag; +1 elig, +2 comm, +3 id
STASH = 16                # +1 elig, +2 cls, +3 comm, +4 id, +5 dep slot
REM = 23                  # slots left in the current phase
STATE_LEN = 24

# accumulator slots
A_WAIT, A_DEP, A_X, A_X2, A_QSUM, A_QSLOTS = 0, 1, 2, 3, 4, 5
A_EPOCHS, A_BLOCKED, A_IDLE, A_ARRIVALS = 6, 7, 8, 9  # A_IDLE counts idle slots
ACC_LEN = 12

TRACE_COLS = 7            # id, cls, comm, arrival, service_start, departure, x


def _record(acc, hist, cls_wait, cls_dep, batch_wait, batch_dep, trace, state,
            vid, cls, comm, elig, start, dep, warmup, horizon):
    x = dep - start + 1
    wait = start - elig
    k = state[TRACE_N]
    if k < trace.shape[0]:
        trace[k, 0] = vid
        trace[k, 1] = cls
        trace[k, 2] = comm
        trace[k, 3] = elig - 1
        trace[k, 4] = start
        trace[k, 5] = dep
        trace[k, 6] = x
        state[TRACE_N] = k + 1
    if dep < warmup:
        return
    acc[A_WAIT] += wait
    acc[A_DEP] += 1
    acc[A_X] += x
    acc[A_X2] += x * x
    nh = hist.shape[0]
    hist[x if x < nh else nh - 1] += 1
    cls_wait[cls] += wait
    cls_dep[cls] += 1
    nb = batch_wait.shape[0]
    b = (dep - warmup) * nb // (horizon - warmup)
    if b >= nb:
        b = nb - 1
    batch_wait[b] += wait
    batch_dep[b] += 1


def _enqueue(state, n, vi, v_cls, v_comm, ring_elig, ring_cls, ring_comm, ring_id, t):
    cap = ring_elig.shape[0]
    head = state[HEAD]
    size = state[SIZE]
    vid = state[NEXTID]
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


def run_model1(state, acc, hist, cls_wait, cls_dep, batch_wait, batch_dep, trace,
               n_arr, v_cls, v_comm, phase_idx,
               ring_elig, ring_cls, ring_comm, ring_id, warmup, horizon):
    cap = ring_elig.shape[0]
    vi = 0
    t = state[T]
    for s in range(n_arr.shape[0]):
        size = state[SIZE]
        if t >= warmup:
            acc[A_QSUM] += size
            acc[A_QSLOTS] += 1
        if size > 0:
            head = state[HEAD]
            c = ring_cls[head]
            # a silent HoL vehicle goes only when the random phase matches it
            if ring_comm[head] or phase_idx[s] == c:
                elig = ring_elig[head]
                start = state[LASTDEP] + 1
                if elig > start:
                    start = elig
                _record(acc, hist, cls_wait, cls_dep, batch_wait, batch_dep, trace, state,
                        ring_id[head], c, ring_comm[head], elig, start, t, warmup, horizon)
                state[LASTDEP] = t
                state[HEAD] = (head + 1) % cap
                state[SIZE] = size - 1
        n = n_arr[s]
        if n > 0:
            if t >= warmup:
                acc[A_ARRIVALS] += n
            _enqueue(state, n, vi, v_cls, v_comm, ring_elig, ring_cls, ring_comm, ring_id, t)
            vi += n
        t += 1
    state[T] = t


def _advance(state, ring_elig, ring_cls, ring_comm, ring_id):
    # FIFO head moves into its dedicated lane if empty; no overtaking
    cap = ring_elig.shape[0]
    while state[SIZE] > 0:
        head = state[HEAD]
        base = LANE[ring_cls[head]]
        if state[base]:
            return
        state[base] = 1
        state[base + 1] = ring_elig[head]
        state[base + 2] = ring_comm[head]
        state[base + 3] = ring_id[head]
        state[HEAD] = (head + 1) % cap
        state[SIZE] -= 1


def _flush_stash(acc, hist, cls_wait, cls_dep, batch_wait, batch_dep, trace, state,
                 x2, warmup, horizon):
    dep = state[STASH + 5]
    end = dep + 1 if x2 else dep
    _record(acc, hist, cls_wait, cls_dep, batch_wait, batch_dep, trace, state,
            state[STASH + 4], state[STASH + 2], state[STASH + 3], state[STASH + 1],
            dep, end, warmup, horizon)
    state[STASH] = 0


def run_model2(state, acc, hist, cls_wait, cls_dep, batch_wait, batch_dep, trace,
               n_arr, v_cls, v_comm, phase_idx,
               ring_elig, ring_cls, ring_comm, ring_id, warmup, horizon):
    vi = 0
    t = state[T]
    for s in range(n_arr.shape[0]):
        _advance(state, ring_elig, ring_cls, ring_comm, ring_id)
        occ0 = state[LANE[0]]
        occ1 = state[LANE[1]]
        if state[REM] == 0:
            # a two-slot phase starts as soon as the light is free and a HoL
            # lane is occupied; sensing settles the single-lane case
            if occ0 and occ1:
                if state[SIZE] > 0 and ring_comm[state[HEAD]]:
                    phase = ring_cls[state[HEAD]]
                else:
                    phase = phase_idx[s]
            elif occ0:
                phase = 0
            elif occ1:
                phase = 1
            else:
                phase = -1
            state[PHASE] = phase
            if phase >= 0:
                state[REM] = 2
                if t >= warmup:
                    acc[A_EPOCHS] += 1
            elif t >= warmup:
                acc[A_IDLE] += 1
        second = state[REM] == 1
        phase = state[PHASE]
        departs = phase >= 0 and state[LANE[phase]] != 0
        # HoL blocking: the served lane is empty while the queue head, bound
        # for the other lane, cannot advance
        blocked = second and phase >= 0 and not departs and state[SIZE] > 0
        if t >= warmup:
            acc[A_QSUM] += state[SIZE] + occ0 + occ1 + (1 if blocked else 0)
            acc[A_QSLOTS] += 1
            if blocked and t - 1 >= warmup:
                acc[A_BLOCKED] += 1
        if second and state[STASH]:
            _flush_stash(acc, hist, cls_wait, cls_dep, batch_wait, batch_dep, trace, state,
                         blocked, warmup, horizon)
        if departs:
            base = LANE[phase]
            elig = state[base + 1]
            if second:
                _record(acc, hist, cls_wait, cls_dep, batch_wait, batch_dep, trace, state,
                        state[base + 3], phase, state[base + 2], elig, t, t, warmup, horizon)
            else:
                # service time is settled only at the end of the two-slot phase
                state[STASH] = 1
                state[STASH + 1] = elig
                state[STASH + 2] = phase
                state[STASH + 3] = state[base + 2]
                state[STASH + 4] = state[base + 3]
                state[STASH + 5] = t
            state[base] = 0
            state[LASTDEP] = t
            _advance(state, ring_elig, ring_cls, ring_comm, ring_id)
        n = n_arr[s]
        if n > 0:
            if t >= warmup:
                acc[A_ARRIVALS] += n
            _enqueue(state, n, vi, v_cls, v_comm, ring_elig, ring_cls, ring_comm, ring_id, t)
            vi += n
        lanes = state[LANE[0]] + state[LANE[1]] + state[SIZE]
        if lanes > state[MAXQ]:
            state[MAXQ] = lanes
        if state[REM] > 0:
            state[REM] -= 1
        t += 1
    state[T] = t
