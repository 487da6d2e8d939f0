"""Array-based CDCL search loop.

Literal encoding: variable ``v`` (0-based) has positive literal ``2*v`` and
negative literal ``2*v + 1``. Each clause ``c`` occupies
``lits[start[c]:start[c] + length[c]]``; its first two positions are the
watched literals. Watchers form singly linked lists: node ``2*c + k``
watches position ``k`` of clause ``c``, ``w_head[lit]`` is the first node
watching ``lit`` and ``w_next[node]`` the following one.

All mutable state lives in the arrays and in ``ist``/``fst`` so a search can
be stopped at a safe point and resumed by calling ``search`` again.
"""

from __future__ import annotations

import numpy as np

from .._accel import kernel

# ist slots
N_CLAUSES = 0
LITS_USED = 1
TRAIL_LEN = 2
QHEAD = 3
DLEVEL = 4
HEAP_SIZE = 5
DECISIONS = 6
PROPAGATIONS = 7
CONFLICTS = 8
NEXT_RESTART = 9
RESTARTS = 10
LEARNED = 11
IST_SIZE = 12

# fst slots
VAR_INC = 0
RESTART_INTERVAL = 1
FST_SIZE = 2

# search() return codes
PAUSED = 0
SAT = 1
UNSAT = 2
NEED_SPACE = 3

VAR_DECAY = 0.95
RESTART_GROWTH = 1.5


@kernel
def _better(act, a, b):
    return act[a] > act[b] or (act[a] == act[b] and a < b)


@kernel
def _heap_up(heap, pos, act, i):
    v = heap[i]
    while i > 0:
        parent = (i - 1) >> 1
        pv = heap[parent]
        if not _better(act, v, pv):
            break
        heap[i] = pv
        pos[pv] = i
        i = parent
    heap[i] = v
    pos[v] = i


@kernel
def _heap_down(heap, pos, act, size, i):
    v = heap[i]
    while True:
        child = 2 * i + 1
        if child >= size:
            break
        if child + 1 < size and _better(act, heap[child + 1], heap[child]):
            child += 1
        if not _better(act, heap[child], v):
            break
        heap[i] = heap[child]
        pos[heap[i]] = i
        i = child
    heap[i] = v
    pos[v] = i


@kernel
def heap_insert(heap, pos, act, size, v):
    heap[size] = v
    pos[v] = size
    _heap_up(heap, pos, act, size)
    return size + 1


@kernel
def _heap_pop(heap, pos, act, size):
    top = heap[0]
    size -= 1
    pos[top] = -1
    if size > 0:
        heap[0] = heap[size]
        pos[heap[0]] = 0
        _heap_down(heap, pos, act, size, 0)
    return top, size


@kernel
def _lit_value(assign, lit):
    a = assign[lit >> 1]
    if a < 0:
        return -1
    return a ^ (lit & 1)


@kernel
def enqueue(assign, level, reason, trail, ist, lit, why):
    v = lit >> 1
    assign[v] = 1 - (lit & 1)
    level[v] = ist[DLEVEL]
    reason[v] = why
    trail[ist[TRAIL_LEN]] = lit
    ist[TRAIL_LEN] += 1


@kernel
def attach(lits, start, w_head, w_next, c):
    st = start[c]
    for k in range(2):
        node = 2 * c + k
        lit = lits[st + k]
        w_next[node] = w_head[lit]
        w_head[lit] = node


@kernel
def _propagate(lits, start, length, w_head, w_next, assign, level, reason, trail, ist):
    while ist[QHEAD] < ist[TRAIL_LEN]:
        p = trail[ist[QHEAD]]
        ist[QHEAD] += 1
        ist[PROPAGATIONS] += 1
        false_lit = p ^ 1
        prev = -1
        node = w_head[false_lit]
        while node != -1:
            nxt = w_next[node]
            c = node >> 1
            k = node & 1
            st = start[c]
            other = lits[st + 1 - k]
            if _lit_value(assign, other) == 1:
                prev = node
                node = nxt
                continue
            moved = False
            for j in range(st + 2, st + length[c]):
                cand = lits[j]
                if _lit_value(assign, cand) != 0:
                    lits[j] = false_lit
                    lits[st + k] = cand
                    if prev == -1:
                        w_head[false_lit] = nxt
                    else:
                        w_next[prev] = nxt
                    w_next[node] = w_head[cand]
                    w_head[cand] = node
                    moved = True
                    break
            if moved:
                node = nxt
                continue
            prev = node
            if _lit_value(assign, other) == 0:
                ist[QHEAD] = ist[TRAIL_LEN]
                return c
            enqueue(assign, level, reason, trail, ist, other, c)
            node = nxt
    return -1


@kernel
def _bump(act, heap, pos, fst, v):
    act[v] += fst[VAR_INC]
    if act[v] > 1e100:
        for i in range(act.shape[0]):
            act[i] *= 1e-100
        fst[VAR_INC] *= 1e-100
    if pos[v] >= 0:
        _heap_up(heap, pos, act, pos[v])


@kernel
def _analyze(confl, lits, start, length, level, reason, trail, seen, act, heap, pos, ist, fst, learnt):
    """First-UIP learning. Returns (learnt length, backjump level); ``learnt[0]`` asserts."""
    dlevel = ist[DLEVEL]
    path = 0
    p = -1
    out = 1
    idx = ist[TRAIL_LEN] - 1
    while True:
        st = start[confl]
        for j in range(st, st + length[confl]):
            q = lits[j]
            if q == p:
                continue
            v = q >> 1
            if seen[v] == 0 and level[v] > 0:
                _bump(act, heap, pos, fst, v)
                seen[v] = 1
                if level[v] >= dlevel:
                    path += 1
                else:
                    learnt[out] = q
                    out += 1
        while seen[trail[idx] >> 1] == 0:
            idx -= 1
        p = trail[idx]
        idx -= 1
        confl = reason[p >> 1]
        seen[p >> 1] = 0
        path -= 1
        if path <= 0:
            break
    learnt[0] = p ^ 1

    bt = 0
    best = 1
    for i in range(1, out):
        lv = level[learnt[i] >> 1]
        if lv > bt:
            bt = lv
            best = i
    if out > 1:
        tmp = learnt[1]
        learnt[1] = learnt[best]
        learnt[best] = tmp
    for i in range(1, out):
        seen[learnt[i] >> 1] = 0
    return out, bt


@kernel
def cancel_until(assign, reason, phase, trail, trail_lim, act, heap, pos, ist, target):
    if ist[DLEVEL] <= target:
        return
    lo = trail_lim[target]
    size = ist[HEAP_SIZE]
    for i in range(ist[TRAIL_LEN] - 1, lo - 1, -1):
        v = trail[i] >> 1
        phase[v] = assign[v]
        assign[v] = -1
        reason[v] = -1
        if pos[v] < 0:
            size = heap_insert(heap, pos, act, size, v)
    ist[HEAP_SIZE] = size
    ist[TRAIL_LEN] = lo
    ist[QHEAD] = lo
    ist[DLEVEL] = target


@kernel(nogil=True)
def search(
    lits, start, length, w_head, w_next,
    assign, level, reason, phase, seen,
    trail, trail_lim, act, heap, pos, learnt,
    ist, fst, conflict_stop,
):
    """Run CDCL until SAT, UNSAT, ``conflict_stop`` total conflicts, or buffers run short."""
    n = assign.shape[0]
    while True:
        if ist[CONFLICTS] >= conflict_stop:
            return PAUSED
        if ist[N_CLAUSES] >= start.shape[0] or ist[LITS_USED] + n + 1 > lits.shape[0]:
            return NEED_SPACE
        confl = _propagate(lits, start, length, w_head, w_next, assign, level, reason, trail, ist)
        if confl >= 0:
            ist[CONFLICTS] += 1
            if ist[DLEVEL] == 0:
                return UNSAT
            out, bt = _analyze(
                confl, lits, start, length, level, reason, trail, seen, act, heap, pos, ist, fst, learnt
            )
            cancel_until(assign, reason, phase, trail, trail_lim, act, heap, pos, ist, bt)
            if out == 1:
                enqueue(assign, level, reason, trail, ist, learnt[0], -1)
            else:
                c = ist[N_CLAUSES]
                st = ist[LITS_USED]
                start[c] = st
                length[c] = out
                for i in range(out):
                    lits[st + i] = learnt[i]
                ist[N_CLAUSES] = c + 1
                ist[LITS_USED] = st + out
                ist[LEARNED] += 1
                attach(lits, start, w_head, w_next, c)
                enqueue(assign, level, reason, trail, ist, learnt[0], c)
            fst[VAR_INC] /= VAR_DECAY
            if ist[CONFLICTS] >= ist[NEXT_RESTART]:
                cancel_until(assign, reason, phase, trail, trail_lim, act, heap, pos, ist, 0)
                ist[RESTARTS] += 1
                fst[RESTART_INTERVAL] *= RESTART_GROWTH
                ist[NEXT_RESTART] = ist[CONFLICTS] + int(fst[RESTART_INTERVAL])
            continue

        v = -1
        size = ist[HEAP_SIZE]
        while size > 0:
            cand, size = _heap_pop(heap, pos, act, size)
            if assign[cand] < 0:
                v = cand
                break
        ist[HEAP_SIZE] = size
        if v < 0:
            return SAT
        ph = phase[v]
        if ph < 0:
            # Unseen variables follow the polarity of the first root assignment,
            # which makes the whole search commute with global sign flips.
            ph = 1 - (trail[0] & 1) if ist[TRAIL_LEN] > 0 else 0
        trail_lim[ist[DLEVEL]] = ist[TRAIL_LEN]
        ist[DLEVEL] += 1
        ist[DECISIONS] += 1
        enqueue(assign, level, reason, trail, ist, 2 * v + (1 - ph), -1)


def new_ist() -> np.ndarray:
    return np.zeros(IST_SIZE, dtype=np.int64)


def new_fst() -> np.ndarray:
    return np.zeros(FST_SIZE, dtype=np.float64)
