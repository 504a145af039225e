"""Event loop for the N-source M/M/1 status-update queue (numba compiled)."""
import numpy as np
from numba import njit

from .rng import exponential

FCFS, LCFS_S, LCFS_W = 0, 1, 2

OK, OVERFLOW = 0, 1

# moment accumulator columns
M_N, M_Y, M_Y2, M_T, M_YT, M_W, M_W2, M_YW = range(8)
N_MOMENTS = 8

# minibatch accumulator columns
B_N, B_Q, B_Y, B_YW = range(4)
N_MINIBATCH = 1024


@njit(cache=True)
def _grow(qsrc, qgen, head, size, cap):
    nsrc = np.empty(cap, dtype=np.int64)
    ngen = np.empty(cap, dtype=np.float64)
    old = qsrc.shape[0]
    for k in range(size):
        nsrc[k] = qsrc[(head + k) % old]
        ngen[k] = qgen[(head + k) % old]
    return nsrc, ngen


@njit(cache=True, nogil=True)
def run(disc, lam, mu, src_keys, srv_key, by_count, t_horizon, t_warm, n_target, n_warm,
        queue_cap, record_limit):
    """Simulate one replication.

    Time mode (``by_count`` false) observes ``[t_warm, t_horizon]``. Count mode
    discards the first ``n_warm`` deliveries and observes the next ``n_target``.
    """
    nsrc = lam.shape[0]
    inf = np.inf

    src_ctr = np.zeros(nsrc, dtype=np.int64)
    srv_ctr = 0
    next_arr = np.empty(nsrc)
    for i in range(nsrc):
        if lam[i] > 0.0:
            next_arr[i] = exponential(src_keys[i], src_ctr[i], lam[i])
            src_ctr[i] += 1
        else:
            next_arr[i] = inf

    busy = False
    s_src = -1
    s_gen = 0.0
    s_arr = 0.0
    s_start = 0.0
    t_dep = inf

    # FCFS ring buffer
    qcap = 1024 if queue_cap > 1024 else queue_cap
    qsrc = np.empty(qcap, dtype=np.int64)
    qgen = np.empty(qcap, dtype=np.float64)
    qhead = 0
    qsize = 0
    qmax = 0
    # LCFS-W waiting slot
    w_has = False
    w_src = -1
    w_gen = 0.0

    u = np.zeros(nsrc)  # generation time of last delivered update (age 0 at t=0)
    has_prev = np.zeros(nsrc, dtype=np.bool_)
    acc_t = np.zeros(nsrc)
    area = np.zeros(nsrc)
    mom = np.zeros((nsrc, N_MOMENTS))
    mb = np.zeros((nsrc, N_MINIBATCH, 4))
    mb_k = np.zeros(nsrc, dtype=np.int64)
    mb_size = np.full(nsrc, 16, dtype=np.int64)

    rec_src = np.empty(record_limit, dtype=np.int64)
    rec = np.empty((record_limit, 5))  # gen, delivery, Y, T, W
    n_rec = 0

    started = False
    t_start = 0.0
    busy_time = 0.0
    clock = 0.0
    n_deliv = 0
    n_win = 0
    status = OK
    t_end = 0.0

    if by_count and n_warm == 0:
        started = True

    while True:
        ia = 0
        ta = next_arr[0]
        for i in range(1, nsrc):
            if next_arr[i] < ta:
                ta = next_arr[i]
                ia = i
        is_dep = busy and t_dep <= ta
        t = t_dep if is_dep else ta
        if t == inf:
            t_end = t_horizon if not by_count else clock
            break
        if not by_count:
            if t > t_horizon:
                if not started:
                    started = True
                    t_start = t_warm
                    clock = t_warm
                    for i in range(nsrc):
                        acc_t[i] = t_warm
                if busy:
                    busy_time += t_horizon - clock
                t_end = t_horizon
                break
            if not started and t > t_warm:
                started = True
                t_start = t_warm
                clock = t_warm
                for i in range(nsrc):
                    acc_t[i] = t_warm
        if started and busy:
            busy_time += t - clock
        clock = t

        if is_dep:
            s = s_src
            g = s_gen
            if started:
                a0 = acc_t[s] - u[s]
                a1 = t - u[s]
                area[s] += 0.5 * (a1 * a1 - a0 * a0)
                acc_t[s] = t
                if has_prev[s]:
                    y = g - u[s]
                    tt = t - g
                    w = s_start - s_arr
                    mom[s, M_N] += 1.0
                    mom[s, M_Y] += y
                    mom[s, M_Y2] += y * y
                    mom[s, M_T] += tt
                    mom[s, M_YT] += y * tt
                    mom[s, M_W] += w
                    mom[s, M_W2] += w * w
                    mom[s, M_YW] += y * w
                    k = mb_k[s]
                    mb[s, k, B_N] += 1.0
                    mb[s, k, B_Q] += y * tt + 0.5 * y * y
                    mb[s, k, B_Y] += y
                    mb[s, k, B_YW] += y * w
                    if mb[s, k, B_N] >= mb_size[s]:
                        k += 1
                        if k == N_MINIBATCH:
                            half = N_MINIBATCH // 2
                            for j in range(half):
                                for c in range(4):
                                    mb[s, j, c] = mb[s, 2 * j, c] + mb[s, 2 * j + 1, c]
                            for j in range(half, N_MINIBATCH):
                                for c in range(4):
                                    mb[s, j, c] = 0.0
                            k = half
                            mb_size[s] *= 2
                        mb_k[s] = k
                    if n_rec < record_limit:
                        rec_src[n_rec] = s
                        rec[n_rec, 0] = g
                        rec[n_rec, 1] = t
                        rec[n_rec, 2] = y
                        rec[n_rec, 3] = tt
                        rec[n_rec, 4] = w
                        n_rec += 1
                n_win += 1
            u[s] = g
            has_prev[s] = True
            n_deliv += 1

            # next service
            busy = False
            t_dep = inf
            if disc == FCFS:
                if qsize > 0:
                    busy = True
                    s_src = qsrc[qhead]
                    s_gen = qgen[qhead]
                    s_arr = s_gen
                    qhead = (qhead + 1) % qsrc.shape[0]
                    qsize -= 1
            elif disc == LCFS_W:
                if w_has:
                    busy = True
                    s_src = w_src
                    s_gen = w_gen
                    s_arr = w_gen
                    w_has = False
            if busy:
                s_start = t
                t_dep = t + exponential(srv_key, srv_ctr, mu)
                srv_ctr += 1

            if by_count:
                if not started and n_deliv == n_warm:
                    started = True
                    t_start = t
                    for i in range(nsrc):
                        acc_t[i] = t
                elif started and n_win >= n_target:
                    t_end = t
                    break
        else:
            i = ia
            next_arr[i] = t + exponential(src_keys[i], src_ctr[i], lam[i])
            src_ctr[i] += 1
            start_now = False
            if disc == FCFS:
                if not busy:
                    start_now = True
                else:
                    if qsize == qsrc.shape[0]:
                        if qsize >= queue_cap:
                            status = OVERFLOW
                            t_end = t
                            break
                        newcap = 2 * qsize
                        if newcap > queue_cap:
                            newcap = queue_cap
                        qsrc, qgen = _grow(qsrc, qgen, qhead, qsize, newcap)
                        qhead = 0
                    qsrc[(qhead + qsize) % qsrc.shape[0]] = i
                    qgen[(qhead + qsize) % qsrc.shape[0]] = t
                    qsize += 1
                    if qsize > qmax:
                        qmax = qsize
            elif disc == LCFS_S:
                start_now = True
            else:
                if not busy:
                    start_now = True
                else:
                    w_has = True
                    w_src = i
                    w_gen = t
            if start_now:
                busy = True
                s_src = i
                s_gen = t
                s_arr = t
                s_start = t
                t_dep = t + exponential(srv_key, srv_ctr, mu)
                srv_ctr += 1

    if started:
        for i in range(nsrc):
            a0 = acc_t[i] - u[i]
            a1 = t_end - u[i]
            area[i] += 0.5 * (a1 * a1 - a0 * a0)
    n_mb = mb_k + 1
    return (status, t_start, t_end, area, mom, mb, n_mb, busy_time, rec_src[:n_rec],
            rec[:n_rec], n_win, qmax)
