"""Compiled inner loops shared by sorting and metrics."""

import numba
import numpy as np


@numba.njit(cache=True)
def _ranks_2d(F):
    # sweep in (f1, f2) order; front k is summarized by its last point, and
    # the fronts' last f2 values increase with k
    n = F.shape[0]
    order = np.argsort(F[:, 0], kind="mergesort")
    for a in range(1, n):
        b = a
        while b > 0 and F[order[b], 0] == F[order[b - 1], 0] and F[order[b], 1] < F[order[b - 1], 1]:
            order[b], order[b - 1] = order[b - 1], order[b]
            b -= 1
    ranks = np.empty(n, np.int64)
    last = np.empty(n, np.int64)
    fronts = 0
    for p in order:
        lo = 0
        hi = fronts
        while lo < hi:
            mid = (lo + hi) // 2
            q = last[mid]
            if F[q, 1] < F[p, 1] or (F[q, 1] == F[p, 1] and F[q, 0] < F[p, 0]):
                lo = mid + 1
            else:
                hi = mid
        ranks[p] = lo
        last[lo] = p
        if lo == fronts:
            fronts += 1
    return ranks


@numba.njit(cache=True)
def nondominated_ranks(F):
    n, d = F.shape
    if d == 2:
        return _ranks_2d(F)
    dominated_by = np.zeros(n, np.int64)
    beats = np.zeros((n, n), np.bool_)
    for p in range(n):
        for q in range(p + 1, n):
            p_le = True
            q_le = True
            for i in range(d):
                if F[p, i] < F[q, i]:
                    q_le = False
                elif F[p, i] > F[q, i]:
                    p_le = False
                if not p_le and not q_le:
                    break
            if p_le and not q_le:
                beats[p, q] = True
                dominated_by[q] += 1
            elif q_le and not p_le:
                beats[q, p] = True
                dominated_by[p] += 1

    ranks = np.full(n, -1, np.int64)
    front = np.empty(n, np.int64)
    nxt = np.empty(n, np.int64)
    size = 0
    for p in range(n):
        if dominated_by[p] == 0:
            front[size] = p
            size += 1
    rank = 0
    while size > 0:
        nsize = 0
        for k in range(size):
            p = front[k]
            ranks[p] = rank
            for q in range(n):
                if beats[p, q]:
                    dominated_by[q] -= 1
                    if dominated_by[q] == 0:
                        nxt[nsize] = q
                        nsize += 1
        front, nxt = nxt, front
        size = nsize
        rank += 1
    return ranks


@numba.njit(cache=True)
def max_min_max(S, T):
    """max over rows s of S, min over rows t of T, of max_i (s_i - t_i).

    Exact: only comparisons and single subtractions are performed, so the
    result is bitwise equal to the naive triple loop. Returns the value and
    the index of the first row of S attaining it.
    """
    ns, d = S.shape
    nt = T.shape[0]
    alpha = -np.inf
    witness = 0
    start = 0
    for s in range(ns):
        best = np.inf
        best_t = start
        for k in range(nt):
            t = start + k
            if t >= nt:
                t -= nt
            m = -np.inf
            for i in range(d):
                v = S[s, i] - T[t, i]
                if v > m:
                    m = v
                    if m >= best:
                        break
            if m < best:
                best = m
                best_t = t
                if best <= alpha:
                    break
        start = best_t
        if best > alpha:
            alpha = best
            witness = s
    return alpha, witness


# layout of the packed CMA-ES state
MEAN, P_SIGMA, P_C, SQRT_EIG = 0, 1, 2, 3
SIGMA, GENERATION, MU_EFF, C_SIGMA, D_SIGMA, C_C, C_1, C_MU, CHI_N = range(9)


@numba.njit(cache=True)
def cma_ask(vec, B, scal, Z, low, width, upper):
    """Candidates clamped to the unit cube, and the same points in the box."""
    count, n = Z.shape
    sigma = scal[SIGMA]
    U = np.empty((count, n))
    X = np.empty((count, n))
    for k in range(count):
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += B[i, j] * vec[SQRT_EIG, j] * Z[k, j]
            u = min(max(vec[MEAN, i] + sigma * acc, 0.0), 1.0)
            U[k, i] = u
            X[k, i] = min(low[i] + u * width[i], upper[i])
    return U, X


@numba.njit(cache=True)
def cma_tell(vec, C, B, scal, weights, U, fx, refresh):
    """One (mu, lambda) update; modifies ``vec``, ``C``, ``B`` and ``scal`` in place."""
    n = vec.shape[1]
    mu = weights.size
    sigma = scal[SIGMA]
    mu_eff, c_sigma, d_sigma = scal[MU_EFF], scal[C_SIGMA], scal[D_SIGMA]
    c_c, c_1, c_mu, chi_n = scal[C_C], scal[C_1], scal[C_MU], scal[CHI_N]

    order = np.argsort(fx, kind="mergesort")[:mu]
    Y = np.empty((mu, n))
    y_w = np.zeros(n)
    for r in range(mu):
        for i in range(n):
            Y[r, i] = (U[order[r], i] - vec[MEAN, i]) / sigma
            y_w[i] += weights[r] * Y[r, i]
    for i in range(n):
        vec[MEAN, i] += sigma * y_w[i]

    # C^(-1/2) y_w = B diag(1/D) B^T y_w
    tmp = np.zeros(n)
    for j in range(n):
        acc = 0.0
        for i in range(n):
            acc += B[i, j] * y_w[i]
        tmp[j] = acc / vec[SQRT_EIG, j]
    ps_coef = np.sqrt(c_sigma * (2.0 - c_sigma) * mu_eff)
    ps_sq = 0.0
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += B[i, j] * tmp[j]
        vec[P_SIGMA, i] = (1.0 - c_sigma) * vec[P_SIGMA, i] + ps_coef * acc
        ps_sq += vec[P_SIGMA, i] ** 2
    scal[GENERATION] += 1.0
    ps_norm = np.sqrt(ps_sq)
    h_sigma = (ps_norm / np.sqrt(1.0 - (1.0 - c_sigma) ** (2.0 * scal[GENERATION]))
               < (1.4 + 2.0 / (n + 1.0)) * chi_n)
    pc_coef = np.sqrt(c_c * (2.0 - c_c) * mu_eff) if h_sigma else 0.0
    delta = 0.0 if h_sigma else c_c * (2.0 - c_c)
    for i in range(n):
        vec[P_C, i] = (1.0 - c_c) * vec[P_C, i] + pc_coef * y_w[i]

    keep = 1.0 - c_1 - c_mu + c_1 * delta
    for i in range(n):
        for j in range(i + 1):
            rank_mu = 0.0
            for r in range(mu):
                rank_mu += weights[r] * Y[r, i] * Y[r, j]
            v = keep * C[i, j] + c_1 * vec[P_C, i] * vec[P_C, j] + c_mu * rank_mu
            C[i, j] = v
            C[j, i] = v
    sigma *= np.exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0))
    scal[SIGMA] = min(max(sigma, 1e-290), 1e10)
    if refresh:
        evals = refresh_eigensystem(C, B)
        for j in range(n):
            vec[SQRT_EIG, j] = np.sqrt(max(evals[j], 1e-300))


@numba.njit(cache=True)
def refresh_eigensystem(C, B, max_sweeps=30):
    """Re-diagonalize symmetric ``C`` starting from the previous eigenbasis ``B``.

    ``B^T C B`` is nearly diagonal after a small covariance update, so a few
    cyclic Jacobi sweeps suffice. ``B`` is overwritten with the new
    eigenvectors; the eigenvalues are returned. Falls back to LAPACK if the
    sweeps do not converge.
    """
    n = C.shape[0]
    A = B.T @ C @ B
    for sweep in range(max_sweeps):
        off = 0.0
        diag = 0.0
        for p in range(n):
            diag += A[p, p] * A[p, p]
            for q in range(p + 1, n):
                off += A[p, q] * A[p, q]
        if off <= 1e-30 * diag:
            return np.diag(A).copy()
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                for k in range(n):
                    bkp = B[k, p]
                    bkq = B[k, q]
                    B[k, p] = c * bkp - s * bkq
                    B[k, q] = s * bkp + c * bkq
    evals, vectors = np.linalg.eigh(C)
    B[:, :] = vectors
    return evals


@numba.njit(cache=True)
def archive_merge(F, size):
    """Insert rows ``F[size:]`` one by one into the mutually non-dominated ``F[:size]``.

    A new row is rejected when some live row weakly dominates it (equal
    vectors included); otherwise it evicts every live row it dominates.
    Returns the live mask over all rows.
    """
    total, d = F.shape
    alive = np.zeros(total, np.bool_)
    alive[:size] = True
    for j in range(size, total):
        rejected = False
        for q in range(j):
            if not alive[q]:
                continue
            q_le = True
            for i in range(d):
                if F[q, i] > F[j, i]:
                    q_le = False
                    break
            if q_le:
                rejected = True
                break
        if rejected:
            continue
        for q in range(j):
            if not alive[q]:
                continue
            j_le = True
            for i in range(d):
                if F[j, i] > F[q, i]:
                    j_le = False
                    break
            if j_le:
                alive[q] = False
        alive[j] = True
    return alive


@numba.njit(cache=True)
def _best_two(V, a, alive):
    m = V.shape[1]
    b1 = np.inf
    b2 = np.inf
    i1 = -1
    for p in range(m):
        if not alive[p]:
            continue
        v = V[a, p]
        if v < b1:
            b2 = b1
            b1 = v
            i1 = p
        elif v < b2:
            b2 = v
    return b1, i1, b2


@numba.njit(cache=True)
def greedy_alpha_removal(V, remove, noise):
    """Remove ``remove`` columns of ``V`` one at a time, each time the one
    whose loss increases ``max_a min_p V[a, p]`` the least.

    ``V[a, p]`` is how far pool member ``p`` must be shifted to dominate
    archive point ``a``. Each archive row keeps its best and second-best
    pool member, so a removal only rescans the rows it owned. Ties on the
    resulting value are broken by the removed member's own loss, then by
    ``noise``. Returns the mask of kept columns.
    """
    na, m = V.shape
    alive = np.ones(m, np.bool_)
    best = np.empty(na)
    owner = np.empty(na, np.int64)
    second = np.empty(na)
    for a in range(na):
        best[a], owner[a], second[a] = _best_two(V, a, alive)
    owned_best = np.empty(m)
    loss = np.empty(m)
    for _ in range(remove):
        owned_best[:] = -np.inf
        loss[:] = -np.inf
        for a in range(na):
            p = owner[a]
            if best[a] > owned_best[p]:
                owned_best[p] = best[a]
            if second[a] > loss[p]:
                loss[p] = second[a]
        # top two of owned_best give the value without each member's rows
        t1 = -np.inf
        t2 = -np.inf
        k1 = -1
        for p in range(m):
            if not alive[p]:
                continue
            if owned_best[p] > t1:
                t2 = t1
                t1 = owned_best[p]
                k1 = p
            elif owned_best[p] > t2:
                t2 = owned_best[p]
        chosen = -1
        c_val = np.inf
        c_loss = np.inf
        c_noise = np.inf
        for p in range(m):
            if not alive[p]:
                continue
            rest = t2 if p == k1 else t1
            val = max(rest, loss[p])
            if (val < c_val or (val == c_val and (loss[p] < c_loss
                    or (loss[p] == c_loss and noise[p] < c_noise)))):
                chosen = p
                c_val = val
                c_loss = loss[p]
                c_noise = noise[p]
        alive[chosen] = False
        for a in range(na):
            if owner[a] == chosen:
                best[a], owner[a], second[a] = _best_two(V, a, alive)
            elif V[a, chosen] <= second[a]:
                # the removed member was (one of) the second best
                b1, i1, b2 = _best_two(V, a, alive)
                second[a] = b2
    return alive


@numba.njit(cache=True)
def binary_tournament(primary, secondary, R):
    """Winners of ``R.shape[0]`` tournaments; lower primary, then higher secondary.

    Row ``k`` of ``R`` holds three uniforms: the two distinct contestants
    and the coin for exact ties.
    """
    size = primary.size
    out = np.empty(R.shape[0], np.int64)
    for k in range(R.shape[0]):
        a = min(int(R[k, 0] * size), size - 1)
        b = min(int(R[k, 1] * (size - 1)), size - 2)
        if b >= a:
            b += 1
        if primary[a] != primary[b]:
            out[k] = a if primary[a] < primary[b] else b
        elif secondary[a] != secondary[b]:
            out[k] = a if secondary[a] > secondary[b] else b
        else:
            out[k] = a if R[k, 2] < 0.5 else b
    return out


@numba.njit(cache=True)
def sbx(A, B, R, eta, p_c, low, high, clamp):
    """Simulated binary crossover of paired rows.

    ``R`` has ``1 + 3n`` uniforms per pair: the pair gate, then per
    variable the crossing gate, the spread-factor draw and the swap coin.
    """
    k, n = A.shape
    C1 = A.copy()
    C2 = B.copy()
    e = 1.0 / (eta + 1.0)
    for r in range(k):
        if R[r, 0] >= p_c:
            continue
        for i in range(n):
            a = A[r, i]
            b = B[r, i]
            # equal parents: the spread factor has no gap to act on
            if R[r, 1 + i] >= 0.5 or a == b:
                continue
            u = R[r, 1 + n + i]
            if u <= 0.5:
                beta = (2.0 * u) ** e
            else:
                beta = (0.5 / (1.0 - u)) ** e
            c1 = 0.5 * ((1.0 + beta) * a + (1.0 - beta) * b)
            c2 = 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b)
            if R[r, 1 + 2 * n + i] < 0.5:
                c1, c2 = c2, c1
            if clamp:
                c1 = min(max(c1, low[i]), high[i])
                c2 = min(max(c2, low[i]), high[i])
            C1[r, i] = c1
            C2[r, i] = c2
    return C1, C2


@numba.njit(cache=True)
def polynomial_mutation(X, R, eta, p_m, low, high):
    """Bounded polynomial mutation; ``R`` has two uniforms per variable."""
    k, n = X.shape
    Y = X.copy()
    power = 1.0 / (eta + 1.0)
    for r in range(k):
        for i in range(n):
            if R[r, i] >= p_m:
                continue
            y = Y[r, i]
            width = high[i] - low[i]
            u = R[r, n + i]
            if u < 0.5:
                xy = 1.0 - (y - low[i]) / width
                val = 2.0 * u + (1.0 - 2.0 * u) * xy ** (eta + 1.0)
                dq = val**power - 1.0
            else:
                xy = 1.0 - (high[i] - y) / width
                val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy ** (eta + 1.0)
                dq = 1.0 - val**power
            Y[r, i] = min(max(y + dq * width, low[i]), high[i])
    return Y


@numba.njit(cache=True)
def least_contributor_2d(F, members, offset, noise):
    """Member of a 2-D non-dominated subset with the smallest exclusive
    hypervolume; reference point = subset maximum + ``offset``."""
    m = members.size
    if m == 1:
        return members[0]
    G = np.empty((m, 2))
    for k in range(m):
        G[k, 0] = F[members[k], 0]
        G[k, 1] = F[members[k], 1]
    r0 = G[:, 0].max() + offset
    r1 = G[:, 1].max() + offset
    order = np.argsort(G[:, 0], kind="mergesort")
    # ties on the first objective: order by the second (stable two-key sort)
    for a in range(1, m):
        b = a
        while b > 0 and G[order[b], 0] == G[order[b - 1], 0] and G[order[b], 1] < G[order[b - 1], 1]:
            order[b], order[b - 1] = order[b - 1], order[b]
            b -= 1
    best = np.inf
    best_noise = np.inf
    pick = -1
    for k in range(m):
        p = order[k]
        right = G[order[k + 1], 0] if k + 1 < m else r0
        left = G[order[k - 1], 1] if k > 0 else r1
        c = (right - G[p, 0]) * (left - G[p, 1])
        if c < best or (c == best and noise[p] < best_noise):
            best = c
            best_noise = noise[p]
            pick = p
    return members[pick]


@numba.njit(cache=True)
def steady_state_survivor_2d(F, offset, noise):
    """Ranks of the rows of ``F`` and the row SMS-EMOA discards: the least
    hypervolume contributor of the worst front."""
    ranks = _ranks_2d(F)
    worst = ranks.max()
    members = np.flatnonzero(ranks == worst)
    return least_contributor_2d(F, members, offset, noise), ranks


@numba.njit(cache=True)
def out_of_bounds(X, low, high):
    for i in range(X.shape[0]):
        for j in range(X.shape[1]):
            if not (low[j] <= X[i, j] <= high[j]):
                return True
    return False


@numba.njit(cache=True)
def dtlz(X, d, number, alpha):
    # number 1: linear layers with the Rastrigin-like g; 2: sphere layers with
    # the sphere g; 3: sphere layers, Rastrigin-like g; 4: as 2 with x ** alpha
    m, n = X.shape
    k = n - d + 1
    F = np.empty((m, d))
    theta = np.empty(d - 1)
    for r in range(m):
        g = 0.0
        if number == 1 or number == 3:
            for j in range(d - 1, n):
                z = X[r, j] - 0.5
                g += z * z - np.cos(20.0 * np.pi * z)
            g = 100.0 * (k + g)
        else:
            for j in range(d - 1, n):
                z = X[r, j] - 0.5
                g += z * z
        for j in range(d - 1):
            theta[j] = X[r, j] ** alpha if number == 4 else X[r, j]
        for o in range(d):
            if number == 1:
                f = 0.5 * (1.0 + g)
                for j in range(d - 1 - o):
                    f *= theta[j]
                if o > 0:
                    f *= 1.0 - theta[d - 1 - o]
            else:
                f = 1.0 + g
                for j in range(d - 1 - o):
                    f *= np.cos(0.5 * np.pi * theta[j])
                if o > 0:
                    f *= np.sin(0.5 * np.pi * theta[d - 1 - o])
            F[r, o] = f
    return F
