"""Hot numeric kernels, compiled with numba unless disabled.

Everything here is a plain function of arrays and scalars so the jitted and
pure-Python paths share one source of truth.  Verdict codes used throughout:
0 = In, 1 = PresumedIn, 2 = Unknown, 3 = Out.
"""

import math

import numpy as np

from .backend import maybe_jit

CODE_IN = 0
CODE_PRESUMED_IN = 1
CODE_UNKNOWN = 2
CODE_OUT = 3

# absolute imaginary-part cutoff below which a point is treated as real
IM_CUTOFF = 1e-8


@maybe_jit
def search_one_step_real(elems, starts, r, limit, max_depth, node_budget,
                         path_out):
    """Depth-first escape search for a real rate r (signed, |r| > 1).

    Children at each node are tried in order of increasing |next remainder|,
    ties going to the smaller coefficient.  Returns (code, depth, pruned,
    nodes); on a survivor, path_out[:max_depth+1] holds element indices.
    """
    n = elems.shape[0]
    cand_idx = np.empty((max_depth + 2, n), dtype=np.int64)
    cand_q = np.empty((max_depth + 2, n), dtype=np.float64)
    n_cand = np.empty(max_depth + 2, dtype=np.int64)
    pos = np.empty(max_depth + 2, dtype=np.int64)
    path_idx = np.empty(max_depth + 2, dtype=np.int64)

    pruned = 0
    nodes = 0
    deepest = 0

    cnt = 0
    for si in range(starts.shape[0]):
        j = starts[si]
        q = elems[j]
        nodes += 1
        if abs(q) <= limit:
            # stable insertion by |q|; ties keep ascending element order
            k = cnt
            while k > 0 and abs(cand_q[0, k - 1]) > abs(q):
                cand_q[0, k] = cand_q[0, k - 1]
                cand_idx[0, k] = cand_idx[0, k - 1]
                k -= 1
            cand_q[0, k] = q
            cand_idx[0, k] = j
            cnt += 1
        else:
            pruned += 1
    n_cand[0] = cnt
    pos[0] = 0
    d = 0

    while True:
        if pos[d] >= n_cand[d]:
            d -= 1
            if d < 0:
                return CODE_OUT, deepest, pruned, nodes
            continue
        k = pos[d]
        pos[d] += 1
        q = cand_q[d, k]
        path_idx[d] = cand_idx[d, k]
        if d > deepest:
            deepest = d
        if d == max_depth:
            for i in range(max_depth + 1):
                path_out[i] = path_idx[i]
            return CODE_PRESUMED_IN, max_depth, pruned, nodes
        cnt = 0
        t = r * q
        for j in range(n):
            qn = elems[j] + t
            nodes += 1
            if nodes > node_budget:
                return CODE_UNKNOWN, deepest, pruned, nodes
            if abs(qn) <= limit:
                kk = cnt
                while kk > 0 and abs(cand_q[d + 1, kk - 1]) > abs(qn):
                    cand_q[d + 1, kk] = cand_q[d + 1, kk - 1]
                    cand_idx[d + 1, kk] = cand_idx[d + 1, kk - 1]
                    kk -= 1
                cand_q[d + 1, kk] = qn
                cand_idx[d + 1, kk] = j
                cnt += 1
            else:
                pruned += 1
        n_cand[d + 1] = cnt
        pos[d + 1] = 0
        d += 1


@maybe_jit
def search_one_step_complex(elems, starts, r_re, r_im, limit, max_depth,
                            node_budget, path_out):
    """One-step search with a complex rate (non-real candidate points)."""
    n = elems.shape[0]
    cand_idx = np.empty((max_depth + 2, n), dtype=np.int64)
    cand_re = np.empty((max_depth + 2, n), dtype=np.float64)
    cand_im = np.empty((max_depth + 2, n), dtype=np.float64)
    cand_a2 = np.empty((max_depth + 2, n), dtype=np.float64)
    n_cand = np.empty(max_depth + 2, dtype=np.int64)
    pos = np.empty(max_depth + 2, dtype=np.int64)
    path_idx = np.empty(max_depth + 2, dtype=np.int64)

    limit_sq = limit * limit
    pruned = 0
    nodes = 0
    deepest = 0

    cnt = 0
    for si in range(starts.shape[0]):
        j = starts[si]
        qr = elems[j]
        a2 = qr * qr
        nodes += 1
        if a2 <= limit_sq:
            k = cnt
            while k > 0 and cand_a2[0, k - 1] > a2:
                cand_re[0, k] = cand_re[0, k - 1]
                cand_im[0, k] = cand_im[0, k - 1]
                cand_a2[0, k] = cand_a2[0, k - 1]
                cand_idx[0, k] = cand_idx[0, k - 1]
                k -= 1
            cand_re[0, k] = qr
            cand_im[0, k] = 0.0
            cand_a2[0, k] = a2
            cand_idx[0, k] = j
            cnt += 1
        else:
            pruned += 1
    n_cand[0] = cnt
    pos[0] = 0
    d = 0

    while True:
        if pos[d] >= n_cand[d]:
            d -= 1
            if d < 0:
                return CODE_OUT, deepest, pruned, nodes
            continue
        k = pos[d]
        pos[d] += 1
        qr = cand_re[d, k]
        qi = cand_im[d, k]
        path_idx[d] = cand_idx[d, k]
        if d > deepest:
            deepest = d
        if d == max_depth:
            for i in range(max_depth + 1):
                path_out[i] = path_idx[i]
            return CODE_PRESUMED_IN, max_depth, pruned, nodes
        tr = r_re * qr - r_im * qi
        ti = r_re * qi + r_im * qr
        cnt = 0
        for j in range(n):
            nr = elems[j] + tr
            a2 = nr * nr + ti * ti
            nodes += 1
            if nodes > node_budget:
                return CODE_UNKNOWN, deepest, pruned, nodes
            if a2 <= limit_sq:
                kk = cnt
                while kk > 0 and cand_a2[d + 1, kk - 1] > a2:
                    cand_re[d + 1, kk] = cand_re[d + 1, kk - 1]
                    cand_im[d + 1, kk] = cand_im[d + 1, kk - 1]
                    cand_a2[d + 1, kk] = cand_a2[d + 1, kk - 1]
                    cand_idx[d + 1, kk] = cand_idx[d + 1, kk - 1]
                    kk -= 1
                cand_re[d + 1, kk] = nr
                cand_im[d + 1, kk] = ti
                cand_a2[d + 1, kk] = a2
                cand_idx[d + 1, kk] = j
                cnt += 1
            else:
                pruned += 1
        n_cand[d + 1] = cnt
        pos[d + 1] = 0
        d += 1


@maybe_jit
def search_two_step(elems, starts, two_r_cos, r_sq, limit, max_depth,
                    node_budget, path_out):
    """Two-step search for non-real candidates with real coefficient sets.

    Remainders stay real: state is (q_{d-1}, q_d) with q_{-1} = 0.
    """
    n = elems.shape[0]
    cand_idx = np.empty((max_depth + 2, n), dtype=np.int64)
    cand_u = np.empty((max_depth + 2, n), dtype=np.float64)
    cand_v = np.empty((max_depth + 2, n), dtype=np.float64)
    n_cand = np.empty(max_depth + 2, dtype=np.int64)
    pos = np.empty(max_depth + 2, dtype=np.int64)
    path_idx = np.empty(max_depth + 2, dtype=np.int64)

    pruned = 0
    nodes = 0
    deepest = 0

    cnt = 0
    for si in range(starts.shape[0]):
        j = starts[si]
        q = elems[j]
        nodes += 1
        if abs(q) <= limit:
            k = cnt
            while k > 0 and abs(cand_v[0, k - 1]) > abs(q):
                cand_u[0, k] = cand_u[0, k - 1]
                cand_v[0, k] = cand_v[0, k - 1]
                cand_idx[0, k] = cand_idx[0, k - 1]
                k -= 1
            cand_u[0, k] = 0.0
            cand_v[0, k] = q
            cand_idx[0, k] = j
            cnt += 1
        else:
            pruned += 1
    n_cand[0] = cnt
    pos[0] = 0
    d = 0

    while True:
        if pos[d] >= n_cand[d]:
            d -= 1
            if d < 0:
                return CODE_OUT, deepest, pruned, nodes
            continue
        k = pos[d]
        pos[d] += 1
        u = cand_u[d, k]
        v = cand_v[d, k]
        path_idx[d] = cand_idx[d, k]
        if d > deepest:
            deepest = d
        if d == max_depth:
            for i in range(max_depth + 1):
                path_out[i] = path_idx[i]
            return CODE_PRESUMED_IN, max_depth, pruned, nodes
        t = two_r_cos * v - r_sq * u
        cnt = 0
        for j in range(n):
            qn = elems[j] + t
            nodes += 1
            if nodes > node_budget:
                return CODE_UNKNOWN, deepest, pruned, nodes
            if abs(qn) <= limit:
                kk = cnt
                while kk > 0 and abs(cand_v[d + 1, kk - 1]) > abs(qn):
                    cand_u[d + 1, kk] = cand_u[d + 1, kk - 1]
                    cand_v[d + 1, kk] = cand_v[d + 1, kk - 1]
                    cand_idx[d + 1, kk] = cand_idx[d + 1, kk - 1]
                    kk -= 1
                cand_u[d + 1, kk] = v
                cand_v[d + 1, kk] = qn
                cand_idx[d + 1, kk] = j
                cnt += 1
            else:
                pruned += 1
        n_cand[d + 1] = cnt
        pos[d + 1] = 0
        d += 1


@maybe_jit
def greedy_real(elems, r, steps, bound):
    """Greedy remainder minimization on the real line starting from q = 1.

    Each step picks the coefficient minimizing |p + r q| (ties to the
    smaller p).  Returns (max |q| seen, step of first bound violation or -1).
    """
    n = elems.shape[0]
    q = 1.0
    max_q = 1.0
    fail = -1
    if max_q > bound:
        fail = 0
    for j in range(1, steps + 1):
        t = r * q
        best = elems[0] + t
        for i in range(1, n):
            c = elems[i] + t
            if abs(c) < abs(best):
                best = c
        q = best
        a = abs(q)
        if a > max_q:
            max_q = a
        if fail < 0 and a > bound:
            fail = j
    return max_q, fail


@maybe_jit
def greedy_two_step_interval(elems, two_r_cos, r_sq, lo, hi, steps, tol):
    """Greedy two-step recursion keeping remainders inside [lo, hi].

    Starts from q_0 = 1; each step picks the coefficient minimizing the
    distance of the next remainder to the interval (ties to the smaller p)
    and then projects onto the interval.  The projection pins the state to
    the certified region, so the reported per-step distance measures how
    far a single greedy step can leave the interval rather than
    accumulated float drift (the recursion is neutrally unstable on the
    interval boundary).
    Returns (max per-step distance, step of first distance > tol or -1).
    """
    n = elems.shape[0]
    u = 0.0
    v = 1.0
    max_dist = 0.0
    fail = -1
    if 1.0 < lo - tol or 1.0 > hi + tol:
        fail = 0
        max_dist = max(lo - 1.0, 1.0 - hi)
    for j in range(1, steps + 1):
        t = two_r_cos * v - r_sq * u
        best = elems[0] + t
        bd = max(lo - best, best - hi)
        if bd < 0.0:
            bd = 0.0
        for i in range(1, n):
            c = elems[i] + t
            d = max(lo - c, c - hi)
            if d < 0.0:
                d = 0.0
            if d < bd:
                bd = d
                best = c
        u = v
        v = min(max(best, lo), hi)
        if bd > max_dist:
            max_dist = bd
        if fail < 0 and bd > tol:
            fail = j
    return max_dist, fail


@maybe_jit
def roots_batch(coeffs, degs, roots, resid, dpabs, scale, nroots, ok):
    """Batched Durand-Kerner root finder with Newton polish.

    coeffs: (B, K) float64, c_0 ... c_{K-1} with c_0 != 0.
    degs: (B,) effective degrees (index of last nonzero coefficient).
    Outputs per root: value, |P(root)|, |P'(root)|, and the magnitude scale
    sum |c_j| |root|^j used for relative residual tests.
    """
    B = coeffs.shape[0]
    for b in range(B):
        d = degs[b]
        nroots[b] = d
        ok[b] = True
        if d <= 0:
            continue
        c = coeffs[b]
        # init on a circle at the geometric mean root radius
        rad = abs(c[0] / c[d]) ** (1.0 / d)
        if rad < 0.05:
            rad = 0.05
        elif rad > 20.0:
            rad = 20.0
        z = np.empty(d, dtype=np.complex128)
        for i in range(d):
            ang = 2.0 * math.pi * (i + 0.371) / d + 0.543
            z[i] = rad * complex(math.cos(ang), math.sin(ang))
        converged = False
        for it in range(120):
            max_step = 0.0
            max_mag = 0.0
            for i in range(d):
                zi = z[i]
                # Horner for P(zi)
                p = complex(c[d], 0.0)
                for j in range(d - 1, -1, -1):
                    p = p * zi + c[j]
                den = complex(c[d], 0.0)
                for j in range(d):
                    if j != i:
                        den = den * (zi - z[j])
                if abs(den) < 1e-280:
                    z[i] = zi + complex(1e-6, 1e-6) * (1.0 + abs(zi))
                    max_step = 1.0
                    continue
                step = p / den
                z[i] = zi - step
                a = abs(step)
                if a > max_step:
                    max_step = a
                m = abs(z[i])
                if m > max_mag:
                    max_mag = m
            if max_step <= 5e-15 * (1.0 + max_mag):
                converged = True
                break
        ok[b] = converged
        # Newton polish and residual bookkeeping
        for i in range(d):
            zi = z[i]
            for _ in range(2):
                p = complex(c[d], 0.0)
                dp = complex(0.0, 0.0)
                for j in range(d - 1, -1, -1):
                    dp = dp * zi + p
                    p = p * zi + c[j]
                if abs(dp) > 1e-280:
                    corr = p / dp
                    if abs(corr) < 0.5:
                        zi = zi - corr
            p = complex(c[d], 0.0)
            dp = complex(0.0, 0.0)
            for j in range(d - 1, -1, -1):
                dp = dp * zi + p
                p = p * zi + c[j]
            az = abs(zi)
            s = abs(c[d])
            for j in range(d - 1, -1, -1):
                s = s * az + abs(c[j])
            roots[b, i] = zi
            resid[b, i] = abs(p)
            dpabs[b, i] = abs(dp)
            scale[b, i] = s


@maybe_jit
def decide_batch(re, im, elems, starts, max_abs, max_depth, slack,
                 node_budget, codes, depths):
    """Float-mode membership decisions for a batch of disc points.

    Real points (|im| <= IM_CUTOFF) use the one-step machine, others the
    two-step machine with the sharper angled threshold when it applies.
    """
    path = np.empty(max_depth + 2, dtype=np.int64)
    for i in range(re.shape[0]):
        x = re[i]
        y = im[i]
        mod2 = x * x + y * y
        mod = math.sqrt(mod2)
        if mod >= 1.0 or mod <= 1e-12:
            codes[i] = CODE_OUT
            depths[i] = 0
            continue
        r = 1.0 / mod
        if abs(y) <= IM_CUTOFF:
            rs = 1.0 / x
            limit = max_abs / (r - 1.0) + slack
            code, dep, _, _ = search_one_step_real(
                elems, starts, rs, limit, max_depth, node_budget, path)
        else:
            two_r_cos = 2.0 * x / mod2
            r_sq = 1.0 / mod2
            thr = max_abs / ((r - 1.0) * (r - 1.0))
            if x >= 0.0:
                den = r_sq - two_r_cos - 1.0
                if den > 1e-9:
                    alt = max_abs / den
                    if alt < thr:
                        thr = alt
            limit = thr + slack
            code, dep, _, _ = search_two_step(
                elems, starts, two_r_cos, r_sq, limit, max_depth,
                node_budget, path)
        codes[i] = code
        depths[i] = dep


@maybe_jit
def render_rows(xs, ys, elems, starts, max_abs, max_depth, depth_extra,
                slack, node_budget, use_outer, outer_mod, use_annulus,
                annulus_mod, deep_mod, out):
    """Classify a grid of pixel centers; out is (len(ys), len(xs)) uint8.

    Shortcut order: unit-disc test, outer cutoff (Out), certified annulus
    (In), then the per-pixel escape search with depth boost near the deep
    edge.  Pure function of the pixel center, so any row partition of a
    raster produces identical bytes.
    """
    W = xs.shape[0]
    path = np.empty(max_depth + depth_extra + 2, dtype=np.int64)
    for jy in range(ys.shape[0]):
        y = ys[jy]
        for ix in range(W):
            x = xs[ix]
            mod2 = x * x + y * y
            mod = math.sqrt(mod2)
            if mod >= 1.0 or mod <= 1e-12:
                out[jy, ix] = CODE_OUT
                continue
            if use_outer and mod < outer_mod:
                out[jy, ix] = CODE_OUT
                continue
            if use_annulus and mod >= annulus_mod:
                out[jy, ix] = CODE_IN
                continue
            depth = max_depth
            if mod < deep_mod:
                depth += depth_extra
            r = 1.0 / mod
            if abs(y) <= IM_CUTOFF:
                rs = 1.0 / x
                limit = max_abs / (r - 1.0) + slack
                code, _, _, _ = search_one_step_real(
                    elems, starts, rs, limit, depth, node_budget, path)
            else:
                two_r_cos = 2.0 * x / mod2
                r_sq = 1.0 / mod2
                thr = max_abs / ((r - 1.0) * (r - 1.0))
                if x >= 0.0:
                    den = r_sq - two_r_cos - 1.0
                    if den > 1e-9:
                        alt = max_abs / den
                        if alt < thr:
                            thr = alt
                limit = thr + slack
                code, _, _, _ = search_two_step(
                    elems, starts, two_r_cos, r_sq, limit, depth,
                    node_budget, path)
            out[jy, ix] = code
