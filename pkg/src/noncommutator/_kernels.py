"""Array kernels behind the permutation-group engine.

Permutations are int32 image tables, composed left to right:
``compose(p, q)[i] == q[p[i]]``.  A stabilizer chain is held as dense
arrays indexed by level:

    base    (k,)        base points
    trans   (k, n, n)   trans[l, d] maps base[l] to d (valid where inorb)
    tinv    (k, n, n)   inverses of trans
    inorb   (k, n)      orbit membership
    orbit   (k, n)      orbit points in discovery order, first orblen[l] valid
    orblen  (k,)

Everything here must stay inside numba's nopython subset; see ``_jit``.
"""

import numpy as np

from ._jit import njit


@njit
def compose(p, q):
    n = p.shape[0]
    out = np.empty(n, dtype=np.int32)
    for i in range(n):
        out[i] = q[p[i]]
    return out


@njit
def invert(p):
    n = p.shape[0]
    out = np.empty(n, dtype=np.int32)
    for i in range(n):
        out[p[i]] = i
    return out


@njit
def is_identity(p):
    for i in range(p.shape[0]):
        if p[i] != i:
            return False
    return True


@njit
def commutator(a, b):
    # a^-1 b^-1 a b, left to right
    n = a.shape[0]
    ai = invert(a)
    bi = invert(b)
    out = np.empty(n, dtype=np.int32)
    for i in range(n):
        out[i] = b[a[bi[ai[i]]]]
    return out


@njit
def cycle_lengths(p):
    """Length of the cycle through each point."""
    n = p.shape[0]
    out = np.zeros(n, dtype=np.int32)
    for i in range(n):
        if out[i] != 0:
            continue
        length = 1
        j = p[i]
        while j != i:
            length += 1
            j = p[j]
        out[i] = length
        j = p[i]
        while j != i:
            out[j] = length
            j = p[j]
    return out


@njit
def orbit_transversal(beta, gens):
    """Orbit of ``beta`` under ``gens`` (m, n) with an explicit transversal."""
    m = gens.shape[0]
    n = gens.shape[1]
    trans = np.full((n, n), -1, dtype=np.int32)
    tinv = np.full((n, n), -1, dtype=np.int32)
    inorb = np.zeros(n, dtype=np.bool_)
    orbit = np.zeros(n, dtype=np.int32)
    for i in range(n):
        trans[beta, i] = i
        tinv[beta, i] = i
    inorb[beta] = True
    orbit[0] = beta
    length = 1
    head = 0
    while head < length:
        d = orbit[head]
        head += 1
        for s in range(m):
            e = gens[s, d]
            if not inorb[e]:
                inorb[e] = True
                orbit[length] = e
                length += 1
                for i in range(n):
                    trans[e, i] = gens[s, trans[d, i]]
                for i in range(n):
                    tinv[e, trans[e, i]] = i
    return orbit, length, trans, tinv, inorb


@njit
def sift(x, start, base, tinv, inorb):
    """Strip ``x`` through levels ``start..``; return (residue, stop level)."""
    k = base.shape[0]
    n = x.shape[0]
    y = x.copy()
    for lev in range(start, k):
        d = y[base[lev]]
        if not inorb[lev, d]:
            return y, lev
        for i in range(n):
            y[i] = tinv[lev, d, y[i]]
    return y, k


@njit
def schreier_check(lev, base, trans, tinv, inorb, orbit, orblen, gens):
    """Sift every Schreier generator of level ``lev`` through the levels below.

    ``gens`` are the strong generators of this level.  Returns
    ``(ok, residue, stop_level)`` for the first generator that fails.
    """
    n = gens.shape[1]
    m = gens.shape[0]
    y = np.empty(n, dtype=np.int32)
    for a in range(orblen[lev]):
        d = orbit[lev, a]
        for s in range(m):
            e = gens[s, d]
            for i in range(n):
                y[i] = tinv[lev, e, gens[s, trans[lev, d, i]]]
            r, stop = sift(y, lev + 1, base, tinv, inorb)
            if not is_identity(r):
                return False, r, stop
    return True, y, 0


@njit
def orbit_closed(h, orbit, length, inorb):
    for j in range(length):
        if not inorb[h[orbit[j]]]:
            return False
    return True


@njit
def element_from_choices(choice, trans):
    """Compose transversal elements, bottom level applied first."""
    k = trans.shape[0]
    n = trans.shape[1]
    out = np.arange(n).astype(np.int32)
    for lev in range(k - 1, -1, -1):
        u = trans[lev, choice[lev]]
        for i in range(n):
            out[i] = u[out[i]]
    return out


@njit
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@njit
def orbit_min_rep(gens, active, n):
    """Smallest point of each point's orbit under the active generators."""
    parent = np.arange(n).astype(np.int32)
    for s in range(gens.shape[0]):
        if not active[s]:
            continue
        for i in range(n):
            a = _find(parent, i)
            b = _find(parent, gens[s, i])
            if a < b:
                parent[b] = a
            elif b < a:
                parent[a] = b
    rep = np.empty(n, dtype=np.int32)
    for i in range(n):
        rep[i] = _find(parent, i)
    return rep


@njit
def orbit_partition(gens, n):
    active = np.ones(gens.shape[0], dtype=np.bool_)
    return orbit_min_rep(gens, active, n)


# --- backtrack -------------------------------------------------------------
#
# Searches the chain's base-image tree for x with x[g[p]] == h[x[p]] for all
# points p (x^-1 g x == h).  Each level's candidate images are restricted to
# points on h-cycles of the right length; a level whose base point shares a
# g-cycle with an earlier base point has its image forced.  Candidates are
# further cut to one per orbit of the pruning generators that fix the
# current prefix: those generators must map solutions to solutions under
# right multiplication (i.e. lie in the centralizer of h).
#
# The state arrays live with the caller so a search can pause on a node
# budget and resume.

STATUS_EXHAUSTED = 0
STATUS_FOUND = 1
STATUS_PAUSED = 2


@njit
def _fill_candidates(d, base, trans, inorb, orbit, orblen, h, cyc_g, cyc_h,
                     anchor, shift, prune, cand, ncand, idx, w, img, active):
    n = h.shape[0]
    beta = base[d]
    wd = w[d]
    count = 0
    a = anchor[d]
    if a >= 0:
        target = img[a]
        for _ in range(shift[d]):
            target = h[target]
        delta = -1
        for p in range(n):
            if wd[p] == target:
                delta = p
                break
        if delta >= 0 and inorb[d, delta]:
            cand[d, 0] = delta
            count = 1
    else:
        need = cyc_g[beta]
        any_active = False
        for s in range(prune.shape[0]):
            if active[d, s]:
                any_active = True
                break
        if any_active and orblen[d] > 1:
            rep = orbit_min_rep(prune, active[d], n)
            for j in range(orblen[d]):
                delta = orbit[d, j]
                gamma = wd[delta]
                if cyc_h[gamma] == need and rep[gamma] == gamma:
                    cand[d, count] = delta
                    count += 1
        else:
            for j in range(orblen[d]):
                delta = orbit[d, j]
                if cyc_h[wd[delta]] == need:
                    cand[d, count] = delta
                    count += 1
    ncand[d] = count
    idx[d] = 0


@njit
def backtrack_search(base, trans, inorb, orbit, orblen, g, h, cyc_g, cyc_h,
                     anchor, shift, prune, start, first_choice, state,
                     cand, ncand, idx, w, img, active, node_limit, out):
    """Run (or resume) one depth-first search.  Returns a STATUS_* code.

    ``state`` is int64[3]: current depth, initialised flag, nodes visited.
    Levels below ``start`` are pinned to the identity; ``first_choice``
    (if >= 0) is the only candidate tried at ``start``.
    """
    k = base.shape[0]
    n = g.shape[0]
    if state[1] == 0:
        state[1] = 1
        state[0] = start
        for i in range(n):
            w[start, i] = i
        for e in range(start):
            img[e] = base[e]
        for s in range(prune.shape[0]):
            ok = True
            for e in range(start):
                if prune[s, base[e]] != base[e]:
                    ok = False
                    break
            active[start, s] = ok
        if first_choice >= 0:
            cand[start, 0] = first_choice
            ncand[start] = 1
            idx[start] = 0
        else:
            _fill_candidates(start, base, trans, inorb, orbit, orblen, h,
                             cyc_g, cyc_h, anchor, shift, prune, cand, ncand,
                             idx, w, img, active)
    depth = state[0]
    budget = node_limit
    while True:
        if depth == k:
            x = w[k]
            good = True
            for p in range(n):
                if x[g[p]] != h[x[p]]:
                    good = False
                    break
            depth -= 1
            if good:
                for p in range(n):
                    out[p] = x[p]
                state[0] = depth
                return STATUS_FOUND
            continue
        if idx[depth] >= ncand[depth]:
            if depth == start:
                state[0] = depth
                return STATUS_EXHAUSTED
            depth -= 1
            continue
        if budget <= 0:
            state[0] = depth
            return STATUS_PAUSED
        budget -= 1
        state[2] += 1
        delta = cand[depth, idx[depth]]
        idx[depth] += 1
        gamma = w[depth, delta]
        img[depth] = gamma
        for i in range(n):
            w[depth + 1, i] = w[depth, trans[depth, delta, i]]
        for s in range(prune.shape[0]):
            active[depth + 1, s] = active[depth, s] and prune[s, gamma] == gamma
        depth += 1
        if depth < k:
            _fill_candidates(depth, base, trans, inorb, orbit, orblen, h,
                             cyc_g, cyc_h, anchor, shift, prune, cand, ncand,
                             idx, w, img, active)
