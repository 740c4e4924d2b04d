"""Compiled inner loops: Levenshtein backtrace and network construction.

Both run under numba when it is installed; otherwise the same functions
run as plain Python (correct, much slower). Tokens are integer ids, with
id 0 reserved for epsilon.
"""

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None

MATCH, SUBSTITUTE, DELETE, INSERT = 0, 1, 2, 3
EPS_ID = 0
#: log-masses closer than this count as tied; exact ties in real arithmetic
#: (e.g. two normalized systems) must not be decided by rounding noise
TIE_TOL = 1e-12


def backtrace(hyp, ref):
    """Unit-cost alignment of ``hyp`` against ``ref``.

    Backtrace from the bottom-right cell, preferring
    MATCH > SUBSTITUTE > DELETE > INSERT. Returns
    ``(distance, kinds, hyp_index, ref_index)`` with -1 for absent indices.
    """
    n = hyp.shape[0]
    m = ref.shape[0]
    dist = np.empty((n + 1, m + 1), dtype=np.int64)
    for i in range(n + 1):
        dist[i, 0] = i
    for j in range(m + 1):
        dist[0, j] = j
    for i in range(1, n + 1):
        h = hyp[i - 1]
        for j in range(1, m + 1):
            best = dist[i - 1, j - 1]
            if h != ref[j - 1]:
                best += 1
            d = dist[i, j - 1] + 1
            if d < best:
                best = d
            d = dist[i - 1, j] + 1
            if d < best:
                best = d
            dist[i, j] = best

    kinds = np.empty(n + m, dtype=np.int64)
    hyp_idx = np.empty(n + m, dtype=np.int64)
    ref_idx = np.empty(n + m, dtype=np.int64)
    k = 0
    i = n
    j = m
    while i > 0 or j > 0:
        cur = dist[i, j]
        if i > 0 and j > 0 and hyp[i - 1] == ref[j - 1] and cur == dist[i - 1, j - 1]:
            kinds[k] = MATCH
            i -= 1
            j -= 1
            hyp_idx[k] = i
            ref_idx[k] = j
        elif i > 0 and j > 0 and hyp[i - 1] != ref[j - 1] and cur == dist[i - 1, j - 1] + 1:
            kinds[k] = SUBSTITUTE
            i -= 1
            j -= 1
            hyp_idx[k] = i
            ref_idx[k] = j
        elif j > 0 and cur == dist[i, j - 1] + 1:
            kinds[k] = DELETE
            j -= 1
            hyp_idx[k] = -1
            ref_idx[k] = j
        else:
            kinds[k] = INSERT
            i -= 1
            hyp_idx[k] = i
            ref_idx[k] = -1
        k += 1
    return dist[n, m], kinds[:k][::-1].copy(), hyp_idx[:k][::-1].copy(), ref_idx[:k][::-1].copy()


def _logaddexp(a, b):
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    if a >= b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


def _ranks_before(key, other, lexrank):
    """Tie-break between entries of (near-)equal mass: word over epsilon, then text."""
    if key == other or key == EPS_ID:
        return False
    if other == EPS_ID:
        return True
    return lexrank[key] < lexrank[other]


def _rescan(first, e_tok, e_mass, e_next, lexrank):
    """Winner of the bin whose entry list starts at ``first``, and its mass."""
    top = -math.inf
    e = first
    while e >= 0:
        top = max(top, e_mass[e])
        e = e_next[e]
    winner, mass = -1, -math.inf
    e = first
    while e >= 0:
        if e_mass[e] >= top - TIE_TOL and (winner < 0 or _ranks_before(e_tok[e], winner, lexrank)):
            winner, mass = e_tok[e], e_mass[e]
        e = e_next[e]
    return winner, mass, top


def build_network(tokens, offsets, weights, lexrank):
    """Align hypotheses (flattened ids, in alignment order) into bins.

    Each bin keeps its entries as a linked list in a shared pool and tracks
    its winner incrementally: the best-ranked entry within ``TIE_TOL`` of
    the bin's top mass. A bin whose winner turns epsilon is retired:
    no later hypothesis can align to it, so each of them adds its weight to
    the epsilon entry; that mass is settled in one step at the end.

    Returns ``(entry_bin, entry_token, entry_mass, aligned_mass)`` with
    entries grouped by output bin position, in insertion order per bin.
    """
    n_hyp = weights.shape[0]
    cap_bins = offsets[n_hyp] + 1
    head = np.full(cap_bins, -1, dtype=np.int64)
    tail = np.full(cap_bins, -1, dtype=np.int64)
    winner = np.zeros(cap_bins, dtype=np.int64)
    best = np.zeros(cap_bins, dtype=np.float64)  # winner's mass
    top = np.zeros(cap_bins, dtype=np.float64)
    retired = np.full(cap_bins, -1, dtype=np.int64)
    cap = 4 * cap_bins + 16
    e_tok = np.empty(cap, dtype=np.int64)
    e_mass = np.empty(cap, dtype=np.float64)
    e_next = np.empty(cap, dtype=np.int64)
    n_entries = 0
    n_bins = 0

    order = np.empty(cap_bins, dtype=np.int64)
    new_order = np.empty(cap_bins, dtype=np.int64)
    ref_bins = np.empty(cap_bins, dtype=np.int64)
    ref_ids = np.empty(cap_bins, dtype=np.int64)
    pending = np.empty(cap_bins, dtype=np.int64)
    length = 0
    aligned = -math.inf

    for step in range(n_hyp):
        w = weights[step]
        hyp = tokens[offsets[step]:offsets[step + 1]]
        n_ref = 0
        for p in range(length):
            b = order[p]
            if retired[b] < 0:
                ref_bins[n_ref] = b
                ref_ids[n_ref] = winner[b]
                n_ref += 1
        _, kinds, hyp_idx, ref_idx = backtrace(hyp, ref_ids[:n_ref])

        # worst case every op adds one entry and seeds one epsilon
        need = n_entries + 2 * kinds.shape[0]
        if need > cap:
            cap = max(2 * cap, need)
            grown_tok = np.empty(cap, dtype=np.int64)
            grown_mass = np.empty(cap, dtype=np.float64)
            grown_next = np.empty(cap, dtype=np.int64)
            grown_tok[:n_entries] = e_tok[:n_entries]
            grown_mass[:n_entries] = e_mass[:n_entries]
            grown_next[:n_entries] = e_next[:n_entries]
            e_tok, e_mass, e_next = grown_tok, grown_mass, grown_next

        new_len = 0
        n_pending = 0
        p = 0  # next position in the old order
        for o in range(kinds.shape[0]):
            kind = kinds[o]
            if kind == INSERT:
                b = n_bins
                n_bins += 1
                e = n_entries
                n_entries += 1
                e_tok[e] = hyp[hyp_idx[o]]
                e_mass[e] = w
                e_next[e] = -1
                head[b] = e
                tail[b] = e
                winner[b] = e_tok[e]
                best[b] = w
                top[b] = w
                if aligned != -math.inf:
                    e = n_entries
                    n_entries += 1
                    e_tok[e] = EPS_ID
                    e_mass[e] = aligned
                    e_next[e] = -1
                    e_next[tail[b]] = e
                    tail[b] = e
                    top[b] = max(w, aligned)
                    if w < top[b] - TIE_TOL:
                        winner[b] = EPS_ID
                        best[b] = aligned
                        retired[b] = step
                pending[n_pending] = b
                n_pending += 1
                continue

            b = ref_bins[ref_idx[o]]
            # bins between two reference bins are retired; carry them over
            while order[p] != b:
                new_order[new_len] = order[p]
                new_len += 1
                p += 1
            p += 1
            for q in range(n_pending):
                new_order[new_len] = pending[q]
                new_len += 1
            n_pending = 0
            new_order[new_len] = b
            new_len += 1

            key = EPS_ID if kind == DELETE else hyp[hyp_idx[o]]
            e = head[b]
            while e >= 0 and e_tok[e] != key:
                e = e_next[e]
            if e < 0:
                e = n_entries
                n_entries += 1
                e_tok[e] = key
                e_mass[e] = w
                e_next[e] = -1
                e_next[tail[b]] = e
                tail[b] = e
            else:
                e_mass[e] = _logaddexp(e_mass[e], w)
            mass = e_mass[e]
            if key == winner[b]:
                best[b] = mass
            if mass > top[b]:
                top[b] = mass
                if best[b] < mass - TIE_TOL:
                    winner[b], best[b], top[b] = _rescan(head[b], e_tok, e_mass, e_next, lexrank)
            if mass >= top[b] - TIE_TOL and _ranks_before(key, winner[b], lexrank):
                winner[b] = key
                best[b] = mass
            if winner[b] == EPS_ID:
                retired[b] = step

        while p < length:
            new_order[new_len] = order[p]
            new_len += 1
            p += 1
        for q in range(n_pending):
            new_order[new_len] = pending[q]
            new_len += 1
        order, new_order = new_order, order
        length = new_len
        aligned = _logaddexp(aligned, w)

    later = np.empty(n_hyp + 1, dtype=np.float64)
    later[n_hyp] = -math.inf
    for s in range(n_hyp - 1, -1, -1):
        later[s] = _logaddexp(later[s + 1], weights[s])

    out_bin = np.empty(n_entries, dtype=np.int64)
    out_tok = np.empty(n_entries, dtype=np.int64)
    out_mass = np.empty(n_entries, dtype=np.float64)
    k = 0
    for pos in range(length):
        b = order[pos]
        e = head[b]
        while e >= 0:
            out_bin[k] = pos
            out_tok[k] = e_tok[e]
            mass = e_mass[e]
            if e_tok[e] == EPS_ID and retired[b] >= 0:
                mass = _logaddexp(mass, later[retired[b] + 1])
            out_mass[k] = mass
            k += 1
            e = e_next[e]
    return out_bin[:k], out_tok[:k], out_mass[:k], aligned


if njit is not None:
    backtrace = njit(cache=True, nogil=True)(backtrace)
    _logaddexp = njit(cache=True, nogil=True)(_logaddexp)
    _ranks_before = njit(cache=True, nogil=True)(_ranks_before)
    _rescan = njit(cache=True, nogil=True)(_rescan)
    build_network = njit(cache=True, nogil=True)(build_network)
