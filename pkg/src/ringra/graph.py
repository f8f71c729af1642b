"""Concrete Tanner graph construction from a code profile.

A graph instance fixes: per-VN repeat counts, per-CN combiner degrees, the
edge permutation connecting repeated message symbols to check-node input
slots, one ring multiplier per combiner edge, the two regular accumulator
multipliers per output symbol, and the coset vector.

Layout conventions used throughout the package:

* info VN i owns repeat slots [vn_offsets[i], vn_offsets[i] + vn_degrees[i])
* CN t owns combiner slots [cn_offsets[t], cn_offsets[t] + cn_degrees[t])
* CN-side slot e is fed by repeat slot interleaver[e]
* CN t enforces  sum_tau h_tau * b_tau + g'_t c_{t-1} + g''_t c_t = 0 (mod q),
  with c_0 := 0 so the first CN has no predecessor edge.

The interleaver is random subject to the multiplier-placement rules: VNs of
degree 2 or 3 receive only regular-element edges, VNs of higher degree d at
most ceil(d/3) zero-divisor edges, and no VN connects twice to one CN.
Violations of an initial uniform permutation are repaired by random swaps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ringra.profile import CodeProfile
from ringra.ring import RingParams, ring_for_q, solve_mod_q

GRAPH_FORMAT = "ringra-graph-v1"
_SWAP_RETRY_CAP = 10_000


class GraphBuildError(RuntimeError):
    pass


def zero_divisor_capacity(degree: int) -> int:
    """Max zero-divisor edges allowed on a VN of the given degree."""
    if degree <= 3:
        return 0
    return -(-degree // 3)


@dataclass
class CodeGraph:
    ring: RingParams
    k: int
    n: int
    vn_degrees: np.ndarray
    cn_degrees: np.ndarray
    interleaver: np.ndarray
    edge_multipliers: np.ndarray
    acc_prev: np.ndarray  # g' per CN; entry 0 unused
    acc_curr: np.ndarray  # g'' per CN
    coset: np.ndarray
    seed: int
    profile_label: str = ""
    vn_offsets: np.ndarray = field(init=False)
    cn_offsets: np.ndarray = field(init=False)

    def __post_init__(self):
        self.vn_offsets = np.concatenate([[0], np.cumsum(self.vn_degrees)])
        self.cn_offsets = np.concatenate([[0], np.cumsum(self.cn_degrees)])

    @property
    def q(self) -> int:
        return self.ring.q

    @property
    def num_edges(self) -> int:
        return len(self.interleaver)

    def edge_vn(self) -> np.ndarray:
        """Info VN index feeding each CN-side combiner slot."""
        owner = np.repeat(np.arange(self.k), self.vn_degrees)
        return owner[self.interleaver]

    def edge_cn(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), self.cn_degrees)

    def rate(self) -> float:
        return self.k / self.n


def _largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    scaled = weights / weights.sum() * total
    counts = np.floor(scaled).astype(np.int64)
    short = total - counts.sum()
    order = np.argsort(-(scaled - counts), kind="stable")
    counts[order[:short]] += 1
    return counts


def _realize_cn_degrees(profile: CodeProfile, n: int, rng) -> np.ndarray:
    degs = np.array(sorted(profile.degrees.cn_edge_fractions))
    rho = np.array([profile.degrees.cn_edge_fractions[d] for d in degs])
    counts = _largest_remainder(rho / degs, n)
    if (counts == 0).any():
        raise GraphBuildError(
            f"n={n} too small: CN degrees {degs[counts == 0].tolist()} round to 0 nodes"
        )
    seq = np.repeat(degs, counts)
    rng.shuffle(seq)
    return seq


def _realize_vn_degrees(profile: CodeProfile, num_edges: int, rng) -> np.ndarray:
    degs = np.array(sorted(profile.degrees.vn_edge_fractions))
    phi = np.array([profile.degrees.vn_edge_fractions[d] for d in degs])
    k = int(num_edges * profile.degrees.inv_avg_vn_degree)
    counts = _largest_remainder(phi / degs, k)
    if (counts == 0).any():
        raise GraphBuildError(
            f"VN degrees {degs[counts == 0].tolist()} round to 0 nodes"
        )
    seq = np.repeat(degs, counts)
    # settle the edge residual on the lowest-degree nodes
    deficit = num_edges - int(seq.sum())
    order = np.argsort(seq, kind="stable")
    i = 0
    while deficit != 0:
        if i >= len(order):
            raise GraphBuildError(f"cannot settle edge residual ({deficit} left)")
        if deficit > 0:
            seq[order[i]] += 1
            deficit -= 1
        elif seq[order[i]] > 2:
            seq[order[i]] -= 1
            deficit += 1
        i += 1
    rng.shuffle(seq)
    return seq


def _sample_multipliers(
    profile: CodeProfile, cn_degrees: np.ndarray, rng
) -> np.ndarray:
    """Multiplier per combiner edge; CNs of degree >= 2 keep at least one
    regular input so check constraints stay anchored (uniform inputs on a
    regular edge keep the outputs uniform, and ambiguity stays bounded)."""
    ring = profile.ring
    elements = np.arange(1, ring.q)
    out = np.empty(int(cn_degrees.sum()), dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(cn_degrees)])
    for dc in np.unique(cn_degrees):
        probs = profile.multipliers.element_probs(int(dc))
        rows = np.nonzero(cn_degrees == dc)[0]
        draw = rng.choice(elements, size=(len(rows), dc), p=probs)
        if dc >= 2 and probs[ring.regular_elements - 1].sum() > 0:
            regular = np.isin(draw, ring.regular_elements)
            bad = ~regular.any(axis=1)
            while bad.any():
                draw[bad] = rng.choice(elements, size=(int(bad.sum()), dc), p=probs)
                regular = np.isin(draw, ring.regular_elements)
                bad = ~regular.any(axis=1)
        for j, t in enumerate(rows):
            out[offsets[t] : offsets[t] + dc] = draw[j]
    return out


def _build_interleaver(
    ring: RingParams,
    vn_degrees: np.ndarray,
    cn_degrees: np.ndarray,
    multipliers: np.ndarray,
    rng,
) -> np.ndarray:
    num_edges = len(multipliers)
    vn_of_slot = np.repeat(np.arange(len(vn_degrees)), vn_degrees)
    cn_of_edge = np.repeat(np.arange(len(cn_degrees)), cn_degrees)
    capacity = np.array([zero_divisor_capacity(int(d)) for d in vn_degrees])
    is_zd = ~np.isin(multipliers, ring.regular_elements)

    total_cap = int(capacity.sum())
    total_zd = int(is_zd.sum())
    if total_zd > total_cap:
        raise GraphBuildError(
            f"infeasible interleaver: {total_zd} zero-divisor edges but only "
            f"{total_cap} admissible high-degree VN slots"
        )

    perm = rng.permutation(num_edges)  # CN slot e <- repeat slot perm[e]

    vn = vn_of_slot[perm]
    zd_count = np.bincount(vn[is_zd], minlength=len(vn_degrees))

    def try_swap(e1: int, need_regular_partner: bool = False) -> bool:
        """Swap CN slot e1's connection with a random compatible slot."""
        v1 = vn_of_slot[perm[e1]]
        for _ in range(_SWAP_RETRY_CAP):
            e2 = int(rng.integers(num_edges))
            if e2 == e1:
                continue
            v2 = vn_of_slot[perm[e2]]
            if v2 == v1:
                continue
            z1, z2 = is_zd[e1], is_zd[e2]
            if need_regular_partner and z2:
                continue
            # zero-divisor budget after moving e1 -> v2 and e2 -> v1
            d1 = (-1 if z1 else 0) + (1 if z2 else 0)
            d2 = (1 if z1 else 0) + (-1 if z2 else 0)
            if zd_count[v1] + d1 > capacity[v1] or zd_count[v2] + d2 > capacity[v2]:
                continue
            # no duplicate VN-CN pairs
            if _connects(v2, e1) or _connects(v1, e2):
                continue
            perm[[e1, e2]] = perm[[e2, e1]]
            zd_count[v1] += d1
            zd_count[v2] += d2
            return True
        return False

    def _connects(v: int, e: int) -> bool:
        t = cn_of_edge[e]
        slots = slice(cn_slices[t], cn_slices[t + 1])
        mine = vn_of_slot[perm[slots]]
        others = np.delete(mine, e - cn_slices[t])
        return bool((others == v).any())

    cn_slices = np.concatenate([[0], np.cumsum(cn_degrees)])

    # repair zero-divisor budget violations
    overfull = np.nonzero(zd_count > capacity)[0]
    for v in overfull:
        slots = np.nonzero((vn_of_slot[perm] == v) & is_zd)[0]
        excess = int(zd_count[v] - capacity[v])
        for e1 in slots[:excess]:
            if not try_swap(int(e1), need_regular_partner=True):
                raise GraphBuildError(
                    f"interleaver repair gave up after {_SWAP_RETRY_CAP} retries "
                    f"(VN {v}: {zd_count[v]} zero-divisor edges, cap {capacity[v]})"
                )

    # repair duplicate VN-CN pairs
    for t in range(len(cn_degrees)):
        slots = np.arange(cn_slices[t], cn_slices[t + 1])
        while True:
            vs = vn_of_slot[perm[slots]]
            _, first = np.unique(vs, return_index=True)
            dup = np.setdiff1d(np.arange(len(slots)), first, assume_unique=False)
            if len(dup) == 0:
                break
            if not try_swap(int(slots[dup[0]])):
                raise GraphBuildError(
                    f"could not resolve duplicate connection at CN {t}"
                )
    return perm


def build_graph(profile: CodeProfile, n: int, seed: int) -> CodeGraph:
    """Deterministically realize a Tanner graph for codeword length n.

    The PRNG is numpy's default (PCG64) seeded with `seed`; all randomness
    (degree placement, multipliers, interleaver, accumulator taps, coset)
    derives from it, so identical inputs give identical graphs.
    """
    rng = np.random.default_rng(seed)
    ring = profile.ring

    cn_degrees = _realize_cn_degrees(profile, n, rng)
    num_edges = int(cn_degrees.sum())
    vn_degrees = _realize_vn_degrees(profile, num_edges, rng)
    multipliers = _sample_multipliers(profile, cn_degrees, rng)
    interleaver = _build_interleaver(ring, vn_degrees, cn_degrees, multipliers, rng)

    regular = ring.regular_elements
    acc_prev = rng.choice(regular, size=n)
    acc_prev[0] = 1  # unused: first CN has no predecessor edge
    acc_curr = rng.choice(regular, size=n)
    coset = rng.integers(0, ring.q, size=n)

    return CodeGraph(
        ring=ring,
        k=len(vn_degrees),
        n=n,
        vn_degrees=vn_degrees,
        cn_degrees=cn_degrees,
        interleaver=interleaver,
        edge_multipliers=multipliers,
        acc_prev=acc_prev,
        acc_curr=acc_curr,
        coset=coset,
        seed=seed,
        profile_label=profile.label,
    )


# -- parity checking --------------------------------------------------------


def cn_sums(graph: CodeGraph, w: np.ndarray) -> np.ndarray:
    """Per-CN combiner sums  s_t = sum_tau h_tau b_tau  (mod q)."""
    q = graph.q
    b = np.repeat(np.asarray(w, dtype=np.int64) % q, graph.vn_degrees)[
        graph.interleaver
    ]
    weighted = (graph.edge_multipliers * b) % q
    return np.add.reduceat(weighted, graph.cn_offsets[:-1]) % q


def check_constraints(graph: CodeGraph, w: np.ndarray, c: np.ndarray) -> bool:
    """All CN constraints hold for the message/codeword assignment."""
    c = np.asarray(c, dtype=np.int64) % graph.q
    if len(c) != graph.n or len(w) != graph.k:
        raise ValueError("length mismatch")
    s = cn_sums(graph, w)
    c_prev = np.concatenate([[0], c[:-1]])
    lhs = (s + graph.acc_prev * c_prev + graph.acc_curr * c) % graph.q
    return not lhs.any()


_SOLVE_BOUND = 2048


def combine_matrix(graph: CodeGraph) -> np.ndarray:
    """Dense n-by-k map from message to CN sums (small graphs only)."""
    if graph.n > _SOLVE_BOUND:
        raise ValueError(f"combine matrix refused for n={graph.n} > {_SOLVE_BOUND}")
    M = np.zeros((graph.n, graph.k), dtype=np.int64)
    vn = graph.edge_vn()
    cn = graph.edge_cn()
    np.add.at(M, (cn, vn), graph.edge_multipliers)
    return M % graph.q


def parity_matrix_check(graph: CodeGraph, c: np.ndarray, w=None) -> bool:
    """True iff c is a valid codeword (optionally against a known message).

    Without w, the message is recovered by solving the combiner system over
    Z_q, which is limited to graphs with n <= 2048.
    """
    c = np.asarray(c, dtype=np.int64) % graph.q
    if w is not None:
        return check_constraints(graph, w, c)
    c_prev = np.concatenate([[0], c[:-1]])
    s = (-(graph.acc_prev * c_prev + graph.acc_curr * c)) % graph.q
    M = combine_matrix(graph)
    return solve_mod_q(M, s, graph.ring) is not None


def parity_matrix_check_many(graph: CodeGraph, C: np.ndarray) -> np.ndarray:
    """Vector of validity flags for a batch of codewords (rows of C)."""
    C = np.asarray(C, dtype=np.int64) % graph.q
    C_prev = np.concatenate([np.zeros((len(C), 1), dtype=np.int64), C[:, :-1]], axis=1)
    S = (-(graph.acc_prev * C_prev + graph.acc_curr * C)) % graph.q
    M = combine_matrix(graph)
    out = np.zeros(len(C), dtype=bool)
    for i, s in enumerate(S):
        out[i] = solve_mod_q(M, s, graph.ring) is not None
    return out


# -- serialization -----------------------------------------------------------


def save_graph(graph: CodeGraph, path) -> None:
    doc = {
        "format": GRAPH_FORMAT,
        "q": graph.q,
        "k": graph.k,
        "n": graph.n,
        "seed": graph.seed,
        "profile_label": graph.profile_label,
        "vn_degrees": graph.vn_degrees.tolist(),
        "cn_degrees": graph.cn_degrees.tolist(),
        "interleaver": graph.interleaver.tolist(),
        "edge_multipliers": graph.edge_multipliers.tolist(),
        "acc_prev": graph.acc_prev.tolist(),
        "acc_curr": graph.acc_curr.tolist(),
        "coset": graph.coset.tolist(),
    }
    with open(path, "w") as f:
        json.dump(doc, f)
        f.write("\n")


def load_graph(path) -> CodeGraph:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != GRAPH_FORMAT:
        raise ValueError(f"unrecognized graph format {doc.get('format')!r}")
    arr = lambda key: np.array(doc[key], dtype=np.int64)
    return CodeGraph(
        ring=ring_for_q(int(doc["q"])),
        k=int(doc["k"]),
        n=int(doc["n"]),
        vn_degrees=arr("vn_degrees"),
        cn_degrees=arr("cn_degrees"),
        interleaver=arr("interleaver"),
        edge_multipliers=arr("edge_multipliers"),
        acc_prev=arr("acc_prev"),
        acc_curr=arr("acc_curr"),
        coset=arr("coset"),
        seed=int(doc["seed"]),
        profile_label=doc.get("profile_label", ""),
    )
