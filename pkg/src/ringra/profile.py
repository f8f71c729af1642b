"""Code profiles: node-degree distributions plus multiplier distributions,
with JSON file I/O and the bundled published profiles.

A profile file carries the exact decimal strings of its source tables; the
loader renormalizes the small truncation residue (table entries are rounded
to four decimals) and rejects anything further from a distribution than that.

Degree fractions are stored either edge-perspective (fraction of edges
attached to nodes of each degree, the native convention here) or
node-perspective (fraction of nodes); node-perspective files are converted
on load.  Multipliers come in two shapes: a per-CN-degree row of
element-type probabilities (split uniformly inside each type), or a single
per-element probability vector shared by all CN degrees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ringra.ring import RingParams, ring_for_q

FORMAT_TAG = "ringra-profile-v1"
_SUM_SLACK = 2e-3  # absorbs 4-decimal truncation of published tables


class ProfileError(ValueError):
    pass


def _normalize(fractions: dict[int, float], what: str) -> dict[int, float]:
    total = sum(fractions.values())
    if abs(total - 1.0) > _SUM_SLACK:
        raise ProfileError(f"{what} fractions sum to {total:.6f}, not 1")
    if min(fractions.values()) < 0:
        raise ProfileError(f"{what} fractions must be nonnegative")
    if abs(total - 1.0) < 1e-12:
        return dict(sorted(fractions.items()))
    return {d: v / total for d, v in sorted(fractions.items())}


@dataclass(frozen=True)
class DegreeProfile:
    """Edge-perspective degree fractions for variable and check nodes."""

    vn_edge_fractions: dict[int, float]
    cn_edge_fractions: dict[int, float]

    def __post_init__(self):
        object.__setattr__(
            self, "vn_edge_fractions", _normalize(self.vn_edge_fractions, "VN")
        )
        object.__setattr__(
            self, "cn_edge_fractions", _normalize(self.cn_edge_fractions, "CN")
        )
        if min(self.vn_edge_fractions) < 2:
            raise ProfileError("VN degrees start at 2")
        if min(self.cn_edge_fractions) < 1:
            raise ProfileError("CN degrees start at 1")

    @staticmethod
    def from_node_fractions(vn: dict[int, float], cn: dict[int, float]) -> "DegreeProfile":
        vn = _normalize(vn, "VN node")
        cn = _normalize(cn, "CN node")
        ev = sum(d * f for d, f in vn.items())
        ec = sum(d * f for d, f in cn.items())
        return DegreeProfile(
            {d: d * f / ev for d, f in vn.items()},
            {d: d * f / ec for d, f in cn.items()},
        )

    @property
    def inv_avg_vn_degree(self) -> float:
        return sum(f / d for d, f in self.vn_edge_fractions.items())

    @property
    def inv_avg_cn_degree(self) -> float:
        return sum(f / d for d, f in self.cn_edge_fractions.items())

    def rate(self) -> float:
        """Coding rate: ratio of the inverse average node degrees."""
        return self.inv_avg_vn_degree / self.inv_avg_cn_degree

    @property
    def max_vn_degree(self) -> int:
        return max(self.vn_edge_fractions)

    @property
    def max_cn_degree(self) -> int:
        return max(self.cn_edge_fractions)


class MultiplierDistribution:
    """Per-CN-degree probabilities over the nonzero multiplier values.

    Internally one vector of element probabilities (index = element - 1) per
    CN degree.  Rows built from type probabilities split each type's mass
    uniformly over its members.
    """

    def __init__(self, ring: RingParams, rows: dict[int, np.ndarray]):
        self.ring = ring
        self.rows = {}
        for dc, probs in rows.items():
            v = np.asarray(probs, dtype=float)
            if v.shape != (ring.q - 1,):
                raise ProfileError(
                    f"multiplier row for d_c={dc} has length {v.shape}, want {ring.q - 1}"
                )
            if v.min() < 0:
                raise ProfileError(f"negative multiplier probability at d_c={dc}")
            s = v.sum()
            if abs(s - 1.0) > _SUM_SLACK:
                raise ProfileError(f"multiplier row for d_c={dc} sums to {s:.6f}")
            self.rows[int(dc)] = v if abs(s - 1.0) < 1e-12 else v / s

    @staticmethod
    def from_type_rows(
        ring: RingParams, type_rows: dict[int, "np.ndarray | list[float]"]
    ) -> "MultiplierDistribution":
        rows = {}
        for dc, tp in type_rows.items():
            tp = np.asarray(tp, dtype=float)
            if tp.shape != (ring.num_types,):
                raise ProfileError(
                    f"type row for d_c={dc} has {tp.shape[0]} entries, "
                    f"want {ring.num_types}"
                )
            v = np.zeros(ring.q - 1)
            for et, mass in zip(ring.types, tp):
                for el in et.members:
                    v[el - 1] = mass / et.size
            rows[dc] = v
        return MultiplierDistribution(ring, rows)

    @staticmethod
    def from_elements(
        ring: RingParams, element_probs, degrees
    ) -> "MultiplierDistribution":
        return MultiplierDistribution(
            ring, {dc: np.asarray(element_probs, dtype=float) for dc in degrees}
        )

    def element_probs(self, dc: int) -> np.ndarray:
        if dc not in self.rows:
            raise ProfileError(f"no multiplier row for CN degree {dc}")
        return self.rows[dc]

    def type_probs(self, dc: int) -> np.ndarray:
        """Row aggregated to per-type masses (type 0 = regular)."""
        v = self.element_probs(dc)
        out = np.zeros(self.ring.num_types)
        for et in self.ring.types:
            out[et.index] = sum(v[el - 1] for el in et.members)
        return out

    @property
    def degrees(self):
        return sorted(self.rows)


@dataclass(frozen=True)
class CodeProfile:
    ring: RingParams
    degrees: DegreeProfile
    multipliers: MultiplierDistribution
    label: str = ""

    def __post_init__(self):
        missing = [
            d for d in self.degrees.cn_edge_fractions if d not in self.multipliers.rows
        ]
        if missing:
            raise ProfileError(f"multiplier rows missing for CN degrees {missing}")
        r = self.degrees.rate()
        if not 0.0 < r < 1.0:
            raise ProfileError(f"coding rate {r:.4f} outside (0, 1)")

    @property
    def q(self) -> int:
        return self.ring.q

    def rate(self) -> float:
        return self.degrees.rate()

    def spectral_efficiency(self) -> float:
        """Information bits per PAM symbol: rate times log2(q)."""
        return self.rate() * self.ring.m


def _parse_fraction_map(raw: dict, what: str) -> dict[int, float]:
    try:
        return {int(k): float(v) for k, v in raw.items()}
    except (TypeError, ValueError) as e:
        raise ProfileError(f"malformed {what} fractions: {e}") from e


def profile_from_dict(doc: dict) -> CodeProfile:
    if doc.get("format") != FORMAT_TAG:
        raise ProfileError(f"unrecognized profile format {doc.get('format')!r}")
    ring = ring_for_q(int(doc["q"]))
    vn = _parse_fraction_map(doc["vn_degree_fractions"], "VN")
    cn = _parse_fraction_map(doc["cn_degree_fractions"], "CN")
    perspective = doc.get("perspective", "edge")
    if perspective == "node":
        degrees = DegreeProfile.from_node_fractions(vn, cn)
    elif perspective == "edge":
        degrees = DegreeProfile(vn, cn)
    else:
        raise ProfileError(f"unknown perspective {perspective!r}")

    mult = doc["multipliers"]
    if "per_degree_types" in mult:
        type_rows = {
            int(d): [float(x) for x in row]
            for d, row in mult["per_degree_types"].items()
        }
        md = MultiplierDistribution.from_type_rows(ring, type_rows)
    elif "per_degree_elements" in mult:
        md = MultiplierDistribution(
            ring,
            {
                int(d): np.array([float(x) for x in row])
                for d, row in mult["per_degree_elements"].items()
            },
        )
    elif "elements" in mult:
        md = MultiplierDistribution.from_elements(
            ring,
            [float(x) for x in mult["elements"]],
            degrees.cn_edge_fractions.keys(),
        )
    else:
        raise ProfileError(
            "multipliers need 'per_degree_types', 'per_degree_elements' or 'elements'"
        )
    return CodeProfile(ring, degrees, md, label=doc.get("label", ""))


def profile_to_dict(profile: CodeProfile) -> dict:
    return {
        "format": FORMAT_TAG,
        "label": profile.label,
        "q": profile.q,
        "perspective": "edge",
        "vn_degree_fractions": {
            str(d): repr(float(f)) for d, f in profile.degrees.vn_edge_fractions.items()
        },
        "cn_degree_fractions": {
            str(d): repr(float(f)) for d, f in profile.degrees.cn_edge_fractions.items()
        },
        "multipliers": {
            "per_degree_elements": {
                str(d): [repr(float(x)) for x in profile.multipliers.rows[d]]
                for d in profile.multipliers.degrees
            }
        },
    }


def load_profile(path) -> CodeProfile:
    try:
        with open(path) as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise ProfileError(f"malformed profile file {path}: {e}") from e
    return profile_from_dict(doc)


def save_profile(profile: CodeProfile, path) -> None:
    with open(path, "w") as f:
        json.dump(profile_to_dict(profile), f, indent=2)
        f.write("\n")


def bundled_profile_names() -> list[str]:
    files = resources.files("ringra").joinpath("data")
    return sorted(p.name[: -len(".json")] for p in files.iterdir() if p.name.endswith(".json"))


def bundled_profile(name: str) -> CodeProfile:
    files = resources.files("ringra").joinpath("data")
    path = files.joinpath(f"{name}.json")
    if not path.is_file():
        raise ProfileError(
            f"no bundled profile {name!r}; available: {bundled_profile_names()}"
        )
    return profile_from_dict(json.loads(path.read_text()))
