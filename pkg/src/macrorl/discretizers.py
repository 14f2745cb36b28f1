"""Tabular state encodings over the continuous macro state.

Four schemes are provided, differing in which variables they use and
how finely they cut them. Values are clamped to the scheme's range, so
encoding is total; each dimension is split into uniform bins with the
upper edge folded into the last bin, and bin indices combine in
row-major order over the scheme's declared variable order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .environment import MacroState

# Default per-variable ranges; they bracket the 1955-2025 historical
# extremes with margin.
DEFAULT_RANGES = {
    "inflation": (-2.0, 12.0),
    "unemployment": (2.0, 12.0),
    "output_gap": (-8.0, 8.0),
    "rate": (0.0, 15.0),
}

_FIELD_POSITION = {name: i for i, name in enumerate(MacroState._fields)}


@dataclass(frozen=True)
class DimensionBinning:
    """Uniform binning of one state variable."""

    variable: str
    lower: float
    upper: float
    bins: int

    def __post_init__(self):
        if self.variable not in _FIELD_POSITION:
            raise ValueError(f"unknown state variable {self.variable!r}")
        if self.bins < 1:
            raise ValueError("bin count must be at least 1")
        if not self.upper > self.lower:
            raise ValueError("upper bound must exceed lower bound")

    @property
    def position(self) -> int:
        return _FIELD_POSITION[self.variable]

    @property
    def width(self) -> float:
        return (self.upper - self.lower) / self.bins


@dataclass(frozen=True)
class DiscretizerSpec:
    scheme: str
    dims: tuple[DimensionBinning, ...]

    @property
    def total_states(self) -> int:
        n = 1
        for dim in self.dims:
            n *= dim.bins
        return n

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "dims": [
                {"variable": d.variable, "lower": d.lower, "upper": d.upper, "bins": d.bins}
                for d in self.dims
            ],
        }

    @staticmethod
    def from_dict(data: dict) -> "DiscretizerSpec":
        return DiscretizerSpec(
            scheme=data["scheme"],
            dims=tuple(
                DimensionBinning(d["variable"], d["lower"], d["upper"], d["bins"])
                for d in data["dims"]
            ),
        )


def _scheme(name: str, counts: dict[str, int]) -> DiscretizerSpec:
    dims = tuple(
        DimensionBinning(var, *DEFAULT_RANGES[var], bins)
        for var, bins in counts.items()
    )
    return DiscretizerSpec(scheme=name, dims=dims)


def make_discretizer(name: str) -> DiscretizerSpec:
    """Build one of the named schemes with the default ranges."""
    if name == "legacy":
        # 6*6*7*6 = 1512 states; the 7 goes to the output gap.
        return _scheme("legacy", {"inflation": 6, "unemployment": 6, "output_gap": 7, "rate": 6})
    if name == "coarse":
        # 4^4 = 256 states.
        return _scheme("coarse", {"inflation": 4, "unemployment": 4, "output_gap": 4, "rate": 4})
    if name == "reduced":
        # Inflation and rate only, 8*8 = 64 states.
        return _scheme("reduced", {"inflation": 8, "rate": 8})
    if name == "tuned":
        # 64 states over the three non-instrument variables.
        return _scheme("tuned", {"inflation": 4, "unemployment": 4, "output_gap": 4})
    raise ValueError(f"unknown discretizer scheme {name!r}")


SCHEME_NAMES = ("legacy", "coarse", "reduced", "tuned")


def encode(spec: DiscretizerSpec, state: MacroState) -> int:
    """Map a state to its cell index in [0, total_states)."""
    index = 0
    for dim in spec.dims:
        v = state[dim.position]
        if v < dim.lower:
            v = dim.lower
        elif v > dim.upper:
            v = dim.upper
        b = int((v - dim.lower) * dim.bins / (dim.upper - dim.lower))
        if b == dim.bins:
            b = dim.bins - 1
        index = index * dim.bins + b
    return index


def bin_center(spec: DiscretizerSpec, state_index: int) -> dict[str, float]:
    """Midpoints of the cell's bins, keyed by variable name.

    Only the variables the scheme uses appear; encode(bin_center(s)) == s
    for every valid index.
    """
    if not 0 <= state_index < spec.total_states:
        raise ValueError(
            f"state index {state_index} out of range [0, {spec.total_states})"
        )
    centers: dict[str, float] = {}
    remainder = state_index
    for dim in reversed(spec.dims):
        b = remainder % dim.bins
        remainder //= dim.bins
        centers[dim.variable] = dim.lower + (b + 0.5) * dim.width
    return centers


def center_state(spec: DiscretizerSpec, state_index: int) -> MacroState:
    """A full MacroState at the cell's center, zero for unused variables."""
    centers = bin_center(spec, state_index)
    return MacroState(
        inflation=centers.get("inflation", 0.0),
        unemployment=centers.get("unemployment", 0.0),
        output_gap=centers.get("output_gap", 0.0),
        rate=centers.get("rate", 0.0),
    )
