"""Core interfaces and data structures for subdecode."""

from dataclasses import dataclass, field
from enum import Enum

from subdecode.core.exceptions import UnknownSchemeError


class Scheme(Enum):
    """Computation scheme run by the simulated cluster."""

    NOISELESS = "noiseless"
    UNCODED = "uncoded"
    REPLICATION_COMM = "replication_comm"
    REPLICATION_STORAGE = "replication_storage"
    CODED = "coded"
    APPROX_GRADIENT_CODING = "approx_gradient_coding"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        """Look up a scheme by its value, accepting a few short aliases."""
        key = name.strip().lower().replace("-", "_")
        key = _SCHEME_ALIASES.get(key, key)
        for scheme in cls:
            if scheme.value == key:
                return scheme
        raise UnknownSchemeError(name, "scheme", [s.value for s in cls])

    @property
    def is_baseline(self) -> bool:
        return self not in (Scheme.CODED, Scheme.NOISELESS)


_SCHEME_ALIASES = {
    "replication": "replication_comm",
    "agc": "approx_gradient_coding",
    "frc": "approx_gradient_coding",
}


class SplitScheme(Enum):
    """How the system matrix is partitioned across workers."""

    ROW = "row"
    COLUMN = "column"
    SUMMA = "summa"

    @classmethod
    def parse(cls, name: str) -> "SplitScheme":
        for split in cls:
            if split.value == name.strip().lower():
                return split
        raise UnknownSchemeError(name, "split", [s.value for s in cls])


class ErasureKind(Enum):
    """Erasure model kind."""

    FIXED_FRACTION = "fixed"
    BERNOULLI = "bernoulli"

    @classmethod
    def parse(cls, name: str) -> "ErasureKind":
        key = name.strip().lower()
        if key in ("fixed", "fixed_fraction", "fixedfraction"):
            return cls.FIXED_FRACTION
        if key == "bernoulli":
            return cls.BERNOULLI
        raise UnknownSchemeError(name, "erasure", ["fixed", "bernoulli"])


class ProblemKind(Enum):
    """Iterative problem family."""

    PAGERANK = "pagerank"
    EIGEN = "eigen"
    SVD = "svd"
    GD = "gd"

    @classmethod
    def parse(cls, name: str) -> "ProblemKind":
        for kind in cls:
            if kind.value == name.strip().lower():
                return kind
        raise UnknownSchemeError(name, "problem", [k.value for k in cls])


@dataclass(frozen=True)
class SchemeLabel:
    """A scheme together with an optional degree override, e.g. ``coded-d3``."""

    scheme: Scheme
    degree: int | None = None

    @classmethod
    def parse(cls, label: str) -> "SchemeLabel":
        text = label.strip().lower()
        head, sep, tail = text.rpartition("-d")
        if sep and tail.isdigit() and head:
            return cls(Scheme.parse(head), int(tail))
        return cls(Scheme.parse(text))

    def __str__(self) -> str:
        if self.degree is None:
            return self.scheme.value
        return f"{self.scheme.value}-d{self.degree}"


@dataclass
class MetricsRecord:
    """One iteration of a metrics trace."""

    iteration: int
    error: float
    comm_cost: float
    survivors: float
    delta: float
    error_std: float = 0.0
    restarted: bool = False


@dataclass
class MetricsTrace:
    """Per-iteration metrics of one run (or the average of several)."""

    scheme: str
    records: list[MetricsRecord] = field(default_factory=list)
    runs: int = 1

    def __len__(self) -> int:
        return len(self.records)

    @property
    def errors(self) -> list[float]:
        return [r.error for r in self.records]

    @property
    def deltas(self) -> list[float]:
        return [r.delta for r in self.records]

    @property
    def final(self) -> MetricsRecord:
        return self.records[-1]

    @property
    def restarts(self) -> int:
        return sum(1 for r in self.records if r.restarted)
