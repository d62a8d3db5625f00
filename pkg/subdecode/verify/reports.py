"""Verification reports."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Statistic:
    """A measured value and the bound it must respect."""

    name: str
    value: float
    threshold: float
    upper: bool = True

    @property
    def passed(self) -> bool:
        if self.upper:
            return self.value <= self.threshold
        return self.value >= self.threshold


@dataclass
class VerificationReport:
    """
    Outcome of one oracle check.

    ``passed`` is derived from the statistics only, so a report read back
    from its rows always agrees with the original.
    """

    check: str
    statistics: list[Statistic] = field(default_factory=list)
    samples: int = 0
    seed: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(stat.passed for stat in self.statistics)

    def add(self, name: str, value: float, threshold: float, upper: bool = True) -> None:
        self.statistics.append(Statistic(name, float(value), float(threshold), upper))

    def to_rows(self) -> list[list[str]]:
        """CSV rows ``check, statistic, value, threshold, pass``."""
        return [
            [self.check, stat.name, repr(stat.value), repr(stat.threshold), str(stat.passed).lower()]
            for stat in self.statistics
        ]

    def render_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{self.check}: {status} ({self.samples} samples, seed {self.seed})"]
        for stat in self.statistics:
            relation = "<=" if stat.upper else ">="
            mark = "ok" if stat.passed else "violated"
            lines.append(
                f"  {stat.name} = {stat.value:.6g} {relation} {stat.threshold:.6g}  [{mark}]"
            )
        lines.extend(f"  warning: {warning}" for warning in self.warnings)
        return "\n".join(lines)


REPORT_HEADER = ["check", "statistic", "value", "threshold", "pass"]
