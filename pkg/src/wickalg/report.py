"""Check reports and deterministic text formatting shared across modules."""

from __future__ import annotations

from dataclasses import dataclass


def fmt_float(x: float) -> str:
    """Shortest round-trip decimal form; stable across runs and platforms."""
    return repr(float(x))


def fmt_complex(z: complex) -> str:
    """Render a complex scalar as ``re``, ``imj``, or ``re+imj``."""
    z = complex(z)
    if z.imag == 0.0:
        return fmt_float(z.real)
    if z.real == 0.0:
        return fmt_float(z.imag) + "j"
    sign = "+" if z.imag >= 0 else "-"
    return f"{fmt_float(z.real)}{sign}{fmt_float(abs(z.imag))}j"


def fmt_matrix(rows) -> str:
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return "[]"
    return "[[" + "], [".join(", ".join(fmt_complex(v) for v in row) for row in rows) + "]]"


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification: the worst residual plus a first witness.

    ``skipped`` counts tuples that could not be checked because a product
    left a truncated basis slice; those are truncation artifacts, not
    failures.
    """

    name: str
    passed: bool
    residual: float = 0.0
    witness: str | None = None
    skipped: int = 0

    def __bool__(self) -> bool:
        return self.passed

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        witness = self.witness if self.witness is not None else "-"
        out = f"CHECK {self.name} {verdict} residual={fmt_float(self.residual)} witness={witness}"
        if self.skipped:
            out += f" skipped={self.skipped}"
        return out
