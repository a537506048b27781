"""Per-step observables and monitors for the a priori Wiener-norm estimates."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from . import spectral as sp
from .errors import InvalidInputError
from .params import ModelParams

__all__ = [
    "DiagnosticsRecord",
    "record",
    "annotate_balance",
    "MonitorReport",
    "dissipation_monitor",
    "export",
    "write_csv",
    "read_csv",
    "mean_closed_form",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("t", "a1", "a1_hom", "a4_hom", "mean_re", "mean_im", "smallness_margin",
               "dissipation_balance")


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Norms of one state.

    ``a1 = |g(0)| + ||g||_{A1 hom}``; ``dissipation_balance`` stays NaN until
    :func:`annotate_balance` fills it from neighbouring records.
    """

    t: float
    a1: float
    a1_hom: float
    a4_hom: float
    mean: complex
    smallness_margin: float
    dissipation_balance: float = math.nan

    def row(self):
        return (self.t, self.a1, self.a1_hom, self.a4_hom, self.mean.real, self.mean.imag,
                self.smallness_margin, self.dissipation_balance)


def record(state) -> DiagnosticsRecord:
    """Diagnostics of a :class:`~.stepper.SimState` (or anything with ``.g`` and ``.t``)."""
    g = state.g
    a1h = sp.wiener_norm(g, 1, homogeneous=True)
    return DiagnosticsRecord(
        t=float(state.t),
        a1=abs(g.coefficient(0)) + a1h,
        a1_hom=a1h,
        a4_hom=sp.wiener_norm(g, 4, homogeneous=True),
        mean=complex(g.coefficient(0)),
        smallness_margin=1.0 - 2.0 * a1h,
    )


def _time_derivative(t, y):
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - y[:-2]) / (t[2:] - t[:-2])
    d[0] = (y[1] - y[0]) / (t[1] - t[0])
    d[-1] = (y[-1] - y[-2]) / (t[-1] - t[-2])
    return d


def annotate_balance(records, p: ModelParams, c: float = 0.5):
    """Fill ``dissipation_balance = d/dt a1_hom + c eta a4_hom - e^{-N t}(a1_hom + 1)``.

    ``N`` is ``min(n1, n2)``.  Centered differences inside, one-sided at the ends.
    """
    records = list(records)
    if len(records) < 2:
        return records
    t = [r.t for r in records]
    d = _time_derivative(t, [r.a1_hom for r in records])
    nn = min(p.n1, p.n2)
    return [replace(r, dissipation_balance=float(d[i] + c * p.eta * r.a4_hom
                                                 - math.exp(-nn * r.t) * (r.a1_hom + 1)))
            for i, r in enumerate(records)]


@dataclass(frozen=True)
class MonitorReport:
    """Outcome of :func:`dissipation_monitor`.

    ``strict`` is True when no forcing is present and decay was asserted;
    ``violations`` lists step indices where ``a1_hom`` increased despite a
    positive smallness margin.  ``envelope_ratio`` holds
    ``(d/dt a1_hom + c eta a4_hom) / (e^{-N t} (a1_hom + 1))`` per record.
    """

    strict: bool
    passed: bool
    violations: tuple
    envelope_ratio: tuple
    max_envelope_ratio: float


def dissipation_monitor(trajectory, p: ModelParams, c: float = 0.5,
                        rtol: float = 1e-13) -> MonitorReport:
    """Check monotone decay when unforced; report the forced envelope otherwise."""
    recs = list(trajectory)
    if len(recs) < 2:
        raise InvalidInputError("the monitor needs at least two records")
    strict = p.rho == 0 and p.theta == 0
    viol = []
    if strict:
        for i in range(len(recs) - 1):
            a, b = recs[i], recs[i + 1]
            if a.smallness_margin > 0 and b.smallness_margin > 0:
                if b.a1_hom > a.a1_hom * (1 + rtol) + 1e-300:
                    viol.append(i)
    d = _time_derivative([r.t for r in recs], [r.a1_hom for r in recs])
    nn = min(p.n1, p.n2)
    ratio = tuple(float((d[i] + c * p.eta * r.a4_hom) / (math.exp(-nn * r.t) * (r.a1_hom + 1)))
                  for i, r in enumerate(recs))
    return MonitorReport(strict, not viol, tuple(viol), ratio, max(ratio))


def mean_closed_form(mean0: float, p: ModelParams, t) -> np.ndarray:
    """Mean of ``g`` at ``eps = 0`` for exp-sine data with ``N1 = N2 = N``.

    Integrates ``-(rho/2) e^{-N s} (c_S - N3 c_B s - c_B)`` from 0 to ``t``.
    """
    t = np.asarray(t, dtype=float)
    nn = p.n
    e = np.exp(-nn * t)
    return mean0 - (p.rho / 2) * ((p.c_s - p.c_b) * (1 - e) / nn
                                  - p.n3 * p.c_b * (1 - e * (1 + nn * t)) / nn**2)


def _fmt(x: float) -> str:
    return "%.17g" % x


def export(records) -> list[str]:
    """CSV lines, header first; floats carry 17 significant digits."""
    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        lines.append(",".join(_fmt(v) for v in r.row()))
    return lines


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(export(records)) + "\n")


def read_csv(source) -> list[DiagnosticsRecord]:
    """Parse CSV text or a path written by :func:`write_csv`."""
    if isinstance(source, str) and "\n" in source:
        fh = io.StringIO(source)
    else:
        fh = open(source, newline="")
    with fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise InvalidInputError("unexpected diagnostics header")
    out = []
    for row in rows[1:]:
        if not row:
            continue
        v = [float(x) for x in row]
        out.append(DiagnosticsRecord(v[0], v[1], v[2], v[3], complex(v[4], v[5]), v[6], v[7]))
    return out
