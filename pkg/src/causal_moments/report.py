"""Estimate reports: one record per requested quantity, JSON and text renderings."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

REPORT_KEYS = ("quantity", "arms", "order", "estimate", "ci", "flags", "config")


def _tupled(value):
    if isinstance(value, list):
        return tuple(_tupled(v) for v in value)
    return value


def _listed(value):
    if isinstance(value, tuple):
        return [_listed(v) for v in value]
    return value


@dataclass(frozen=True)
class EstimateReport:
    """Result for one quantity.

    ``estimate`` is a number for point quantities and
    ``{"lower", "upper", "sharp"}`` for bounds; it is None when ``error`` is set.
    ``arms`` is ``(i, j)`` or ``((i, j), (k, h))`` for two-contrast quantities.
    """

    quantity: str
    arms: Tuple
    order: Optional[int]
    estimate: Union[float, Dict[str, Any], None]
    ci: Optional[Dict[str, Any]] = None
    flags: Tuple[str, ...] = ()
    config: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        out = {
            "quantity": self.quantity,
            "arms": _listed(self.arms),
            "order": self.order,
            "estimate": self.estimate,
            "ci": self.ci,
            "flags": list(self.flags),
            "config": self.config,
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EstimateReport":
        missing = [k for k in REPORT_KEYS if k not in data]
        if missing:
            raise ValueError(f"report is missing keys {missing}")
        return cls(data["quantity"], _tupled(data["arms"]), data["order"], data["estimate"], data["ci"],
                   tuple(data["flags"]), data["config"], data.get("error"))


def dumps(document: Any) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=True) + "\n"


def emit_json(reports: Sequence[EstimateReport], manifest: Optional[dict] = None) -> str:
    return dumps({"manifest": manifest or {}, "reports": [r.to_dict() for r in reports]})


def parse_json(text: str) -> List[EstimateReport]:
    return [EstimateReport.from_dict(d) for d in json.loads(text)["reports"]]


def _fmt(value) -> str:
    if value is None:
        return "-"
    return f"{value:.4f}"


def _arms_text(arms) -> str:
    if arms and isinstance(arms[0], (tuple, list)):
        return ";".join(",".join(str(a) for a in pair) for pair in arms)
    return ",".join(str(a) for a in arms)


def format_table(reports: Sequence[EstimateReport]) -> str:
    """Fixed-width text table, one line per report."""
    rows = [("quantity", "arms", "order", "estimate", "ci", "flags")]
    for r in reports:
        if r.error is not None:
            est = f"ERROR: {r.error}"
        elif isinstance(r.estimate, dict):
            est = f"[{_fmt(r.estimate['lower'])}, {_fmt(r.estimate['upper'])}]"
            if r.estimate.get("sharp", "none") != "none":
                est += f" sharp={r.estimate['sharp']}"
        else:
            est = _fmt(r.estimate)
        ci = "-" if r.ci is None else f"[{_fmt(r.ci['lower'])}, {_fmt(r.ci['upper'])}] @{r.ci['level']:g}"
        rows.append((r.quantity, _arms_text(r.arms), "-" if r.order is None else str(r.order), est, ci,
                     ",".join(r.flags) or "-"))
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"
