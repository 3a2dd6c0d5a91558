"""Report records and deterministic serialisation.

The JSON body is reproducible byte-for-byte for identical inputs; wall-clock
information lives in a separate metadata block that callers may strip when
comparing runs.
"""

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

SCHEMA_VERSION = 1

__all__ = ["CheckResult", "ChargeReport", "report_json", "write_json",
           "SCHEMA_VERSION"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "passed": bool(self.passed),
                "value": _jsonable(self.value), "tolerance": self.tolerance,
                "detail": self.detail}

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: value={self.value:.6g} " \
               f"tol={self.tolerance:.3g} {self.detail}".rstrip()


@dataclass
class ChargeReport:
    scenario: str
    kind: str                      # "adm" | "null" | "bondi"
    charges: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    dec_min_margin: float = None
    pmt_margin: float = None
    decay_exponents: dict = field(default_factory=dict)
    checks: tuple = ()

    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "kind": self.kind,
            "charges": _jsonable(self.charges),
            "samples": _jsonable(self.samples),
            "residuals": _jsonable(self.residuals),
            "dec_min_margin": _jsonable(self.dec_min_margin),
            "pmt_margin": _jsonable(self.pmt_margin),
            "decay_exponents": _jsonable(self.decay_exponents),
            "checks": [c.as_dict() for c in self.checks],
            "passed": self.passed(),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and (np.isnan(x) or np.isinf(x)):
        return repr(x)
    return x


def report_json(body, include_metadata=True):
    """Serialise with sorted keys; metadata block holds the timestamp."""
    out = dict(body)
    if include_metadata:
        from . import __version__
        out["metadata"] = {
            "generated_at": datetime.now(timezone.utc).isoformat(),
            "tool_version": __version__,
        }
    return json.dumps(out, sort_keys=True, indent=2) + "\n"


def write_json(path, body, include_metadata=True):
    text = report_json(body, include_metadata)
    with open(path, "w") as f:
        f.write(text)
    return text
