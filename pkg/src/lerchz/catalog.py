"""Zero catalogs and trajectories on disk.

Catalog JSON, schema version 1::

    {
      "schema": 1,
      "metadata": {"params": {"lambda": .., "alpha": ..}, "kind": "L",
                   "box": [sigma_min, sigma_max, t_min, t_max],
                   "policy": {...}, "version": "..", "timestamp": "..",
                   "config": {...}},
      "records": [{"location": {"re": .., "im": ..}, "kind": "L",
                   "residual": .., "multiplicity": 1,
                   "provenance": [sigma_min, sigma_max, t_min, t_max],
                   "refine_iters": 3, "warning": null}, ...]
    }

Floats are written with Python's shortest round-trip repr, so a
write-read-write cycle reproduces the file byte for byte.  Records are kept
sorted by t, then sigma.  Writes go to a temporary file that is renamed into
place, so readers never see a partial file.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field

from .errors import DomainError
from .zeros import RectBox, ZeroRecord

SCHEMA_VERSION = 1
CSV_COLUMNS = ("beta", "gamma", "kind", "residual", "multiplicity", "refine_iters",
               "box_sigma_min", "box_sigma_max", "box_t_min", "box_t_max", "warning")


def cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def uncplx(d) -> complex:
    return complex(float(d["re"]), float(d["im"]))


@dataclass
class Catalog:
    metadata: dict
    records: list = field(default_factory=list)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: (r.location.imag, r.location.real))


def record_to_dict(r: ZeroRecord) -> dict:
    return {"location": cplx(r.location), "kind": r.kind, "residual": float(r.residual),
            "multiplicity": int(r.multiplicity), "provenance": list(r.provenance.as_tuple()),
            "refine_iters": int(r.refine_iters), "warning": r.warning}


def record_from_dict(d: dict, lam=1.0, alpha=1.0) -> ZeroRecord:
    return ZeroRecord(uncplx(d["location"]), d["kind"], float(d["residual"]),
                      int(d["multiplicity"]), RectBox(*[float(v) for v in d["provenance"]]),
                      int(d["refine_iters"]), lam, alpha, d.get("warning"))


def dumps(cat: Catalog) -> str:
    obj = {"schema": SCHEMA_VERSION, "metadata": cat.metadata,
           "records": [record_to_dict(r) for r in cat.records]}
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def loads(text: str) -> Catalog:
    obj = json.loads(text)
    if obj.get("schema") != SCHEMA_VERSION:
        raise DomainError(f"unsupported catalog schema {obj.get('schema')!r}")
    meta = obj["metadata"]
    p = meta.get("params", {})
    lam, alpha = p.get("lambda", 1.0), p.get("alpha", 1.0)
    return Catalog(meta, [record_from_dict(d, lam, alpha) for d in obj["records"]])


def atomic_write(path, text: str):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".lerchz-", suffix=".tmp", dir=folder)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_catalog(cat: Catalog, path, fmt: str = "json"):
    if fmt == "json":
        atomic_write(path, dumps(cat))
    elif fmt == "csv":
        atomic_write(path, to_csv(cat))
    else:
        raise DomainError(f"unknown format {fmt!r}")


def read_catalog(path) -> Catalog:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def to_csv(cat: Catalog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in cat.records:
        b = r.provenance
        w.writerow([repr(r.location.real), repr(r.location.imag), r.kind, repr(float(r.residual)),
                    r.multiplicity, r.refine_iters, repr(b.sigma_min), repr(b.sigma_max),
                    repr(b.t_min), repr(b.t_max), r.warning or ""])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

def trajectory_dict(traj, metadata: dict, crossings=()) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "metadata": metadata,
        "kind": traj.kind,
        "direction": traj.direction,
        "status": "TRUNCATED" if traj.truncated else "COMPLETE",
        "diagnostic": traj.diagnostic,
        "samples": [{"lambda": float(lam), "position": cplx(s), "residual": float(res)}
                    for lam, s, res in traj.samples],
        "crossings": [{"lambda": float(lam), "position": cplx(s)} for lam, s in crossings],
        "branch_points": [{"lambda_before": float(a), "lambda_after": float(b)}
                          for a, b in getattr(traj, "branch_points", [])],
    }


def write_trajectory(traj, path, metadata: dict, crossings=()):
    text = json.dumps(trajectory_dict(traj, metadata, crossings), indent=2, sort_keys=True,
                      allow_nan=False) + "\n"
    atomic_write(path, text)


def plot_csv(traj, crossings=()) -> str:
    """Columns lambda, sigma, t, event; crossings, bridged branch points and
    truncation appear as event rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("lambda", "sigma", "t", "event"))
    for lam, s, _ in traj.samples:
        w.writerow((repr(float(lam)), repr(s.real), repr(s.imag), ""))
    for lam, s in crossings:
        w.writerow((repr(float(lam)), repr(s.real), repr(s.imag), "crossing"))
    by_lam = {float(x[0]): x[1] for x in traj.samples}
    for _, after in getattr(traj, "branch_points", []):
        s = by_lam[float(after)]
        w.writerow((repr(float(after)), repr(s.real), repr(s.imag), "branch"))
    if traj.truncated:
        lam, s, _ = traj.samples[-1]
        w.writerow((repr(float(lam)), repr(s.real), repr(s.imag), "TRUNCATED"))
    return buf.getvalue()
