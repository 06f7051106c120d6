"""CSV tables and JSON documents for catalogs, induced splittings and estimates.

Rationals are always written as numerator/denominator pairs.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Optional

from . import gog
from .covering import InducedSplitting
from .enumeration import SubgroupCatalog, is_torsion_free_kernel, quotient_sort_key
from .errors import UnsupportedConfigurationError
from .permgroup import perm_to_cycles
from .volumes import VolumeEstimate

ESTIMATE_COLUMNS = ("quotient_id", "index", "complexity_num", "complexity_den",
                    "ratio_num", "ratio_den", "residual_num", "residual_den")


def pair(x: Optional[Fraction]):
    if x is None:
        return None
    x = Fraction(x)
    return [x.numerator, x.denominator]


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _torsion_free(Y, q):
    if Y is None:
        return None
    try:
        return is_torsion_free_kernel(Y, q)
    except UnsupportedConfigurationError:
        return None


def catalog_records(c: SubgroupCatalog, Y=None) -> list[dict]:
    out = []
    for q in sorted(c.entries, key=quotient_sort_key):
        out.append({"quotient_id": q.id, "index": q.index,
                    "images": [perm_to_cycles(g) for g in q.images],
                    "torsion_free": _torsion_free(Y, q)})
    return out


def catalog_csv(c: SubgroupCatalog, Y=None) -> str:
    rows = [(r["quotient_id"], r["index"], " ; ".join(r["images"]),
             "" if r["torsion_free"] is None else str(r["torsion_free"]).lower())
            for r in catalog_records(c, Y)]
    return _csv(rows, ("quotient_id", "index", "images", "torsion_free"))


def catalog_doc(c: SubgroupCatalog, Y=None) -> str:
    return _json({"family": c.family, "max_index": c.max_index,
                  "entries": catalog_records(c, Y)})


def _descriptor_record(d) -> dict:
    rec = {"kind": d.kind, "label": str(d)}
    if isinstance(d, gog.Finite):
        rec["order"] = d.order
        rec["generators"] = [perm_to_cycles(g) for g in d.group.generators]
    elif isinstance(d, (gog.FreeRank, gog.FreeAbelianRank)):
        rec["rank"] = d.rank
    elif isinstance(d, gog.SurfaceGenus):
        rec["genus"] = d.genus
    elif isinstance(d, gog.Opaque):
        rec["rank_upper"] = d.rank_upper
        rec["phi"] = pair(d.phi)
        rec["one_ended"] = d.one_ended
    return rec


def induced_record(s: InducedSplitting) -> dict:
    return {
        "base": s.base.name,
        "quotient": s.quotient.id,
        "index": s.index,
        "phi_table": s.phi_table.name,
        "vertices": [{"id": v.id, "base_vertex": v.base_vertex,
                      "coset_rep": perm_to_cycles(v.coset_rep),
                      "stabilizer_index": v.stabilizer_index,
                      "stabilizer": _descriptor_record(v.descriptor),
                      "degenerate": v.degenerate, "phi": pair(v.phi)} for v in s.vertices],
        "edges": [{"id": e.id, "base_edge": e.base_edge,
                   "coset_rep": perm_to_cycles(e.coset_rep),
                   "stabilizer_index": e.stabilizer_index,
                   "source": e.source, "target": e.target} for e in s.edges],
        "rank": s.rank,
        "complexity": s.complexity,
        "weighted_complexity": pair(s.weighted_complexity()),
    }


def induced_doc(s: InducedSplitting) -> str:
    return _json(induced_record(s))


def induced_csv(s: InducedSplitting) -> str:
    rows = []
    for v in s.vertices:
        rows.append(("vertex", v.id, v.base_vertex, perm_to_cycles(v.coset_rep),
                     v.stabilizer_index, str(v.descriptor), str(v.degenerate).lower(),
                     v.phi.numerator, v.phi.denominator, "", ""))
    for e in s.edges:
        rows.append(("edge", e.id, e.base_edge, perm_to_cycles(e.coset_rep),
                     e.stabilizer_index, "", "", "", "", e.source, e.target))
    return _csv(rows, ("record", "id", "base", "coset_rep", "stabilizer_index", "stabilizer",
                       "degenerate", "phi_num", "phi_den", "source", "target"))


def estimate_rows(est: VolumeEstimate) -> list[tuple]:
    out = []
    for r in list(est.rows) + list(est.chain):
        res = r.residual
        out.append((r.quotient_id, r.index, r.complexity.numerator, r.complexity.denominator,
                    r.ratio.numerator, r.ratio.denominator,
                    "" if res is None else res.numerator,
                    "" if res is None else res.denominator))
    return out


def estimate_csv(est: VolumeEstimate) -> str:
    return _csv(estimate_rows(est), ESTIMATE_COLUMNS)


def _row_record(r) -> dict:
    return {"quotient_id": r.quotient_id, "index": r.index,
            "complexity": pair(r.complexity), "ratio": pair(r.ratio),
            "residual": pair(r.residual), "torsion_free": r.torsion_free}


def estimate_doc(est: VolumeEstimate) -> str:
    cf = est.closed_form
    return _json({
        "mode": est.mode,
        "phi_table": est.phi,
        "closed_form": None if cf is None else {"value": pair(cf.value), "formula": cf.formula},
        "rows": [_row_record(r) for r in est.rows],
        "chain": [_row_record(r) for r in est.chain],
        "estimate": pair(est.estimate),
        "chain_truncated": est.chain_truncated,
        "skipped": [{"quotient_id": q, "reason": why} for q, why in est.skipped],
    })
