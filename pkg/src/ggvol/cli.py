"""Command line entry point: ``ggvol <command> ...``."""
from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import covering, docformat, gog, reports, volumes
from .constructions import builtin
from .enumeration import (DEFAULT_NODE_CAP, DEFAULT_PRODUCT_CAP, SubgroupCatalog,
                          cyclic_quotients, normal_subgroups, quotient_sort_key)
from .errors import (ConfigurationError, GGVolError, Inapplicable, PreconditionError,
                     ResourceError)
from .gog import GraphOfGroups

COMMANDS = ("complexity", "reduce", "subgroups", "induce", "volume", "verify")


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    builtin: Optional[str] = None
    params: list = field(default_factory=list)
    max_index: int = 6
    family: str = "normal"
    phi: str = "vfin"
    mode: str = "plain"
    quotient: Optional[str] = None
    out: Optional[str] = None
    format: str = "csv"
    figure: Optional[str] = None
    node_cap: int = DEFAULT_NODE_CAP
    product_cap: int = DEFAULT_PRODUCT_CAP
    random: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.max_index < 1:
            raise ConfigurationError("--max-index must be at least 1")
        if self.node_cap < 1 or self.product_cap < 1:
            raise ConfigurationError("caps must be positive")
        if (self.input is None) == (self.builtin is None):
            raise ConfigurationError("give exactly one of --input or --builtin")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ggvol", description=(
        "Complexity of graph-of-groups splittings and volume estimates "
        "over finite-index normal subgroups."))
    ap.add_argument("command", choices=COMMANDS)
    src = ap.add_argument_group("input")
    src.add_argument("--input", metavar="FILE", help="TOML splitting document")
    src.add_argument("--builtin", metavar="NAME", help="built-in splitting, e.g. modular, wedge")
    src.add_argument("--params", nargs="*", default=[], help="parameters of the built-in")
    ap.add_argument("--max-index", type=int, default=6, help="largest quotient order (default 6)")
    ap.add_argument("--family", choices=("normal", "cyclic"), default="normal",
                    help="normal subgroups up to the index, or kernels of maps onto Z/k")
    ap.add_argument("--phi", default="vfin", help="phi table: vfin or zero (default vfin)")
    ap.add_argument("--mode", choices=("plain", "weighted"), default="plain")
    ap.add_argument("--quotient", metavar="ID", help="quotient id for induce (e.g. N6.1)")
    ap.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    ap.add_argument("--format", choices=("csv", "doc"), default="csv")
    ap.add_argument("--figure", metavar="PNG", help="volume: figure path (default: next to --out)")
    ap.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
    ap.add_argument("--product-cap", type=int, default=DEFAULT_PRODUCT_CAP)
    ap.add_argument("--random", type=int, default=0, metavar="N",
                    help="verify: also check N random splittings with random quotients")
    ap.add_argument("--seed", type=int, default=0)
    return ap


def load_splitting(cfg: RunConfig) -> GraphOfGroups:
    if cfg.input is not None:
        return docformat.load(cfg.input)[1]
    return builtin(cfg.builtin, cfg.params)[1]


def load_catalog(cfg: RunConfig, Y: GraphOfGroups) -> SubgroupCatalog:
    if cfg.family == "cyclic":
        return cyclic_quotients(Y.ambient, cfg.max_index)
    return normal_subgroups(Y.ambient, cfg.max_index, cfg.node_cap)


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_complexity(cfg: RunConfig) -> int:
    Y = load_splitting(cfg)
    phi = gog.phi_table(cfg.phi)
    C = gog.complexity(Y)
    Cphi = gog.weighted_complexity(Y, phi)
    if cfg.format == "doc":
        text = reports._json({"name": Y.name, "rank": gog.graph_rank(Y),
                              "nondegenerate": [v.id for v in gog.nondegenerate_vertices(Y)],
                              "elliptic": gog.is_elliptic(Y), "complexity": C,
                              "phi_table": phi.name, "weighted_complexity": reports.pair(Cphi)})
    else:
        text = reports._csv([(Y.name, gog.graph_rank(Y), C, Cphi.numerator, Cphi.denominator)],
                            ("name", "rank", "complexity", "weighted_num", "weighted_den"))
    _emit(cfg, text)
    return 0


def cmd_reduce(cfg: RunConfig) -> int:
    Y = load_splitting(cfg)
    R, trace = gog.reduce_with_trace(Y)
    lines = [f"# collapse {s.edge}: {s.absorbed} into {s.into}, "
             f"complexity {s.complexity_before} -> {s.complexity_after}" for s in trace]
    if not trace:
        lines = ["# already reduced"]
    _emit(cfg, "\n".join(lines) + "\n" + docformat.dumps(R))
    return 0


def cmd_subgroups(cfg: RunConfig) -> int:
    Y = load_splitting(cfg)
    c = load_catalog(cfg, Y)
    _emit(cfg, reports.catalog_doc(c, Y) if cfg.format == "doc" else reports.catalog_csv(c, Y))
    return 0


def cmd_induce(cfg: RunConfig) -> int:
    Y = load_splitting(cfg)
    if not cfg.quotient:
        raise ConfigurationError("induce needs --quotient ID (see the subgroups command)")
    c = load_catalog(cfg, Y)
    s = covering.induce(Y, c.get(cfg.quotient), gog.phi_table(cfg.phi))
    _emit(cfg, reports.induced_doc(s) if cfg.format == "doc" else reports.induced_csv(s))
    return 0


def cmd_volume(cfg: RunConfig) -> int:
    Y = load_splitting(cfg)
    c = load_catalog(cfg, Y)
    phi = gog.phi_table(cfg.phi) if cfg.mode == "weighted" else gog.ZERO_PHI
    est = volumes.estimate_volume(Y, c, cfg.mode, phi, product_cap=cfg.product_cap)
    _emit(cfg, reports.estimate_doc(est) if cfg.format == "doc" else reports.estimate_csv(est))
    figure = cfg.figure
    if figure is None and cfg.out:
        figure = cfg.out.rsplit(".", 1)[0] + ".png"
    if figure:
        from .plotting import plot_estimate
        plot_estimate(est, figure, title=f"{Y.name or 'splitting'}: {cfg.mode} ratios")
    if est.chain_truncated:
        print(f"note: {est.chain_truncated}", file=sys.stderr)
    for qid, why in est.skipped:
        print(f"note: skipped {qid}: {why}", file=sys.stderr)
    return 0


class Verifier:
    """Collects pass/fail/skip outcomes of named checks."""

    def __init__(self, out=sys.stdout):
        self.out = out
        self.failed = 0
        self.counts: dict[str, list[int]] = {}

    def run(self, name: str, fn: Callable[[], object], label: str = "") -> None:
        tally = self.counts.setdefault(name, [0, 0, 0])
        try:
            res = fn()
        except (Inapplicable, PreconditionError):
            tally[2] += 1
            return
        ok = res.satisfied if isinstance(res, volumes.CheckResult) else bool(res)
        if ok:
            tally[0] += 1
        else:
            tally[1] += 1
            self.failed += 1
            detail = ""
            if isinstance(res, volumes.CheckResult):
                detail = f" ({res.lhs} vs {res.rhs}; {res.detail})"
            print(f"FAIL {name} [{label}]{detail}", file=self.out)

    def summary(self) -> None:
        for name, (p, f, s) in self.counts.items():
            status = "FAIL" if f else ("PASS" if p else "SKIP")
            print(f"{status} {name}: {p} passed, {f} failed, {s} inapplicable", file=self.out)


def verify_splitting(v: Verifier, Y: GraphOfGroups, quotients, label: str,
                     phi: gog.PhiTable = gog.VFIN_PHI) -> None:
    """Every applicable check on Y against each quotient."""
    R = gog.reduce(Y)
    v.run("weidmann rank bound", lambda: volumes.check_weidmann(Y), label)
    for q in quotients:
        lab = f"{label} / {q.id}"
        s = covering.induce(Y, q, phi)
        v.run("coset counts", lambda: covering.coset_count_check(s), lab)
        v.run("degeneracy uniform on orbits", lambda: covering.degeneracy_count_check(s), lab)
        v.run("euler identity for torsion-free kernels",
              lambda: covering.euler_consistency_check(s), lab)
        v.run("edge terms non-negative", lambda: covering.edge_terms_check(R, q), lab)
        v.run("acylindrical accessibility", lambda: volumes.check_acyl_accessibility(s), lab)
        v.run("vertex rank sum", lambda: volumes.check_rank_sum_bound(s), lab)
        v.run("closed-form multiplicativity", lambda: volumes.check_multiplicativity(Y, q), lab)
    if Y.acylindricity_k is not None and gog.is_reduced(Y):
        for vert in Y.vertices:
            if phi.of_vertex(vert) > 0:
                cat = SubgroupCatalog(tuple(quotients), max(q.index for q in quotients))
                v.run("weighted lower bound",
                      lambda: volumes.weighted_lower_bound_check(Y, cat, phi, vert.id), label)

    def vfinm():
        m = volumes.max_finite_edge_order(Y)
        cat = SubgroupCatalog(tuple(quotients), max(q.index for q in quotients))
        est = volumes.estimate_volume(Y, cat, "plain", chain=False)
        return volumes.check_vfinm_bound(est, m, volumes.generator_upper_bound(Y))

    v.run("finite-edge volume bound", vfinm, label)


def cmd_verify(cfg: RunConfig) -> int:
    Y = load_splitting(cfg)
    c = load_catalog(cfg, Y)
    v = Verifier()
    quotients = sorted(c.entries, key=quotient_sort_key)
    verify_splitting(v, Y, quotients, Y.name or "input", gog.phi_table(cfg.phi))
    if cfg.random:
        from .randomcorpus import random_quotient, random_splitting
        rng = random.Random(cfg.seed)
        for i in range(cfg.random):
            Z = random_splitting(rng)
            q = random_quotient(rng, Z)
            verify_splitting(v, Z, [q], f"random #{i} {Z.name}", gog.phi_table(cfg.phi))
    v.summary()
    return 1 if v.failed else 0


HANDLERS = {"complexity": cmd_complexity, "reduce": cmd_reduce, "subgroups": cmd_subgroups,
            "induce": cmd_induce, "volume": cmd_volume, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.input, args.builtin, args.params, args.max_index,
                        args.family, args.phi, args.mode, args.quotient, args.out, args.format,
                        args.figure, args.node_cap, args.product_cap, args.random, args.seed)
        return HANDLERS[cfg.command](cfg)
    except ResourceError as exc:
        print(f"error: {exc} (cap {exc.cap_name}={exc.cap_value})", file=sys.stderr)
        return 3
    except GGVolError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
