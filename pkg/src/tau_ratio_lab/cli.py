"""Command-line surface.

Subcommands: constants, kappa-table, verify, phi-sum, identity, oracle,
smooth.  Exit codes: 0 all assertions pass, 2 an assertion failed,
1 usage/config error.  Output is byte-identical for identical config
(elapsed times are never emitted).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

from . import constants, reference_values, series, sums
from .arithmetic import smooth_sequence


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    a: int = 1
    k: int = 2
    m: int = 1
    x: int = 1000
    xmax: int = 10**6
    s: float = 2.0
    d: int = 6
    prec: float = 1e-9
    checkpoints: tuple[int, ...] | None = None  # None = log10 grid
    threads: int = 1
    fmt: str = "human"
    out: str | None = None


def _fmt(v: float) -> str:
    return f"{v:.15g}"


def _jsonable(v):
    if isinstance(v, float):
        return float(f"{v:.15g}")
    return v


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit_json(obj, out):
    def walk(o):
        if isinstance(o, dict):
            return {k: walk(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [walk(v) for v in o]
        return _jsonable(o)
    _emit(json.dumps(walk(obj), indent=2) + "\n", out)


def _parse_int(v: str) -> int:
    return int(float(v))


def _parse_checkpoints(text: str, xmax: int):
    if text == "log10":
        cps = []
        c = 1000
        while c <= xmax:
            cps.append(c)
            c *= 10
        if not cps or cps[-1] != xmax:
            cps.append(xmax)
        return tuple(c for c in cps if c <= xmax)
    cps = tuple(_parse_int(t) for t in text.split(","))
    if not cps:
        raise SystemExit(1)
    if any(b <= a for a, b in zip(cps, cps[1:])):
        print("error: checkpoints must be strictly increasing", file=sys.stderr)
        raise SystemExit(1)
    return cps


def build_config(argv) -> RunConfig:
    top = _Parser(prog="tau-ratio-lab")
    sub = top.add_subparsers(dest="subcommand", required=True)
    for name in ("constants", "kappa-table", "verify", "phi-sum",
                 "identity", "oracle", "smooth"):
        p = sub.add_parser(name)
        p.add_argument("--a", type=_parse_int, default=1)
        p.add_argument("--k", type=_parse_int, default=2)
        p.add_argument("--m", type=_parse_int, default=1)
        p.add_argument("--x", type=_parse_int, default=1000)
        p.add_argument("--xmax", type=_parse_int, default=10**6)
        p.add_argument("--s", type=float, default=2.0)
        p.add_argument("--d", type=_parse_int, default=6)
        p.add_argument("--prec", type=float, default=1e-9)
        p.add_argument("--checkpoints", type=str, default="log10")
        p.add_argument("--threads", type=_parse_int, default=1)
        p.add_argument("--format", dest="fmt", choices=("csv", "json", "human"),
                       default="human")
        p.add_argument("--out", type=str, default=None)
    ns = top.parse_args(argv)
    if not 1e-12 <= ns.prec <= 1e-2:
        print("error: --prec must lie in [1e-12, 1e-2]", file=sys.stderr)
        raise SystemExit(1)
    if ns.xmax > 10**9:
        print("error: --xmax must be <= 1e9", file=sys.stderr)
        raise SystemExit(1)
    if ns.a < 1 or ns.k < 2 or ns.threads < 1:
        print("error: need --a >= 1, --k >= 2, --threads >= 1", file=sys.stderr)
        raise SystemExit(1)
    return RunConfig(
        subcommand=ns.subcommand, a=ns.a, k=ns.k, m=ns.m, x=ns.x,
        xmax=ns.xmax, s=ns.s, d=ns.d, prec=ns.prec,
        checkpoints=_parse_checkpoints(ns.checkpoints, ns.xmax),
        threads=ns.threads, fmt=ns.fmt, out=ns.out)


def _cmd_constants(cfg: RunConfig) -> int:
    K = constants.big_K(cfg.prec, cfg.threads)
    C, L = constants.C_and_prime_sums(cfg.prec, cfg.threads)
    kb = constants.kappa(cfg.a)
    Ka = K.value * kb.kappa
    phi_a_1 = Ka * math.sqrt(math.pi) / (C.value * float(kb.beta_a))
    obj = {
        "a": cfg.a,
        "prec": cfg.prec,
        "K": K.value, "K_cutoff": K.cutoff, "K_tail_bound": K.tail_bound,
        "C": C.value, "C_cutoff": C.cutoff, "C_tail_bound": C.tail_bound,
        "L": L.value, "L_cutoff": L.cutoff, "L_tail_bound": L.tail_bound,
        "beta_a": str(kb.beta_a),
        "kappa_a": kb.kappa,
        "K_a": Ka,
        "phi_a_1": phi_a_1,
    }
    if cfg.fmt == "json":
        _emit_json(obj, cfg.out)
    else:
        lines = [f"{k:<14}{_fmt(v) if isinstance(v, float) else v}"
                 for k, v in obj.items()]
        _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def _cmd_kappa_table(cfg: RunConfig) -> int:
    rows = []
    ok = True
    for a in reference_values.KAPPA_TABLE_ORDER:
        ref, tol = reference_values.KAPPA_REFERENCE[a]
        computed = constants.kappa(a).kappa
        dev = abs(computed - ref)
        ok = ok and dev <= tol
        rows.append({"a": a, "kappa_computed": computed,
                     "kappa_paper": ref, "abs_dev": dev})
    if cfg.fmt == "json":
        _emit_json(rows, cfg.out)
    elif cfg.fmt == "csv":
        lines = ["a,kappa_computed,kappa_paper,abs_dev"]
        for r in rows:
            lines.append(f"{r['a']},{_fmt(r['kappa_computed'])},"
                         f"{_fmt(r['kappa_paper'])},{_fmt(r['abs_dev'])}")
        _emit("\n".join(lines) + "\n", cfg.out)
    else:
        lines = [f"{'a':>4}  {'computed':<20}{'reference':<14}{'abs_dev'}"]
        for r in rows:
            lines.append(f"{r['a']:>4}  {_fmt(r['kappa_computed']):<20}"
                         f"{_fmt(r['kappa_paper']):<14}{r['abs_dev']:.3e}")
        _emit("\n".join(lines) + "\n", cfg.out)
    return 0 if ok else 2


def _cmd_verify(cfg: RunConfig) -> int:
    cps = cfg.checkpoints
    conv = sums.convergence_report(cfg.a, cps, target_tail=cfg.prec,
                                   threads=cfg.threads)
    lem = sums.lemma12_consistency(cfg.a, cps, threads=cfg.threads)
    by_x = {r.x: [r] for r in conv.rows}
    for r in conv.e_rows:
        by_x[r.x].append(r)
    for r in lem.rows:
        by_x[r.x].append(r)
    rows = []
    for x in sorted(by_x):
        s_row, e_row, l_row = by_x[x]
        rows.append({
            "x": x, "S": s_row.raw_sum, "E": e_row.raw_sum,
            "pred_S": s_row.prediction, "pred_E": e_row.prediction,
            "dev_theorem": s_row.normalized_deviation,
            "dev_E": e_row.normalized_deviation,
            "R_lemma12": l_row.normalized_deviation,
        })
    verdicts = dict(conv.verdict)
    verdicts.update(lem.verdict)
    ok = (verdicts["e_ratio_strictly_decreasing"]
          and verdicts["theorem_ratio_trend_ok"] and verdicts["envelope_ok"])
    if cfg.fmt == "csv":
        lines = ["x,S,E,pred_S,pred_E,dev_theorem,dev_E,R_lemma12"]
        for r in rows:
            lines.append(",".join(
                [str(r["x"])] + [_fmt(r[c]) for c in
                 ("S", "E", "pred_S", "pred_E",
                  "dev_theorem", "dev_E", "R_lemma12")]))
        _emit("\n".join(lines) + "\n", cfg.out)
    elif cfg.fmt == "json":
        _emit_json({"a": cfg.a, "rows": rows, "verdicts": verdicts}, cfg.out)
    else:
        hdr = f"{'x':>10} {'dev_theorem':>14} {'dev_E':>12} {'R_lemma12':>12}"
        lines = [hdr]
        for r in rows:
            lines.append(f"{r['x']:>10} {r['dev_theorem']:>14.6e} "
                         f"{r['dev_E']:>12.6e} {r['R_lemma12']:>12.6e}")
        lines.append(f"verdicts: {verdicts}")
        _emit("\n".join(lines) + "\n", cfg.out)
    return 0 if ok else 2


def _cmd_phi_sum(cfg: RunConfig) -> int:
    emp = sums.sum_inv_phi_coprime(cfg.m, cfg.x)
    pred = constants.lemma10_prediction(cfg.m, cfg.x)
    dev = abs(emp - pred)
    obj = {"m": cfg.m, "x": cfg.x, "empirical": emp,
           "prediction": pred, "abs_dev": dev}
    if cfg.fmt == "json":
        _emit_json(obj, cfg.out)
    else:
        _emit("".join(f"{k:<12}{_fmt(v) if isinstance(v, float) else v}\n"
                      for k, v in obj.items()), cfg.out)
    return 0 if dev <= 1e-2 else 2


def _cmd_identity(cfg: RunConfig) -> int:
    # --x is the Dirichlet truncation N, --xmax the Euler cutoff P
    ev = series.identity_residual(cfg.a, cfg.s, cfg.x, cfg.xmax)
    obj = {"a": ev.a, "s": ev.s, "N": ev.N, "P": cfg.xmax,
           "lhs": ev.lhs, "rhs": ev.rhs, "residual": ev.residual,
           "lhs_tail_bound": ev.lhs_tail_bound}
    if cfg.fmt == "json":
        _emit_json(obj, cfg.out)
    else:
        _emit("".join(f"{k:<16}{_fmt(v) if isinstance(v, float) else v}\n"
                      for k, v in obj.items()), cfg.out)
    return 0


def _cmd_oracle(cfg: RunConfig) -> int:
    x = min(cfg.x, 10**4)
    sieved = sums.sum_S_a_exact(cfg.a, x, cfg.k)
    naive = sums.naive_S_a(cfg.a, x, cfg.k)
    tau_x = min(cfg.x, 10**5)
    from .arithmetic import sieve_window
    tau_ok = bool(
        (sieve_window(1, tau_x, "tau").values
         == sums.naive_tau_table(tau_x)).all())
    ok = tau_ok and sieved == naive
    obj = {"a": cfg.a, "k": cfg.k, "x": x,
           "S_sieved": str(sieved), "S_naive": str(naive),
           "tau_window": tau_x, "tau_exact_match": tau_ok,
           "S_exact_match": sieved == naive}
    if cfg.fmt == "json":
        _emit_json(obj, cfg.out)
    else:
        _emit("".join(f"{k:<18}{v}\n" for k, v in obj.items()), cfg.out)
    return 0 if ok else 2


def _cmd_smooth(cfg: RunConfig) -> int:
    seq = smooth_sequence(cfg.d, cfg.x)
    bound = (8 * math.log(max(cfg.x, 2))) ** seq.s
    ok = seq.d1 <= bound
    obj = {"d": cfg.d, "bound": cfg.x, "s": seq.s, "D1": seq.d1,
           "count_bound": bound, "bound_ok": ok,
           "elements_head": list(seq.elements[:20])}
    if cfg.fmt == "json":
        _emit_json(obj, cfg.out)
    else:
        _emit("".join(f"{k:<16}{v}\n" for k, v in obj.items()), cfg.out)
    return 0 if ok else 2


_DISPATCH = {
    "constants": _cmd_constants,
    "kappa-table": _cmd_kappa_table,
    "verify": _cmd_verify,
    "phi-sum": _cmd_phi_sum,
    "identity": _cmd_identity,
    "oracle": _cmd_oracle,
    "smooth": _cmd_smooth,
}


def run(argv) -> int:
    try:
        cfg = build_config(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    try:
        return _DISPATCH[cfg.subcommand](cfg)
    except (ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main():
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
