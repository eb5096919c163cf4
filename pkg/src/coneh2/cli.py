"""Command-line front end.

Problems arrive as a single JSON document (transfer functions are 2-D
coefficient tables, unreadable as flags).  All numeric output uses a fixed
12-significant-digit format so identical inputs produce byte-identical
reports.  Exit codes: 0 ok, 2 invalid input, 3 unsupported structure,
4 internal tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import nullcontext

from . import example, lattice, series, statespace, synthesis
from . import rational as rat
from .errors import (ConeH2Error, IllPosedFeedback, InvalidInputError,
                     NotRealizableAsLCausal, UnsupportedInnerStructure,
                     WraparoundRisk)
from .rational import RationalTransfer
from .series import BiSeries, SupportBox

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_UNSUPPORTED = 3
EXIT_TOLERANCE = 4


def fmt(x: float) -> str:
    """12 significant digits; scientific notation below 1e-4."""
    if x != 0.0 and abs(x) < 1e-4:
        return f"{x:.11e}"
    return f"{x:.12g}"


def _round12(obj):
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def dump_json(doc, stream) -> None:
    json.dump(_round12(doc), stream, indent=2)
    stream.write("\n")


# -- document schemas -----------------------------------------------------------


def biseries_to_doc(b: BiSeries) -> dict:
    return {
        "box": {"spatial_min": b.box.spatial_min, "spatial_max": b.box.spatial_max,
                "temporal_min": b.box.temporal_min, "temporal_max": b.box.temporal_max},
        "coeffs": [[i, t, v] for i, t, v in b.terms()],
    }


def biseries_from_doc(doc) -> BiSeries:
    if not isinstance(doc, dict) or "coeffs" not in doc:
        raise InvalidInputError("series document needs a 'coeffs' triple list")
    triples = [(int(i), int(t), float(v)) for i, t, v in doc["coeffs"]]
    b = BiSeries.from_terms(triples)
    if "box" in doc:
        box = doc["box"]
        b = series.truncate(b, SupportBox(int(box["spatial_min"]), int(box["spatial_max"]),
                                          int(box["temporal_min"]), int(box["temporal_max"])))
    return b


def rational_to_doc(r: RationalTransfer) -> dict:
    return {"num": biseries_to_doc(r.num), "den": biseries_to_doc(r.den)}


def rational_from_doc(doc) -> RationalTransfer:
    if not isinstance(doc, dict) or "num" not in doc:
        raise InvalidInputError("rational document needs 'num' (and optionally 'den')")
    num = biseries_from_doc(doc["num"])
    den = biseries_from_doc(doc["den"]) if "den" in doc else BiSeries.delta()
    try:
        return rat.rational(num, den)
    except ValueError as exc:
        raise InvalidInputError(f"invalid rational: {exc}") from exc


def problem_from_doc(doc) -> tuple[synthesis.Problem, dict]:
    if not isinstance(doc, dict) or "mode" not in doc:
        raise InvalidInputError("problem document needs a 'mode' field")
    orders = doc.get("orders", {})
    mode = doc["mode"]
    if mode == synthesis.DISTURBANCE_ATTENUATION:
        for key in ("G", "W"):
            if key not in doc:
                raise InvalidInputError(f"mode '{mode}' needs transfer function '{key}'")
        prob = synthesis.Problem.disturbance_attenuation(
            rational_from_doc(doc["G"]), rational_from_doc(doc["W"]))
    elif mode == synthesis.GENERAL:
        for key in ("T1", "T2", "Gyu"):
            if key not in doc:
                raise InvalidInputError(f"mode '{mode}' needs transfer function '{key}'")
        prob = synthesis.Problem.general(rational_from_doc(doc["T1"]),
                                         rational_from_doc(doc["T2"]),
                                         rational_from_doc(doc["Gyu"]))
    else:
        raise InvalidInputError(f"unknown mode '{mode}'")
    synthesis.validate_problem(prob)
    return prob, orders


def _load_doc(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc}") from exc


def _open_out(path):
    if path:
        return open(path, "w", encoding="utf-8", newline="")
    return nullcontext(sys.stdout)


# -- result rendering -----------------------------------------------------------


def result_to_doc(res: synthesis.SynthesisResult) -> dict:
    return {
        "m": res.m,
        "q_order": res.q_order,
        "J": res.j,
        "J_opt": res.j_opt,
        "centralized": res.centralized,
        "tail_bound": res.tail_bound,
        "orders": {"S": res.spatial_order, "T": res.temporal_order},
        "eta": {str(i): {"temporal_min": e.temporal_min, "coeffs": list(map(float, e.coeffs))}
                for i, e in sorted(res.eta.items())},
        "G1": biseries_to_doc(res.g1),
        "Q": rational_to_doc(res.q),
        "K": rational_to_doc(res.k),
        "K_realization": statespace.realization_to_dict(res.k_realization),
    }


def _render_text(res: synthesis.SynthesisResult, out) -> None:
    out.write(f"eta-series temporal order m = {res.m}\n")
    out.write(f"Q temporal order           = {res.q_order}\n")
    out.write(f"J (achieved norm)          = {fmt(res.j)}\n")
    out.write(f"J_opt (lower bound)        = {fmt(res.j_opt)}\n")
    out.write(f"centralized bound          = {fmt(res.centralized)}\n")
    out.write(f"tail bound                 = {fmt(res.tail_bound)}\n")
    out.write(f"K realization states       = {res.k_realization.n_states}\n")
    out.write("Q coefficients (i, t, value):\n")
    for i, t, v in res.q.num.terms():
        out.write(f"  {i} {t} {fmt(v)}\n")


def _render_sweep_csv(results, out) -> None:
    out.write("m,q_order,J\n")
    for r in results:
        out.write(f"{r.m},{r.q_order},{fmt(r.j)}\n")
    out.write(f"J_opt,,{fmt(results[0].j_opt)}\n")
    out.write(f"centralized,,{fmt(results[0].centralized)}\n")


# -- commands -------------------------------------------------------------------


def cmd_synth(args) -> int:
    prob, orders = problem_from_doc(_load_doc(args.file))
    m = args.eta_order if args.eta_order is not None else int(orders.get("m", 1))
    S = args.spatial_order if args.spatial_order is not None else int(orders.get("S", 200))
    T = args.temporal_order if args.temporal_order is not None else int(orders.get("T", 200))
    res = synthesis.synthesize(prob, m, S, T, validate=False)
    with _open_out(args.out) as out:
        if args.format == "json":
            dump_json(result_to_doc(res), out)
        elif args.format == "csv":
            _render_sweep_csv([res], out)
        else:
            _render_text(res, out)
    return EXIT_OK


def _parse_m_range(spec: str):
    try:
        lo, hi = spec.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError as exc:
        raise InvalidInputError(f"bad m-range '{spec}', expected 'a..b'") from exc
    if lo > hi or lo < 0:
        raise InvalidInputError(f"bad m-range '{spec}'")
    return range(lo, hi + 1)


def cmd_sweep(args) -> int:
    prob, orders = problem_from_doc(_load_doc(args.file))
    S = args.spatial_order if args.spatial_order is not None else int(orders.get("S", 200))
    T = args.temporal_order if args.temporal_order is not None else int(orders.get("T", 200))
    results = synthesis.sweep(prob, _parse_m_range(args.m_range), S, T, validate=False)
    with _open_out(args.out) as out:
        if args.format == "json":
            dump_json([{"m": r.m, "q_order": r.q_order, "J": r.j,
                        "J_opt": r.j_opt, "centralized": r.centralized}
                       for r in results], out)
        else:
            _render_sweep_csv(results, out)
    return EXIT_OK


def cmd_paper_example(args) -> int:
    m_range = _parse_m_range(args.m_range)
    S = args.spatial_order if args.spatial_order is not None else 200
    T = args.temporal_order if args.temporal_order is not None else 200
    out = sys.stdout
    out.write("built-in example: nearest-neighbor diffusion plant, "
              "tau=1 gamma=1/3 alpha=1 c=1/4 a=1\n")
    out.write("inner factor: lambda^2\n")
    prob = example.reference_problem()
    results = synthesis.sweep(prob, m_range, S=S, T=T)
    out.write("m,q_order,J\n")
    for r in results:
        out.write(f"{r.m},{r.q_order},{fmt(r.j)}\n")
    out.write(f"J_opt,,{fmt(results[0].j_opt)}\n")
    out.write(f"centralized,,{fmt(results[0].centralized)}\n\n")
    checks = example.run_checkpoints(m_range, S=S, T=T)
    failed = 0
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        failed += 0 if c.passed else 1
        out.write(f"[{status}] {c.name}: {c.detail}\n")
    out.write(f"\n{len(checks) - failed}/{len(checks)} checkpoints passed\n")
    return EXIT_OK if failed == 0 else EXIT_TOLERANCE


def _system_from_doc(doc) -> lattice.LatticeSystem:
    if "kernel" in doc:
        return lattice.LatticeSystem(kernel=biseries_from_doc(doc["kernel"]))
    if "rational" in doc:
        r = rational_from_doc(doc["rational"])
        return lattice.LatticeSystem(realization=statespace.realize_rational(r))
    raise InvalidInputError("simulation document needs 'kernel' or 'rational'")


def cmd_simulate(args) -> int:
    sys_ = _system_from_doc(_load_doc(args.file))
    signal = lattice.LatticeSignal.impulse(args.sites, args.horizon, args.impulse_site)
    response = lattice.simulate(sys_, signal)
    with _open_out(args.out) as out:
        out.write(lattice.signal_to_csv(response, fmt))
    return EXIT_OK


def cmd_realize(args) -> int:
    prob, orders = problem_from_doc(_load_doc(args.file))
    m = args.eta_order if args.eta_order is not None else int(orders.get("m", 1))
    res = synthesis.synthesize(prob, m, S=int(orders.get("S", 200)),
                               T=int(orders.get("T", 200)), validate=False)
    with _open_out(args.out) as out:
        dump_json(statespace.realization_to_dict(res.k_realization), out)
    return EXIT_OK


def cmd_expand(args) -> int:
    doc = _load_doc(args.file)
    r = rational_from_doc(doc.get("rational", doc))
    b = rat.expand(r, args.spatial_order, args.temporal_order)
    with _open_out(args.out) as out:
        dump_json(biseries_to_doc(b), out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coneh2",
                                description="Decentralized H2 synthesis for cone-causal "
                                            "spatially invariant systems")
    sub = p.add_subparsers(dest="command", required=True)

    def add_orders(sp, with_m=True):
        if with_m:
            sp.add_argument("--eta-order", type=int, default=None, metavar="M",
                            help="temporal order of the eta series")
        sp.add_argument("--spatial-order", type=int, default=None, metavar="S")
        sp.add_argument("--temporal-order", type=int, default=None, metavar="T")

    sp = sub.add_parser("synth", help="synthesize a controller from a problem file")
    sp.add_argument("file")
    add_orders(sp)
    sp.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("sweep", help="synthesize over a range of eta orders")
    sp.add_argument("file")
    sp.add_argument("--m-range", default="0..6", metavar="A..B")
    add_orders(sp, with_m=False)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("paper-example",
                        help="run the built-in example and verify its checkpoints")
    sp.add_argument("--m-range", default="0..6", metavar="A..B")
    add_orders(sp, with_m=False)
    sp.set_defaults(func=cmd_paper_example)

    sp = sub.add_parser("simulate", help="impulse response of a kernel or rational on a ring")
    sp.add_argument("file")
    sp.add_argument("--sites", type=int, default=512)
    sp.add_argument("--horizon", type=int, default=200)
    sp.add_argument("--impulse-site", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("realize", help="export the synthesized controller's state space")
    sp.add_argument("file")
    sp.add_argument("--eta-order", type=int, default=None, metavar="M")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_realize)

    sp = sub.add_parser("expand", help="series expansion of a rational transfer function")
    sp.add_argument("file")
    sp.add_argument("--spatial-order", type=int, default=8, metavar="S")
    sp.add_argument("--temporal-order", type=int, default=8, metavar="T")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_expand)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UnsupportedInnerStructure, NotRealizableAsLCausal, IllPosedFeedback) as exc:
        print(f"unsupported structure [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (InvalidInputError, WraparoundRisk, ValueError) as exc:
        print(f"invalid input [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except ConeH2Error as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    raise SystemExit(main())
