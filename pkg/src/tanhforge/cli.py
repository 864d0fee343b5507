"""Command line surface: build networks, verify them, tabulate closed-form
bounds, sweep convergence rates, and run the certification ledger.

Every command writes deterministic CSV/JSON artifacts into --out; report
paths additionally render PNG figures next to the delimited output.
Exit codes: 0 ok, 1 contract violation, 2 usage, 3 bound violation.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import assembler, bound_calculator as bc, function_catalog, partition_builder, \
    plotting, verifier
from .errors import BoundViolation, ParseError, TanhforgeError
from .netgraph import deserialize, serialize


def _target(args):
    if args.f not in function_catalog.CATALOG_LABELS:
        raise ParseError(f"unknown function {args.f!r}; see `tanhforge catalog`")
    params = {}
    if args.a is not None:
        params["a"] = args.a
    if args.coeffs:
        params["coeffs"] = [float(c) for c in args.coeffs.split(",")]
    if args.d is not None:
        params["d"] = args.d
    return function_catalog.make(args.f, **params)


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _write(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


def _manifest_text(net) -> str:
    lines = [f"{key}: {val}" for key, val in sorted(net.meta.items(), key=lambda kv: kv[0])]
    dims = net.layer_dims
    lines.append(f"layer_dims: {dims}")
    lines.append(f"max_abs_weight: {net.max_abs_weight():.6e}")
    lines.append(f"sparsity: {net.sparsity():.4f}")
    target = net.meta.get("guaranteed") or net.meta.get("eps") or 1e-10
    mode, floor = verifier.select_precision(net, 1.0, target)
    lines.append(f"precision_recommended: {mode}")
    lines.append(f"cancellation_floor: {floor:.3e}")
    return "\n".join(lines) + "\n"


def cmd_build(args) -> int:
    f = _target(args)
    if args.mode == "analytic-shallow":
        net = assembler.assemble_shallow_analytic(f, args.s, args.delta)
    elif args.mode == "lipschitz":
        # piecewise-constant cells (s=1); requires the finer-grid regime
        lb = bc.lipschitz_bound(f.d, f.seminorm(1), args.N)
        bp = assembler.plan(f, f.d, 1, 0, args.N, args.delta)
        net = assembler.assemble(f, bp)
        net.meta["lipschitz_bound"] = lb["bound"]
        net.meta["guaranteed"] = min(net.meta["guaranteed"], lb["bound"])
    else:
        bp = assembler.plan(f, f.d, args.s, args.k, args.N, args.delta)
        net = assembler.assemble(f, bp)
    out = _outdir(args)
    _write(os.path.join(out, "network.json"), serialize(net))
    _write(os.path.join(out, "manifest.txt"), _manifest_text(net))
    print(f"built {net.layer_dims}; guaranteed {net.meta['guaranteed']:.3e}")
    return 0


def cmd_verify(args) -> int:
    with open(args.net) as fh:
        net = deserialize(fh.read())
    f = _target(args)
    grid = verifier.default_grid(f.d, n_axis=args.grid, cells=net.meta.get("N")) \
        if args.grid else None
    precision = args.precision
    report = verifier.sobolev_error(net, f, args.k, grid=grid,
                                    precision=precision, check=False)
    out = _outdir(args)
    lines = ["order,empirical"]
    for m, e in report.rows():
        lines.append(f"{m},{e!r}")
    lines.append(f"guaranteed,{report.guaranteed!r}")
    lines.append(f"precision,{report.precision}")
    lines.append(f"floor,{report.floor!r}")
    lines.append(f"cancellation_warning,{int(report.cancellation_warning)}")
    _write(os.path.join(out, "report.csv"), "\n".join(lines) + "\n")
    if f.d == 1:
        xs = np.linspace(0.0, 1.0, 1001).reshape(1, -1)
        errs = np.abs(net.evaluate(xs, report.precision)[0] - f.evaluate(xs))
        plotting.save_error_curve(os.path.join(out, "report.png"), xs[0], errs,
                                  f"{args.f}: W^{{0,inf}} error, {report.precision}")
    print(f"empirical {report.empirical:.3e}  guaranteed "
          f"{report.guaranteed if report.guaranteed is None else format(report.guaranteed, '.3e')}"
          f"  precision {report.precision}")
    if report.violation:
        print("bound violation", file=sys.stderr)
        return 3
    return 0


def cmd_bounds(args) -> int:
    out = _outdir(args)
    if args.figure2:
        freqs = [float(a) for a in args.a_list.split(",")]
        tols = [float(t) for t in args.tols.split(",")]
        table = []
        for a in freqs:
            for choice in bc.min_width_search(a, tols):
                table.append((a, choice.tolerance, choice.s, choice.N,
                              choice.width, choice.variant))
        lines = ["a,tolerance,s,N,width,variant"]
        lines += [f"{r[0]!r},{r[1]!r},{r[2]},{r[3]},{r[4]},{r[5]}" for r in table]
        _write(os.path.join(out, "widths.csv"), "\n".join(lines) + "\n")
        plotting.save_width_plot(os.path.join(out, "widths.png"), table)
        print(f"wrote {len(table)} width rows")
        return 0
    d, s, N = args.d or 1, args.s, args.N
    w1, w2 = bc.theorem_widths(d, s, N)
    lines = ["quantity,value",
             f"width_hidden_1,{w1}",
             f"width_hidden_2,{w2}"]
    if N > 5 * d**2:
        lines.append(f"lipschitz_bound_L1,{bc.lipschitz_bound(d, 1.0, N)['bound']!r}")
    ab = bc.analytic_bounds(d, 1.0, 1.0, s, N, args.delta)
    lines.append(f"analytic_two_layer_Q1_R1,{ab['two_layer']!r}")
    er = bc.exp_rate_bound(d, args.k, 1.0, args.delta, max(N, 1))
    lines.append(f"exp_rate_l_inf,{er['l_inf_bound_simplified']!r}")
    _write(os.path.join(out, "bounds.csv"), "\n".join(lines) + "\n")
    print(f"widths ({w1}, {w2})")
    return 0


def cmd_sweep(args) -> int:
    f = _target(args)
    Ns = [int(n) for n in args.N_list.split(",")]
    rows, errs, guars = [], [], []
    violation = False
    for N in Ns:
        bp = assembler.plan(f, f.d, args.s, args.k, N, args.delta)
        net = assembler.assemble(f, bp)
        grid = verifier.default_grid(f.d, n_axis=args.grid, cells=N) if args.grid else None
        rep = verifier.sobolev_error(net, f, args.k, grid=grid, check=False)
        violation = violation or rep.violation
        rows.append((N, net.layer_dims[1], net.layer_dims[2], rep.empirical,
                     rep.guaranteed, rep.precision, net.sparsity()))
        errs.append(rep.empirical)
        guars.append(rep.guaranteed)
    fit = verifier.rate_fit(list(zip(Ns, errs))) if len(Ns) >= 3 else None
    out = _outdir(args)
    lines = ["N,width1,width2,empirical,guaranteed,precision,sparsity"]
    lines += [f"{r[0]},{r[1]},{r[2]},{r[3]!r},{r[4]!r},{r[5]},{r[6]!r}" for r in rows]
    if fit:
        lines.append(f"slope,,,{fit.slope!r},,,")
    _write(os.path.join(out, "sweep.csv"), "\n".join(lines) + "\n")
    plotting.save_rate_plot(os.path.join(out, "sweep.png"), Ns, errs, guars,
                            fit.slope if fit else float("nan"),
                            f"{args.f}: s={args.s}, k={args.k}")
    print(f"slope {fit.slope:.3f}" if fit else "sweep done")
    return 3 if violation else 0


def cmd_lemma_check(args) -> int:
    rows = verifier.lemma_suite()
    out = _outdir(args)
    _write(os.path.join(out, "ledger.csv"), verifier.ledger_csv(rows))
    plotting.save_ledger_plot(os.path.join(out, "ledger.png"), rows)
    failing = sum(not r.passed for r in rows)
    print(f"{len(rows)} rows, {failing} failing")
    return 0


def cmd_partition(args) -> int:
    spec = partition_builder.make_spec(1, args.N, args.k, args.eps)
    ys, rhos, near, far = partition_builder.figure_rows(spec)
    out = _outdir(args)
    header = "y," + ",".join(f"rho_{j}" for j in range(1, spec.N + 1)) + ",near_sum,far_sum"
    lines = [header]
    for i in range(len(ys)):
        vals = ",".join(repr(float(rhos[j, i])) for j in range(spec.N))
        lines.append(f"{float(ys[i])!r},{vals},{float(near[i])!r},{float(far[i])!r}")
    _write(os.path.join(out, "partition.csv"), "\n".join(lines) + "\n")
    plotting.save_partition_plot(os.path.join(out, "partition.png"), ys, rhos, near)
    print(f"alpha {spec.alpha:.3f}, min near-sum {float(np.min(near)):.4f}")
    return 0


def cmd_catalog(_args) -> int:
    for label in function_catalog.CATALOG_LABELS:
        print(label)
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tanhforge",
                                description="constructive tanh approximation toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, function=True):
        if function:
            sp.add_argument("--f", required=True, help="catalog function label")
            sp.add_argument("--a", type=float, default=None)
            sp.add_argument("--coeffs", default=None)
            sp.add_argument("--d", type=int, default=None)
        sp.add_argument("--out", default="tanhforge-out")

    b = sub.add_parser("build")
    common(b)
    b.add_argument("--s", type=int, required=True)
    b.add_argument("--k", type=int, default=0)
    b.add_argument("--N", type=int, default=1)
    b.add_argument("--delta", type=float, default=0.5)
    b.add_argument("--mode", default="two-layer",
                   choices=["two-layer", "analytic-shallow", "lipschitz"])
    b.set_defaults(run=cmd_build)

    v = sub.add_parser("verify")
    common(v)
    v.add_argument("--net", required=True)
    v.add_argument("--k", type=int, default=0)
    v.add_argument("--grid", type=int, default=None)
    v.add_argument("--precision", default=None,
                   help="double, high:BITS; default auto-selects")
    v.set_defaults(run=cmd_verify)

    bo = sub.add_parser("bounds")
    common(bo, function=False)
    bo.add_argument("--figure2", action="store_true")
    bo.add_argument("--a", dest="a_list", default="6.283")
    bo.add_argument("--tols", default="1e-1,1e-2,1e-3,1e-4,1e-5,1e-6,1e-7")
    bo.add_argument("--d", type=int, default=1)
    bo.add_argument("--s", type=int, default=3)
    bo.add_argument("--k", type=int, default=0)
    bo.add_argument("--N", type=int, default=8)
    bo.add_argument("--delta", type=float, default=0.5)
    bo.set_defaults(run=cmd_bounds)

    sw = sub.add_parser("sweep")
    common(sw)
    sw.add_argument("--s", type=int, required=True)
    sw.add_argument("--k", type=int, default=0)
    sw.add_argument("--N", dest="N_list", required=True, help="comma list")
    sw.add_argument("--delta", type=float, default=0.5)
    sw.add_argument("--grid", type=int, default=None)
    sw.set_defaults(run=cmd_sweep)

    lc = sub.add_parser("lemma-check")
    common(lc, function=False)
    lc.set_defaults(run=cmd_lemma_check)

    pa = sub.add_parser("partition")
    common(pa, function=False)
    pa.add_argument("--N", type=int, default=7)
    pa.add_argument("--k", type=int, default=0)
    pa.add_argument("--eps", type=float, default=1e-2)
    pa.set_defaults(run=cmd_partition)

    ca = sub.add_parser("catalog")
    ca.set_defaults(run=cmd_catalog)
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.run(args)
    except BoundViolation as e:
        print(f"bound violation: {e.args[0]}", file=sys.stderr)
        return 3
    except (ParseError, KeyError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except TanhforgeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
