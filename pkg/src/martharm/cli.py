"""Command-line interface.

Subcommands::

    martharm verify <suite|all> [--config F] [--seed N] [--depth N]
                                [--format json|csv|md] [--out PATH] [--jobs N]
    martharm decompose --tree F --f F --g F
    martharm certify --op NAME [--q VAL] [--depth N] [--seed N]
    martharm kernel --n VAL [--depth N] [--out PATH]

``verify`` exits 0 iff every claimed-constant check passed.  When a report is
written to a file, a PNG summary figure is rendered next to it (disable with
--no-figure).  MARTHARM_WORKERS sets the default worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .commutator import OPERATOR_NAMES, build_operator, kq_certify
from .decomp import product_decompose
from .filtration import load_tree
from .harness.corpus import bmo_suite_functions, random_atoms, random_jumps, random_terminal, standard_tree
from .harness.records import CorpusConfig
from .harness.reporting import emit_report
from .harness.suites import run_suites, suite_names
from .martingale import (
    as_martingale,
    h1_cond_norm,
    h1_norm,
    hlog_norm,
    load_step_function,
    lp_norm,
)
from .operators.walsh import WalshContext, dirichlet_kernel, fejer_kernel, fejer_spectrum, fwht


def _default_jobs() -> int:
    return max(1, int(os.environ.get("MARTHARM_WORKERS", "1")))


def cmd_verify(args) -> int:
    config = CorpusConfig.load(args.config) if args.config else CorpusConfig()
    if args.seed is not None:
        config = config.scaled(seed=args.seed)
    if args.depth is not None:
        config = config.scaled(depths=(args.depth,))
    names = suite_names() if args.suite == "all" else [args.suite]
    records = run_suites(names, config, jobs=args.jobs)
    text = emit_report(records, args.format, args.out)
    if args.out:
        print(f"wrote {args.out} ({len(records)} records)")
        if not args.no_figure:
            from .harness.plots import render_report_figure

            fig_path = Path(args.out).with_suffix(".png")
            render_report_figure(records, fig_path)
            print(f"wrote {fig_path}")
    else:
        print(text, end="")
    claimed = [r for r in records if r.claimed is not None]
    failed = [r for r in records if not r.passed]
    print(
        f"# {len(records)} records, {len(claimed)} with claimed constants, "
        f"{len(failed)} failed",
        file=sys.stderr,
    )
    for r in failed[:20]:
        print(f"# FAIL {r.suite} :: {r.anchor} ratio={r.ratio:.6g} claimed={r.claimed}", file=sys.stderr)
    return 1 if failed else 0


def cmd_decompose(args) -> int:
    tree = load_tree(args.tree)
    f = as_martingale(load_step_function(args.f, tree))
    g = as_martingale(load_step_function(args.g, tree))
    decomp = product_decompose(f, g)
    out = {
        "identity_max_rel_error": decomp.identity_error(f, g),
        "pi1_h1": h1_cond_norm(decomp.pi1),
        "pi1_H1": h1_norm(decomp.pi1),
        "pi2_H1": h1_norm(decomp.pi2),
        "pi2_Hlog": hlog_norm(decomp.pi2),
        "g_part_Hlog": hlog_norm(decomp.g_part),
        "l_variation": decomp.l.variation_norm(),
        "l_terminal_L1": lp_norm(decomp.l.terminal, 1),
    }
    print(json.dumps(out, indent=1))
    return 0


def cmd_certify(args) -> int:
    if args.op not in OPERATOR_NAMES:
        print(f"unknown operator {args.op!r}; choose from {OPERATOR_NAMES}", file=sys.stderr)
        return 2
    depth = args.depth
    if args.op in ("HD", "HDstar"):
        tree = standard_tree("nondoubling", depth)
    elif args.op == "Ialpha":
        tree = standard_tree("pk", 0, (2, 3, 4))
    else:
        tree = standard_tree("dyadic", min(depth, 8) if args.op == "sigma" else depth)
    T = build_operator(args.op, tree, alpha=args.alpha, seed=args.seed)
    q = args.q if args.q is not None else T.q
    rng = np.random.default_rng(args.seed)
    atoms = random_atoms(tree, rng, args.samples, ("simple-s-inf",))
    jumps = random_jumps(tree, rng, args.samples)
    bmo_fns = bmo_suite_functions(tree, ("haar-mix", "log-spike", "bounded-random"), rng, 5)
    fns = [random_terminal(tree, rng, heavy=True) for _ in range(args.samples)]
    cert = kq_certify(T, q, atoms=atoms, jumps=jumps, bmo_functions=bmo_fns, random_functions=fns, seed=args.seed)
    print(json.dumps(cert.to_json(), indent=1))
    ok = all(np.isfinite(v) for v in cert.constants.values())
    if args.op == "M":
        ok = ok and cert.constants["atom-mult"] <= 2.0 + 1e-9 and cert.constants["jump-mult"] <= 1.0 + 1e-9
    return 0 if ok else 1


def cmd_kernel(args) -> int:
    ctx = WalshContext(args.depth)
    n = args.n
    D = dirichlet_kernel(ctx, n).values
    K = fejer_kernel(ctx, n).values
    spectrum = fejer_spectrum(ctx, n)
    d_hat = fwht(ctx, D)
    lines = ["index,dirichlet,fejer,dirichlet_hat,fejer_hat"]
    for k in range(ctx.size):
        lines.append(
            f"{k},{float(D[k])!r},{float(K[k])!r},{float(d_hat[k])!r},{float(spectrum[k])!r}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
        if not args.no_figure:
            from .harness.plots import render_kernel_figure

            fig_path = Path(args.out).with_suffix(".png")
            render_kernel_figure(np.arange(ctx.size), D, K, spectrum, n, fig_path)
            print(f"wrote {fig_path}")
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="martharm", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run verification suites and emit a report")
    p.add_argument("suite", help="suite name or 'all'")
    p.add_argument("--config", help="corpus config file (JSON)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--depth", type=int, default=None, help="restrict the depth sweep to one depth")
    p.add_argument("--format", choices=("json", "csv", "md"), default="json")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--no-figure", action="store_true", help="skip the PNG summary next to --out")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("decompose", help="print the paraproduct/diagonal norms of one product")
    p.add_argument("--tree", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("certify", help="estimate the membership constants of one operator")
    p.add_argument("--op", required=True, help=f"one of {', '.join(OPERATOR_NAMES)}")
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--samples", type=int, default=50)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("kernel", help="dump Dirichlet/Fejer kernel values and spectra as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(fn=cmd_kernel)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
