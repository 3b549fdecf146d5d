"""Command-line driver: build example data, evaluate functionals, run the
invariant suites, exercise the extension operator and the potential checks.

Exit codes: 0 success, 2 invariant failure, 3 input error.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import geometry as geo
from .cubes import build_cubes, build_hat_cubes, build_order
from .errors import TracekitError
from .extension import build_extension, partition_of_unity, trace_residual
from .functionals import BN, BSN, CN, N_functional
from .measure import Measure
from .potentials import (
    comparison_constant,
    duality_gap,
    dyadic_riesz,
    hedberg_wolff_check,
    riesz,
)
from .sequences import adr_sequence, cantor_sequence, verify
from .space import TOL, build_nets

click.UsageError.exit_code = 3  # bad flags are input errors, not failures

EPS = 0.1


def _fmt(v: float) -> str:
    return repr(float(v))


def _setup(name: str, depth: int = 3):
    g = geo.make(name)
    seq = adr_sequence([(g.sigma, g.theta)], theta=g.theta, eps=EPS, K=depth)
    return g, seq


def _function_suite(g, n_funcs: int, seed: int):
    rng = np.random.default_rng(seed)
    d = g.space.dist
    funcs = []
    for _ in range(n_funcs):
        p1, p2 = rng.integers(0, g.space.n, size=2)
        a, b = rng.uniform(-1, 1, size=2)
        c = rng.uniform(-0.5, 0.5)
        funcs.append(a * d[int(p1)] + b * d[int(p2)] + c)
    return funcs


@click.group()
def main():
    """Finite metric-measure-space toolkit."""


def _out_dir(out: str) -> Path:
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    return p


@main.command()
@click.argument("name")
@click.option("--out", required=True, help="output directory")
@click.option("--theta", default=1.5, show_default=True, help="cantor exponent")
@click.option("--depth", default=6, show_default=True, help="cantor depth")
def example(name, out, theta, depth):
    """Write an example geometry (line|grid2d|segment|ball|composite|cantor)."""
    outp = _out_dir(out)
    try:
        if name == "cantor":
            res = cantor_sequence(theta, depth)
            payload = {
                "name": "cantor",
                "coords": res.space.coords.tolist(),
                "S": res.E.tolist(),
                "mu": res.mu.weights.tolist(),
                "gap_lengths": res.gap_lengths,
                "params": {"theta": theta, "depth": depth},
            }
        else:
            g = geo.make(name)
            payload = {
                "name": g.name,
                "coords": g.space.coords.tolist(),
                "S": g.S.tolist(),
                "mu": g.mu.weights.tolist(),
                "sigma": g.sigma.weights.tolist(),
                "params": g.params,
            }
    except TracekitError as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(3)
    (outp / "geometry.json").write_text(json.dumps(payload, sort_keys=True, indent=1))
    click.echo(f"wrote {outp / 'geometry.json'}")


@main.command("eval")
@click.option("--geometry", "gname", default="segment", show_default=True)
@click.option("--out", required=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--n-funcs", default=8, show_default=True)
@click.option("--p", default=2.0, show_default=True)
@click.option("--sigma", default=0.4, show_default=True)
@click.option("--c", "c_param", default=None, type=float, help="dilation (default 3/eps)")
@click.option("--depth", default=3, show_default=True)
def cmd_eval(gname, out, seed, n_funcs, p, sigma, c_param, depth):
    """Evaluate the four functionals on a random Lipschitz suite; write CSV."""
    outp = _out_dir(out)
    try:
        g, seq = _setup(gname, depth)
        c = 3.0 / EPS if c_param is None else c_param
        funcs = _function_suite(g, n_funcs, seed)
    except TracekitError as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(3)
    rows = []
    for i, f in enumerate(funcs):
        cn = CN(f, seq, g.space, g.mu, g.S, p).value
        bsn = BSN(f, seq, g.space, g.mu, g.S, p, c).value
        bn = BN(f, seq, g.space, g.mu, g.S, p, sigma).value
        nn = N_functional(f, seq, g.space, g.mu, g.S, p, c).value
        rows.append((i, cn, bsn, bn, nn))
    lines = ["# eval schema v1", "fid,CN,BSN,BN,N,BSN_over_CN,BN_over_CN"]
    for i, cn, bsn, bn, nn in rows:
        r1 = bsn / cn if cn > 0 else 0.0
        r2 = bn / cn if cn > 0 else 0.0
        lines.append(",".join([str(i)] + [_fmt(v) for v in (cn, bsn, bn, nn, r1, r2)]))
    (outp / "eval.csv").write_text("\n".join(lines) + "\n")
    ratios1 = [r[2] / r[1] for r in rows if r[1] > 0]
    summary = {
        "geometry": gname, "seed": seed, "p": p, "c": c,
        "bsn_over_cn": {"min": min(ratios1), "max": max(ratios1)} if ratios1 else None,
    }
    (outp / "summary.json").write_text(json.dumps(summary, sort_keys=True, indent=1))
    click.echo(f"wrote {outp / 'eval.csv'}")


def _verify_checks(gname: str, perturb: bool):
    g, seq = _setup(gname, depth=3)
    nets = build_nets(g.space, EPS, 0, 2)
    order = build_order(nets, g.space)
    cubes = build_cubes(nets, order, g.space)
    checks = []

    # partition of unity sums to 1 everywhere
    for k in range(0, 3):
        phi = partition_of_unity(nets, g.space, k)
        if perturb and k == 1:
            phi = phi * 1.01
        err = float(np.abs(phi.sum(axis=0) - 1.0).max())
        checks.append({"check": f"partition_identity_k{k}", "pass": err <= 1e-12,
                       "max_err": err})

    # order: parent within the coarser separation radius
    for k, par in order.parent.items():
        fine, coarse = nets.level(k), nets.level(k - 1)
        dd = g.space.dist[fine, coarse[par]]
        ok = bool((dd <= EPS ** (k - 1) + TOL).all())
        checks.append({"check": f"order_parent_radius_k{k}", "pass": ok,
                       "max_dist": float(dd.max())})

    # cubes partition the domain at every level and nest
    for k, level in cubes.levels.items():
        members = np.concatenate([c.members for c in level]) if level else np.array([])
        ok = members.size == cubes.domain.size and np.array_equal(
            np.sort(members), cubes.domain)
        checks.append({"check": f"cube_partition_k{k}", "pass": bool(ok)})
    for k in range(cubes.k_min + 1, cubes.k_max + 1):
        ok = all(
            set(c.members.tolist()) <= set(cubes.levels[k - 1][c.parent].members.tolist())
            for c in cubes.levels[k]
        )
        checks.append({"check": f"cube_nesting_k{k}", "pass": bool(ok)})

    # sequence regularity report
    rep = verify(
        seq, g.space, g.mu, g.S, k_range=range(0, 3), test_sets=[g.S],
        thresholds={"C1": (None, 1e6), "C2": (1e-12, None), "C3": (None, 1e6)},
    )
    checks.append({"check": "sequence_regularity", "pass": all(rep.passes.values()),
                   "C1": rep.C1, "C2": rep.C2, "C3": rep.C3,
                   "m5_min_density": rep.m5_min_density})

    if gname == "cantor_mode":  # pragma: no cover - reserved
        pass
    return checks


@main.command("verify")
@click.option("--geometry", "gname", default="segment", show_default=True)
@click.option("--out", required=True)
@click.option("--perturb", is_flag=True, help="inject a fault (for exit-code tests)")
def cmd_verify(gname, out, perturb):
    """Run the invariant suite; exit 2 on any failure."""
    outp = _out_dir(out)
    try:
        checks = _verify_checks(gname, perturb)
    except TracekitError as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(3)
    (outp / "report.json").write_text(json.dumps(checks, sort_keys=True, indent=1))
    failed = [c["check"] for c in checks if not c["pass"]]
    for c in checks:
        click.echo(f"{'PASS' if c['pass'] else 'FAIL'} {c['check']}")
    if failed:
        sys.exit(2)


@main.command("extend")
@click.option("--geometry", "gname", default="segment", show_default=True)
@click.option("--out", required=True)
@click.option("--depth", default=3, show_default=True)
def cmd_extend(gname, out, depth):
    """Extend a sample boundary function and report residuals."""
    outp = _out_dir(out)
    try:
        g, seq = _setup(gname, depth)
        nets = build_nets(g.space, EPS, 0, depth)
    except TracekitError as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(3)
    f = g.space.dist[int(g.S[0])]
    res = build_extension(f, seq, nets, g.space, g.S)
    resid = {
        k: float(trace_residual(f, res.values, g.space, g.mu, g.S, EPS ** k).max())
        for k in range(1, depth + 1)
    }
    boundary_exact = bool(np.abs(res.values[g.S] - f[g.S]).max() <= TOL)
    payload = {"geometry": gname, "max_residual_by_k": resid,
               "boundary_exact": boundary_exact,
               "j_star_range": [int(res.j_star.min()), int(res.j_star.max())]}
    (outp / "extend.json").write_text(json.dumps(payload, sort_keys=True, indent=1))
    click.echo(json.dumps(payload, sort_keys=True))
    if not boundary_exact:
        sys.exit(2)


@main.command("potentials")
@click.option("--geometry", "gname", default="segment", show_default=True)
@click.option("--out", required=True)
@click.option("--p", default=2.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
def cmd_potentials(gname, out, p, seed):
    """Compute potential fields and run the inequality checks."""
    outp = _out_dir(out)
    try:
        g, seq = _setup(gname, depth=3)
        nets = build_nets(g.space, EPS, 0, 2)
        order = build_order(nets, g.space)
        cubes = build_cubes(nets, order, g.space)
        hats = build_hat_cubes(cubes, g.space)
    except TracekitError as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(3)
    m = g.sigma
    field_i = riesz(g.space, g.mu, m, EPS, 1.0, k_max=2)
    field_hat = dyadic_riesz(cubes, hats, g.space, g.mu, m, [0, 1, 2])
    C = comparison_constant(field_i, field_hat, np.arange(g.space.n))
    lhs, rhs, ratio = hedberg_wolff_check(g.space, g.mu, m, g.S, p, EPS, 1.0, k_max=2)
    rng = np.random.default_rng(seed)
    sub = rng.choice(g.space.n, size=min(8, g.space.n), replace=False)
    from .space import build_space
    tiny = build_space(g.space.coords[np.sort(sub)], validate=False)
    nu = Measure(rng.uniform(0.1, 1.0, tiny.n))
    sg = Measure(rng.uniform(0.1, 1.0, tiny.n))
    primal, dual = duality_gap(tiny, nu, sg, p, EPS, 1.0, k_max=2)
    gap = abs(primal - dual)
    payload = {"geometry": gname, "pointwise_C": C,
               "hedberg": {"lhs": lhs, "rhs": rhs, "ratio": ratio},
               "duality": {"primal": primal, "dual": dual, "gap": gap}}
    (outp / "potentials.json").write_text(json.dumps(payload, sort_keys=True, indent=1))
    click.echo(json.dumps(payload, sort_keys=True))
    if gap > 1e-9 or not np.isfinite(ratio):
        sys.exit(2)


if __name__ == "__main__":
    main()
