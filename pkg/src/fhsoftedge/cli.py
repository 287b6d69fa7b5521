"""Command-line front end: every computation as a subcommand writing CSV or JSON."""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import FHError, PrecisionError, SolverError, ValidationError

OUTPUT_DIR_ENV = "FHSOFTEDGE_OUTPUT_DIR"
EXIT_CODES = {ValidationError: 2, SolverError: 3, PrecisionError: 4}

HEADERS = {
    "recurrence": "three-term recurrence of the weight by discretized Stieltjes",
    "sigma": "sigma-form connection solution",
    "p34": "u = -sigma' with the regular Painleve XXXIV residual",
    "pii": "Painleve II solution",
    "kernel": "limiting Psi-kernel on a point grid",
    "converge": "finite-n quantities at the soft-edge point against their limits",
    "cdf": "distribution function scan",
}


@dataclass
class RunConfig:
    subcommand: str
    alpha: float = 0.0
    omega_re: float = 1.0
    omega_im: float = 0.0
    mu: float = 0.0
    n: list = field(default_factory=lambda: [10])
    s: list = field(default_factory=lambda: [0.0])
    s_min: float = -10.0
    s_max: float = 8.0
    n_grid: int = 201
    tol: float = 1e-9
    precision: str = "double-double"
    family: str = "alpha"
    k: float = 1.0
    points: list = field(default_factory=lambda: [1.0, 2.0])
    target: str = "hankel"
    v: list = field(default_factory=lambda: [0.5, 1.5])
    route: str = "sigma"
    workers: int = 1
    output: str | None = None
    format: str = "csv"

    @property
    def omega(self):
        return complex(self.omega_re, self.omega_im)

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser():
    p = argparse.ArgumentParser(prog="fhsoftedge", description="Soft-edge asymptotics of Gaussian weights "
                                "with a root-and-jump singularity.")
    p.add_argument("--version", action="version", version="fhsoftedge " + __version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--alpha", type=float, default=0.0)
        sp.add_argument("--omega-re", type=float, default=1.0)
        sp.add_argument("--omega-im", type=float, default=0.0)
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--precision", choices=("double", "double-double"), default="double-double")
        sp.add_argument("--output", "-o", default=None, help="output file (default: stdout, or $%s/<cmd>.<fmt>)"
                        % OUTPUT_DIR_ENV)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--workers", type=int, default=1, help="worker processes for independent n/s jobs")

    def srange(sp, lo=-10.0, hi=8.0):
        sp.add_argument("--s-min", type=float, default=lo)
        sp.add_argument("--s-max", type=float, default=hi)
        sp.add_argument("--n-grid", type=int, default=201)

    sp = sub.add_parser("recurrence", help="recurrence coefficients a_k, b_k^2 and norms h_k")
    common(sp)
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--n", type=_ints, default=[10])
    for name in ("sigma", "p34"):
        sp = sub.add_parser(name, help=HEADERS[name])
        common(sp)
        srange(sp)
    sp = sub.add_parser("pii", help=HEADERS["pii"])
    common(sp)
    srange(sp, -6.0, 6.0)
    sp.add_argument("--family", choices=("alpha", "airy"), default="alpha",
                    help="alpha: the family tied to (alpha, omega); airy: q ~ k Ai at +inf")
    sp.add_argument("--k", type=float, default=1.0)
    sp = sub.add_parser("kernel", help=HEADERS["kernel"])
    common(sp)
    sp.add_argument("--s", type=_floats, default=[0.0])
    sp.add_argument("--points", type=_floats, default=[1.0, 2.0])
    sp = sub.add_parser("converge", help=HEADERS["converge"])
    common(sp)
    sp.add_argument("--target", choices=("hankel", "recurrence", "kernel"), default="hankel",
                    help="hankel: log-derivative of H_n; recurrence: a_n and b_n; kernel: scaled K_n")
    sp.add_argument("--n", type=_ints, default=[16, 32, 64])
    sp.add_argument("--s", type=_floats, default=[0.0])
    sp.add_argument("--v", type=_floats, default=[0.5, 1.5], help="kernel arguments v1,v2")
    sp = sub.add_parser("cdf", help=HEADERS["cdf"])
    common(sp)
    sp.add_argument("--s", type=_floats, default=[0.0])
    sp.add_argument("--route", choices=("sigma", "pii", "finite"), default="sigma")
    sp.add_argument("--n", type=_ints, default=[64])
    return p


def config_from_args(ns) -> RunConfig:
    names = {f.name for f in dataclasses.fields(RunConfig)}
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in names})


class Table:
    def __init__(self, columns, diagnostics=None):
        self.columns = list(columns)
        self.rows = []
        self.diagnostics = diagnostics or {}

    def add(self, *vals):
        self.rows.append(list(vals))

    def split(self):
        """Expand complex-valued columns into re/im pairs."""
        cplx = [any(isinstance(r[i], complex) for r in self.rows) for i in range(len(self.columns))]
        cols = []
        for name, c in zip(self.columns, cplx):
            cols += [name + "_re", name + "_im"] if c else [name]
        rows = []
        for r in self.rows:
            out = []
            for v, c in zip(r, cplx):
                if c:
                    v = complex(v)
                    out += [v.real, v.imag]
                else:
                    out.append(v)
            rows.append(out)
        return cols, rows


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v) + 0.0)
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v


def render(table: Table, cfg: RunConfig) -> str:
    cols, rows = table.split()
    if cfg.format == "json":
        obj = dict(config=json.loads(cfg.to_json()), version=__version__, columns=cols,
                   rows=[[_jsonable(v) for v in r] for r in rows], diagnostics=_jsonable(table.diagnostics))
        return json.dumps(obj, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    buf.write("# fhsoftedge %s\n" % __version__)
    buf.write("# %s\n" % HEADERS[cfg.subcommand])
    buf.write("# config: %s\n" % cfg.to_json())
    for k in sorted(table.diagnostics):
        buf.write("# %s: %s\n" % (k, json.dumps(_jsonable(table.diagnostics[k]), sort_keys=True)))
    buf.write(",".join(cols) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands


def cmd_recurrence(cfg):
    from .orthopoly import stieltjes_recurrence
    from .weight_quad import WeightSpec

    n = cfg.n[0]
    t = stieltjes_recurrence(WeightSpec(cfg.alpha, cfg.mu, cfg.omega), n, cfg.precision)
    tab = Table(["k", "a_k", "b2_k", "log_h_k"], dict(error_estimate=t.error_estimate, precision=t.precision))
    for k in range(n):
        tab.add(k, _num(t.a[k]), _num(t.b2[k]), _num(t.log_h[k]))
    return tab


def _num(v):
    v = complex(v)
    return v.real if v.imag == 0 else v


def _params(cfg):
    from .painleve import PainleveParams

    return PainleveParams(cfg.alpha, cfg.omega)


def cmd_sigma(cfg):
    from .painleve import first_integral, solve_sigma

    sol = solve_sigma(_params(cfg), cfg.s_min, cfg.s_max, cfg.tol, cfg.n_grid)
    res = first_integral(sol.grid, sol.sigma, sol.sigma1, sol.sigma2, cfg.alpha)
    tab = Table(["s", "sigma", "sigma1", "u", "residual"], dict(route=sol.diagnostics.get("route"),
                                                                residual_bound=sol.residual_bound))
    for i, s in enumerate(sol.grid):
        tab.add(float(s), _num(sol.sigma[i]), _num(sol.sigma1[i]), _num(-sol.sigma1[i]), abs(res[i]))
    return tab


def cmd_p34(cfg):
    from .painleve import p34_from_sigma, solve_sigma

    sol = solve_sigma(_params(cfg), cfg.s_min, cfg.s_max, cfg.tol, cfg.n_grid)
    d = p34_from_sigma(sol)
    tab = Table(["s", "u", "u1", "u2", "residual"], dict(route=sol.diagnostics.get("route")))
    for i, s in enumerate(d["s"]):
        tab.add(float(s), _num(d["u"][i]), _num(d["u1"][i]), _num(d["u2"][i]), float(d["residual"][i]))
    return tab


def cmd_pii(cfg):
    from .painleve import S_SCALE, solve_pii_airy, solve_pii_alpha, u_from_pii

    if cfg.family == "airy":
        sol = solve_pii_airy(cfg.k, (cfg.s_min, cfg.s_max), cfg.tol, cfg.n_grid)
        tab = Table(["x", "q", "q1", "int_q2", "int_xq2"], dict(last_good=sol.last_good))
        for i, x in enumerate(sol.grid):
            tab.add(float(x), _num(sol.q[i]), _num(sol.q1[i]), _num(sol.int_q2[i]), _num(sol.int_xq2[i]))
        return tab
    sol = solve_pii_alpha(_params(cfg), (cfg.s_min, cfg.s_max), cfg.tol, cfg.n_grid)
    s = np.linspace(cfg.s_min, cfg.s_max, cfg.n_grid)
    s = s[-S_SCALE * s <= sol.last_good + 1e-12]
    tab = Table(["s", "x", "q", "q1", "u"], dict(last_good_x=sol.last_good, poles=[complex(p) for p in sol.poles]))
    for v in s:
        x = -S_SCALE * v
        q, q1 = sol.evaluate(x)
        tab.add(float(v), float(x), _num(np.ravel(q)[0]), _num(np.ravel(q1)[0]), _num(np.ravel(u_from_pii(sol, v))[0]))
    return tab


def cmd_kernel(cfg):
    from .kernel import psi_kernel, psi_solve
    from .painleve import solve_sigma

    params = _params(cfg)
    pts = cfg.points
    tab = Table(["s", "v1", "v2", "K"])
    for s in cfg.s:
        sig = solve_sigma(params, min(-10.0, s - 1), max(8.0, s + 1), cfg.tol)
        psi = psi_solve(s, params, sig, min(min(pts), -1.0) - 1, max(max(pts), 1.0) + 1, cfg.tol)
        tab.diagnostics["routes_s=%r" % s] = list(psi.diagnostics["routes"])
        for a in pts:
            for b in pts:
                tab.add(float(s), a, b, _num(psi_kernel(psi, a, b)))
    return tab


def _converge_job(args):
    target, alpha, omega, s, n, v, precision = args
    from .kernel import kernel_scaling_report
    from .orthopoly import hankel_scaling_report, recurrence_scaling_report

    if target == "hankel":
        reps = [hankel_scaling_report(alpha, omega, s, [n], precision=precision)]
    elif target == "recurrence":
        reps = list(recurrence_scaling_report(alpha, omega, s, [n], precision=precision))
    else:
        reps = [kernel_scaling_report(alpha, omega, s, v[0], v[1], [n], precision=precision)]
    return [(r.theorem_id, complex(np.ravel(r.finite_n_values)[0]), complex(np.ravel(r.prediction)[0]),
             float(np.ravel(r.errors)[0])) for r in reps]


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_converge(cfg):
    if cfg.target == "kernel" and (len(cfg.v) != 2 or 0 in cfg.v):
        raise ValidationError("--v needs two nonzero values")
    jobs = [(cfg.target, cfg.alpha, cfg.omega, s, n, cfg.v, cfg.precision) for s in cfg.s for n in cfg.n]
    out = _map(_converge_job, jobs, cfg.workers)
    tab = Table(["quantity", "s", "n", "finite_n", "limit", "error"])
    for (_, _, _, s, n, _, _), rows in zip(jobs, out):
        for name, fin, pred, err in rows:
            tab.add(name, float(s), int(n), _num(fin), _num(pred), err)
    return tab


def _cdf_job(args):
    route, alpha, omega, s, n, precision = args
    from .distributions import finite_n_cdf, thinned_conditioned_cdf, tracy_widom_cdf

    if route == "finite":
        val, label = finite_n_cdf(s, n, alpha, omega, precision, with_label=True)
        return _num(val), label
    if route == "pii":
        if alpha != 0 or omega.imag != 0:
            raise ValidationError("the PII route needs alpha = 0 and real omega in [0, 1]")
        if omega == 0:
            return tracy_widom_cdf(s, "pii"), "probability"
        from .distributions import ablowitz_segur_cdf

        if not 0 <= omega.real <= 1:
            raise ValidationError("omega must be in [0, 1]")
        return ablowitz_segur_cdf(s, math.sqrt(1 - omega.real)), "probability"
    return thinned_conditioned_cdf(s, alpha, omega), "probability"


def cmd_cdf(cfg):
    ns = cfg.n if cfg.route == "finite" else [None]
    jobs = [(cfg.route, cfg.alpha, cfg.omega, s, n, cfg.precision) for n in ns for s in cfg.s]
    out = _map(_cdf_job, jobs, cfg.workers)
    tab = Table(["s", "n", "F", "label"])
    for (_, _, _, s, n, _), (val, label) in zip(jobs, out):
        tab.add(float(s), -1 if n is None else int(n), val, label)
    return tab


COMMANDS = dict(recurrence=cmd_recurrence, sigma=cmd_sigma, p34=cmd_p34, pii=cmd_pii, kernel=cmd_kernel,
                converge=cmd_converge, cdf=cmd_cdf)


def run(cfg: RunConfig) -> str:
    return render(COMMANDS[cfg.subcommand](cfg), cfg)


def _exit_code(exc):
    for cls in (PrecisionError, ValidationError, SolverError):
        if isinstance(exc, cls):
            return EXIT_CODES[cls]
    return 1


def main(argv=None):
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    try:
        text = run(cfg)
    except FHError as exc:
        err = dict(error=type(exc).__name__, message=str(exc), diagnostics=_jsonable(exc.diagnostics))
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return _exit_code(exc)
    path = cfg.output
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = os.path.join(os.environ[OUTPUT_DIR_ENV], "%s.%s" % (cfg.subcommand, cfg.format))
    if path is None:
        sys.stdout.write(text)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
