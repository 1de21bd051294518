"""``psa`` command line: audit, fit, select, rotate, sample and simulate.

Exit status is 0 on success, 1 for usage errors and 2 for data or numerical
errors.
"""

import argparse
from dataclasses import dataclass
import sys

import numpy as np

from . import io, report
from .dynamics import DynamicsSpec, simulate_dynamics
from .errors import PsaError
from .family import Composition
from .interpret import rotate_block, sphere_sample
from .model import fit, sample, score
from .selection import Criterion, CriterionKind, audit, select
from .spectral import regularize, summarize

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

CRITERIA = [k.value for k in CriterionKind]
STRATEGIES = ["exhaustive", "threshold", "hierarchical", "fixed-d"]
DEFAULT_N_GRID = "20,50,100,200,500,1000,2000,5000,20000,50000"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    model_path: str | None = None
    criterion: str = "bic"
    strategy: str = "hierarchical"
    linkage: str = "centroid"
    d: int | None = None
    gamma: Composition | None = None
    standardize: bool = False
    remove_row_mean: bool = False
    transpose: bool = False
    regularize_eps: float | None = None
    seed: int = 0
    max_pairs: int = 25
    output_format: str = "table"
    output_path: str | None = None
    block: int = 1
    count: int = 100
    sphere: bool = False
    equally_spaced: bool = False
    max_iter: int = 1000
    tol: float = 1e-8
    eigenvalues: str = "10,9,7,4,0.5"
    n_grid: str = DEFAULT_N_GRID
    replications: int = 20

    def validate(self):
        cmd = self.command
        if cmd in ("audit", "fit", "select") and not self.input_path:
            raise UsageError(f"{cmd} needs --input")
        if cmd in ("rotate", "sample") and not self.model_path:
            if not self.input_path or self.gamma is None:
                raise UsageError(f"{cmd} needs --model, or --input together with --type")
        if cmd == "fit" and self.gamma is None:
            raise UsageError("fit needs --type")
        if self.criterion == "all" and cmd != "audit":
            raise UsageError("--criterion all is only valid for audit")
        if cmd == "select":
            pairwise = self.criterion in ("nrt1", "nrt2")
            if pairwise and self.strategy in ("exhaustive", "hierarchical"):
                raise UsageError(
                    f"{self.criterion} is a pairwise rule; use it with --strategy threshold "
                    "or pick bic/aic/aicc"
                )
            if self.strategy == "fixed-d" and self.d is None:
                raise UsageError("--strategy fixed-d needs --d")
        if self.regularize_eps is not None and not self.regularize_eps > 0:
            raise UsageError("--regularize must be positive")
        if self.max_pairs < 1:
            raise UsageError("--max-pairs must be at least 1")
        if self.count < 1:
            raise UsageError("--count must be positive")
        if self.block < 1:
            raise UsageError("--block is 1-based and must be at least 1")
        if self.equally_spaced and not self.sphere:
            raise UsageError("--equally-spaced only applies with --sphere")


def build_parser():
    parser = _Parser(prog="psa", description="Principal subspace analysis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_flags(p):
        p.add_argument("--input", dest="input_path", metavar="PATH", help="CSV, rows are samples")
        p.add_argument("--standardize", action="store_true", help="scale columns to unit variance")
        p.add_argument("--remove-row-mean", action="store_true",
                       help="subtract each sample's mean over features")
        p.add_argument("--transpose", action="store_true", help="rows of the file are features")
        p.add_argument("--regularize", dest="regularize_eps", type=float, metavar="EPS",
                       help="add EPS to every covariance eigenvalue")

    def output_flags(p, default="table"):
        p.add_argument("--format", dest="output_format", choices=["table", "json", "csv"],
                       default=default)
        p.add_argument("--output", dest="output_path", metavar="PATH")

    def gamma_flag(p):
        p.add_argument("--type", dest="gamma", type=_composition, metavar="A,B,...",
                       help="model type, e.g. 2,3")

    p = sub.add_parser("audit", help="relative eigengap audit of adjacent eigenvalue pairs")
    data_flags(p)
    p.add_argument("--criterion", choices=CRITERIA + ["all"], default="bic")
    p.add_argument("--max-pairs", type=int, default=25)
    output_flags(p)

    p = sub.add_parser("fit", help="fit a PSA model of a given type")
    data_flags(p)
    gamma_flag(p)
    output_flags(p)

    p = sub.add_parser("select", help="select a PSA type")
    data_flags(p)
    p.add_argument("--criterion", choices=CRITERIA, default="bic")
    p.add_argument("--strategy", choices=STRATEGIES, default="hierarchical")
    p.add_argument("--linkage", choices=["single", "centroid"], default="centroid")
    p.add_argument("--d", type=int, help="number of distinct eigenvalues (fixed-d)")
    output_flags(p)

    p = sub.add_parser("rotate", help="varimax-rotate one principal subspace")
    data_flags(p)
    gamma_flag(p)
    p.add_argument("--model", dest="model_path", metavar="PATH", help="model JSON from fit")
    p.add_argument("--block", type=int, default=1, help="1-based block index")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-8)
    output_flags(p, default="csv")

    p = sub.add_parser("sample", help="draw samples from a model or from a subspace sphere")
    data_flags(p)
    gamma_flag(p)
    p.add_argument("--model", dest="model_path", metavar="PATH", help="model JSON from fit")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sphere", action="store_true",
                   help="sample the unit sphere of --block instead of the model")
    p.add_argument("--block", type=int, default=1, help="1-based block index for --sphere")
    p.add_argument("--equally-spaced", action="store_true",
                   help="with --sphere on a 2-D block, emit equally spaced angles")
    output_flags(p, default="csv")

    p = sub.add_parser("simulate", help="BIC selection frequencies versus sample size")
    p.add_argument("--eigenvalues", default="10,9,7,4,0.5")
    p.add_argument("--n-grid", default=DEFAULT_N_GRID)
    p.add_argument("--replications", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    output_flags(p)
    return parser


def _composition(text):
    try:
        return Composition.parse(text)
    except PsaError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _float_list(text, flag):
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"{flag} must be comma-separated numbers, got {text!r}") from None


def _summary(cfg):
    x, _ = io.load_csv(cfg.input_path, standardize=cfg.standardize,
                       transpose=cfg.transpose, remove_row_mean=cfg.remove_row_mean)
    s = summarize(x)
    if cfg.regularize_eps is not None:
        s = regularize(s, cfg.regularize_eps)
    return x, s


def _model(cfg):
    if cfg.model_path:
        return io.load_model(cfg.model_path)
    _, s = _summary(cfg)
    return fit(s, cfg.gamma)


def _check_block(model, block):
    if block > model.d:
        raise UsageError(f"--block {block} exceeds the {model.d} blocks of type {model.gamma}")
    return block - 1


def cmd_audit(cfg):
    _, s = _summary(cfg)
    kinds = CRITERIA if cfg.criterion == "all" else [cfg.criterion]
    reports = [audit(s, Criterion.for_summary(k, s), cfg.max_pairs) for k in kinds]
    if cfg.output_format == "json":
        return io.dumps({"n": s.n, "p": s.p, "reports": [r.to_dict() for r in reports]})
    if cfg.output_format == "csv":
        rows = [[r.criterion.kind.value, pair.j, io.format_float(pair.ell_j),
                 io.format_float(pair.ell_j1),
                 "" if pair.delta is None else io.format_float(pair.delta),
                 "" if pair.threshold is None else io.format_float(pair.threshold),
                 pair.verdict]
                for r in reports for pair in r.pairs]
        header = "criterion,j,ell_j,ell_j1,delta,threshold,verdict\n"
        return header + "".join(",".join(map(str, row)) + "\n" for row in rows)
    return report.render_audit(reports, s.n, s.p)


def cmd_fit(cfg):
    _, s = _summary(cfg)
    model = fit(s, cfg.gamma)
    sc = score(s, cfg.gamma)
    if cfg.output_format == "json":
        return io.dumps({"model": model.to_dict(), "score": sc.to_dict(),
                         "boundary_degenerate": model.boundary_degenerate})
    if cfg.output_format == "csv":
        return io.matrix_csv(model.basis)
    return report.render_fit(model, sc)


def cmd_select(cfg):
    _, s = _summary(cfg)
    crit = Criterion.for_summary(cfg.criterion, s)
    result = select(s, cfg.strategy, crit, linkage=cfg.linkage, d=cfg.d)
    if cfg.output_format == "json":
        return io.dumps(result.to_dict())
    if cfg.output_format == "csv":
        header = "type,kappa,log_likelihood,bic,aic,aicc,chosen\n"
        rows = [f"{g},{sc.kappa},{io.format_float(sc.log_likelihood)},{io.format_float(sc.bic)},"
                f"{io.format_float(sc.aic)},{'' if sc.aicc is None else io.format_float(sc.aicc)},"
                f"{int(g == result.chosen)}\n" for g, sc in result.scores]
        return header + "".join(rows)
    return report.render_selection(result)


def cmd_rotate(cfg):
    model = _model(cfg)
    k = _check_block(model, cfg.block)
    rotated, result = rotate_block(model, k, max_iter=cfg.max_iter, tol=cfg.tol)
    if cfg.output_format == "json":
        return io.dumps({
            "block": cfg.block,
            "rotated_frame": result.rotated_frame.tolist(),
            "rotation": result.rotation.tolist(),
            "criterion_trace": result.criterion_trace,
            "converged": result.converged,
            "model": rotated.to_dict(),
        })
    return io.matrix_csv(result.rotated_frame)


def cmd_sample(cfg):
    model = _model(cfg)
    if cfg.sphere:
        k = _check_block(model, cfg.block)
        points = sphere_sample(model.frames[k], cfg.count, seed=cfg.seed,
                               equally_spaced=cfg.equally_spaced)
    else:
        points = sample(model, cfg.count, seed=cfg.seed)
    if cfg.output_format == "json":
        return io.dumps({"samples": points.tolist()})
    return io.matrix_csv(points)


def cmd_simulate(cfg):
    lam = _float_list(cfg.eigenvalues, "--eigenvalues")
    grid = _float_list(cfg.n_grid, "--n-grid")
    if any(n != int(n) for n in grid):
        raise UsageError("--n-grid must hold integers")
    spec = DynamicsSpec(lam, tuple(int(n) for n in grid), cfg.replications, cfg.seed)
    result = simulate_dynamics(spec)
    if cfg.output_format == "json":
        return io.dumps(result.to_dict())
    if cfg.output_format == "csv":
        lines = ["n,type,count,frequency,mean_bic\n"]
        for n in spec.n_grid:
            for g in sorted(result.mean_bic[n], key=lambda g: (g.d, g.parts)):
                c = result.counts[n].get(g, 0)
                lines.append(f"{n},{g},{c},{io.format_float(c / spec.replications)},"
                             f"{io.format_float(result.mean_bic[n][g])}\n")
        return "".join(lines)
    return report.render_dynamics(result)


COMMANDS = {
    "audit": cmd_audit,
    "fit": cmd_fit,
    "select": cmd_select,
    "rotate": cmd_rotate,
    "sample": cmd_sample,
    "simulate": cmd_simulate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    fields = RunConfig.__dataclass_fields__
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in fields})
    try:
        cfg.validate()
        text = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"psa {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PsaError as exc:
        print(f"psa {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
