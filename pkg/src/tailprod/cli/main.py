"""Command-line driver: one config file in, one experiment out.

Exit codes: 0 success, 2 config/model-validation failure, 3 runtime error.
Output files are written atomically and are byte-identical across reruns
with the same seed, regardless of ``--threads``; wall time goes to stderr.
"""

import argparse
import json
import math
import platform
import sys
import time

import numpy
import scipy

from ..engine import DEFAULT_BLOCK_SIZE, block_layout
from ..errors import ConfigError, NotCdError, TailprodError, ValidationError
from ..estimators import (
    breiman_constant,
    breiman_constant_mc,
    cd_diagnostic,
    tail_ratio_mc,
)
from ..ruin import RiskModel, psi_finite_mc, psi_infinite_mc, term_tail_mc
from . import charts
from .config import COMMANDS, canonical_json, config_sha256, parse_config

__version__ = "0.1.0"


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _sanitize(obj):
    """Make a structure JSON-strict: numpy scalars become natives and
    non-finite floats become strings."""
    if isinstance(obj, numpy.bool_):
        return bool(obj)
    if isinstance(obj, numpy.integer):
        return int(obj)
    if isinstance(obj, numpy.floating):
        obj = float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _manifest(cfg, command, n_samples=None):
    manifest = {
        "command": command,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "config_sha256": config_sha256(cfg),
        "versions": {
            "tailprod": __version__,
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
    }
    if n_samples is not None:
        manifest["block_size"] = DEFAULT_BLOCK_SIZE
        manifest["n_blocks"] = len(block_layout(n_samples, DEFAULT_BLOCK_SIZE))
    return manifest


def _tail_ratio_rows(report):
    rows = []
    for s in report.stats:
        rows.append([s.x, s.n_samples, s.hits, s.p_hat, s.ratio, s.ci_lo, s.ci_hi,
                     report.predicted_constant])
    return rows


TAIL_RATIO_HEADER = ["x", "n_samples", "hits", "p_hat", "ratio", "ci_lo", "ci_hi",
                     "predicted_constant"]


def _dispatch(cfg, workers):
    """Run the configured experiment; returns (result_dict, csv_text, chart, exit0)."""
    command, params = cfg.command, cfg.params
    model = cfg.build_model()

    if command == "validate":
        report = model.validate()
        csv_text = _csv(["check", "passed", "mandatory", "detail"],
                        [[c.name, c.passed, c.mandatory, c.detail.replace(",", ";")]
                         for c in report.checks])
        return {"validation": report.as_dict()}, csv_text, None, report.ok

    model.require_valid()

    if command == "breiman":
        if params["method"] == "monte_carlo":
            value, stderr = breiman_constant_mc(
                model, params["alpha"], n_samples=params["n_samples"], seed=cfg.seed)
            result = {"alpha": params["alpha"], "method": "monte_carlo",
                      "value": value, "stderr": stderr,
                      "n_samples": params["n_samples"]}
            rows = [[params["alpha"], "monte_carlo", value, stderr]]
        else:
            value = breiman_constant(model, params["alpha"])
            result = {"alpha": params["alpha"], "method": "quadrature", "value": value}
            rows = [[params["alpha"], "quadrature", value, None]]
        return ({"result": result},
                _csv(["alpha", "method", "value", "stderr"], rows), None, True)

    if command == "tail-ratio":
        report = tail_ratio_mc(model, params["thresholds"], params["n_samples"],
                               cfg.seed, workers=workers)
        return ({"result": report.as_dict(), "n_samples": report.n_samples},
                _csv(TAIL_RATIO_HEADER, _tail_ratio_rows(report)), report, True)

    if command == "cd-check":
        diag = cd_diagnostic(model, params["x_grid"], params["policy"],
                             y_max=params["y_max"])
        rows = [[r.x, r.sup_deviation, r.argmax_y, diag.verdict] for r in diag.rows]
        return ({"result": diag.as_dict()},
                _csv(["x", "sup_deviation", "argmax_y", "verdict"], rows), diag, True)

    if command == "ruin":
        risk = RiskModel(model)
        if params["n"] == "inf":
            result = psi_infinite_mc(risk, params["x_grid"], params["n_samples"],
                                     cfg.seed, tail_tol=params["tail_tol"],
                                     workers=workers)
            n_label = "inf"
        else:
            result = psi_finite_mc(risk, params["x_grid"], params["n"],
                                   params["n_samples"], cfg.seed, workers=workers)
            n_label = params["n"]
        rows = [[r.x, n_label, result.n_samples, r.hits, r.psi_hat, r.stderr,
                 r.prediction, r.ratio_to_prediction] for r in result.rows]
        payload = result.as_dict()
        payload["truncation_depth"] = result.n if params["n"] == "inf" else None
        return ({"result": payload},
                _csv(["x", "n", "N", "hits", "psi_hat", "stderr", "prediction",
                      "ratio"], rows), result, True)

    if command == "term-tail":
        risk = RiskModel(model)
        report = term_tail_mc(risk, params["i"], params["x_grid"],
                              params["n_samples"], cfg.seed, workers=workers)
        return ({"result": report.as_dict(), "term_index": params["i"]},
                _csv(TAIL_RATIO_HEADER, _tail_ratio_rows(report)), report, True)

    raise ConfigError(f"unknown command {command!r}")


def run(cfg, workers: int = 1) -> int:
    started = time.perf_counter()
    payload, csv_text, chart_source, ok = _dispatch(cfg, workers)
    n_samples = cfg.params.get("n_samples")
    document = {"manifest": _manifest(cfg, cfg.command, n_samples)}
    document.update(payload)
    if cfg.output.get("json_path"):
        charts.write_atomic(cfg.output["json_path"],
                            json.dumps(_sanitize(document), sort_keys=True, indent=2) + "\n")
    if cfg.output.get("csv_path"):
        charts.write_atomic(cfg.output["csv_path"], csv_text)
    if cfg.output.get("svg_path"):
        if chart_source is None:
            raise ConfigError(f"the {cfg.command} command produces no chart")
        charts.render_chart(chart_source, cfg.output["svg_path"])
    elapsed = time.perf_counter() - started
    print(f"{cfg.command}: done in {elapsed:.3f}s "
          f"(seed={cfg.seed}, sha256={config_sha256(cfg)[:12]})", file=sys.stderr)
    if not cfg.output:
        print(canonical_json(_sanitize(document)))
    if not ok:
        print(f"{cfg.command}: validation failed", file=sys.stderr)
        return 2
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="tailprod",
        description="Product-tail and ruin-probability experiments from JSON configs")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run a {name} experiment")
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker count (never changes results)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with open(args.config) as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(data, expected_command=args.command)
        if args.seed is not None:
            cfg.seed = args.seed
        return run(cfg, workers=max(args.threads, 1))
    except (ConfigError, ValidationError, NotCdError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2
    except TailprodError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"{args.command}: unexpected error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
